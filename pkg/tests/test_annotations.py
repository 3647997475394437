import pytest

from embodiment.annotations import (
    AnnotationParseError,
    HEAD_ACTION_SEMANTIC,
    parse,
    serialize,
    to_requests,
)
from embodiment.actions import AbstractActionRequest
from embodiment.clips import Layer, TaxonomyKind


def test_header_only_file():
    doc = parse("duration\t42.5\n")
    assert doc.duration == 42.5
    assert doc.interval_count() == 0


def test_single_record_with_semantic():
    doc = parse("duration\t10\nleft_arm\t1.0\t2.5\tgesture:positive\n")
    (iv,) = doc.tiers["left_arm"]
    assert (iv.start, iv.end, iv.label, iv.semantic) == (1.0, 2.5, "gesture", "positive")


def test_comments_and_blank_lines_ignored():
    text = "# a comment\n\nduration\t10\n# another\nleft_arm\t0\t1\tfidget\n"
    assert parse(text).interval_count() == 1


@pytest.mark.parametrize(
    "text,line,needle",
    [
        ("duration\t10\nleft_arm\t1\t2\n", 2, "expected tier"),
        ("duration\t10\nwings\t1\t2\tgesture\n", 2, "unknown tier"),
        ("duration\t10\nleft_arm\t1\t2\tjuggling\n", 2, "illegal label"),
        ("duration\t10\nhead_action\t1\t2\tgesture\n", 2, "illegal label"),
        ("duration\t10\nleft_arm\t2\t2\tgesture\n", 2, "must be >"),
        ("duration\t10\nleft_arm\t1\t20\tgesture\n", 2, "outside media duration"),
        ("left_arm\t1\t2\tgesture\n", 1, "before the duration header"),
        ("duration\t10\nduration\t11\n", 2, "duplicate duration"),
        ("duration\tten\n", 1, "bad duration"),
    ],
)
def test_parse_errors_carry_line_numbers(text, line, needle):
    with pytest.raises(AnnotationParseError) as err:
        parse(text)
    assert err.value.line == line
    assert needle in str(err.value)


def test_overlap_rejected_naming_second_line():
    text = "duration\t10\nleft_arm\t1\t3\tgesture\nleft_arm\t2\t4\tfidget\n"
    with pytest.raises(AnnotationParseError) as err:
        parse(text)
    assert err.value.line == 3
    assert "overlap" in str(err.value)


def test_overlap_on_different_tiers_is_fine():
    text = "duration\t10\nleft_arm\t1\t3\tgesture\nright_arm\t2\t4\tfidget\n"
    assert parse(text).interval_count() == 2


def test_records_sorted_on_parse():
    text = "duration\t10\nleft_arm\t5\t6\tgesture\nleft_arm\t1\t2\tfidget\n"
    doc = parse(text)
    assert [iv.start for iv in doc.tiers["left_arm"]] == [1.0, 5.0]


def test_toy_fixture_counts(fixtures_dir):
    doc = parse((fixtures_dir / "toy_conversation.tsvann").read_text())
    assert doc.duration == 60.0
    # counted by hand from the fixture file
    assert len(doc.tiers["head_stance"]) == 2
    assert len(doc.tiers["head_action"]) == 6
    assert len(doc.tiers["left_arm"]) == 8
    assert len(doc.tiers["right_arm"]) == 6
    assert len(doc.tiers["legs"]) == 2
    assert doc.interval_count() == 24


def test_parse_serialize_parse_fixpoint(fixtures_dir):
    for name in ("toy_conversation.tsvann", "long_conversation.tsvann"):
        doc = parse((fixtures_dir / name).read_text())
        text = serialize(doc)
        again = parse(text)
        assert again.duration == doc.duration
        assert again.tiers == doc.tiers
        assert serialize(again) == text


class TestToRequests:
    def test_empty_doc(self):
        assert to_requests(parse("duration\t5\n")) == []

    def test_nodding_maps_to_head_gesture(self):
        doc = parse("duration\t10\nhead_action\t1\t2\tnodding\n")
        (req,) = to_requests(doc)
        assert isinstance(req, AbstractActionRequest)
        assert req.kind == TaxonomyKind.GESTURE
        assert req.layer == Layer.HEAD
        assert req.semantic == HEAD_ACTION_SEMANTIC["nodding"] == "positive-nod"
        assert req.start == 1.0 and req.duration_hint == 1.0

    def test_arm_tiers_carry_side(self):
        doc = parse(
            "duration\t10\nleft_arm\t0\t1\tgesture\nright_arm\t2\t3\tstance-transition\n"
        )
        left, right = to_requests(doc)
        assert left.layer == Layer.ARMS and left.side == "left"
        assert right.kind == TaxonomyKind.STANCE_TRANSITION and right.side == "right"

    def test_legs_map_to_body_layer(self):
        doc = parse("duration\t10\nlegs\t0\t2\tstance-transition\n")
        (req,) = to_requests(doc)
        assert req.layer == Layer.BODY
        assert req.kind == TaxonomyKind.STANCE_TRANSITION

    def test_count_and_timing_preserved(self, fixtures_dir):
        doc = parse((fixtures_dir / "toy_conversation.tsvann").read_text())
        requests = to_requests(doc)
        assert len(requests) == doc.interval_count()
        intervals = sorted(
            (iv.start, iv.end) for tier in doc.tiers.values() for iv in tier
        )
        got = sorted((r.start, r.start + r.duration_hint) for r in requests)
        assert got == pytest.approx(intervals)
