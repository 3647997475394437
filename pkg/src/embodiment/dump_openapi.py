"""Write the service's OpenAPI schema to a file.

    python3 -m embodiment.dump_openapi docs/openapi.json
"""

from __future__ import annotations

import json
import sys

from .clips import ClipLibrary
from .pose import BodyPart, Joint, Pose, Skeleton
from .service import ProjectState, create_app


def main(argv=None) -> int:
    argv = sys.argv[1:] if argv is None else argv
    out = argv[0] if argv else "docs/openapi.json"
    skeleton = Skeleton((Joint("root", None, BodyPart.SPINE),))
    library = ClipLibrary(skeleton=skeleton, base_pose=Pose.identity(1), clips={})
    app = create_app(ProjectState(library))
    with open(out, "w", encoding="utf-8") as fh:
        json.dump(app.openapi(), fh, indent=2, sort_keys=True)
        fh.write("\n")
    print(f"wrote {out}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
