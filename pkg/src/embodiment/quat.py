"""Quaternion helpers for joint rotations.

Quaternions are stored scalar-first, shape (..., 4) = [w, x, y, z].
All functions broadcast over leading axes so a whole skeleton
(J, 4) can be processed in one call.
"""

from __future__ import annotations

import numpy as np

IDENTITY = np.array([1.0, 0.0, 0.0, 0.0])


def identity(n: int) -> np.ndarray:
    """Array of n identity quaternions, shape (n, 4)."""
    out = np.zeros((n, 4))
    out[:, 0] = 1.0
    return out


def normalize(q: np.ndarray) -> np.ndarray:
    norm = np.linalg.norm(q, axis=-1, keepdims=True)
    if np.any(norm < 1e-12):
        raise ValueError("cannot normalize a zero quaternion")
    return q / norm


def conjugate(q: np.ndarray) -> np.ndarray:
    out = np.array(q, dtype=float, copy=True)
    out[..., 1:] *= -1.0
    return out


def multiply(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Hamilton product a*b (apply b in a's local frame)."""
    aw, ax, ay, az = a[..., 0], a[..., 1], a[..., 2], a[..., 3]
    bw, bx, by, bz = b[..., 0], b[..., 1], b[..., 2], b[..., 3]
    return np.stack(
        [
            aw * bw - ax * bx - ay * by - az * bz,
            aw * bx + ax * bw + ay * bz - az * by,
            aw * by - ax * bz + ay * bw + az * bx,
            aw * bz + ax * by - ay * bx + az * bw,
        ],
        axis=-1,
    )


def from_axis_angle(axis, angle: float) -> np.ndarray:
    axis = np.asarray(axis, dtype=float)
    axis = axis / np.linalg.norm(axis)
    half = 0.5 * angle
    return np.concatenate([[np.cos(half)], np.sin(half) * axis])


def angle_between(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Geodesic rotation angle in radians, sign-of-cover agnostic."""
    dot = np.abs(np.sum(a * b, axis=-1))
    return 2.0 * np.arccos(np.clip(dot, -1.0, 1.0))


def scale(q: np.ndarray, t: float) -> np.ndarray:
    """Fractional rotation: interpolate from identity toward q along the
    shortest arc. scale(q, 0) = identity, scale(q, 1) = q (up to sign)."""
    q = np.asarray(q, dtype=float)
    # flip to the hemisphere with w >= 0 so the arc from identity is shortest
    sign = np.where(q[..., 0:1] < 0.0, -1.0, 1.0)
    q = q * sign
    sin_half = np.linalg.norm(q[..., 1:], axis=-1)
    half = np.arctan2(sin_half, q[..., 0])
    out = np.zeros_like(q)
    out[..., 0] = np.cos(t * half)
    safe = sin_half > 1e-12
    axis = np.zeros_like(q[..., 1:])
    axis[safe] = q[..., 1:][safe] / sin_half[safe][..., None]
    out[..., 1:] = np.sin(t * half)[..., None] * axis
    return out


def slerp(a: np.ndarray, b: np.ndarray, t: float) -> np.ndarray:
    """Shortest-arc spherical interpolation between unit quaternions."""
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    dot = np.sum(a * b, axis=-1, keepdims=True)
    b = np.where(dot < 0.0, -b, b)
    # relative rotation from a to b, scaled, then reapplied
    rel = multiply(conjugate(a), b)
    return normalize(multiply(a, scale(rel, t)))
