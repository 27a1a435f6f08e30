"""Small shared geometry helpers."""

from __future__ import annotations

import numpy as np

WORLD_UP = np.array([0.0, 0.0, 1.0])
WORLD_X = np.array([1.0, 0.0, 0.0])

# below this, normal x up is considered degenerate and world-x is used instead
_PARALLEL_EPS = 1e-6


def normalize(v: np.ndarray) -> np.ndarray:
    v = np.asarray(v, dtype=np.float64)
    n = np.linalg.norm(v)
    if n == 0.0:
        raise ValueError("cannot normalize a zero vector")
    return v / n


def orthonormal_frame(normal) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Right-handed orthonormal frame (u, v, n) for a given plane normal.

    u = normalize(n x world_up), falling back to n x world_x when the normal
    is (nearly) parallel to world up; v = n x u.
    """
    n = normalize(normal)
    u = np.cross(n, WORLD_UP)
    if np.linalg.norm(u) < _PARALLEL_EPS:
        u = np.cross(n, WORLD_X)
    u = normalize(u)
    v = np.cross(n, u)
    return u, v, n


def clip_segment_to_box(p0: np.ndarray, p1: np.ndarray, lo: np.ndarray, hi: np.ndarray):
    """Clip segment p0->p1 (p0 inside the box) at the box boundary.

    Returns ``(point, lam)`` where lam in [0, 1] is the segment fraction at
    the first exit; the crossed coordinate is set exactly onto the face.
    """
    d = p1 - p0
    lam = 1.0
    hit_axis, face = -1, 0.0
    for a in range(3):
        if d[a] > 0.0 and p1[a] > hi[a]:
            t = (hi[a] - p0[a]) / d[a]
            if t < lam:
                lam, hit_axis, face = t, a, hi[a]
        elif d[a] < 0.0 and p1[a] < lo[a]:
            t = (lo[a] - p0[a]) / d[a]
            if t < lam:
                lam, hit_axis, face = t, a, lo[a]
    q = p0 + lam * d
    if hit_axis >= 0:
        q[hit_axis] = face
    return np.minimum(np.maximum(q, lo), hi), lam
