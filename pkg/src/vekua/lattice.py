"""Integer frequency enumeration on Z^n."""
from __future__ import annotations

import math
from typing import Iterable, Sequence

import numpy as np


def norm(xi: Sequence[int]) -> float:
    return math.sqrt(sum(c * c for c in xi))


def norm2(xi: Sequence[int]) -> int:
    return sum(c * c for c in xi)


def neg(xi: Sequence[int]) -> tuple[int, ...]:
    return tuple(-c for c in xi)


def is_canonical(xi: Sequence[int]) -> bool:
    """True for the representative of {xi, -xi}: first nonzero coordinate
    positive, or xi = 0."""
    for c in xi:
        if c:
            return c > 0
    return True


def canonical(xi: Sequence[int]) -> tuple[int, ...]:
    xi = tuple(int(c) for c in xi)
    return xi if is_canonical(xi) else neg(xi)


def canonical_pairs(support: Iterable[Sequence[int]]) -> list[tuple[int, ...]]:
    """Canonical representatives covering support and its negation, sorted by
    norm then lexicographically."""
    reps = {canonical(xi) for xi in support}
    return sorted(reps, key=lambda x: (norm2(x), x))


def box_points(n: int, bound: int) -> np.ndarray:
    """All xi with max |xi_j| <= bound, shape (N, n)."""
    axis = np.arange(-bound, bound + 1, dtype=np.int64)
    grids = np.meshgrid(*([axis] * n), indexing="ij")
    return np.stack([g.ravel() for g in grids], axis=1)


def ball_points(n: int, R: float) -> np.ndarray:
    """All xi in Z^n with |xi| <= R, ordered by squared norm then
    lexicographically."""
    if n < 1:
        raise ValueError("dimension must be >= 1")
    bound = int(math.floor(R))
    pts = box_points(n, bound)
    sq = (pts * pts).sum(axis=1)
    r2 = R * R
    keep = sq <= r2 + 1e-9 * max(1.0, r2)
    pts, sq = pts[keep], sq[keep]
    order = np.lexsort(tuple(pts[:, j] for j in range(n - 1, -1, -1)) + (sq,))
    return pts[order]
