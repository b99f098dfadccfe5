"""Finitely supported Fourier coefficient fields on Z^n."""
from __future__ import annotations

from typing import Iterable, Iterator, Mapping, Optional, Sequence

from .lattice import neg, norm2
from .operator import check_frequency
from .scalar import ZERO, GaussianRational, coerce, conj, is_exact, modulus


class CoefficientField:
    """Map xi -> coefficient with finite support; absent keys mean zero.

    Values are all exact (GaussianRational) or all complex.  With
    ``real_valued=True`` the field must satisfy conj(c(xi)) == c(-xi).
    """

    __slots__ = ("dim", "_coeffs", "real_valued")

    def __init__(self, dim: int, coeffs: Optional[Mapping] = None, real_valued: bool = False):
        if dim < 1:
            raise ValueError("dim must be >= 1")
        self.dim = dim
        clean = {}
        for xi, c in (coeffs or {}).items():
            clean[check_frequency(xi, dim)] = coerce(c)
        if not all(is_exact(c) for c in clean.values()):
            clean = {k: complex(v) for k, v in clean.items()}
        self._coeffs = clean
        self.real_valued = real_valued
        if real_valued:
            bad = self.reality_defect()
            scale = max((modulus(c) for c in clean.values()), default=0.0)
            if bad > 1e-9 * (1 + scale):
                raise ValueError("field flagged real-valued but conj(c(xi)) != c(-xi)")

    # mapping protocol ----------------------------------------------------
    def __getitem__(self, xi):
        return self._coeffs.get(tuple(xi), ZERO)

    def __contains__(self, xi):
        return tuple(xi) in self._coeffs

    def __iter__(self) -> Iterator[tuple[int, ...]]:
        return iter(self._coeffs)

    def __len__(self):
        return len(self._coeffs)

    def items(self):
        return self._coeffs.items()

    def support(self) -> list[tuple[int, ...]]:
        return sorted(self._coeffs, key=lambda x: (norm2(x), x))

    @property
    def exact(self) -> bool:
        return all(isinstance(c, GaussianRational) for c in self._coeffs.values())

    def to_float(self) -> CoefficientField:
        return CoefficientField(self.dim, {k: complex(v) for k, v in self._coeffs.items()})

    def __eq__(self, other):
        if not isinstance(other, CoefficientField) or other.dim != self.dim:
            return NotImplemented
        keys = set(self._coeffs) | set(other._coeffs)
        return all(self[k] == other[k] for k in keys)

    def __repr__(self):
        return f"CoefficientField(dim={self.dim}, support={len(self._coeffs)})"

    # helpers -------------------------------------------------------------
    def restrict(self, keys: Iterable[Sequence[int]]) -> CoefficientField:
        keys = {tuple(k) for k in keys}
        return CoefficientField(self.dim, {k: v for k, v in self._coeffs.items() if k in keys})

    def sup_distance(self, other: CoefficientField) -> float:
        keys = set(self._coeffs) | set(other._coeffs)
        return max((modulus(self[k] - other[k]) for k in keys), default=0.0)

    def sup_norm(self) -> float:
        return max((modulus(c) for c in self._coeffs.values()), default=0.0)

    def reality_defect(self) -> float:
        """max |conj(c(xi)) - c(-xi)| over the support."""
        return max(
            (modulus(conj(self[k]) - self[neg(k)]) for k in set(self._coeffs) | {neg(k) for k in self._coeffs}),
            default=0.0,
        )
