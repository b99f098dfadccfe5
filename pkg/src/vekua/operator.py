"""Constant-coefficient operators L and the Vekua perturbation P = L - A - B conj."""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from enum import Enum
from fractions import Fraction
from typing import Iterable, Mapping, Optional, Sequence

import numpy as np

from .diophantine import RealNumberSpec
from .scalar import (
    GaussianRational,
    ZERO_TOL,
    coerce,
    is_exact,
    rotate_i,
    to_exact,
)

MultiIndex = tuple  # tuple[int, ...] of non-negative ints, length = dim


class DimensionError(ValueError):
    """A frequency or multi-index does not live in the operator's dimension."""


def check_multi_index(alpha: Sequence[int], dim: int) -> tuple[int, ...]:
    alpha = tuple(int(a) for a in alpha)
    if len(alpha) != dim:
        raise DimensionError(f"multi-index {alpha} has length {len(alpha)}, expected {dim}")
    if any(a < 0 for a in alpha):
        raise ValueError(f"multi-index {alpha} has a negative component")
    return alpha


def check_frequency(xi: Sequence[int], dim: int) -> tuple[int, ...]:
    xi = tuple(int(c) for c in xi)
    if len(xi) != dim:
        raise DimensionError(f"frequency {xi} has length {len(xi)}, expected {dim}")
    return xi


@dataclass(frozen=True, eq=True)
class OperatorSpec:
    """L = sum c_alpha d^alpha over 0 < |alpha| <= m.  Zero coefficients are dropped."""

    dim: int
    terms: Mapping[MultiIndex, object]

    def __post_init__(self):
        if self.dim < 1:
            raise ValueError("dim must be >= 1")
        clean = {}
        for alpha, c in self.terms.items():
            alpha = check_multi_index(alpha, self.dim)
            if sum(alpha) == 0:
                raise ValueError("constant terms belong in A, not in L")
            c = coerce(c)
            if c != 0:
                clean[alpha] = clean.get(alpha, 0) + c
        clean = {a: c for a, c in clean.items() if c != 0}
        if not clean:
            raise ValueError("L has no nonzero terms")
        if not all(is_exact(c) for c in clean.values()):
            clean = {a: complex(c) for a, c in clean.items()}
        object.__setattr__(self, "terms", dict(sorted(clean.items())))

    @property
    def order(self) -> int:
        return max(sum(a) for a in self.terms)

    @property
    def exact(self) -> bool:
        return all(isinstance(c, GaussianRational) for c in self.terms.values())

    def principal_terms(self) -> dict:
        m = self.order
        return {a: c for a, c in self.terms.items() if sum(a) == m}

    def to_float(self) -> OperatorSpec:
        return OperatorSpec(self.dim, {a: complex(c) for a, c in self.terms.items()})


@dataclass(frozen=True)
class VekuaOperator:
    """P u = L u - A u - B conj(u).  Either every coefficient is exact or all are floats."""

    L: OperatorSpec
    A: object = 0
    B: object = 0

    def __post_init__(self):
        A, B = coerce(self.A), coerce(self.B)
        L = self.L
        if not (L.exact and is_exact(A) and is_exact(B)):
            L = L if not L.exact else L.to_float()
            A, B = complex(A), complex(B)
        object.__setattr__(self, "L", L)
        object.__setattr__(self, "A", A)
        object.__setattr__(self, "B", B)

    @property
    def dim(self) -> int:
        return self.L.dim

    @property
    def exact(self) -> bool:
        return isinstance(self.A, GaussianRational)

    def to_float(self) -> VekuaOperator:
        return VekuaOperator(self.L.to_float(), complex(self.A), complex(self.B))


# symbols ---------------------------------------------------------------------


def _monomial(xi: Sequence[int], alpha: Sequence[int]) -> int:
    out = 1
    for x, a in zip(xi, alpha):
        if a:
            out *= x**a
    return out


def symbol_eval(spec: OperatorSpec, xi: Sequence[int]):
    """sigma_L(xi) = sum i^|alpha| c_alpha xi^alpha; exact for exact coefficients."""
    xi = check_frequency(xi, spec.dim)
    total = GaussianRational(0) if spec.exact else 0j
    for alpha, c in spec.terms.items():
        mono = _monomial(xi, alpha)
        if mono:
            total = total + rotate_i(c, sum(alpha)) * mono
    return total


def principal_symbol(spec: OperatorSpec, direction: Sequence[float]) -> complex:
    """sigma_m at a real direction (floating)."""
    m = spec.order
    total = 0j
    for alpha, c in spec.principal_terms().items():
        mono = 1.0
        for x, a in zip(direction, alpha):
            mono *= float(x) ** a
        total += complex(rotate_i(c, m)) * mono
    return total


def _principal_exact(spec: OperatorSpec, v: Sequence[int]):
    m = spec.order
    total = GaussianRational(0) if spec.exact else 0j
    for alpha, c in spec.principal_terms().items():
        total = total + rotate_i(c, m) * _monomial(v, alpha)
    return total


def _lcm(a: int, b: int) -> int:
    return a * b // math.gcd(a, b)


def common_denominator(values: Iterable[GaussianRational]) -> int:
    d = 1
    for z in values:
        d = _lcm(d, z.re.denominator)
        d = _lcm(d, z.im.denominator)
    return d


def scaled_integer_terms(spec: OperatorSpec, D: int) -> list[tuple[tuple[int, ...], int, int]]:
    """(alpha, Re, Im) of D * i^|alpha| c_alpha as Python ints (exact specs only)."""
    out = []
    for alpha, c in spec.terms.items():
        r = rotate_i(c, sum(alpha))
        out.append((alpha, int(r.re * D), int(r.im * D)))
    return out


def symbol_parts(spec: OperatorSpec, points: np.ndarray, D: int = 1, dtype=None):
    """Even- and odd-order parts of the symbol on a batch of frequencies.

    sigma(xi) = E + O and sigma(-xi) = E - O.  For exact specs returns
    ``(E_re, E_im, O_re, O_im)`` integer arrays scaled by ``D``; for floating
    specs returns complex arrays ``(E, O)``.
    """
    pts = np.asarray(points)
    n = pts.shape[0]
    if spec.exact:
        dtype = dtype or object
        P = pts.astype(dtype)
        Er = np.zeros(n, dtype=dtype)
        Ei = np.zeros(n, dtype=dtype)
        Or = np.zeros(n, dtype=dtype)
        Oi = np.zeros(n, dtype=dtype)
        for alpha, cr, ci in scaled_integer_terms(spec, D):
            mono = np.ones(n, dtype=dtype)
            for j, a in enumerate(alpha):
                for _ in range(a):
                    mono = mono * P[:, j]
            if sum(alpha) % 2 == 0:
                Er = Er + cr * mono
                Ei = Ei + ci * mono
            else:
                Or = Or + cr * mono
                Oi = Oi + ci * mono
        return Er, Ei, Or, Oi
    P = pts.astype(np.float64)
    E = np.zeros(n, dtype=np.complex128)
    O = np.zeros(n, dtype=np.complex128)
    for alpha, c in spec.terms.items():
        mono = np.ones(n)
        for j, a in enumerate(alpha):
            if a:
                mono = mono * P[:, j] ** a
        term = complex(rotate_i(c, sum(alpha))) * mono
        if sum(alpha) % 2 == 0:
            E += term
        else:
            O += term
    return E, O


def magnitude_bound(spec: OperatorSpec, D: int, coord_bound: int) -> int:
    """Upper bound on |D sigma(xi)| for max |xi_j| <= coord_bound (exact specs)."""
    total = 0
    for alpha, cr, ci in scaled_integer_terms(spec, D):
        total += (abs(cr) + abs(ci)) * coord_bound ** sum(alpha)
    return total


# ellipticity -----------------------------------------------------------------


class Ellipticity(str, Enum):
    ELLIPTIC = "ELLIPTIC"
    NOT_ELLIPTIC = "NOT_ELLIPTIC"
    UNKNOWN = "UNKNOWN"


@dataclass
class EllipticityResult:
    status: Ellipticity
    min_modulus: float
    witness: Optional[tuple[float, ...]] = None
    witness_integer: Optional[tuple[int, ...]] = None
    samples: int = 0

    def to_dict(self) -> dict:
        return {
            "status": self.status.value,
            "min_modulus": self.min_modulus,
            "witness": list(self.witness) if self.witness is not None else None,
            "witness_integer": list(self.witness_integer) if self.witness_integer else None,
            "samples": self.samples,
        }


def default_direction_samples(dim: int) -> int:
    return 10_000 * max(1, math.ceil(dim / 2))


def _principal_batch(spec: OperatorSpec, dirs: np.ndarray) -> np.ndarray:
    m = spec.order
    out = np.zeros(dirs.shape[0], dtype=np.complex128)
    for alpha, c in spec.principal_terms().items():
        mono = np.ones(dirs.shape[0])
        for j, a in enumerate(alpha):
            if a:
                mono = mono * dirs[:, j] ** a
        out += complex(rotate_i(c, m)) * mono
    return out


def ellipticity_check(
    spec: OperatorSpec,
    direction_samples: Optional[int] = None,
    margin: float = 1e-6,
    seed: int = 0,
) -> EllipticityResult:
    """Decide whether the principal symbol vanishes on a real unit direction.

    Small integer directions are tested first (exactly, when the spec is
    exact); then a seeded sample of unit directions; near-zero samples are
    refined by local minimization before a zero is claimed.
    """
    if direction_samples is None:
        direction_samples = default_direction_samples(spec.dim)
    if direction_samples < 1:
        raise ValueError("direction_samples must be >= 1")
    n = spec.dim
    scale = sum(abs(complex(c)) for c in spec.principal_terms().values())
    tol = ZERO_TOL * (1.0 + scale)

    span = 2 if n <= 4 else 1
    ints = [tuple(int(c) for c in row) for row in (
        np.stack(np.meshgrid(*([np.arange(-span, span + 1)] * n), indexing="ij"), -1).reshape(-1, n)
    )]
    # one representative per +-pair; prefer non-negative entries
    ints = [v for v in ints if any(v) and next(c for c in v if c) > 0]
    ints.sort(key=lambda v: (sum(c * c for c in v), tuple(-c for c in v)))
    for v in ints:
        val = _principal_exact(spec, v)
        zero = (not val) if spec.exact else abs(val) <= tol * math.sqrt(sum(c * c for c in v)) ** spec.order
        if zero:
            r = math.sqrt(sum(c * c for c in v))
            return EllipticityResult(
                Ellipticity.NOT_ELLIPTIC, 0.0, tuple(c / r for c in v), v, samples=len(ints)
            )

    rng = np.random.default_rng(seed)
    dirs = rng.standard_normal((direction_samples, n))
    dirs /= np.linalg.norm(dirs, axis=1, keepdims=True)
    mods = np.abs(_principal_batch(spec, dirs))
    min_mod = float(mods.min())

    # sampled minima sit a grid spacing away from a zero set, so always
    # refine the best samples locally before deciding
    from scipy.optimize import minimize

    def objective(v):
        u = v / np.linalg.norm(v)
        return abs(principal_symbol(spec, u)) ** 2

    for idx in np.argsort(mods)[:5]:
        res = minimize(objective, dirs[idx], method="BFGS", options={"gtol": 1e-14})
        u = res.x / np.linalg.norm(res.x)
        val = abs(principal_symbol(spec, u))  # re-verify by direct evaluation
        min_mod = min(min_mod, val)
        if val <= tol:
            return EllipticityResult(
                Ellipticity.NOT_ELLIPTIC, val, tuple(float(c) for c in u), samples=direction_samples
            )
    if min_mod > margin:
        return EllipticityResult(Ellipticity.ELLIPTIC, min_mod, samples=direction_samples)
    return EllipticityResult(Ellipticity.UNKNOWN, min_mod, samples=direction_samples)


# presets ---------------------------------------------------------------------


def _unit(dim: int, j: int, k: int = 1) -> tuple[int, ...]:
    return tuple(k if i == j else 0 for i in range(dim))


def eta_square(eta) -> object:
    """eta**2 as an exact rational when possible, else a float."""
    if isinstance(eta, RealNumberSpec):
        sq = eta.square()
        return sq if sq is not None else float(eta) ** 2
    if isinstance(eta, str):
        if ":" in eta or eta in ("e", "pi"):
            return eta_square(RealNumberSpec.parse(eta))
        q = Fraction(eta)
        return q * q
    if isinstance(eta, (int, Fraction)):
        return Fraction(eta) ** 2
    return float(eta) ** 2


def _check_positive(eta):
    value = float(eta) if not isinstance(eta, str) else float(eta_square(eta)) ** 0.5
    if not value > 0:
        raise ValueError(f"eta must be positive, got {eta}")


def laplace(n: int) -> OperatorSpec:
    return OperatorSpec(n, {_unit(n, j, 2): 1 for j in range(n)})


def heat(n: int, eta=1) -> OperatorSpec:
    """d/dt - eta^2 sum d^2/dx_j^2 on T^(n+1); coordinate 0 is time."""
    _check_positive(eta)
    e2 = eta_square(eta)
    d = n + 1
    terms = {_unit(d, 0): 1}
    terms.update({_unit(d, j, 2): -e2 for j in range(1, d)})
    return OperatorSpec(d, terms)


def wave(n: int, eta=1) -> OperatorSpec:
    """d^2/dt^2 - eta^2 sum d^2/dx_j^2 on T^(n+1); coordinate 0 is time."""
    _check_positive(eta)
    e2 = eta_square(eta)
    d = n + 1
    terms = {_unit(d, 0, 2): 1}
    terms.update({_unit(d, j, 2): -e2 for j in range(1, d)})
    return OperatorSpec(d, terms)


def vector_field(C) -> OperatorSpec:
    """d/dt + C d/dx on T^2."""
    if isinstance(C, RealNumberSpec):
        C = C.exact_value() if C.is_rational else float(C)
    return OperatorSpec(2, {(1, 0): 1, (0, 1): C})


PRESETS = {
    "laplace": laplace,
    "heat": heat,
    "wave": wave,
    "vector_field": vector_field,
}


def preset(name: str, *, dim: int = 1, eta=1, C=0, A=0, B=0) -> VekuaOperator:
    if name == "laplace":
        L = laplace(dim)
    elif name == "heat":
        L = heat(dim, eta)
    elif name == "wave":
        L = wave(dim, eta)
    elif name == "vector_field":
        L = vector_field(C)
    else:
        raise ValueError(f"unknown preset {name!r}; choose from {sorted(PRESETS)}")
    return VekuaOperator(L, A, B)
