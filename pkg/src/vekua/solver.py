"""Apply P and solve Pu = f frequency pair by frequency pair.

For a pair {xi, -xi} write x = u(xi) and w = conj(u(-xi)).  Then

    a x - B w      = f(xi)             a = sigma(xi) - A
    -conj(B) x + d w = conj(f(-xi))    d = conj(sigma(-xi)) - conj(A)

with determinant Delta_xi.  Regular pairs use the closed form.  Singular
pairs are compatible iff both adjugate components of the right side vanish,
and then receive the minimal-norm solution; otherwise they are reported as
incompatible and zero-filled.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum
from typing import Optional, Sequence

import numpy as np

from .fields import CoefficientField
from .lattice import canonical_pairs, neg
from .operator import VekuaOperator, check_frequency, symbol_eval
from .scalar import ZERO, ZERO_TOL, GaussianRational, conj, is_zero, modulus

WARN_TOL = 1e-6


class Handling(str, Enum):
    REGULAR = "REGULAR"
    COMPATIBLE_MIN_NORM = "COMPATIBLE_MIN_NORM"
    INCOMPATIBLE = "INCOMPATIBLE"


@dataclass
class PairSolution:
    xi: tuple[int, ...]
    u_plus: object
    u_minus: object  # u(-xi); equals u_plus when xi = 0
    handling: Handling
    defect: float = 0.0
    delta: object = None
    warning: Optional[str] = None


@dataclass
class SingularPair:
    xi: tuple[int, ...]
    handling: Handling
    defect: float


@dataclass
class SolveOutcome:
    solution: CoefficientField
    singular_pairs: list[SingularPair] = field(default_factory=list)
    residual: float = 0.0
    warnings: list[str] = field(default_factory=list)
    pairs_solved: int = 0

    @property
    def compatible(self) -> bool:
        return all(s.handling is not Handling.INCOMPATIBLE for s in self.singular_pairs)

    @property
    def incompatible(self) -> list[tuple[int, ...]]:
        return [s.xi for s in self.singular_pairs if s.handling is Handling.INCOMPATIBLE]


def _is_nonzero(c) -> bool:
    return bool(c) if isinstance(c, GaussianRational) else c != 0


def _match_backend(P: VekuaOperator, f: CoefficientField):
    if P.exact and not f.exact:
        P = P.to_float()
    if not P.exact and f.exact and len(f):
        f = f.to_float()
    return P, f


def apply(P: VekuaOperator, u: CoefficientField) -> CoefficientField:
    """f(xi) = (sigma(xi) - A) u(xi) - B conj(u(-xi))."""
    if u.dim != P.dim:
        check_frequency((0,) * u.dim, P.dim)
    P, u = _match_backend(P, u)
    keys = set(u) | {neg(k) for k in u}
    out = {}
    for xi in keys:
        v = (symbol_eval(P.L, xi) - P.A) * u[xi] - P.B * conj(u[neg(xi)])
        if _is_nonzero(v):
            out[xi] = v
    return CoefficientField(P.dim, out)


# per-pair solves ----------------------------------------------------------------


def _realify(maps, n_in: int) -> np.ndarray:
    """Real matrix of a real-linear map C^k -> C^m given as a callable on
    complex vectors; columns are images of the real unit vectors."""
    cols = []
    for j in range(n_in):
        z = np.zeros(n_in // 2, dtype=complex)
        z[j // 2] = 1.0 if j % 2 == 0 else 1.0j
        img = maps(z)
        cols.append(np.concatenate([[c.real, c.imag] for c in img]))
    return np.array(cols).T


def _exact_pinv_apply(M, b):
    """Minimal-norm solution of M x = b for a 2x2 complex M of rank <= 1."""
    (m11, m12), (m21, m22) = M
    fro = m11.abs2() + m12.abs2() + m21.abs2() + m22.abs2()
    if fro == 0:
        return ZERO, ZERO
    # M^+ = M^H / ||M||_F^2 when rank M = 1
    x = (conj(m11) * b[0] + conj(m21) * b[1]) / fro
    w = (conj(m12) * b[0] + conj(m22) * b[1]) / fro
    return x, w


def solve_pair(P: VekuaOperator, xi: Sequence[int], fplus, fminus_conj) -> PairSolution:
    """Solve the 2x2 system at the canonical representative xi.

    ``fplus`` is f(xi) and ``fminus_conj`` is conj(f(-xi)).  Returns u(xi)
    and u(-xi) with the handling used.
    """
    xi = check_frequency(xi, P.dim)
    if not any(xi):
        return _solve_origin(P, fplus)
    a = symbol_eval(P.L, xi) - P.A
    d = conj(symbol_eval(P.L, neg(xi))) - conj(P.A)
    B = P.B
    Bc = conj(B)
    delta = a * d - B * Bc
    exact = P.exact and isinstance(fplus, GaussianRational) and isinstance(fminus_conj, GaussianRational)
    if not exact:
        a, d, B, Bc, delta = complex(a), complex(d), complex(B), complex(Bc), complex(delta)
        fplus, fminus_conj = complex(fplus), complex(fminus_conj)
    dscale = max(modulus(a) * modulus(d), modulus(B) ** 2)
    singular = (not delta) if exact else is_zero(delta, dscale)

    if not singular:
        x = (d * fplus + B * fminus_conj) / delta
        w = (Bc * fplus + a * fminus_conj) / delta
        return PairSolution(xi, x, conj(w), Handling.REGULAR, 0.0, delta)

    d1 = d * fplus + B * fminus_conj
    d2 = Bc * fplus + a * fminus_conj
    m_zero = (not a and not d and not B) if exact else max(abs(a), abs(d), abs(B)) == 0
    if m_zero:
        defect = max(modulus(fplus), modulus(fminus_conj))
    else:
        defect = max(modulus(d1), modulus(d2))
    fscale = (modulus(fplus) + modulus(fminus_conj)) * max(1.0, modulus(a), modulus(d), modulus(B))
    if exact:
        compatible = defect == 0
        warning = None
    else:
        compatible = defect <= ZERO_TOL * (1.0 + fscale)
        warning = None
        if not compatible and defect <= WARN_TOL * (1.0 + fscale):
            warning = f"pair {xi}: compatibility defect {defect:.3e} is near tolerance"
    if not compatible:
        zero = ZERO if exact else 0j
        return PairSolution(xi, zero, zero, Handling.INCOMPATIBLE, defect, delta, warning)

    if exact:
        x, w = _exact_pinv_apply(((a, -B), (-Bc, d)), (fplus, fminus_conj))
        return PairSolution(xi, x, conj(w), Handling.COMPATIBLE_MIN_NORM, defect, delta)

    s_plus = a + complex(P.A)  # sigma(xi)
    s_minus = conj(d) + complex(P.A)  # sigma(-xi)
    A, Bf = complex(P.A), complex(P.B)

    def forward(z):  # (u(xi), u(-xi)) -> (f(xi), f(-xi))
        up, um = z
        return [(s_plus - A) * up - Bf * np.conj(um), (s_minus - A) * um - Bf * np.conj(up)]

    M = _realify(forward, 4)
    rhs = np.array([fplus.real, fplus.imag, fminus_conj.real, -fminus_conj.imag])
    sol = np.linalg.pinv(M) @ rhs
    return PairSolution(
        xi, complex(sol[0], sol[1]), complex(sol[2], sol[3]),
        Handling.COMPATIBLE_MIN_NORM, defect, delta, warning,
    )


def _solve_origin(P: VekuaOperator, f0) -> PairSolution:
    """-A z - B conj(z) = f0 (the self-paired frequency 0)."""
    xi = (0,) * P.dim
    c, B = -P.A, P.B
    exact = P.exact and isinstance(f0, GaussianRational)
    if not exact:
        c, B, f0 = complex(c), complex(B), complex(f0)
    delta = c * conj(c) - B * conj(B)
    dscale = max(modulus(c) ** 2, modulus(B) ** 2)
    singular = (not delta) if exact else is_zero(delta, dscale)
    if not singular:
        z = (conj(c) * f0 + B * conj(f0)) / delta
        return PairSolution(xi, z, z, Handling.REGULAR, 0.0, delta)
    m_zero = (not c and not B) if exact else max(abs(c), abs(B)) == 0
    defect = modulus(f0) if m_zero else modulus(conj(c) * f0 + B * conj(f0))
    fscale = modulus(f0) * max(1.0, modulus(c), modulus(B))
    compatible = defect == 0 if exact else defect <= ZERO_TOL * (1.0 + fscale)
    warning = None
    if not exact and not compatible and defect <= WARN_TOL * (1.0 + fscale):
        warning = f"frequency 0: compatibility defect {defect:.3e} is near tolerance"
    zero = ZERO if exact else 0j
    if not compatible:
        return PairSolution(xi, zero, zero, Handling.INCOMPATIBLE, defect, delta, warning)
    if m_zero:
        return PairSolution(xi, zero, zero, Handling.COMPATIBLE_MIN_NORM, defect, delta)
    # real 2x2 matrix of z -> c z - B conj(z), columns at z = 1 and z = i
    col1 = c - B
    col2 = (c + B) * GaussianRational(0, 1) if exact else 1j * (c + B)
    if exact:
        fro = col1.abs2() + col2.abs2()
        # rank one real matrix: M^+ = M^T / ||M||_F^2
        t1 = (col1.re * f0.re + col1.im * f0.im) / fro
        t2 = (col2.re * f0.re + col2.im * f0.im) / fro
        z = GaussianRational(t1, t2)
    else:
        M = np.array([[col1.real, col2.real], [col1.imag, col2.imag]])
        t = np.linalg.pinv(M) @ np.array([f0.real, f0.imag])
        z = complex(t[0], t[1])
    return PairSolution(xi, z, z, Handling.COMPATIBLE_MIN_NORM, defect, delta, warning)


# full solves ------------------------------------------------------------------------


def solve(P: VekuaOperator, f: CoefficientField) -> SolveOutcome:
    """Solve Pu = f over the canonical pairs covering supp(f) and -supp(f)."""
    if f.dim != P.dim:
        check_frequency((0,) * f.dim, P.dim)
    P, f = _match_backend(P, f)
    sol = {}
    singular: list[SingularPair] = []
    warnings: list[str] = []
    pairs = canonical_pairs(f)
    for xi in pairs:
        res = solve_pair(P, xi, f[xi], conj(f[neg(xi)]))
        if _is_nonzero(res.u_plus):
            sol[xi] = res.u_plus
        if any(xi) and _is_nonzero(res.u_minus):
            sol[neg(xi)] = res.u_minus
        if res.handling is not Handling.REGULAR:
            singular.append(SingularPair(xi, res.handling, res.defect))
        if res.warning:
            warnings.append(res.warning)
    u = CoefficientField(P.dim, sol)
    residual = apply(P, u).sup_distance(f) if len(f) else 0.0
    return SolveOutcome(u, singular, residual, warnings, len(pairs))


# grids ---------------------------------------------------------------------------------


class GridError(ValueError):
    """Grid sizes must be odd and match the operator dimension."""


def _check_grid(shape: Sequence[int], dim: int) -> tuple[int, ...]:
    shape = tuple(int(s) for s in shape)
    if len(shape) != dim:
        raise GridError(f"grid has {len(shape)} axes, operator dimension is {dim}")
    for s in shape:
        if s < 1 or s % 2 == 0:
            raise GridError(f"grid size {s} must be a positive odd integer")
    return shape


def grid_frequencies(shape: Sequence[int]) -> list[np.ndarray]:
    return [np.fft.fftfreq(N, d=1.0 / N).round().astype(np.int64) for N in shape]


def grid_to_field(samples: np.ndarray) -> CoefficientField:
    """u(xi) = (prod N)^-1 sum_k samples(k) exp(-i xi.x_k) on x_k = 2 pi k / N."""
    arr = np.asarray(samples, dtype=complex)
    coeffs = np.fft.fftn(arr) / arr.size
    freqs = grid_frequencies(arr.shape)
    out = {}
    for idx in zip(*np.nonzero(coeffs)):
        out[tuple(int(freqs[j][i]) for j, i in enumerate(idx))] = complex(coeffs[idx])
    return CoefficientField(arr.ndim, out)


def field_to_grid(u: CoefficientField, shape: Sequence[int]) -> np.ndarray:
    shape = _check_grid(shape, u.dim)
    coeffs = np.zeros(shape, dtype=complex)
    for xi, c in u.items():
        if all(abs(k) <= (N - 1) // 2 for k, N in zip(xi, shape)):
            coeffs[tuple(k % N for k, N in zip(xi, shape))] = complex(c)
    return np.fft.ifftn(coeffs) * coeffs.size


def grid_nodes(shape: Sequence[int]) -> list[np.ndarray]:
    return [2 * np.pi * np.arange(N) / N for N in shape]


@dataclass
class GridSolution:
    values: np.ndarray
    outcome: SolveOutcome


def solve_grid(P: VekuaOperator, samples: np.ndarray, grid: Optional[Sequence[int]] = None) -> GridSolution:
    arr = np.asarray(samples)
    shape = _check_grid(arr.shape if grid is None else grid, P.dim)
    if arr.shape != shape:
        raise GridError(f"samples have shape {arr.shape}, expected {shape}")
    f = grid_to_field(arr)
    outcome = solve(P.to_float() if P.exact else P, f)
    return GridSolution(field_to_grid(outcome.solution, shape), outcome)
