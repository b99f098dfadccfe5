"""Per-frequency discriminants and finite scans of the Diophantine condition.

The discriminant of P at xi is

    Delta_xi = (sigma(xi) - A) * (conj(sigma(-xi)) - conj(A)) - |B|^2,

the determinant of the 2x2 system coupling u(xi) and conj(u(-xi)).  Scans
evaluate it on every lattice point of a Euclidean ball; exact operators are
evaluated in integer arithmetic after clearing denominators, so zero tests
are decisions, not tolerances.
"""
from __future__ import annotations

import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from enum import Enum
from fractions import Fraction
from typing import Optional, Sequence

import numpy as np

from .lattice import ball_points, neg, norm
from .operator import (
    VekuaOperator,
    check_frequency,
    common_denominator,
    magnitude_bound,
    symbol_eval,
    symbol_parts,
)
from .scalar import ZERO_TOL, GaussianRational, conj, is_zero, modulus

BLOCK_SIZE = 65536
INT64_SAFE = 2**62


def delta(P: VekuaOperator, xi: Sequence[int]):
    xi = check_frequency(xi, P.dim)
    a = symbol_eval(P.L, xi) - P.A
    d = conj(symbol_eval(P.L, neg(xi))) - conj(P.A)
    return a * d - P.B * conj(P.B)


def delta_scale(P: VekuaOperator, xi: Sequence[int]) -> float:
    """Largest intermediate magnitude in delta(P, xi), for floating zero tests."""
    a = symbol_eval(P.L, xi) - P.A
    d = conj(symbol_eval(P.L, neg(xi))) - conj(P.A)
    return max(modulus(a) * modulus(d), modulus(P.B) ** 2)


def delta_is_zero(P: VekuaOperator, xi: Sequence[int], value=None) -> bool:
    value = delta(P, xi) if value is None else value
    if P.exact:
        return not value
    return is_zero(value, delta_scale(P, xi))


@dataclass
class DiscriminantSample:
    xi: tuple[int, ...]
    delta: object
    modulus: float
    is_zero: bool


def sample(P: VekuaOperator, xi: Sequence[int]) -> DiscriminantSample:
    xi = check_frequency(xi, P.dim)
    value = delta(P, xi)
    return DiscriminantSample(xi, value, modulus(value), delta_is_zero(P, xi, value))


# batch evaluation -------------------------------------------------------------


@dataclass
class DeltaTable:
    """Discriminant values on a batch of frequencies (rows of ``points``)."""

    points: np.ndarray
    norms: np.ndarray
    re: np.ndarray  # float
    im: np.ndarray  # float
    modulus: np.ndarray
    log_modulus: np.ndarray
    is_zero: np.ndarray
    exact: bool
    # exact backend only: Delta = (num_re + i num_im) / denom
    num_re: Optional[np.ndarray] = None
    num_im: Optional[np.ndarray] = None
    denom: int = 1

    def value(self, i: int):
        if self.exact:
            return GaussianRational(
                Fraction(int(self.num_re[i]), self.denom), Fraction(int(self.num_im[i]), self.denom)
            )
        return complex(self.re[i], self.im[i])

    def abs2_exact(self, i: int) -> Fraction:
        r, m = int(self.num_re[i]), int(self.num_im[i])
        return Fraction(r * r + m * m, self.denom * self.denom)


def _int_to_float_ratio(n: int, d: int) -> float:
    try:
        return n / d
    except OverflowError:
        return math.copysign(math.inf, n)


def _exact_block(P: VekuaOperator, pts: np.ndarray, D: int, dtype):
    Er, Ei, Or, Oi = symbol_parts(P.L, pts, D, dtype=dtype)
    Ar, Ai = int(P.A.re * D), int(P.A.im * D)
    Br, Bi = int(P.B.re * D), int(P.B.im * D)
    a_re = Er + Or - Ar
    a_im = Ei + Oi - Ai
    d_re = Er - Or - Ar
    d_im = -(Ei - Oi) + Ai
    num_re = a_re * d_re - a_im * d_im - (Br * Br + Bi * Bi)
    num_im = a_re * d_im + a_im * d_re
    return num_re, num_im


def _float_block(P: VekuaOperator, pts: np.ndarray):
    E, O = symbol_parts(P.L, pts)
    a = E + O - P.A
    d = np.conj(E - O) - np.conj(P.A)
    val = a * d - abs(P.B) ** 2
    scale = np.maximum(np.abs(a) * np.abs(d), abs(P.B) ** 2)
    return val, scale


def _blocks(n: int):
    return [(i, min(i + BLOCK_SIZE, n)) for i in range(0, n, BLOCK_SIZE)]


def default_workers() -> int:
    try:
        return max(1, int(os.environ.get("VEKUA_THREADS", "1")))
    except ValueError:
        return 1


def evaluate_batch(P: VekuaOperator, points: np.ndarray, workers: Optional[int] = None) -> DeltaTable:
    """Delta on every row of ``points``.  Blocks are evaluated independently
    and concatenated in order, so the result does not depend on ``workers``."""
    pts = np.asarray(points, dtype=np.int64).reshape(-1, P.dim)
    n = pts.shape[0]
    workers = workers or default_workers()
    norms = np.sqrt((pts.astype(np.float64) ** 2).sum(axis=1)) if n else np.zeros(0)
    blocks = _blocks(n)

    def run(fn):
        if workers > 1 and len(blocks) > 1:
            with ThreadPoolExecutor(max_workers=workers) as ex:
                return list(ex.map(lambda b: fn(pts[b[0]:b[1]]), blocks))
        return [fn(pts[b[0]:b[1]]) for b in blocks]

    if P.exact:
        D = common_denominator([*P.L.terms.values(), P.A, P.B])
        cb = int(np.abs(pts).max()) if n else 0
        s = magnitude_bound(P.L, D, cb)
        aD = int(abs(P.A.re * D) + abs(P.A.im * D))
        bD = int(abs(P.B.re * D) + abs(P.B.im * D))
        bound = 2 * (s + aD) ** 2 + bD * bD
        dtype = np.int64 if bound < INT64_SAFE else object
        parts = run(lambda b: _exact_block(P, b, D, dtype))
        if parts:
            num_re = np.concatenate([p[0] for p in parts])
            num_im = np.concatenate([p[1] for p in parts])
        else:
            num_re = num_im = np.zeros(0, dtype=dtype)
        denom = D * D
        zero = (num_re == 0) & (num_im == 0)
        if dtype is np.int64:
            re = num_re.astype(np.float64) / denom
            im = num_im.astype(np.float64) / denom
            mod = np.hypot(re, im)
            with np.errstate(divide="ignore"):
                logm = np.log(mod)
        else:
            re = np.array([_int_to_float_ratio(int(v), denom) for v in num_re], dtype=np.float64)
            im = np.array([_int_to_float_ratio(int(v), denom) for v in num_im], dtype=np.float64)
            logm = np.empty(n)
            mod = np.empty(n)
            ld = math.log(denom)
            for i in range(n):
                m2 = int(num_re[i]) ** 2 + int(num_im[i]) ** 2
                if m2 == 0:
                    logm[i], mod[i] = -math.inf, 0.0
                else:
                    logm[i] = 0.5 * math.log(m2) - ld
                    mod[i] = math.exp(logm[i]) if logm[i] > -700 else 0.0
        return DeltaTable(
            pts, norms, re, im, mod, logm, np.asarray(zero, dtype=bool), True,
            num_re=num_re, num_im=num_im, denom=denom,
        )

    parts = run(lambda b: _float_block(P, b))
    val = np.concatenate([p[0] for p in parts]) if parts else np.zeros(0, dtype=complex)
    scale = np.concatenate([p[1] for p in parts]) if parts else np.zeros(0)
    mod = np.abs(val)
    zero = mod <= ZERO_TOL * (1.0 + scale)
    with np.errstate(divide="ignore"):
        logm = np.log(mod)
    return DeltaTable(pts, norms, val.real.copy(), val.imag.copy(), mod, logm, zero, False)


# zero sets ------------------------------------------------------------------------


@dataclass
class ZeroSet:
    points: list[tuple[int, ...]]
    radius: float
    certified: bool  # False: floating backend, tolerance-based

    def __iter__(self):
        return iter(self.points)

    def __len__(self):
        return len(self.points)

    def __contains__(self, xi):
        return tuple(xi) in set(self.points)

    @property
    def note(self) -> Optional[str]:
        return None if self.certified else "tolerance-based, not certified"


def zero_set(P: VekuaOperator, R: float, workers: Optional[int] = None) -> ZeroSet:
    if R < 0:
        raise ValueError("radius must be >= 0")
    table = evaluate_batch(P, ball_points(P.dim, R), workers)
    pts = [tuple(int(c) for c in row) for row in table.points[table.is_zero]]
    return ZeroSet(pts, R, P.exact)


# Diophantine-condition scan ---------------------------------------------------------


class Evidence(str, Enum):
    SUPPORTED = "SUPPORTED"
    REFUTED_EVIDENCE = "REFUTED_EVIDENCE"
    ZEROS_AT_LARGE_NORM = "ZEROS_AT_LARGE_NORM"
    UNDETERMINED = "UNDETERMINED"


@dataclass(frozen=True)
class ScanConfig:
    drift_tolerance: float = 0.1  # max gamma*(R) - gamma*(R/2) for SUPPORTED
    zero_guard: float = 0.5  # zeros must satisfy |xi| < zero_guard * R
    refute_growth: float = 1.0  # gamma* growth per doubling for REFUTED_EVIDENCE
    min_norm: float = 2.0  # exponents use |xi| >= min_norm only


@dataclass
class DiscriminantScanReport:
    radius: float
    zero_set: list[tuple[int, ...]]
    shell_minima: list[tuple[int, float]]
    gamma_estimates: list[tuple[float, float]]
    evidence: Evidence
    certified: bool
    min_nonzero_modulus: Optional[float] = None
    min_nonzero_abs2_exact: Optional[Fraction] = None
    gamma_half: float = 0.0
    gamma_full: float = 0.0
    table: Optional[DeltaTable] = field(default=None, repr=False)
    gamma_running: Optional[np.ndarray] = field(default=None, repr=False)

    def gamma_star(self, r: float) -> float:
        return _gamma_at(self.table.norms, self.gamma_running, r)

    def to_dict(self) -> dict:
        return {
            "radius": self.radius,
            "evidence": self.evidence.value,
            "certified": self.certified,
            "zero_set": [list(z) for z in self.zero_set],
            "zero_count": len(self.zero_set),
            "shell_minima": [[r, m] for r, m in self.shell_minima],
            "gamma_estimates": [[r, g] for r, g in self.gamma_estimates],
            "gamma_star_half": self.gamma_half,
            "gamma_star_full": self.gamma_full,
            "min_nonzero_modulus": self.min_nonzero_modulus,
            "min_nonzero_abs2_exact": (
                None if self.min_nonzero_abs2_exact is None else _frac(self.min_nonzero_abs2_exact)
            ),
        }


def _frac(q: Fraction) -> str:
    return str(q.numerator) if q.denominator == 1 else f"{q.numerator}/{q.denominator}"


def _gamma_at(norms: np.ndarray, running: np.ndarray, r: float) -> float:
    idx = int(np.searchsorted(norms, r * (1 + 1e-12), side="right")) - 1
    return float(running[idx]) if idx >= 0 else 0.0


def grade(
    R: float,
    max_zero_norm: Optional[float],
    g_quarter: float,
    g_half: float,
    g_full: float,
    config: ScanConfig = ScanConfig(),
) -> Evidence:
    """Evidence grade from the largest zero norm and gamma* at R/4, R/2, R."""
    if max_zero_norm is not None and max_zero_norm >= config.zero_guard * R:
        return Evidence.ZEROS_AT_LARGE_NORM
    if g_full - g_half <= config.drift_tolerance:
        return Evidence.SUPPORTED
    if g_full - g_half >= config.refute_growth and g_half - g_quarter >= config.refute_growth:
        return Evidence.REFUTED_EVIDENCE
    return Evidence.UNDETERMINED


def dc_scan(
    P: VekuaOperator,
    R: float,
    config: ScanConfig = ScanConfig(),
    workers: Optional[int] = None,
) -> DiscriminantScanReport:
    """Grade finite-box evidence for |Delta_xi| >= |xi|^-gamma beyond a finite set.

    gamma*(r) is the largest -log|Delta| / log|xi| over 2 <= |xi| <= r with
    0 < |Delta| < 1 (0 if there are none).  The grade is evidence only.
    """
    if R < 4:
        raise ValueError("scan radius must be >= 4")
    table = evaluate_batch(P, ball_points(P.dim, R), workers)
    norms = table.norms
    zero = table.is_zero

    zeros = [tuple(int(c) for c in row) for row in table.points[zero]]
    zs = set(zeros)
    if any(neg(z) not in zs for z in zeros):
        raise AssertionError("zero set is not symmetric under xi -> -xi")

    nonzero = ~zero
    shells = np.floor(norms + 1e-12).astype(np.int64)
    shell_minima = []
    for s in range(int(math.floor(R)) + 1):
        m = nonzero & (shells == s)
        if m.any():
            shell_minima.append((s, float(table.modulus[m].min())))

    usable = nonzero & (norms >= config.min_norm) & (table.log_modulus < 0)
    exps = np.zeros(len(norms))
    with np.errstate(divide="ignore", invalid="ignore"):
        exps[usable] = -table.log_modulus[usable] / np.log(norms[usable])
    running = np.maximum.accumulate(exps) if len(exps) else exps
    if len(running) > 1 and np.any(np.diff(running) < 0):
        raise AssertionError("gamma* must be non-decreasing")

    estimates = [(float(r), _gamma_at(norms, running, r)) for r in range(2, int(math.floor(R)) + 1)]
    g_full = _gamma_at(norms, running, R)
    g_half = _gamma_at(norms, running, R / 2)
    g_quarter = _gamma_at(norms, running, R / 4)

    max_zero = max((norm(z) for z in zeros), default=None)
    evidence = grade(R, max_zero, g_quarter, g_half, g_full, config)

    min_mod = float(table.modulus[nonzero].min()) if nonzero.any() else None
    min_exact = None
    if table.exact and nonzero.any():
        idx = np.flatnonzero(nonzero)
        m2 = [int(table.num_re[i]) ** 2 + int(table.num_im[i]) ** 2 for i in idx]
        min_exact = Fraction(min(m2), table.denom * table.denom)

    return DiscriminantScanReport(
        radius=R,
        zero_set=zeros,
        shell_minima=shell_minima,
        gamma_estimates=estimates,
        evidence=evidence,
        certified=table.exact,
        min_nonzero_modulus=min_mod,
        min_nonzero_abs2_exact=min_exact,
        gamma_half=g_half,
        gamma_full=g_full,
        table=table,
        gamma_running=running,
    )


def scan_rows(report: DiscriminantScanReport):
    """Rows for the scan CSV: xi_1..xi_n, re_delta, im_delta, modulus, shell, gamma_star."""
    t = report.table
    n = t.points.shape[1]
    header = [f"xi_{j + 1}" for j in range(n)] + ["re_delta", "im_delta", "modulus", "shell", "gamma_star"]
    rows = []
    shells = np.floor(t.norms + 1e-12).astype(np.int64)
    for i in range(t.points.shape[0]):
        rows.append(
            [int(c) for c in t.points[i]]
            + [float(t.re[i]), float(t.im[i]), float(t.modulus[i]), int(shells[i]), float(report.gamma_running[i])]
        )
    return header, rows


# compatibility ------------------------------------------------------------------------


def compatibility_defect(P: VekuaOperator, f_hat, xi: Sequence[int]):
    """(conj(sigma(-xi)) - conj(A)) f(xi) + B conj(f(-xi)); zero iff f is
    compatible at a frequency where Delta_xi = 0."""
    xi = check_frequency(xi, P.dim)
    d = conj(symbol_eval(P.L, neg(xi))) - conj(P.A)
    return d * f_hat[xi] + P.B * conj(f_hat[neg(xi)])
