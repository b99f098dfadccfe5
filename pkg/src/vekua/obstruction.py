"""Non-solvability witnesses.

Case 1: Delta_xi = 0 at infinitely many frequencies, each imposing a
compatibility condition on f, so no finite-codimension space of right-hand
sides can be solved.

Case 2: Delta_xi != 0 but |Delta_xi| < |xi|^-l along a sequence xi_l.  A
right-hand side concentrated on that sequence decays rapidly while the
forced solution does not.

All witnesses are built from exact operators so the defining identities
hold without rounding.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from enum import Enum
from fractions import Fraction
from typing import Callable, Optional, Sequence

import numpy as np

from .discriminant import delta, evaluate_batch, zero_set
from .fields import CoefficientField
from .lattice import ball_points, canonical_pairs, neg, norm
from .operator import VekuaOperator, check_frequency, symbol_eval
from .scalar import conj, log_modulus, modulus


class WitnessKind(str, Enum):
    INFINITE_COMPATIBILITY = "INFINITE_COMPATIBILITY"
    SLOW_DECAY = "SLOW_DECAY"


# slow sequences ---------------------------------------------------------------------


@dataclass
class SlowTerm:
    xi: tuple[int, ...]
    abs_delta: float
    log_abs_delta: float
    level: int  # l with |Delta| < |xi|^-rate(l)


@dataclass
class SlowSequence:
    terms: list[SlowTerm]
    sign_coordinate: Optional[int] = None
    flags: list[str] = field(default_factory=list)
    candidates: int = 0

    @property
    def frequencies(self) -> list[tuple[int, ...]]:
        return [t.xi for t in self.terms]

    def __len__(self):
        return len(self.terms)

    def __iter__(self):
        return iter((t.xi, t.abs_delta) for t in self.terms)


def _wave_parameters(P: VekuaOperator):
    """(n, eta^2) when P is an exact wave operator, else None."""
    from .classifiers import FamilyKind, recognize

    if not P.exact:
        return None
    fam = recognize(P)
    if fam.kind is not FamilyKind.WAVE:
        return None
    return fam.n, fam.eta_squared


def _wave_candidates(P: VekuaOperator, n: int, e2, R: float) -> list[tuple[tuple[int, ...], float]]:
    """Frequencies with 0 < |Delta| < 1 for an exact wave operator.

    Delta = (c - tau^2)^2 + Im(A)^2 - |B|^2 with c = eta^2 |xi|^2 - Re A, so
    |Delta| < 1 forces tau^2 within O(1) of a root in t = tau^2; only the
    integers next to sqrt(root) are tested, first in floating point with a
    wide margin and then exactly.
    """
    spatial = ball_points(n, R)
    s = (spatial.astype(np.float64) ** 2).sum(axis=1)
    reA, imA = float(P.A.re), float(P.A.im)
    dd = imA * imA - float(P.B.abs2())
    c = float(e2) * s - reA
    roots = [c] if dd >= 0 else [c + math.sqrt(-dd), c - math.sqrt(-dd)]
    found = {}
    for t in roots:
        base = np.floor(np.sqrt(np.maximum(t, 0.0))).astype(np.int64)
        for off in (-1, 0, 1, 2):
            tau = base + off
            ok = tau >= 0
            tf = tau.astype(np.float64)
            val = (c - tf * tf) ** 2 + dd
            keep = ok & (np.abs(val) < 4.0) & (tf * tf + s <= R * R + 1e-9)
            for i in np.flatnonzero(keep):
                xs = tuple(int(v) for v in spatial[i])
                for sgn in ((1, -1) if tau[i] else (1,)):
                    xi = (sgn * int(tau[i]),) + xs
                    if xi in found or not any(xi):
                        continue
                    found[xi] = None
    out = []
    for xi in found:
        d = delta(P, xi)
        if d and d.abs2() < 1:
            out.append((xi, log_modulus(d)))
    return out


def _generic_candidates(P: VekuaOperator, R: float):
    table = evaluate_batch(P, ball_points(P.dim, R))
    mask = (~table.is_zero) & (table.log_modulus < 0)
    return [(tuple(int(c) for c in table.points[i]), float(table.log_modulus[i])) for i in np.flatnonzero(mask)]


def _sign_normalize(cands, dim: int):
    """Pick the first coordinate that is nonzero on the tail half of the
    candidates (ordered by norm), drop candidates vanishing there and flip
    the rest so that coordinate is positive."""
    flags = []
    if not cands:
        return [], None, flags
    ordered = sorted(cands, key=lambda c: (norm(c[0]), c[0]))
    tail = ordered[len(ordered) // 2:]
    coord = next((j for j in range(dim) if all(c[0][j] != 0 for c in tail)), None)
    if coord is None:
        counts = [sum(1 for c in tail if c[0][j] != 0) for j in range(dim)]
        coord = int(np.argmax(counts))
        flags.append(f"no coordinate is nonzero on the whole tail; using coordinate {coord}")
    out = {}
    for xi, lg in ordered:
        if xi[coord] == 0:
            continue
        key = xi if xi[coord] > 0 else neg(xi)
        out.setdefault(key, lg)
    return sorted(out.items(), key=lambda c: (norm(c[0]), c[0])), coord, flags


def find_slow_sequence(
    P: VekuaOperator,
    R: float,
    rate: Optional[Callable[[int], float]] = None,
) -> SlowSequence:
    """Greedy sequence xi_1, xi_2, ... with |xi_l| >= l, strictly increasing
    norms and 0 < |Delta_{xi_l}| < |xi_l|^-rate(l) (default rate(l) = l)."""
    rate = rate or (lambda l: float(l))
    params = _wave_parameters(P)
    if params is not None and isinstance(params[1], Fraction):
        cands = _wave_candidates(P, params[0], params[1], R)
    else:
        cands = _generic_candidates(P, R)
    normalized, coord, flags = _sign_normalize(cands, P.dim)
    terms = []
    level, prev = 1, 0.0
    for xi, lg in normalized:
        r = norm(xi)
        if r <= prev or r < level:
            continue
        if lg < -rate(level) * math.log(r):
            terms.append(SlowTerm(xi, math.exp(lg) if lg > -700 else 0.0, lg, level))
            prev = r
            level += 1
    return SlowSequence(terms, coord, flags, len(cands))


# case 1 ------------------------------------------------------------------------------


@dataclass
class CompatibilityFunctional:
    """f -> coeff_f * f(xi) + coeff_conj * conj(f(-xi)); must vanish for solvability."""

    xi: tuple[int, ...]
    coeff_f: object
    coeff_conj: object

    def __call__(self, f: CoefficientField):
        return self.coeff_f * f[self.xi] + self.coeff_conj * conj(f[neg(self.xi)])


def build_case1_conditions(P: VekuaOperator, R: float) -> list[CompatibilityFunctional]:
    """One compatibility functional per zero pair {xi, -xi} (xi = 0 included)."""
    zs = zero_set(P, R)
    out = []
    for xi in canonical_pairs(zs):
        d = conj(symbol_eval(P.L, neg(xi))) - conj(P.A)
        out.append(CompatibilityFunctional(xi, d, P.B))
    return out


def case1_growth(P: VekuaOperator, radii: Sequence[float]) -> list[tuple[float, int]]:
    return [(r, len(build_case1_conditions(P, r))) for r in radii]


# case 2 ------------------------------------------------------------------------------


@dataclass
class DiagnosticRow:
    norm: float
    abs_f: float
    abs_u: float
    abs_u_minus: Optional[float] = None


@dataclass
class ObstructionWitness:
    kind: WitnessKind
    frequencies: list[tuple[int, ...]]
    f_hat: CoefficientField
    induced_u_hat: CoefficientField
    diagnostics: list[DiagnosticRow]
    branch: str = ""
    consistent: bool = False
    dropped: list[tuple[int, ...]] = field(default_factory=list)
    flags: list[str] = field(default_factory=list)


def check_one_sided(omega: Sequence[Sequence[int]]) -> list[tuple[int, ...]]:
    pts = [tuple(int(c) for c in xi) for xi in omega]
    s = set(pts)
    if len(s) != len(pts):
        raise ValueError("frequency list has duplicates")
    for xi in pts:
        if neg(xi) in s:
            raise ValueError(f"frequency list is not one-sided: contains {xi} and {neg(xi)}")
    return pts


def build_case2_witness(P: VekuaOperator, omega: Sequence[Sequence[int]]) -> ObstructionWitness:
    """f and the induced projection of u on a one-sided slow sequence.

    B != 0: f(xi) = Delta_xi, u(xi) = conj(sigma(-xi)) - conj(A), u(-xi) = B.
    B == 0: Delta factors as (sigma(xi) - A) conj(sigma(-xi) - A); the side
    whose factor is small more often is kept and there f = that factor, u = 1.
    """
    if not P.exact:
        raise ValueError("witnesses need an exact operator (use rational truncations)")
    pts = [check_frequency(xi, P.dim) for xi in check_one_sided(omega)]
    f, u = {}, {}
    rows = []
    dropped = []
    if P.B:
        branch = "B!=0"
        for xi in pts:
            dx = delta(P, xi)
            ux = conj(symbol_eval(P.L, neg(xi))) - conj(P.A)
            f[xi] = dx
            u[xi] = ux
            u[neg(xi)] = P.B
            rows.append(DiagnosticRow(norm(xi), modulus(dx), modulus(ux), modulus(P.B)))
        used = pts
    else:
        branch = "B=0"
        plus = [xi for xi in pts
                if (symbol_eval(P.L, xi) - P.A).abs2() <= (symbol_eval(P.L, neg(xi)) - P.A).abs2()]
        if 2 * len(plus) >= len(pts):
            used = plus
        else:
            used = [neg(xi) for xi in pts if xi not in set(plus)]
        dropped = [xi for xi in pts if xi not in set(used) and neg(xi) not in set(used)]
        for xi in used:
            fx = symbol_eval(P.L, xi) - P.A
            f[xi] = fx
            u[xi] = 1
            rows.append(DiagnosticRow(norm(xi), modulus(fx), 1.0))
    f_field = CoefficientField(P.dim, f)
    u_field = CoefficientField(P.dim, u)
    consistent = _pairwise_consistent(P, f_field, u_field, used)
    return ObstructionWitness(
        WitnessKind.SLOW_DECAY, list(used), f_field, u_field, rows, branch, consistent, dropped
    )


def _pairwise_consistent(P: VekuaOperator, f: CoefficientField, u: CoefficientField, omega) -> bool:
    from .solver import apply

    for xi in omega:
        local = u.restrict([xi, neg(xi)])
        g = apply(P, local)
        if g[xi] != f[xi] or g[neg(xi)] != f[neg(xi)]:
            return False
    return True


def slow_decay_witness(P: VekuaOperator, R: float, rate=None) -> tuple[SlowSequence, Optional[ObstructionWitness]]:
    seq = find_slow_sequence(P, R, rate)
    if not seq.terms:
        return seq, None
    w = build_case2_witness(P, seq.frequencies)
    w.flags.extend(seq.flags)
    return seq, w


# decay ---------------------------------------------------------------------------------


@dataclass
class DecayOrder:
    order: int
    sup: float
    log_sup: float
    head_log_sup: float
    passes: bool


@dataclass
class DecayReport:
    orders: list[DecayOrder]
    support_size: int

    def passes(self, k: int) -> bool:
        return next(o.passes for o in self.orders if o.order == k)

    def passes_all(self) -> bool:
        return all(o.passes for o in self.orders)

    def first_failure(self) -> Optional[int]:
        return next((o.order for o in self.orders if not o.passes), None)


def decay_report(fld: CoefficientField, orders: Sequence[int] = range(11)) -> DecayReport:
    """sup |xi|^k |c(xi)| per order k.

    Order k passes when the sup over the whole support is finite and already
    attained on the inner half of the support (ordered by norm): the weighted
    coefficients do not grow along the truncation.
    """
    pts = fld.support()
    head_n = math.ceil(len(pts) / 2)
    logs = []
    for xi in pts:
        r = norm(xi)
        logs.append((math.log(r) if r > 0 else -math.inf, log_modulus(fld[xi])))
    out = []
    for k in orders:
        vals = []
        for lr, lc in logs:
            if lc == -math.inf:
                vals.append(-math.inf)
            elif k == 0:
                vals.append(lc)
            else:
                vals.append(k * lr + lc)
        if not vals:
            out.append(DecayOrder(k, 0.0, -math.inf, -math.inf, True))
            continue
        full = max(vals)
        head = max(vals[:head_n])
        finite = math.isfinite(full) or full == -math.inf
        passes = finite and full <= head + 1e-12
        sup = math.exp(full) if full < 700 else math.inf
        out.append(DecayOrder(k, sup, full, head, passes))
    return DecayReport(out, len(pts))


def diagnostics_rows(w: ObstructionWitness):
    header = ["norm", "abs_f", "abs_u"]
    return header, [[r.norm, r.abs_f, r.abs_u] for r in w.diagnostics]
