"""Continued fractions, irrationality-exponent estimates and small divisors.

Real numbers enter through :class:`RealNumberSpec`, which keeps track of how a
value is known (exact rational, quadratic surd, decimal with finite precision,
truncated Liouville series, or a named constant).  Expansions never emit a
partial quotient that the available precision cannot certify.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from enum import Enum
from fractions import Fraction
from typing import Optional

import mpmath

DEFAULT_PRECISION = 256  # decimal digits


class Kind(str, Enum):
    RATIONAL = "rational"
    SQRT = "sqrt"
    QUADRATIC = "quadratic"
    DECIMAL = "decimal"
    LIOUVILLE_TRUNC = "liouville"
    NAMED = "named"


def _is_square(n: int) -> bool:
    return n >= 0 and math.isqrt(n) ** 2 == n


@dataclass(frozen=True)
class RealNumberSpec:
    """A positive real number together with the way it is known.

    ``params`` depends on ``kind``:

    * RATIONAL: ``(p, q)`` in lowest terms, ``q >= 1``
    * SQRT: ``(d,)`` with ``d`` a positive non-square integer
    * QUADRATIC: ``(P, D, Q)`` for ``(P + sqrt(D)) / Q``, ``D`` non-square
    * DECIMAL: ``(text, digits)``, significant digits declared by the caller
    * LIOUVILLE_TRUNC: ``(b, K)`` for ``sum_{k=1..K} b**(-k!)``
    * NAMED: ``("e",)`` or ``("pi",)``
    """

    kind: Kind
    params: tuple
    precision: int = DEFAULT_PRECISION

    def __post_init__(self):
        k, p = self.kind, self.params
        if k is Kind.RATIONAL:
            num, den = p
            if den < 1 or math.gcd(num, den) != 1:
                raise ValueError("RATIONAL needs q >= 1 and gcd(p, q) = 1")
        elif k is Kind.SQRT:
            (d,) = p
            if d <= 0 or _is_square(d):
                raise ValueError(f"SQRT needs a positive non-square integer, got {d}")
        elif k is Kind.QUADRATIC:
            _, d, q = p
            if d <= 0 or _is_square(d) or q == 0:
                raise ValueError("QUADRATIC needs D > 0 non-square and Q != 0")
        elif k is Kind.DECIMAL:
            text, digits = p
            Fraction(text)
            if digits < 1:
                raise ValueError("DECIMAL needs a positive digit count")
        elif k is Kind.LIOUVILLE_TRUNC:
            b, depth = p
            if b < 2 or depth < 1:
                raise ValueError("LIOUVILLE_TRUNC needs base >= 2 and depth >= 1")
        elif k is Kind.NAMED:
            if p not in (("e",), ("pi",)):
                raise ValueError(f"unknown named constant {p}")

    # constructors ---------------------------------------------------------
    @classmethod
    def rational(cls, p: int, q: int = 1) -> RealNumberSpec:
        f = Fraction(p, q)
        return cls(Kind.RATIONAL, (f.numerator, f.denominator))

    @classmethod
    def sqrt(cls, d: int) -> RealNumberSpec:
        return cls(Kind.SQRT, (d,))

    @classmethod
    def quadratic(cls, P: int, D: int, Q: int) -> RealNumberSpec:
        return cls(Kind.QUADRATIC, (P, D, Q))

    @classmethod
    def decimal(cls, text: str, digits: Optional[int] = None) -> RealNumberSpec:
        if digits is None:
            digits = len(text.replace("-", "").replace(".", "").lstrip("0")) or 1
        return cls(Kind.DECIMAL, (text, digits))

    @classmethod
    def liouville(cls, base: int, depth: int) -> RealNumberSpec:
        return cls(Kind.LIOUVILLE_TRUNC, (base, depth))

    @classmethod
    def named(cls, name: str) -> RealNumberSpec:
        return cls(Kind.NAMED, (name,))

    @classmethod
    def from_square(cls, sq: Fraction) -> RealNumberSpec:
        """The positive square root of an exact rational."""
        sq = Fraction(sq)
        if sq <= 0:
            raise ValueError("square must be positive")
        p, q = sq.numerator, sq.denominator
        if _is_square(p) and _is_square(q):
            return cls.rational(math.isqrt(p), math.isqrt(q))
        if q == 1:
            return cls.sqrt(p)
        return cls.quadratic(0, p * q, q)

    @classmethod
    def parse(cls, text: str) -> RealNumberSpec:
        """Parse the CLI syntax: rational:p/q, sqrt:d, quadratic:P,D,Q,
        decimal:<digits>, liouville:b,K, e, pi."""
        text = text.strip()
        if text in ("e", "pi"):
            return cls.named(text)
        head, sep, body = text.partition(":")
        if not sep:
            raise ValueError(f"bad real-number spec {text!r}")
        head = head.lower()
        if head == "rational":
            f = Fraction(body)
            return cls.rational(f.numerator, f.denominator)
        if head == "sqrt":
            d = Fraction(body)
            if d.denominator != 1:
                return cls.from_square(d)
            return cls.sqrt(int(d))
        if head == "quadratic":
            P, D, Q = (int(s) for s in body.split(","))
            return cls.quadratic(P, D, Q)
        if head == "decimal":
            return cls.decimal(body)
        if head == "liouville":
            b, k = (int(s) for s in body.split(","))
            return cls.liouville(b, k)
        raise ValueError(f"unknown real-number kind {head!r}")

    def __str__(self) -> str:
        k, p = self.kind, self.params
        if k is Kind.RATIONAL:
            return f"rational:{p[0]}/{p[1]}"
        if k is Kind.SQRT:
            return f"sqrt:{p[0]}"
        if k is Kind.QUADRATIC:
            return f"quadratic:{p[0]},{p[1]},{p[2]}"
        if k is Kind.DECIMAL:
            return f"decimal:{p[0]}"
        if k is Kind.LIOUVILLE_TRUNC:
            return f"liouville:{p[0]},{p[1]}"
        return p[0]

    # values ---------------------------------------------------------------
    @property
    def is_rational(self) -> bool:
        return self.kind in (Kind.RATIONAL, Kind.LIOUVILLE_TRUNC)

    def exact_value(self) -> Optional[Fraction]:
        if self.kind is Kind.RATIONAL:
            return Fraction(*self.params)
        if self.kind is Kind.LIOUVILLE_TRUNC:
            b, depth = self.params
            return sum(Fraction(1, b ** math.factorial(k)) for k in range(1, depth + 1))
        return None

    def square(self) -> Optional[Fraction]:
        """The exact square when it is rational, else None."""
        v = self.exact_value()
        if v is not None:
            return v * v
        if self.kind is Kind.SQRT:
            return Fraction(self.params[0])
        if self.kind is Kind.QUADRATIC and self.params[0] == 0:
            _, d, q = self.params
            return Fraction(d, q * q)
        return None

    def mp_value(self, dps: Optional[int] = None):
        dps = dps or self.precision
        with mpmath.workdps(dps + 10):
            k, p = self.kind, self.params
            if k is Kind.SQRT:
                v = mpmath.sqrt(p[0])
            elif k is Kind.QUADRATIC:
                v = (p[0] + mpmath.sqrt(p[1])) / p[2]
            elif k is Kind.DECIMAL:
                v = mpmath.mpf(p[0])
            elif k is Kind.NAMED:
                v = +mpmath.e if p[0] == "e" else +mpmath.pi
            else:
                f = self.exact_value()
                v = mpmath.mpf(f.numerator) / f.denominator
            return +v

    def __float__(self) -> float:
        return float(self.mp_value(30))

    @property
    def digits(self) -> Optional[int]:
        """Trustworthy significant digits, None when the value is exact."""
        if self.kind is Kind.DECIMAL:
            return self.params[1]
        if self.kind is Kind.NAMED:
            return self.precision
        return None

    def interval(self) -> tuple[Fraction, Fraction]:
        """Rational bracket [lo, hi] guaranteed to contain the value."""
        v = self.exact_value()
        if v is not None:
            return v, v
        if self.kind is Kind.DECIMAL:
            text, digits = self.params
            c = Fraction(text)
            if c == 0:
                return Fraction(0), Fraction(0)
            e = math.floor(math.log10(abs(float(c))))
            h = Fraction(1, 2) * Fraction(10) ** (e - digits + 1)
            return c - h, c + h
        dps = self.precision
        with mpmath.workdps(dps + 20):
            c = _mpf_fraction(self.mp_value(dps + 20))
        h = Fraction(1, 10 ** dps)
        return c - h, c + h


def _mpf_fraction(m) -> Fraction:
    man, exp = mpmath.mpf(m).man_exp
    return Fraction(int(man)) * (Fraction(2) ** int(exp))


# continued fractions -------------------------------------------------------


@dataclass
class ContinuedFraction:
    quotients: list[int]
    convergents: list[tuple[int, int]]
    exact: bool
    terminated: bool = False  # expansion of a rational ran to completion
    preperiod: Optional[int] = None
    period: Optional[tuple[int, ...]] = None
    truncated_reason: Optional[str] = None
    source: Optional[RealNumberSpec] = None

    @property
    def depth(self) -> int:
        return len(self.quotients)

    def determinant_errors(self) -> list[int]:
        """Indices k where p_k q_{k-1} - p_{k-1} q_k != (-1)^(k-1)."""
        bad = []
        prev = (1, 0)
        for k, (p, q) in enumerate(self.convergents):
            if p * prev[1] - prev[0] * q != (1 if (k - 1) % 2 == 0 else -1):
                bad.append(k)
            prev = (p, q)
        return bad

    def to_dict(self) -> dict:
        return {
            "quotients": list(self.quotients),
            "convergents": [[p, q] for p, q in self.convergents],
            "exact": self.exact,
            "terminated": self.terminated,
            "preperiod": self.preperiod,
            "period": list(self.period) if self.period is not None else None,
            "truncated_reason": self.truncated_reason,
        }


def convergents_of(quotients: list[int]) -> list[tuple[int, int]]:
    out = []
    p0, q0, p1, q1 = 0, 1, 1, 0
    for a in quotients:
        p0, q0, p1, q1 = p1, q1, a * p1 + p0, a * q1 + q0
        out.append((p1, q1))
    return out


def _cf_rational(x: Fraction, depth: int) -> tuple[list[int], bool]:
    quotients = []
    num, den = x.numerator, x.denominator
    while len(quotients) < depth:
        a, r = divmod(num, den)
        quotients.append(a)
        if r == 0:
            return quotients, True
        num, den = den, r
    return quotients, False


def _cf_quadratic(P: int, D: int, Q: int, depth: int):
    """Expansion of (P + sqrt(D)) / Q with exact period detection."""
    if (D - P * P) % Q != 0:
        P, D, Q = P * abs(Q), D * Q * Q, Q * abs(Q)
    r = math.isqrt(D)
    seen: dict[tuple[int, int], int] = {}
    quotients: list[int] = []
    preperiod = period = None
    while len(quotients) < depth:
        state = (P, Q)
        if state in seen and period is None:
            start = seen[state]
            preperiod = start
            period = tuple(quotients[start:])
        seen.setdefault(state, len(quotients))
        if Q > 0:
            a = (P + r) // Q
        else:
            a = -((P + r) // (-Q)) - 1
        quotients.append(a)
        P = a * Q - P
        Q = (D - P * P) // Q
    if period is None:
        # run the state machine on without recording until the period closes
        P2, Q2, idx = P, Q, len(quotients)
        extra: list[int] = []
        while (P2, Q2) not in seen and len(extra) < 4 * depth + 64:
            seen[(P2, Q2)] = idx
            a = (P2 + r) // Q2 if Q2 > 0 else -((P2 + r) // (-Q2)) - 1
            extra.append(a)
            P2 = a * Q2 - P2
            Q2 = (D - P2 * P2) // Q2
            idx += 1
        if (P2, Q2) in seen:
            start = seen[(P2, Q2)]
            full = quotients + extra
            preperiod = start
            period = tuple(full[start:])
    return quotients, preperiod, period


def _cf_interval(lo: Fraction, hi: Fraction, depth: int):
    quotients: list[int] = []
    reason = None
    while len(quotients) < depth:
        a_lo, a_hi = math.floor(lo), math.floor(hi)
        if a_lo != a_hi:
            reason = "precision exhausted: interval straddles an integer"
            break
        quotients.append(a_lo)
        flo, fhi = lo - a_lo, hi - a_lo
        if flo <= 0:
            reason = "precision exhausted: remainder interval reaches zero"
            break
        lo, hi = 1 / fhi, 1 / flo
    return quotients, reason


def cf_expand(x: RealNumberSpec, depth: int) -> ContinuedFraction:
    """Continued-fraction expansion of ``x`` to at most ``depth`` quotients.

    Rationals expand exactly and terminate; quadratic surds expand exactly
    with their period detected; everything else is expanded from a rational
    bracket and stops early (with ``truncated_reason``) once the bracket can
    no longer certify the next quotient.
    """
    if depth < 1:
        raise ValueError("depth must be >= 1")
    v = x.exact_value()
    if v is not None:
        q, done = _cf_rational(v, depth)
        return ContinuedFraction(q, convergents_of(q), exact=True, terminated=done, source=x)
    if x.kind in (Kind.SQRT, Kind.QUADRATIC):
        P, D, Q = (0, x.params[0], 1) if x.kind is Kind.SQRT else x.params
        q, pre, per = _cf_quadratic(P, D, Q, depth)
        return ContinuedFraction(
            q, convergents_of(q), exact=True, preperiod=pre, period=per, source=x
        )
    lo, hi = x.interval()
    q, reason = _cf_interval(lo, hi, depth)
    return ContinuedFraction(
        q, convergents_of(q), exact=False, truncated_reason=reason, source=x
    )


@dataclass
class ExponentEstimate:
    mu: Optional[float]
    series: list[tuple[int, int, float]] = field(default_factory=list)  # (k, q_k, mu_k)
    status: str = "ESTIMATED"  # or NOT_APPLICABLE
    min_denominator: int = 10**4

    def to_dict(self) -> dict:
        return {
            "mu": self.mu,
            "status": self.status,
            "min_denominator": self.min_denominator,
            "series": [[k, str(q), m] for k, q, m in self.series],
        }


def irrationality_exponent_estimate(
    cf: ContinuedFraction, min_denominator: int = 10**4
) -> ExponentEstimate:
    """Estimate the irrationality exponent from convergent denominators.

    Per-step exponents mu_k = 1 + log q_{k+1} / log q_k are tabulated for every
    k with q_k >= 2; the estimate is their maximum over the asymptotic part of
    the expansion, q_k >= ``min_denominator``.  Convergents with smaller
    denominators are dominated by the additive constant in log q_{k+1} and
    overstate the exponent (sqrt(2) gives 3.3 at q = 2).
    """
    if cf.source is not None and cf.source.kind is Kind.RATIONAL:
        return ExponentEstimate(None, status="NOT_APPLICABLE", min_denominator=min_denominator)
    qs = [q for _, q in cf.convergents]
    if len(qs) < 3:
        raise ValueError("need at least 3 convergents to estimate an exponent")
    series = []
    for k in range(len(qs) - 1):
        if qs[k] >= 2:
            series.append((k, qs[k], 1.0 + math.log(qs[k + 1]) / math.log(qs[k])))
    tail = [m for k, q, m in series if q >= min_denominator]
    if not tail:
        raise ValueError(
            f"expansion too short: no convergent denominator reaches {min_denominator}"
        )
    return ExponentEstimate(max(tail), series, min_denominator=min_denominator)


class CertificateStatus(str, Enum):
    CERTIFIED = "CERTIFIED"
    HEURISTIC = "HEURISTIC"
    NOT_IRRATIONAL = "NOT_IRRATIONAL"
    UNKNOWN = "UNKNOWN"


@dataclass
class Certificate:
    status: CertificateStatus
    reason: str
    mu: Optional[float] = None

    def to_dict(self) -> dict:
        return {"status": self.status.value, "reason": self.reason, "mu": self.mu}


def non_liouville_certificate(x: RealNumberSpec, depth: int = 64) -> Certificate:
    if x.is_rational:
        return Certificate(CertificateStatus.NOT_IRRATIONAL, f"{x} is rational")
    if x.kind in (Kind.SQRT, Kind.QUADRATIC):
        cf = cf_expand(x, max(depth, 1))
        if cf.period is None:
            return Certificate(CertificateStatus.UNKNOWN, "period not detected")
        per = ",".join(str(a) for a in cf.period)
        return Certificate(
            CertificateStatus.CERTIFIED,
            f"periodic continued fraction, period [{per}]: bounded partial quotients, exponent 2",
            mu=2.0,
        )
    cf = cf_expand(x, depth)
    try:
        est = irrationality_exponent_estimate(cf)
    except ValueError as exc:
        return Certificate(CertificateStatus.UNKNOWN, str(exc))
    return Certificate(
        CertificateStatus.HEURISTIC,
        f"finite-depth estimate from {cf.depth} certified partial quotients",
        mu=est.mu,
    )


# small divisors ------------------------------------------------------------


@dataclass
class SmallDivisorReport:
    radius: float
    gamma0: float
    dim: int
    minimum: float
    argmin: tuple[int, tuple[int, ...]]  # (tau, xi)
    at_convergent: Optional[bool]
    convergent_denominators: list[int]

    def to_dict(self) -> dict:
        return {
            "radius": self.radius,
            "gamma0": self.gamma0,
            "dim": self.dim,
            "minimum": self.minimum,
            "argmin": {"tau": self.argmin[0], "xi": list(self.argmin[1])},
            "at_convergent": self.at_convergent,
            "convergent_denominators": self.convergent_denominators,
        }


def required_digits(R: float, x: RealNumberSpec) -> int:
    intpart = max(1, int(math.log10(max(float(x), 1.0))) + 1)
    return math.ceil(2 * math.log10(R + 1)) + 6 + intpart


def _norm_squares(dim: int, R: float):
    """One representative xi per distinct squared norm 0 < |xi|^2 <= R^2."""
    if dim == 1:
        return [(s * s, (s,)) for s in range(1, int(math.floor(R)) + 1)]
    import numpy as np

    from .lattice import ball_points

    pts = ball_points(dim, R)
    sq = (pts.astype(np.int64) ** 2).sum(axis=1)
    reps: dict[int, tuple[int, ...]] = {}
    for s, p in zip(sq.tolist(), pts.tolist()):
        if s and s not in reps:
            reps[s] = tuple(abs(c) for c in p)
    return sorted(reps.items())


def small_divisor_scan(
    eta: RealNumberSpec, R: float, gamma0: float, dim: int = 1
) -> SmallDivisorReport:
    """Minimize |tau -/+ eta |xi|| (|xi| + |tau|)^gamma0 over 0 < |xi|, |xi| + |tau| <= R.

    For each norm r only tau in {0, floor(eta r), ceil(eta r)} can minimize:
    beyond ceil both factors grow, and on [0, eta r] the logarithm of the
    product is concave in tau.
    """
    if gamma0 <= 0:
        raise ValueError("gamma0 must be positive")
    digits = eta.digits
    need = required_digits(R, eta)
    if digits is not None and digits < need:
        raise ValueError(
            f"precision insufficient for R={R}: {digits} digits available, {need} required"
        )
    sq = eta.square()
    dps = max(need + 10, 30)
    best = None
    with mpmath.workdps(dps):
        eta_mp = None if sq is not None else eta.mp_value(dps)
        g = mpmath.mpf(gamma0)
        for s, xi in _norm_squares(dim, R):
            r = mpmath.sqrt(s)
            if r > R:
                break
            if sq is not None:
                n = sq.numerator * s * sq.denominator
                fl = math.isqrt(n) // sq.denominator
                y = mpmath.sqrt(mpmath.mpf(sq.numerator * s) / sq.denominator)
            else:
                y = eta_mp * r
                fl = int(mpmath.floor(y))
            for tau in sorted({0, fl, fl + 1}):
                if r + tau > R:
                    continue
                val = abs(tau - y) * (r + tau) ** g
                if best is None or val < best[0]:
                    best = (val, tau, xi)
    if best is None:
        raise ValueError("empty scan region")
    at_conv = None
    qs: list[int] = []
    if dim == 1:
        cf = cf_expand(eta, 200)
        qs = [q for _, q in cf.convergents if q <= R]
        at_conv = best[2][0] in qs
    return SmallDivisorReport(
        radius=R,
        gamma0=gamma0,
        dim=dim,
        minimum=float(best[0]),
        argmin=(best[1], best[2]),
        at_convergent=at_conv,
        convergent_denominators=qs,
    )
