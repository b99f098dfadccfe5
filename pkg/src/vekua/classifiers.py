"""Solvability and global-hypoellipticity verdicts.

Named families (Laplace and other elliptic operators, heat, wave, complex
vector fields) are decided by their structural theorems.  Everything else,
and every family condition that cannot be checked structurally, falls back
to a discriminant scan, which only ever yields EVIDENCE.  Solvability and
global hypoellipticity are equivalent, so every verdict carries the same
status for both.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from enum import Enum
from fractions import Fraction
from typing import Optional

from .diophantine import CertificateStatus, RealNumberSpec, non_liouville_certificate
from .discriminant import DiscriminantScanReport, Evidence, dc_scan, delta
from .operator import (
    Ellipticity,
    OperatorSpec,
    VekuaOperator,
    ellipticity_check,
    vector_field,
    wave,
)
from .scalar import ZERO_TOL, GaussianRational, abs2, coerce, imag_part, is_exact, real_part


class Status(str, Enum):
    SOLVABLE = "SOLVABLE"
    NOT_SOLVABLE = "NOT_SOLVABLE"
    UNDETERMINED = "UNDETERMINED"


class FamilyKind(str, Enum):
    LAPLACE = "LAPLACE"
    HEAT = "HEAT"
    WAVE = "WAVE"
    VECTOR_FIELD = "VECTOR_FIELD"
    ELLIPTIC = "ELLIPTIC"
    GENERAL = "GENERAL"


@dataclass
class Family:
    kind: FamilyKind
    n: Optional[int] = None  # spatial dimension for heat/wave, torus dimension otherwise
    eta: Optional[RealNumberSpec] = None
    eta_squared: object = None  # Fraction when exact
    C: object = None

    def to_dict(self) -> dict:
        return {
            "kind": self.kind.value,
            "n": self.n,
            "eta": None if self.eta is None else str(self.eta),
            "eta_squared": None if self.eta_squared is None else str(self.eta_squared),
            "C": None if self.C is None else str(self.C),
        }


@dataclass
class TraceEntry:
    condition: str
    statement: str
    holds: Optional[bool]
    data: dict = field(default_factory=dict)

    def to_dict(self) -> dict:
        return {"condition": self.condition, "statement": self.statement, "holds": self.holds, "data": self.data}


@dataclass
class Certification:
    kind: str  # "THEOREM" or "EVIDENCE"
    name: Optional[str] = None
    matched: list[str] = field(default_factory=list)
    scan: Optional[DiscriminantScanReport] = None

    def to_dict(self) -> dict:
        out = {"kind": self.kind, "name": self.name, "matched": list(self.matched)}
        if self.scan is not None:
            out["scan"] = self.scan.to_dict()
        return out


@dataclass
class Verdict:
    solvable: Status
    globally_hypoelliptic: Status
    certification: Certification
    trace: list[TraceEntry] = field(default_factory=list)
    family: Optional[Family] = None
    leaning: Optional[Status] = None
    witness: Optional[dict] = None
    notes: list[str] = field(default_factory=list)

    def __post_init__(self):
        if self.solvable != self.globally_hypoelliptic:
            raise AssertionError("solvability and global hypoellipticity must agree")
        if self.certification.kind == "THEOREM" and self.solvable is Status.UNDETERMINED:
            raise AssertionError("a theorem certificate must be decisive")

    @property
    def decisive(self) -> bool:
        return self.solvable is not Status.UNDETERMINED

    def to_dict(self) -> dict:
        return {
            "solvable": self.solvable.value,
            "globally_hypoelliptic": self.globally_hypoelliptic.value,
            "certification": self.certification.to_dict(),
            "trace": [t.to_dict() for t in self.trace],
            "family": None if self.family is None else self.family.to_dict(),
            "leaning": None if self.leaning is None else self.leaning.value,
            "witness": self.witness,
            "notes": list(self.notes),
        }


def _verdict(status: Status, cert: Certification, trace, **kw) -> Verdict:
    return Verdict(status, status, cert, list(trace), **kw)


def _evidence_verdict(report: DiscriminantScanReport, trace, family=None, notes=()) -> Verdict:
    trace = list(trace) + [
        TraceEntry(
            "scan",
            "finite-box Diophantine scan",
            None,
            {"evidence": report.evidence.value, "radius": report.radius, "gamma_star": report.gamma_full},
        )
    ]
    cert = Certification("EVIDENCE", scan=report)
    if report.evidence is Evidence.SUPPORTED:
        return _verdict(Status.UNDETERMINED, cert, trace, family=family, leaning=Status.SOLVABLE, notes=list(notes))
    if report.evidence in (Evidence.ZEROS_AT_LARGE_NORM, Evidence.REFUTED_EVIDENCE):
        return _verdict(Status.NOT_SOLVABLE, cert, trace, family=family, notes=list(notes))
    return _verdict(Status.UNDETERMINED, cert, trace, family=family, notes=list(notes))


# recognition ---------------------------------------------------------------------


def _unit(d: int, j: int, k: int = 1) -> tuple[int, ...]:
    return tuple(k if i == j else 0 for i in range(d))


def _real_value(c):
    """Real part if c is real (exactly, or within tolerance), else None."""
    if isinstance(c, GaussianRational):
        return c.re if c.im == 0 else None
    c = complex(c)
    return c.real if abs(c.imag) <= ZERO_TOL * (1 + abs(c)) else None


def _eta_from_square(sq) -> Optional[RealNumberSpec]:
    if isinstance(sq, Fraction):
        return RealNumberSpec.from_square(sq)
    return RealNumberSpec.decimal(repr(math.sqrt(sq)))


def _time_space_family(terms: dict, d: int, time_order: int):
    """eta^2 if terms == {time_order*e0: 1, 2 e_j: -eta^2 (j >= 1)}, else None."""
    if d < 2 or set(terms) != {_unit(d, 0, time_order)} | {_unit(d, j, 2) for j in range(1, d)}:
        return None
    if _real_value(terms[_unit(d, 0, time_order)]) != 1:
        return None
    vals = [_real_value(terms[_unit(d, j, 2)]) for j in range(1, d)]
    if any(v is None for v in vals) or len(set(vals)) != 1 or not vals[0] < 0:
        return None
    return -vals[0]


def recognize(P: VekuaOperator) -> Family:
    L = P.L
    d, terms = L.dim, L.terms
    if set(terms) == {_unit(d, j, 2) for j in range(d)} and all(_real_value(c) == 1 for c in terms.values()):
        return Family(FamilyKind.LAPLACE, n=d)
    sq = _time_space_family(terms, d, 1)
    if sq is not None:
        return Family(FamilyKind.HEAT, n=d - 1, eta=_eta_from_square(sq), eta_squared=sq)
    sq = _time_space_family(terms, d, 2)
    if sq is not None:
        return Family(FamilyKind.WAVE, n=d - 1, eta=_eta_from_square(sq), eta_squared=sq)
    if d == 2 and set(terms) <= {(1, 0), (0, 1)} and (1, 0) in terms and terms[(1, 0)] == 1:
        C = terms.get((0, 1), GaussianRational(0) if L.exact else 0j)
        return Family(FamilyKind.VECTOR_FIELD, n=1, C=C)
    if ellipticity_check(L).status is Ellipticity.ELLIPTIC:
        return Family(FamilyKind.ELLIPTIC, n=d)
    return Family(FamilyKind.GENERAL, n=d)


# comparisons -------------------------------------------------------------------------


def _sq(x):
    """Exact square of a rational, float square otherwise."""
    return x * x


def _lt(x, y) -> bool:
    return x < y


def _eq(x, y) -> bool:
    if isinstance(x, Fraction) and isinstance(y, Fraction):
        return x == y
    return abs(float(x) - float(y)) <= ZERO_TOL * (1 + abs(float(x)) + abs(float(y)))


def _nonzero(x) -> bool:
    return not _eq(x, Fraction(0)) if not isinstance(x, Fraction) else x != 0


def _scalars(A, B):
    A, B = coerce(A), coerce(B)
    if not (is_exact(A) and is_exact(B)):
        A, B = complex(A), complex(B)
    return A, B


def _positive_eta(eta) -> RealNumberSpec:
    if not isinstance(eta, RealNumberSpec):
        if isinstance(eta, str):
            eta = RealNumberSpec.parse(eta)
        elif isinstance(eta, (int, Fraction)):
            q = Fraction(eta)
            eta = RealNumberSpec.rational(q.numerator, q.denominator) if q > 0 else None
        else:
            eta = RealNumberSpec.decimal(repr(float(eta))) if float(eta) > 0 else None
    if eta is None or not float(eta) > 0:
        raise ValueError("eta must be positive")
    return eta


# classifiers -----------------------------------------------------------------------------


def classify_elliptic(P: VekuaOperator) -> Verdict:
    res = ellipticity_check(P.L)
    entry = TraceEntry("elliptic", "principal symbol has no real zero", res.status is Ellipticity.ELLIPTIC, res.to_dict())
    if res.status is Ellipticity.ELLIPTIC:
        return _verdict(Status.SOLVABLE, Certification("THEOREM", "elliptic", ["elliptic"]), [entry],
                        family=Family(FamilyKind.ELLIPTIC, n=P.dim))
    note = "operator is not elliptic; use the family classifier" if res.status is Ellipticity.NOT_ELLIPTIC \
        else "ellipticity could not be decided"
    return _verdict(Status.UNDETERMINED, Certification("EVIDENCE"), [entry], notes=[note])


def classify_heat(eta, A=0, B=0, n: int = 1) -> Verdict:
    """Heat operators are solvable for every zero-order pair (A, B)."""
    eta = _positive_eta(eta)
    A, B = _scalars(A, B)
    e2 = eta.square()
    e2 = e2 if e2 is not None else float(eta) ** 2
    reA, imA = real_part(A), imag_part(A)
    trace = [
        TraceEntry("heat:tau=0", "Re Delta = (eta^2|xi|^2 - Re A)^2 + Im(A)^2 - |B|^2 grows like |xi|^4", True),
        TraceEntry("heat:tau!=0", "Im Delta = 2 tau (eta^2|xi|^2 - Re A) is bounded below off the resonant shell", True),
    ]
    shell = None
    if isinstance(e2, Fraction) and isinstance(reA, Fraction):
        s = reA / e2
        shell = int(s) if s.denominator == 1 and s >= 0 else None
    elif float(reA) >= 0:
        s = float(reA) / float(e2)
        shell = round(s) if abs(s - round(s)) <= 1e-9 * (1 + s) else None
    trace.append(
        TraceEntry(
            "heat:resonant",
            "on eta^2|xi|^2 = Re A, Re Delta = Im(A)^2 - |B|^2 - tau^2 vanishes for at most two tau",
            True,
            {"resonant_norm_squared": shell},
        )
    )
    fam = Family(FamilyKind.HEAT, n=n, eta=eta, eta_squared=e2)
    return _verdict(Status.SOLVABLE, Certification("THEOREM", "heat", ["heat"]), trace, family=fam)


def _cone_zero_family(eta: RealNumberSpec, n: int, A, B, radius: float) -> dict:
    """Exact zeros (p k, q k e_1) of Delta for rational eta = p/q, A purely
    imaginary with |A| = |B|; each listed member is checked exactly."""
    q = eta.exact_value()
    p, d = q.numerator, q.denominator
    P = VekuaOperator(wave(n, eta), A, B)
    members = []
    k = 1
    while math.hypot(p * k, d * k) <= max(radius, math.hypot(p, d)):
        xi = (p * k, d * k) + (0,) * (n - 1)
        if delta(P, xi):
            raise AssertionError(f"expected an exact zero at {xi}")
        members.append(list(xi))
        k += 1
    return {"family": "(p*k, q*k*e_1), k = 1, 2, ...", "p": p, "q": d, "verified_members": members}


def classify_wave(eta, A=0, B=0, n: int = 1, scan_radius: float = 64) -> Verdict:
    eta = _positive_eta(eta)
    A, B = _scalars(A, B)
    fam = Family(FamilyKind.WAVE, n=n, eta=eta, eta_squared=eta.square())
    reA, imA = real_part(A), imag_part(A)
    absB2, absA2 = abs2(B), abs2(A)
    trace = []

    c1 = _lt(absB2, _sq(imA)) and not _eq(absB2, _sq(imA))
    trace.append(TraceEntry("wave(i)", "|B| < |Im A|", c1, {"|B|^2": str(absB2), "Im(A)^2": str(_sq(imA))}))
    if c1:
        return _verdict(Status.SOLVABLE, Certification("THEOREM", "wave(i)", ["wave(i)"]), trace, family=fam)

    shape_ii = _eq(absA2, absB2) and not _nonzero(reA)
    cert = non_liouville_certificate(eta) if shape_ii else None
    trace.append(
        TraceEntry(
            "wave(ii)",
            "|A| = |B|, Re A = 0 and eta irrational non-Liouville",
            bool(shape_ii and cert.status is CertificateStatus.CERTIFIED),
            {"coefficients_match": shape_ii, "certificate": None if cert is None else cert.to_dict()},
        )
    )
    if shape_ii and cert.status is CertificateStatus.CERTIFIED:
        return _verdict(Status.SOLVABLE, Certification("THEOREM", "wave(ii)", ["wave(ii)"]), trace, family=fam)
    if shape_ii and cert.status is CertificateStatus.NOT_IRRATIONAL:
        witness = _cone_zero_family(eta, n, A, B, scan_radius)
        trace.append(TraceEntry("wave:rational-cone", "Delta vanishes on an explicit infinite family", True, witness))
        return _verdict(
            Status.NOT_SOLVABLE,
            Certification("THEOREM", "wave:rational-cone", ["wave:rational-cone"]),
            trace, family=fam, witness=witness,
        )

    trace.append(TraceEntry("wave(iii)", "Diophantine condition on the symbol (not decidable by scan)", None))
    e2 = eta.square()
    L = wave(n, eta) if e2 is not None else wave(n, float(eta))
    report = dc_scan(VekuaOperator(L, A, B), scan_radius)
    return _evidence_verdict(report, trace, family=fam)


def classify_vector_field(C, A=0, B=0, scan_radius: float = 128) -> Verdict:
    """d/dt + C d/dx on T^2 with zero-order pair (A, B)."""
    L = vector_field(C)
    C = L.terms.get((0, 1), 0)
    A, B = _scalars(A, B)
    exact = L.exact and is_exact(A)
    if not exact:
        A, B, C = complex(A), complex(B), complex(C)
    fam = Family(FamilyKind.VECTOR_FIELD, n=1, C=C)
    absA2, absB2 = abs2(A), abs2(B)
    trace = []

    checks = [
        ("vf(i)", "|B| > |A|", _lt(absA2, absB2) and not _eq(absA2, absB2), {}),
        ("vf(ii)", "Im C != 0", _nonzero(imag_part(C)), {"Im C": str(imag_part(C))}),
        ("vf(iii)", "|B| < |A| and Re A != 0",
         _lt(absB2, absA2) and not _eq(absA2, absB2) and _nonzero(real_part(A)), {}),
    ]
    for cid, text, holds, data in checks:
        trace.append(TraceEntry(cid, text, bool(holds), data))
        if holds:
            return _verdict(Status.SOLVABLE, Certification("THEOREM", cid, [cid]), trace, family=fam)

    diff = absA2 - absB2
    trace.append(
        TraceEntry(
            "vf(iv)",
            "Diophantine condition for the pair (C, sqrt(|A|^2 - |B|^2))",
            None,
            {"C": str(C), "sqrt(|A|^2-|B|^2)": math.sqrt(max(float(diff), 0.0))},
        )
    )
    P = VekuaOperator(L if exact else L.to_float(), A, B)
    report = dc_scan(P, scan_radius)
    return _evidence_verdict(report, trace, family=fam)


def classify_general(P: VekuaOperator, scan_radius: float = 64, family: Optional[Family] = None) -> Verdict:
    report = dc_scan(P, scan_radius)
    return _evidence_verdict(report, [], family=family or Family(FamilyKind.GENERAL, n=P.dim))


def analyze(P: VekuaOperator, R: float = 64, eta: Optional[RealNumberSpec] = None) -> Verdict:
    """Recognize the family of P and dispatch to its classifier.

    ``eta`` optionally names the wave/heat speed when the operator only
    carries eta^2 (for example a decimal eta whose square was rounded); it is
    used only if its square matches the operator.
    """
    fam = recognize(P)
    if fam.kind in (FamilyKind.LAPLACE, FamilyKind.ELLIPTIC):
        v = classify_elliptic(P)
        v.family = fam
        return v
    if fam.kind in (FamilyKind.HEAT, FamilyKind.WAVE):
        e = fam.eta
        if eta is not None and _eq(eta_square_value(eta), fam.eta_squared):
            e = eta
        if fam.kind is FamilyKind.HEAT:
            return classify_heat(e, P.A, P.B, n=fam.n)
        return classify_wave(e, P.A, P.B, n=fam.n, scan_radius=R)
    if fam.kind is FamilyKind.VECTOR_FIELD:
        return classify_vector_field(fam.C, P.A, P.B, scan_radius=R)
    return classify_general(P, R, fam)


def eta_square_value(eta: RealNumberSpec):
    sq = eta.square()
    return sq if sq is not None else float(eta) ** 2
