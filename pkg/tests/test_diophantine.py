import itertools
import math
from fractions import Fraction

import mpmath
import pytest

from vekua.diophantine import (
    CertificateStatus,
    Kind,
    RealNumberSpec,
    cf_expand,
    convergents_of,
    irrationality_exponent_estimate,
    non_liouville_certificate,
    small_divisor_scan,
)

SQRT2 = RealNumberSpec.sqrt(2)


def test_parse_roundtrip():
    for text in ["rational:3/4", "sqrt:5", "quadratic:1,5,2", "decimal:1.4142", "liouville:10,3", "e", "pi"]:
        assert str(RealNumberSpec.parse(text)) == text
    assert RealNumberSpec.parse("sqrt:9/4") == RealNumberSpec.rational(3, 2)
    with pytest.raises(ValueError):
        RealNumberSpec.parse("cuberoot:2")
    with pytest.raises(ValueError):
        RealNumberSpec.sqrt(16)
    with pytest.raises(ValueError):
        RealNumberSpec(Kind.RATIONAL, (2, 4))


def test_cf_examples():
    cf = cf_expand(SQRT2, 30)
    assert cf.quotients == [1] + [2] * 29
    assert cf.period == (2,) and cf.preperiod == 1 and cf.exact

    cf = cf_expand(RealNumberSpec.rational(22, 7), 10)
    assert cf.quotients == [3, 7] and cf.terminated
    assert cf.convergents[-1] == (22, 7)

    cf = cf_expand(RealNumberSpec.quadratic(1, 5, 2), 20)  # golden ratio
    assert cf.quotients == [1] * 20 and cf.period == (1,)

    cf = cf_expand(RealNumberSpec.sqrt(7), 12)
    assert cf.quotients[:9] == [2, 1, 1, 1, 4, 1, 1, 1, 4] and cf.period == (1, 1, 1, 4)


def test_cf_liouville_growth():
    cf = cf_expand(RealNumberSpec.liouville(10, 4), 100)
    assert cf.terminated and cf.exact
    qs = [q for _, q in cf.convergents]
    # jumps at 10^2 -> ~10^6 (K=3) and ~10^6 -> ~10^18 (K=4)
    ratios = [math.log(qs[k + 1]) / math.log(qs[k]) for k in range(len(qs) - 1) if qs[k] >= 10**4]
    assert max(ratios) > 2.9


def test_cf_decimal_truncates_honestly():
    x = RealNumberSpec.decimal("3.14159265358979")
    cf = cf_expand(x, 50)
    assert not cf.exact
    assert cf.truncated_reason is not None and "precision exhausted" in cf.truncated_reason
    assert cf.depth < 50
    assert cf.quotients[:4] == [3, 7, 15, 1]


@pytest.mark.parametrize(
    "x",
    [SQRT2, RealNumberSpec.sqrt(13), RealNumberSpec.quadratic(3, 17, -4), RealNumberSpec.rational(355, 113),
     RealNumberSpec.liouville(10, 4), RealNumberSpec.named("pi"), RealNumberSpec.named("e"),
     RealNumberSpec.decimal("0.5772156649015328606")],
)
def test_determinant_identity(x):
    cf = cf_expand(x, 60)
    assert cf.determinant_errors() == []
    assert cf.convergents == convergents_of(cf.quotients)
    assert all(a >= 1 for a in cf.quotients[1:])


def test_quadratic_values_match_expansion():
    for x in [RealNumberSpec.quadratic(3, 17, -4), RealNumberSpec.quadratic(-2, 3, 5)]:
        cf = cf_expand(x, 40)
        p, q = cf.convergents[-1]
        with mpmath.workdps(60):
            assert abs(mpmath.mpf(p) / q - x.mp_value(60)) < mpmath.mpf(10) ** -20


def test_best_approximation_brute_force():
    # every convergent with q <= 500 is a best approximation of the second kind
    for x in [SQRT2, RealNumberSpec.named("pi"), RealNumberSpec.quadratic(1, 5, 2)]:
        v = x.mp_value(50)
        cf = cf_expand(x, 30)
        for p, q in cf.convergents:
            if q > 500 or q == 1:
                continue
            err = abs(q * v - p)
            for s in range(1, q):
                r = int(mpmath.nint(s * v))
                assert abs(s * v - r) > err


def test_exponent_estimates():
    est = irrationality_exponent_estimate(cf_expand(SQRT2, 30))
    assert 1.9 <= est.mu <= 2.1
    assert est.series and est.series[0][1] >= 2

    est = irrationality_exponent_estimate(cf_expand(RealNumberSpec.liouville(10, 6), 200))
    assert est.mu > 5

    # the K-term truncation shows exponent K at its last gap (10^((K-1)!) -> 10^(K! - (K-1)!))
    est = irrationality_exponent_estimate(cf_expand(RealNumberSpec.liouville(10, 5), 200))
    assert math.isclose(est.mu, 5.0, rel_tol=1e-12)

    est = irrationality_exponent_estimate(cf_expand(RealNumberSpec.rational(3, 7), 10))
    assert est.status == "NOT_APPLICABLE" and est.mu is None


def test_exponent_estimate_too_short():
    cf = cf_expand(SQRT2, 2)
    with pytest.raises(ValueError):
        irrationality_exponent_estimate(cf)
    with pytest.raises(ValueError):
        irrationality_exponent_estimate(cf_expand(SQRT2, 5))  # q_k never reaches 10^4


def test_certificates():
    c = non_liouville_certificate(SQRT2)
    assert c.status is CertificateStatus.CERTIFIED
    assert c.reason.startswith("periodic continued fraction, period [2]")
    assert non_liouville_certificate(RealNumberSpec.rational(1, 3)).status is CertificateStatus.NOT_IRRATIONAL
    assert non_liouville_certificate(RealNumberSpec.liouville(10, 3)).status is CertificateStatus.NOT_IRRATIONAL
    c = non_liouville_certificate(RealNumberSpec.named("e"))
    assert c.status is CertificateStatus.HEURISTIC and c.mu is not None
    c = non_liouville_certificate(RealNumberSpec.decimal("1.41"))
    assert c.status is CertificateStatus.UNKNOWN


def _brute_small_divisor(x, R, g):
    v = x.mp_value(60)
    best = None
    with mpmath.workdps(60):
        for r, tau in itertools.product(range(1, int(R) + 1), range(0, int(R) + 1)):
            if r + tau > R:
                continue
            val = abs(tau - v * r) * mpmath.mpf(r + tau) ** g
            if best is None or val < best[0]:
                best = (val, tau, r)
    return best


@pytest.mark.parametrize("x", [SQRT2, RealNumberSpec.named("pi"), RealNumberSpec.liouville(10, 3)])
@pytest.mark.parametrize("g", [0.5, 1.0, 2.0])
def test_small_divisor_scan_matches_brute_force(x, g):
    rep = small_divisor_scan(x, 60, g)
    val, tau, r = _brute_small_divisor(x, 60, g)
    assert math.isclose(rep.minimum, float(val), rel_tol=1e-12)
    assert rep.argmin == (tau, (r,))


def test_small_divisor_scan_examples():
    rep = small_divisor_scan(SQRT2, 200, 1.0)
    assert rep.argmin == (1, (1,))
    assert math.isclose(rep.minimum, 2 * (math.sqrt(2) - 1), rel_tol=1e-12)
    assert rep.convergent_denominators == [1, 2, 5, 12, 29, 70, 169]

    rep = small_divisor_scan(RealNumberSpec.rational(1), 50, 1.0)
    assert rep.minimum == 0.0 and rep.argmin == (1, (1,))

    # gamma0 = 1: the truncation's convergent q = 100 beats every other frequency
    rep = small_divisor_scan(RealNumberSpec.liouville(10, 3), 1e4, 1.0)
    assert rep.argmin == (11, (100,)) and rep.at_convergent
    assert rep.convergent_denominators == [1, 9, 100, 9909]


def test_small_divisor_scan_dim2_matches_enumeration():
    x = RealNumberSpec.sqrt(3)
    rep = small_divisor_scan(x, 20, 1.0, dim=2)
    best = None
    with mpmath.workdps(50):
        v = x.mp_value(50)
        for a, b in itertools.product(range(0, 21), repeat=2):
            s = a * a + b * b
            if s == 0:
                continue
            r = mpmath.sqrt(s)
            for tau in range(0, 21):
                if r + tau > 20:
                    continue
                val = abs(tau - v * r) * (r + tau)
                if best is None or val < best:
                    best = val
    assert math.isclose(rep.minimum, float(best), rel_tol=1e-12, abs_tol=1e-300)


def test_small_divisor_scan_precision_error():
    with pytest.raises(ValueError, match="precision insufficient"):
        small_divisor_scan(RealNumberSpec.decimal("1.4142"), 1000, 1.0)
    with pytest.raises(ValueError):
        small_divisor_scan(SQRT2, 10, 0.0)
