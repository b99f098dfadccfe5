import math
import random
from fractions import Fraction

import numpy as np
import pytest

from conftest import random_frequency, random_operator
from vekua.operator import (
    DimensionError,
    Ellipticity,
    OperatorSpec,
    VekuaOperator,
    ellipticity_check,
    heat,
    laplace,
    principal_symbol,
    symbol_eval,
    symbol_parts,
    vector_field,
    wave,
)
from vekua.scalar import GaussianRational as G, rotate_i


def test_symbol_examples():
    assert symbol_eval(heat(1, 1), (1, 1)) == G(1, 1)
    assert symbol_eval(wave(1, 1), (2, 1)) == G(-3)
    for spec in (heat(2, 3), wave(1, 2), laplace(3), vector_field(G(3, 1))):
        assert symbol_eval(spec, (0,) * spec.dim) == 0


def test_symbol_dimension_mismatch():
    with pytest.raises(DimensionError):
        symbol_eval(heat(1), (1, 2, 3))


def test_spec_validation():
    with pytest.raises(ValueError):
        OperatorSpec(1, {(0,): 1})
    with pytest.raises(ValueError):
        OperatorSpec(2, {(1, 0): 0})
    with pytest.raises(DimensionError):
        OperatorSpec(2, {(1,): 1})
    s = OperatorSpec(2, {(1, 0): 1, (0, 1): 0, (1, 1): G(0, 2)})
    assert set(s.terms) == {(1, 0), (1, 1)}
    assert s.order == 2 and s.exact


def test_mixed_backend_goes_float():
    P = VekuaOperator(laplace(1), 0.5, 0)
    assert not P.exact
    assert isinstance(P.L.terms[(2,)], complex)


def _term_by_term(spec, xi):
    total = 0j
    for alpha, c in spec.terms.items():
        mono = 1
        for x, a in zip(xi, alpha):
            mono *= x**a
        total += (1j ** sum(alpha)) * complex(c) * mono
    return total


def test_symbol_against_term_by_term_and_negation():
    rng = random.Random(1)
    for _ in range(1000):
        P = random_operator(rng)
        xi = random_frequency(rng, P.dim, 6)
        ref = _term_by_term(P.L, xi)
        assert abs(complex(symbol_eval(P.L, xi)) - ref) <= 1e-9 * (1 + abs(ref))
        expected = G(0)
        for a, c in P.L.terms.items():
            mono = (-1) ** sum(a) * math.prod(x**e for x, e in zip(xi, a))
            expected = expected + rotate_i(c, sum(a)) * mono
        assert symbol_eval(P.L, tuple(-c for c in xi)) == expected


def test_principal_homogeneity_exact():
    rng = random.Random(2)
    from vekua.operator import _principal_exact

    for _ in range(200):
        P = random_operator(rng)
        xi = random_frequency(rng, P.dim, 5)
        t = rng.randint(-4, 4)
        lhs = _principal_exact(P.L, tuple(t * c for c in xi))
        assert lhs == _principal_exact(P.L, xi) * t ** P.L.order


def test_symbol_parts_matches_scalar():
    rng = random.Random(3)
    for _ in range(50):
        P = random_operator(rng)
        pts = np.array([random_frequency(rng, P.dim, 8) for _ in range(20)])
        Er, Ei, Or, Oi = symbol_parts(P.L, pts, 12)
        for k, xi in enumerate(pts):
            s = symbol_eval(P.L, tuple(int(v) for v in xi))
            assert Fraction(int(Er[k] + Or[k]), 12) == s.re
            assert Fraction(int(Ei[k] + Oi[k]), 12) == s.im


def test_bit_reproducible():
    spec = heat(2, Fraction(3, 7))
    a = [str(symbol_eval(spec, (t, 2, -3))) for t in range(-5, 6)]
    b = [str(symbol_eval(spec, (t, 2, -3))) for t in range(-5, 6)]
    assert a == b
    assert str(symbol_eval(spec, (1, 2, -3))) == "117/49+1i"


def test_ellipticity_examples():
    r = ellipticity_check(laplace(2))
    assert r.status is Ellipticity.ELLIPTIC
    assert abs(r.min_modulus - 1.0) < 1e-12

    r = ellipticity_check(heat(1, 1))
    assert r.status is Ellipticity.NOT_ELLIPTIC
    assert r.witness_integer == (1, 0)

    r = ellipticity_check(wave(1, 1))
    assert r.status is Ellipticity.NOT_ELLIPTIC
    assert r.witness_integer == (1, 1)
    assert abs(principal_symbol(wave(1, 1), r.witness)) < 1e-12

    r = ellipticity_check(wave(2, 1))
    assert r.witness_integer == (1, 1, 0)


def test_ellipticity_irrational_cone_found_by_refinement():
    # zero directions near (sqrt(2), 1) are not small integer directions
    spec = OperatorSpec(2, {(2, 0): 1.0, (0, 2): -2.0000001})
    r = ellipticity_check(spec)
    assert r.status is Ellipticity.NOT_ELLIPTIC
    assert abs(principal_symbol(spec, r.witness)) <= 1e-9 * 4


def test_ellipticity_rejects_bad_samples():
    with pytest.raises(ValueError):
        ellipticity_check(laplace(1), direction_samples=0)


def test_first_order_complex_elliptic():
    # d/dx + i d/dy: symbol i(x + i y), elliptic in 2D
    assert ellipticity_check(OperatorSpec(2, {(1, 0): 1, (0, 1): G(0, 1)})).status is Ellipticity.ELLIPTIC
