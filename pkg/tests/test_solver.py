import random
from fractions import Fraction

import numpy as np
import pytest

from conftest import rand_gauss, random_frequency, random_operator
from vekua.fields import CoefficientField
from vekua.lattice import neg
from vekua.operator import OperatorSpec, VekuaOperator, heat, laplace, symbol_eval
from vekua.scalar import GaussianRational as G, conj, modulus
from vekua.solver import (
    GridError,
    Handling,
    apply,
    field_to_grid,
    grid_nodes,
    grid_to_field,
    solve,
    solve_grid,
    solve_pair,
)

HALF = Fraction(1, 2)


def _dense_min_norm(P, f, keys):
    """Realified operator on span{e_xi : xi in keys} and its pseudo-inverse."""
    keys = sorted(keys)
    idx = {k: i for i, k in enumerate(keys)}
    n = len(keys)
    Pf = P.to_float()

    def forward(u):
        out = np.zeros(n, dtype=complex)
        for k in keys:
            out[idx[k]] = (complex(symbol_eval(Pf.L, k)) - complex(Pf.A)) * u[idx[k]] - complex(Pf.B) * np.conj(
                u[idx[neg(k)]]
            )
        return out

    M = np.zeros((2 * n, 2 * n))
    for j in range(2 * n):
        e = np.zeros(n, dtype=complex)
        e[j // 2] = 1.0 if j % 2 == 0 else 1j
        img = forward(e)
        M[0::2, j], M[1::2, j] = img.real, img.imag
    b = np.zeros(2 * n)
    for k in keys:
        c = complex(f[k])
        b[2 * idx[k]], b[2 * idx[k] + 1] = c.real, c.imag
    x = np.linalg.pinv(M, rcond=1e-10) @ b
    return {k: complex(x[2 * idx[k]], x[2 * idx[k] + 1]) for k in keys}


def _symmetric_keys(f):
    return set(f) | {neg(k) for k in f}


def test_apply_and_solve_examples():
    # (Laplacian - 1) u = -2 cos-mode
    P = VekuaOperator(laplace(1), 1, 0)
    out = solve(P, CoefficientField(1, {(1,): 2}))
    assert out.solution == CoefficientField(1, {(1,): -1})
    assert out.residual == 0 and out.compatible

    # heat operator with A = 1: (i + 1 - 1) u = ... at xi = (1, 0)
    P = VekuaOperator(heat(1, 1), 0, 0)
    f = CoefficientField(2, {(1, 0): G(HALF, -HALF)})
    out = solve(P, f)
    assert apply(P, out.solution) == f

    # d/dx with B = 1 pairs e^{ix} and e^{-ix}
    P = VekuaOperator(OperatorSpec(1, {(1,): 1}), 0, 1)
    u = CoefficientField(1, {(1,): G(0, 1), (-1,): -1})
    f = apply(P, u)
    out = solve(P, f)
    assert apply(P, out.solution) == f


def test_compatible_singular_pair_min_norm():
    P = VekuaOperator(OperatorSpec(1, {(2,): 1}), 0, 1)  # u'' + conj(u)
    cos = CoefficientField(1, {(1,): HALF, (-1,): HALF})
    out = solve(P, cos)
    assert out.compatible
    assert [s.handling for s in out.singular_pairs] == [Handling.COMPATIBLE_MIN_NORM]
    q = Fraction(-1, 4)
    assert out.solution == CoefficientField(1, {(1,): q, (-1,): q})
    assert apply(P, out.solution) == cos

    outf = solve(P.to_float(), cos.to_float())
    assert outf.solution.sup_distance(CoefficientField(1, {(1,): -0.25, (-1,): -0.25})) < 1e-14


def test_incompatible_pair_reports_defect():
    P = VekuaOperator(OperatorSpec(1, {(2,): 1}), 0, 1)
    out = solve(P, CoefficientField(1, {(1,): 1}))
    assert not out.compatible
    assert out.incompatible == [(1,)]
    assert out.singular_pairs[0].defect == 1.0


def test_origin_cases():
    P = VekuaOperator(laplace(1), 2, 1)  # -2z - conj z = 3  ->  z = -1
    assert solve(P, CoefficientField(1, {(0,): 3})).solution == CoefficientField(1, {(0,): -1})

    # |A| = |B|: z -> -z - conj(z) has range R; f = 2 is compatible, f = i is not
    P = VekuaOperator(laplace(1), 1, 1)
    out = solve(P, CoefficientField(1, {(0,): 2}))
    assert out.compatible and out.solution == CoefficientField(1, {(0,): -1})
    out = solve(P, CoefficientField(1, {(0,): G(0, 1)}))
    assert not out.compatible

    P = VekuaOperator(laplace(1), 0, 0)
    out = solve(P, CoefficientField(1, {(0,): 0, (2,): 4}))
    assert out.compatible
    assert out.solution == CoefficientField(1, {(2,): -1})


def test_regular_random_against_dense_oracle():
    rng = random.Random(31)
    checked = 0
    for _ in range(60):
        P = random_operator(rng, dim=rng.randint(1, 2), max_order=2)
        f = CoefficientField(P.dim, {random_frequency(rng, P.dim, 4): rand_gauss(rng) for _ in range(5)})
        out = solve(P, f)
        if out.singular_pairs:
            continue
        assert apply(P, out.solution) == f
        ref = _dense_min_norm(P, f, _symmetric_keys(f))
        scale = max(1.0, max(abs(v) for v in ref.values()))
        for k, v in ref.items():
            assert abs(complex(out.solution[k]) - v) <= 1e-8 * scale
        checked += 1
    assert checked > 30


def test_singular_compatible_against_dense_oracle():
    rng = random.Random(32)
    for _ in range(40):
        # u'' + B conj(u) with |B| = 1 is singular on the pair (1, -1)
        B = rng.choice([G(1), G(0, 1), G(Fraction(3, 5), Fraction(4, 5))])
        A = rng.choice([G(0), G(2)])
        P = VekuaOperator(OperatorSpec(1, {(2,): 1}), A, B if A == 0 else B * 0)
        u0 = CoefficientField(1, {k: rand_gauss(rng) for k in [(-2,), (-1,), (0,), (1,), (2,), (3,)]})
        f = apply(P, u0)
        out = solve(P, f)
        assert out.compatible
        assert apply(P, out.solution) == f
        ref = _dense_min_norm(P, f, _symmetric_keys(u0))
        for k, v in ref.items():
            assert abs(complex(out.solution[k]) - v) <= 1e-9 * (1 + abs(v))
        # float backend agrees with the exact minimal-norm answer
        outf = solve(P.to_float(), f.to_float())
        assert outf.solution.sup_distance(out.solution.to_float()) < 1e-9


def test_solve_pair_regular_formula():
    P = VekuaOperator(heat(1, 2), G(1, 1), G(0, 2))
    xi = (3, -1)
    fp, fm = G(1, 2), G(-1, 5)
    r = solve_pair(P, xi, fp, conj(fm))
    assert r.handling is Handling.REGULAR
    a = symbol_eval(P.L, xi) - P.A
    d = conj(symbol_eval(P.L, neg(xi))) - conj(P.A)
    assert a * r.u_plus - P.B * conj(r.u_minus) == fp
    assert (d * conj(r.u_minus) - conj(P.B) * r.u_plus) == conj(fm)
    assert r.delta == a * d - P.B * conj(P.B)


def test_reality_preserved_for_real_operators():
    rng = random.Random(33)
    for _ in range(40):
        dim = rng.randint(1, 2)
        terms = {}
        for _ in range(3):
            alpha = tuple(rng.randint(0, 2) for _ in range(dim))
            if any(alpha):
                terms[alpha] = Fraction(rng.randint(-3, 3), rng.randint(1, 3)) or 1
        P = VekuaOperator(OperatorSpec(dim, terms), Fraction(rng.randint(-3, 3), 2), Fraction(rng.randint(-3, 3), 2))
        coeffs = {}
        for _ in range(4):
            k = random_frequency(rng, dim, 3)
            c = rand_gauss(rng)
            coeffs[k] = c
            coeffs[neg(k)] = conj(c) if any(k) else G(c.real)
        f = CoefficientField(dim, coeffs, real_valued=True)
        out = solve(P, f)
        assert out.solution.reality_defect() == 0


def test_per_frequency_bound_regular_pairs():
    rng = random.Random(34)
    for _ in range(200):
        P = random_operator(rng, max_order=2)
        xi = random_frequency(rng, P.dim, 6)
        if not any(xi):
            continue
        fp, fm = rand_gauss(rng), rand_gauss(rng)
        r = solve_pair(P, xi, fp, conj(fm))
        if r.handling is not Handling.REGULAR:
            continue
        a = symbol_eval(P.L, xi) - P.A
        d = conj(symbol_eval(P.L, neg(xi))) - conj(P.A)
        bound = (max(modulus(a), modulus(d)) + modulus(P.B)) * (modulus(fp) + modulus(fm)) / modulus(r.delta)
        assert modulus(r.u_plus) <= bound * (1 + 1e-12)
        assert modulus(r.u_minus) <= bound * (1 + 1e-12)


def test_near_tolerance_warning():
    # float operator just off the singular set so the defect sits in the warning band
    P = VekuaOperator(OperatorSpec(1, {(2,): 1.0}), 0.0, 1.0)
    out = solve(P, CoefficientField(1, {(1,): 1e-8}))
    assert not out.compatible
    assert out.warnings and "near tolerance" in out.warnings[0]


def test_grid_roundtrip_and_solve():
    shape = (9,)
    x = grid_nodes(shape)[0]
    P = VekuaOperator(laplace(1), 1, 0)
    res = solve_grid(P, -2 * np.cos(x))
    assert np.max(np.abs(res.values - np.cos(x))) < 1e-12

    rng = np.random.default_rng(5)
    samples = rng.normal(size=(7, 5)) + 1j * rng.normal(size=(7, 5))
    f = grid_to_field(samples)
    assert np.max(np.abs(field_to_grid(f, samples.shape) - samples)) < 1e-12


def test_grid_heat_roundtrip():
    P = VekuaOperator(heat(1, 1), G(1, 2), G(0, 1))
    shape = (7, 9)
    rng = np.random.default_rng(6)
    u = rng.normal(size=shape) + 1j * rng.normal(size=shape)
    uf = grid_to_field(u)
    f = field_to_grid(apply(P.to_float(), uf), shape)
    res = solve_grid(P, f)
    assert res.outcome.compatible
    assert np.max(np.abs(res.values - u)) < 1e-9


def test_grid_rejects_even_or_mismatched_sizes():
    P = VekuaOperator(laplace(1), 1, 0)
    with pytest.raises(GridError):
        solve_grid(P, np.zeros(8))
    with pytest.raises(GridError):
        solve_grid(P, np.zeros((5, 5)))
    with pytest.raises(GridError):
        solve_grid(P, np.zeros(5), grid=(7,))


def test_dimension_mismatch():
    P = VekuaOperator(laplace(2), 1, 0)
    with pytest.raises(ValueError):
        solve(P, CoefficientField(1, {(1,): 1}))
