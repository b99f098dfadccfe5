import random
from fractions import Fraction

import pytest

from conftest import rand_gauss, random_operator
from vekua.classifiers import (
    FamilyKind,
    Status,
    analyze,
    classify_elliptic,
    classify_heat,
    classify_vector_field,
    classify_wave,
    recognize,
)
from vekua.diophantine import RealNumberSpec
from vekua.discriminant import Evidence, dc_scan, delta
from vekua.operator import OperatorSpec, VekuaOperator, heat, laplace, vector_field, wave
from vekua.scalar import GaussianRational as G

SQRT2 = RealNumberSpec.sqrt(2)


def _coherent(v):
    assert v.solvable == v.globally_hypoelliptic
    if v.certification.kind == "THEOREM":
        assert v.decisive


def test_recognize_families():
    f = recognize(VekuaOperator(heat(1, 2)))
    assert f.kind is FamilyKind.HEAT and f.eta == RealNumberSpec.rational(2) and f.n == 1
    f = recognize(VekuaOperator(wave(2, SQRT2)))
    assert f.kind is FamilyKind.WAVE and f.eta == SQRT2 and f.eta_squared == 2 and f.n == 2
    f = recognize(VekuaOperator(vector_field(G(3, 1))))
    assert f.kind is FamilyKind.VECTOR_FIELD and f.C == G(3, 1)
    assert recognize(VekuaOperator(laplace(3))).kind is FamilyKind.LAPLACE
    bih = OperatorSpec(2, {(4, 0): 1, (0, 4): 1, (2, 2): 2})
    assert recognize(VekuaOperator(bih)).kind is FamilyKind.ELLIPTIC
    assert recognize(VekuaOperator(OperatorSpec(2, {(1, 1): 1}))).kind is FamilyKind.GENERAL


def test_recognize_float_heat():
    f = recognize(VekuaOperator(heat(1, 1.5)))
    assert f.kind is FamilyKind.HEAT and abs(float(f.eta) - 1.5) < 1e-12


def test_elliptic_verdicts():
    v = analyze(VekuaOperator(laplace(2), G(3, 1), 2))
    assert v.solvable is Status.SOLVABLE and v.certification.name == "elliptic"
    _coherent(v)
    v = classify_elliptic(VekuaOperator(wave(1, 1)))
    assert v.solvable is Status.UNDETERMINED


def test_heat_random_always_solvable():
    rng = random.Random(41)
    for _ in range(50):
        eta = Fraction(rng.randint(1, 9), rng.randint(1, 4))
        A, B = rand_gauss(rng), rand_gauss(rng)
        v = classify_heat(eta, A, B, n=rng.randint(1, 2))
        assert v.solvable is Status.SOLVABLE and v.certification.kind == "THEOREM"
        _coherent(v)


def test_heat_resonant_shell_recorded():
    v = classify_heat(1, G(4, 0), G(0, 0), n=1)
    shell = [t for t in v.trace if t.condition == "heat:resonant"][0]
    assert shell.data["resonant_norm_squared"] == 4
    # Delta vanishes only at tau = 0 on that shell
    P = VekuaOperator(heat(1, 1), 4, 0)
    zeros = [(t, x) for t in range(-10, 11) for x in range(-10, 11) if not delta(P, (t, x))]
    assert sorted(zeros) == [(0, -2), (0, 2)]


def test_wave_condition_i_and_boundary():
    v = classify_wave(1, G(0, 3), 1)
    assert v.solvable is Status.SOLVABLE and v.certification.name == "wave(i)"
    # |B| = |Im A| must not trigger (i)
    v = classify_wave(SQRT2, G(0, 1), 1)
    assert v.trace[0].condition == "wave(i)" and v.trace[0].holds is False
    v = classify_wave(1, G(2, 1), 1)
    assert v.trace[0].holds is False and v.certification.name != "wave(i)"


def test_wave_condition_ii():
    v = classify_wave(SQRT2, G(0, 1), 1)
    assert v.solvable is Status.SOLVABLE and v.certification.name == "wave(ii)"
    assert v.trace[1].data["certificate"]["status"] == "CERTIFIED"
    _coherent(v)


def test_wave_rational_cone_witness():
    v = classify_wave(1, 0, 0, scan_radius=40)
    assert v.solvable is Status.NOT_SOLVABLE and v.certification.kind == "THEOREM"
    members = v.witness["verified_members"]
    assert members[:3] == [[1, 1], [2, 2], [3, 3]] and len(members) == 28
    v = classify_wave(Fraction(3, 2), G(0, 2), 2, n=2)
    assert v.solvable is Status.NOT_SOLVABLE and v.witness["p"] == 3 and v.witness["q"] == 2
    P = VekuaOperator(wave(2, Fraction(3, 2)), G(0, 2), 2)
    for m in v.witness["verified_members"]:
        assert not delta(P, tuple(m))


def test_wave_non_shape_falls_back_to_scan():
    v = classify_wave(SQRT2, G(1, 0), 2)
    assert v.certification.kind == "EVIDENCE" and v.certification.scan is not None
    _coherent(v)
    v = classify_wave(RealNumberSpec.named("pi"), G(0, 1), 1, scan_radius=32)
    assert v.certification.kind == "EVIDENCE"
    assert v.trace[1].data["certificate"]["status"] == "HEURISTIC"


def test_wave_rejects_nonpositive_eta():
    with pytest.raises(ValueError):
        classify_wave(0, 0, 0)
    with pytest.raises(ValueError):
        classify_heat(-1.0, 0, 0)


def test_vector_field_conditions():
    v = classify_vector_field(2, 1, 2)
    assert v.certification.name == "vf(i)"
    v = classify_vector_field(G(1, 1), 1, 1)
    assert v.certification.name == "vf(ii)"
    v = classify_vector_field(2, 1, 0)
    assert v.certification.name == "vf(iii)"
    for v in (classify_vector_field(2, 1, 2), classify_vector_field(G(1, 1), 1, 1)):
        assert v.solvable is Status.SOLVABLE
        _coherent(v)


def test_vector_field_iv_scan():
    # rational C = 1, A = i, B = 0: Delta = 1 - (tau + x)^2 vanishes on two lines
    v = classify_vector_field(1, G(0, 1), 0, scan_radius=32)
    assert v.trace[-2].condition == "vf(iv)"
    assert v.solvable is Status.NOT_SOLVABLE and v.certification.kind == "EVIDENCE"
    v = classify_vector_field(RealNumberSpec.quadratic(1, 5, 2), G(0, 1), 0, scan_radius=128)
    assert v.trace[-2].condition == "vf(iv)"
    assert v.leaning is Status.SOLVABLE and v.certification.scan.evidence is Evidence.SUPPORTED


def test_analyze_dispatch_and_eta_override():
    assert analyze(VekuaOperator(heat(2, 3), 1, 1)).certification.name == "heat"
    v = analyze(VekuaOperator(wave(1, SQRT2), G(0, 1), 1))
    assert v.certification.name == "wave(ii)"
    # float operator: the exact eta given alongside restores the certificate
    v = analyze(VekuaOperator(wave(1, SQRT2), G(0, 1), 1).to_float(), eta=SQRT2)
    assert v.certification.name == "wave(ii)"
    v = analyze(VekuaOperator(vector_field(2), 1, 0))
    assert v.certification.name == "vf(iii)"


def test_theorem_solvable_never_contradicted_by_scan():
    cases = [
        VekuaOperator(heat(1, 1), G(2, 3), 1),
        VekuaOperator(heat(1, Fraction(1, 2)), 0, 0),
        VekuaOperator(wave(1, 1), G(0, 3), 1),
        VekuaOperator(wave(1, SQRT2), G(0, 1), 1),
        VekuaOperator(vector_field(2), 1, 2),
        VekuaOperator(vector_field(G(1, 1)), 1, 1),
        VekuaOperator(laplace(2), G(1, 1), 0),
    ]
    for P in cases:
        v = analyze(P, 32)
        assert v.solvable is Status.SOLVABLE and v.certification.kind == "THEOREM"
        assert dc_scan(P, 32).evidence is not Evidence.ZEROS_AT_LARGE_NORM


def test_verdict_coherence_random():
    rng = random.Random(42)
    for _ in range(40):
        P = random_operator(rng, dim=2, max_order=2)
        v = analyze(P, 16)
        _coherent(v)
        d = v.to_dict()
        assert d["solvable"] == d["globally_hypoelliptic"]
