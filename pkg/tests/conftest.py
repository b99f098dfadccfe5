import random
from fractions import Fraction

import pytest

from vekua.operator import OperatorSpec, VekuaOperator
from vekua.scalar import GaussianRational

# criterion id -> (passed, detail), filled by test_acceptance.py
ACCEPTANCE: dict = {}


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.write_sep("=", "acceptance criteria")
    for cid in sorted(ACCEPTANCE):
        ok, detail = ACCEPTANCE[cid]
        terminalreporter.write_line(f"criterion {cid:>2}: {'PASS' if ok else 'FAIL'}  {detail}")


def rand_rational(rng: random.Random, lo: int = -5, hi: int = 5, dens=(1, 2, 3, 4)) -> Fraction:
    return Fraction(rng.randint(lo, hi), rng.choice(dens))


def rand_gauss(rng: random.Random, **kw) -> GaussianRational:
    return GaussianRational(rand_rational(rng, **kw), rand_rational(rng, **kw))


def rand_multi_index(rng: random.Random, dim: int, max_order: int) -> tuple:
    while True:
        alpha = tuple(rng.randint(0, max_order) for _ in range(dim))
        if 0 < sum(alpha) <= max_order:
            return alpha


def random_operator(rng: random.Random, dim: int = None, max_order: int = 3, n_terms: int = None) -> VekuaOperator:
    """Random exact operator with Gaussian-rational coefficients."""
    dim = dim or rng.randint(1, 3)
    while True:
        n_terms = n_terms or rng.randint(1, 4)
        terms = {}
        for _ in range(n_terms):
            c = rand_gauss(rng)
            if c:
                terms[rand_multi_index(rng, dim, max_order)] = c
        if terms:
            try:
                return VekuaOperator(OperatorSpec(dim, terms), rand_gauss(rng), rand_gauss(rng))
            except ValueError:
                continue


def random_frequency(rng: random.Random, dim: int, bound: int = 10) -> tuple:
    return tuple(rng.randint(-bound, bound) for _ in range(dim))


@pytest.fixture
def rng():
    return random.Random(20240613)
