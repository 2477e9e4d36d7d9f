import random
from fractions import Fraction

import numpy as np
import pytest
from scipy.linalg import expm

from kenergy.catalog import build_instance
from kenergy.exactpoly import MatrixPoly
from kenergy.pairing import GroupElement


@pytest.fixture(scope="session")
def conic():
    return build_instance("conic")


@pytest.fixture(scope="session")
def twisted_cubic():
    return build_instance("rational_normal_curve(3)")


@pytest.fixture(scope="session")
def quadric_surface():
    return build_instance("quadric_surface")


def random_rational_sl(size, rng):
    """Product of elementary shears: exact rational entries, determinant 1."""
    sigma = GroupElement.identity(size)
    denominators = (1, 2, 3)
    for _ in range(4):
        i = rng.randrange(size)
        j = rng.randrange(size)
        while j == i:
            j = rng.randrange(size)
        c = Fraction(rng.randint(-2, 2), rng.choice(denominators))
        rows = [
            [Fraction(1) if a == b else Fraction(0) for b in range(size)]
            for a in range(size)
        ]
        rows[i][j] = c
        sigma = sigma.compose(GroupElement.from_matrix(rows))
    return sigma


def random_float_sl(size, rng, scale=0.3):
    """exp of a random traceless complex matrix, renormalized to det 1."""
    xi = scale * (rng.standard_normal((size, size)) + 1j * rng.standard_normal((size, size)))
    xi -= np.trace(xi) / size * np.eye(size)
    return GroupElement.from_matrix(expm(xi), normalize=True)


def random_exact_poly(shape, rng, max_terms=4, max_exp=2):
    """Small random polynomial with integer coefficients, seeded."""
    terms = {}
    rows, cols = shape
    for _ in range(rng.randint(1, max_terms)):
        exp = tuple(
            tuple(rng.randint(0, max_exp) for _ in range(cols)) for _ in range(rows)
        )
        terms[exp] = terms.get(exp, 0) + rng.randint(-5, 5)
    return MatrixPoly(shape, {e: c for e, c in terms.items() if c})


def seeded(seed):
    return random.Random(seed)
