import math
from fractions import Fraction

import pytest

from kenergy.errors import KEnergyError, ZeroPolynomialError
from kenergy.exactpoly import MatrixPoly, right_substitute
from kenergy.pairing import (
    FormalTensor,
    GroupElement,
    OneParamSubgroup,
    fs_distance,
    fs_norm_sq,
    fs_norm_sq_exact,
    log_norm_ratio,
    log_tan_sq,
    min_weight,
    pair_distance,
    tensor_log_norm_ratio,
    tensor_min_weight,
)

from conftest import random_exact_poly, random_float_sl, random_rational_sl, seeded

SHAPE = (1, 3)


def var(c, shape=SHAPE):
    return MatrixPoly.variable(shape, 0, c)


@pytest.fixture
def conic_disc(conic):
    return conic.discriminants.hyper[1]


def test_fs_norm_conic_disc(conic_disc):
    assert fs_norm_sq_exact(conic_disc) == Fraction(33, 2)
    assert abs(fs_norm_sq(conic_disc) - 16.5) < 1e-12


def test_fs_norm_monomial_power():
    for d in (1, 3, 5):
        mono = var(0) ** d
        assert fs_norm_sq_exact(mono) == Fraction(1, math.factorial(d))


def test_fs_norm_cross_term():
    p = (var(0) * var(1)).scale(2)
    assert fs_norm_sq_exact(p) == 4


def test_fs_norm_scaling_invariance():
    rng = seeded(101)
    for _ in range(10):
        p = random_exact_poly((1, 4), rng)
        if p.is_zero:
            continue
        c = Fraction(rng.randint(1, 9), rng.randint(1, 9))
        assert fs_norm_sq_exact(p.scale(c)) == c * c * fs_norm_sq_exact(p)


def test_zero_polynomial_rejected():
    with pytest.raises(ZeroPolynomialError):
        fs_norm_sq(MatrixPoly.zero(SHAPE))
    with pytest.raises(ZeroPolynomialError):
        min_weight(OneParamSubgroup((0, 0, 0)), MatrixPoly.zero(SHAPE))


def test_log_ratio_identity(conic_disc):
    assert log_norm_ratio(GroupElement.identity(3), conic_disc) == 0.0


def test_log_ratio_invariant_torus(conic_disc):
    sigma = GroupElement.diagonal([2, 1, Fraction(1, 2)])
    assert log_norm_ratio(sigma, conic_disc) == 0.0


def test_log_ratio_scaling_torus(conic_disc):
    sigma = GroupElement.diagonal([2, 2, Fraction(1, 4)])
    assert abs(log_norm_ratio(sigma, conic_disc) - math.log(8 / 11)) < 1e-12


def test_log_ratio_invariant_under_rescaling(conic_disc):
    sigma = GroupElement.diagonal([2, 2, Fraction(1, 4)])
    scaled = conic_disc.scale(Fraction(-9, 5))
    assert abs(log_norm_ratio(sigma, scaled) - log_norm_ratio(sigma, conic_disc)) < 1e-12


def test_min_weight_examples(conic_disc):
    assert min_weight(OneParamSubgroup((1, 0, -1)), conic_disc) == 0
    assert min_weight(OneParamSubgroup((1, 1, -2)), conic_disc) == -1
    assert min_weight(OneParamSubgroup((0, 0, 0)), conic_disc) == 0


def test_min_weight_matches_log_ratio_slope(conic, conic_disc):
    # slope of LR(lambda(t), p) against log t^2 approaches the minimal weight
    lam = OneParamSubgroup((2, -1, -1))
    expected = min_weight(lam, conic_disc)
    ts = [10.0**-j for j in range(1, 7)]
    xs = [2 * math.log(t) for t in ts]
    ys = [log_norm_ratio(lam.at(t), conic_disc) for t in ts]
    slope = (ys[-1] - ys[0]) / (xs[-1] - xs[0])
    assert abs(slope - expected) < 0.01 * abs(expected)


def test_min_weight_superadditive_on_products(conic):
    chow = conic.discriminants.chow
    disc = conic.discriminants.hyper[1]
    rng = seeded(59)
    for _ in range(20):
        lam = None
        while lam is None:
            w = [rng.randint(-3, 3) for _ in range(3)]
            if sum(w) == 0:
                lam = OneParamSubgroup(tuple(w))
        assert min_weight(lam, chow * chow) == 2 * min_weight(lam, chow)
        assert min_weight(lam, disc * disc) == 2 * min_weight(lam, disc)
        other = random_exact_poly((1, 3), seeded(rng.randint(0, 10**6)))
        if other.is_zero:
            continue
        product = disc * other
        if not product.is_zero:
            assert min_weight(lam, product) >= min_weight(lam, disc) + min_weight(lam, other)


def test_action_compatibility(conic_disc):
    import numpy as np

    rng = np.random.default_rng(4)
    sigma = random_float_sl(3, rng)
    tau = random_float_sl(3, rng)
    pulled = right_substitute(conic_disc, tau.entries)
    lhs = log_norm_ratio(sigma.compose(tau), conic_disc)
    rhs = log_norm_ratio(sigma, pulled) + log_norm_ratio(tau, conic_disc)
    assert abs(lhs - rhs) < 1e-9


def test_tensor_ops_on_quadric_pair(quadric_surface):
    chow = quadric_surface.discriminants.chow
    hyperdet = quadric_surface.discriminants.hyper[1]
    dual = quadric_surface.discriminants.hyper[2]
    v2 = FormalTensor((("chow", chow, 2), ("hyper_1", hyperdet, 6)))
    w2 = FormalTensor((("chow", chow, 4), ("hyper_2", dual, 6)))
    lam = OneParamSubgroup((3, -1, -1, -1))
    assert tensor_min_weight(lam, v2) == -28
    assert tensor_min_weight(lam, w2) == -20
    assert tensor_log_norm_ratio(GroupElement.identity(4), v2) == 0.0
    assert v2.total_degree() == w2.total_degree() == 36


def test_tensor_rejects_bad_factors(conic_disc):
    with pytest.raises(KEnergyError):
        FormalTensor((("disc", conic_disc, 0),))
    with pytest.raises(ZeroPolynomialError):
        FormalTensor((("zero", MatrixPoly.zero(SHAPE), 1),))


def test_fs_distance_examples(conic_disc):
    assert fs_distance(conic_disc, conic_disc) < 1e-12
    assert abs(fs_distance(var(0), var(1)) - math.pi / 2) < 1e-12


def test_distance_identity_random_rational():
    rng = seeded(61)
    for _ in range(30):
        v = random_exact_poly((1, 3), rng)
        w = random_exact_poly((1, 3), rng)
        if v.is_zero or w.is_zero:
            continue
        sigma = random_rational_sl(3, seeded(rng.randint(0, 10**6)))
        sv = right_substitute(v, sigma.entries)
        sw = right_substitute(w, sigma.entries)
        angle = pair_distance(sv, sw)
        lhs = math.log(fs_norm_sq(sw)) - math.log(fs_norm_sq(sv))
        assert abs(lhs - log_tan_sq(angle)) < 1e-9


def test_one_param_subgroup_validation():
    with pytest.raises(KEnergyError):
        OneParamSubgroup((1, 1, -1))
    lam = OneParamSubgroup((2, -1, -1))
    assert (-lam).weights == (-2, 1, 1)
    assert lam.at(Fraction(1, 2)).exact


def test_group_element_determinant_check():
    with pytest.raises(KEnergyError):
        GroupElement.diagonal([2, 1, 1])
    with pytest.raises(KEnergyError):
        GroupElement.from_matrix([[2.0, 0, 0], [0, 1.0, 0], [0, 0, 1.0]])
    normalized = GroupElement.from_matrix(
        [[2.0, 0, 0], [0, 1.0, 0], [0, 0, 1.0]], normalize=True
    )
    assert abs(complex(normalized.entries[0][0]) - 2 / 2 ** (1 / 3)) < 1e-12
