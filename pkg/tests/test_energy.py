from fractions import Fraction

import numpy as np
import pytest
from scipy.linalg import expm

from kenergy.energy import (
    build_pair_vectors,
    directional_derivative,
    energy_via_formula,
    energy_via_pair,
    energy_via_recursion,
    minimize_energy,
    sl_basis,
)
from kenergy.catalog import DiscriminantSet, VarietyInstance
from kenergy.errors import FormatRangeError
from kenergy.pairing import GroupElement
from conftest import random_float_sl, random_rational_sl, seeded


class LinComb:
    """Formal rational linear combination of labeled symbols, for feeding the
    evaluators symbolic log-ratios."""

    def __init__(self, coeffs=None):
        self.coeffs = {k: Fraction(v) for k, v in (coeffs or {}).items() if v}

    @classmethod
    def symbol(cls, name):
        return cls({name: 1})

    def __add__(self, other):
        if isinstance(other, (int, Fraction)) and other == 0:
            return self
        out = dict(self.coeffs)
        for k, v in other.coeffs.items():
            out[k] = out.get(k, Fraction(0)) + v
        return LinComb(out)

    __radd__ = __add__

    def __neg__(self):
        return LinComb({k: -v for k, v in self.coeffs.items()})

    def __sub__(self, other):
        return self + (-other)

    def __mul__(self, scalar):
        return LinComb({k: v * scalar for k, v in self.coeffs.items()})

    __rmul__ = __mul__

    def __eq__(self, other):
        return self.coeffs == other.coeffs


def test_pair_vectors_conic(conic):
    pair = build_pair_vectors(conic, 1)
    assert [(l, p) for l, _, p in pair.v.factors] == [("hyper_1", 4)]
    assert [(l, p) for l, _, p in pair.w.factors] == [("chow", 2)]
    assert pair.v.total_degree() == pair.w.total_degree() == 8


def test_pair_vectors_quadric_k1(quadric_surface):
    pair = build_pair_vectors(quadric_surface, 1)
    assert [(l, p) for l, _, p in pair.v.factors] == [("hyper_1", 6)]
    assert [(l, p) for l, _, p in pair.w.factors] == [("chow", 4)]
    assert pair.v.total_degree() == pair.w.total_degree() == 24


def test_pair_vectors_quadric_k2(quadric_surface):
    pair = build_pair_vectors(quadric_surface, 2)
    assert [(l, p) for l, _, p in pair.v.factors] == [("chow", 2), ("hyper_1", 6)]
    assert [(l, p) for l, _, p in pair.w.factors] == [("chow", 4), ("hyper_2", 6)]
    assert pair.v.total_degree() == pair.w.total_degree() == 36


def test_pair_degree_balance_identity(conic, twisted_cubic, quadric_surface):
    from kenergy.chern import comb
    from kenergy.invariants import degree_vector

    for instance in (conic, twisted_cubic, quadric_surface):
        n = instance.n
        for k in range(1, n + 1):
            pair = build_pair_vectors(instance, k)
            dv = degree_vector(instance.data, k)
            expected = dv[0] * sum(comb(n - i, n - k) * dv[i] for i in range(1, k + 1))
            assert pair.v.total_degree() == expected
            assert pair.w.total_degree() == expected


def test_energy_zero_at_identity(conic, quadric_surface):
    for instance, ks in ((conic, (1,)), (quadric_surface, (1, 2))):
        ident = GroupElement.identity(instance.N + 1)
        for k in ks:
            assert energy_via_formula(instance, ident, k).total == 0.0
            assert energy_via_pair(instance, ident, k) == 0.0
            assert energy_via_recursion(instance, ident, k) == 0.0


def test_energy_invariant_torus_on_conic(conic):
    sigma = GroupElement.diagonal([2, 1, Fraction(1, 2)])
    assert energy_via_formula(conic, sigma, 1).total == 0.0


def test_inadmissible_k_rejected(conic):
    with pytest.raises(FormatRangeError):
        energy_via_formula(conic, GroupElement.identity(3), 2)


def test_symbolic_structure_quadric_k2(quadric_surface):
    ratios = {0: LinComb.symbol("R"), 1: LinComb.symbol("D1"), 2: LinComb.symbol("D0")}
    total = energy_via_formula(quadric_surface, None, 2, ratios=ratios).total
    assert total == LinComb({"D1": 6, "D0": -6, "R": -2})
    recursed = energy_via_recursion(quadric_surface, None, 2, ratios=ratios)
    assert recursed == total


def test_symbolic_recursion_k1_reduces_to_two_terms(conic):
    ratios = {0: LinComb.symbol("R"), 1: LinComb.symbol("D")}
    value = energy_via_recursion(conic, None, 1, ratios=ratios)
    assert value == LinComb({"D": 4, "R": -2})
    assert energy_via_formula(conic, None, 1, ratios=ratios).total == value


def test_triple_agreement_seeded(conic, twisted_cubic, quadric_surface):
    rng = np.random.default_rng(12)
    cases = [(conic, 1), (twisted_cubic, 1), (quadric_surface, 1), (quadric_surface, 2)]
    for instance, k in cases:
        for _ in range(10):
            sigma = random_float_sl(instance.N + 1, rng)
            f = energy_via_formula(instance, sigma, k).total
            assert abs(f - energy_via_pair(instance, sigma, k)) < 1e-9
            assert abs(f - energy_via_recursion(instance, sigma, k)) < 1e-9


def test_triple_agreement_rational_sigma(conic):
    rng = seeded(77)
    for _ in range(5):
        sigma = random_rational_sl(3, rng)
        f = energy_via_formula(conic, sigma, 1).total
        assert abs(f - energy_via_pair(conic, sigma, 1)) < 1e-9
        assert abs(f - energy_via_recursion(conic, sigma, 1)) < 1e-9


def test_discriminant_rescaling_leaves_energy(conic):
    scaled = VarietyInstance(
        name="conic-rescaled",
        data=conic.data,
        parametrization=conic.parametrization,
        discriminants=DiscriminantSet(
            chow=conic.discriminants.chow.scale(Fraction(5, 3)),
            hyper={1: conic.discriminants.hyper[1].scale(-7)},
        ),
    )
    rng = np.random.default_rng(21)
    for _ in range(5):
        sigma = random_float_sl(3, rng)
        a = energy_via_formula(conic, sigma, 1).total
        b = energy_via_formula(scaled, sigma, 1).total
        assert abs(a - b) < 1e-9


def test_energy_cocycle(quadric_surface):
    from kenergy.exactpoly import right_substitute

    rng = np.random.default_rng(33)
    sigma = random_float_sl(4, rng)
    tau = random_float_sl(4, rng)
    translated = VarietyInstance(
        name="qs-translated",
        data=quadric_surface.data,
        parametrization=quadric_surface.parametrization,
        discriminants=DiscriminantSet(
            chow=right_substitute(quadric_surface.discriminants.chow, tau.entries),
            hyper={
                i: right_substitute(p, tau.entries)
                for i, p in quadric_surface.discriminants.hyper.items()
            },
        ),
    )
    for k in (1, 2):
        lhs = energy_via_formula(quadric_surface, sigma.compose(tau), k).total
        rhs = (
            energy_via_formula(translated, sigma, k).total
            + energy_via_formula(quadric_surface, tau, k).total
        )
        assert abs(lhs - rhs) < 1e-9


def test_breakdown_fields(quadric_surface):
    rng = np.random.default_rng(8)
    sigma = random_float_sl(4, rng)
    breakdown = energy_via_formula(quadric_surface, sigma, 2)
    assert [t.i for t in breakdown.terms] == [1, 2]
    assert [t.coefficient for t in breakdown.terms] == [1, -1]
    assert breakdown.terms[0].deg_chow == 6
    assert [t.deg_hyper for t in breakdown.terms] == [4, 2]
    assert abs(sum(t.contribution for t in breakdown.terms) - breakdown.total) < 1e-12


def test_directional_derivative_matches_finite_differences(conic):
    rng = np.random.default_rng(55)
    h = 1e-5
    for trial in range(5):
        sigma = random_float_sl(3, rng)
        xi = 0.7 * (rng.standard_normal((3, 3)) + 1j * rng.standard_normal((3, 3)))
        xi -= np.trace(xi) / 3 * np.eye(3)
        analytic = directional_derivative(conic, sigma, 1, xi)
        plus = energy_via_formula(
            conic, GroupElement.from_matrix(sigma.matrix @ expm(h * xi), normalize=True), 1
        ).total
        minus = energy_via_formula(
            conic, GroupElement.from_matrix(sigma.matrix @ expm(-h * xi), normalize=True), 1
        ).total
        fd = (plus - minus) / (2 * h)
        assert abs(analytic - fd) <= 1e-4 * max(1.0, abs(fd))


def test_identity_gradient_from_the_oracle(conic):
    # the gradient oracle says the identity is NOT critical for this
    # parametrization: along diag(1, -1, 0) the derivative is
    # 4 * (2*15/(33/2)) - 2 * (2*6/(15/2)) = 80/11 - 16/5, nonzero
    ident = GroupElement.identity(3)
    xi = np.diag([1.0, -1.0, 0.0]).astype(complex)
    value = directional_derivative(conic, ident, 1, xi)
    assert abs(value - (80 / 11 - 16 / 5)) < 1e-10
    grads = [directional_derivative(conic, ident, 1, b) for b in sl_basis(3)]
    assert max(abs(g) for g in grads) > 1.0


def test_minimizer_descends_from_identity(conic):
    trace = minimize_energy(conic, 1, GroupElement.identity(3), max_iters=20)
    assert len(trace.energies) > 1
    assert trace.final_energy < 0.0  # strictly below M_1(identity) = 0


def test_minimizer_descends_from_seeds(conic):
    rng = np.random.default_rng(99)
    for _ in range(3):
        sigma0 = random_float_sl(3, rng, scale=0.5)
        trace = minimize_energy(conic, 1, sigma0, max_iters=25)
        energies = trace.energies
        assert all(b <= a + 1e-12 for a, b in zip(energies, energies[1:]))
        assert trace.final_energy <= energies[0]
