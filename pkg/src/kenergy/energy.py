"""The three equivalent evaluators of the k-th energy on Bergman metrics,
plus a descent minimizer over SL(N+1, C).

All evaluators consume the same log-norm ratios LR(P) = log(|sigma.P|^2/|P|^2)
of the stored Chow form and hyperdiscriminants and differ only in the exact
integer combinatorics combining them:

  formula     sum_{i=1}^{k} (-1)^{i+1} C(n-i, n-k)
                  [ deg(R) LR(Delta^(n-i)) - deg(Delta^(n-i)) LR(R) ]
  pair        LR(v_k) - LR(w_k) for the formal tensors v_k, w_k below
  recursion   (-1)^{k+1} [ deg(R) LR(Delta^(n-k)) - deg(Delta^(n-k)) LR(R)
                  + sum_{i<k} (-1)^i C(n-i, n-k) M_i ]

with deg(R) = deg Delta^(n) the Chow-form degree.  The value at the identity
is exactly zero.  The analytic normalization -(n+1)(n-k+1)V is already folded
into these integer coefficients; the quadrature module uses the same
normalization so slopes match.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.linalg import expm

from .catalog import VarietyInstance
from .chern import comb
from .errors import FormatRangeError, KEnergyError
from .exactpoly import MatrixPoly, lie_derivative, right_substitute
from .invariants import degree_vector, format_range
from .pairing import (
    FormalTensor,
    GroupElement,
    fs_inner,
    fs_norm_sq,
    log_norm_ratio,
    tensor_log_norm_ratio,
)


def _check_admissible(instance: VarietyInstance, k: int):
    fr = format_range(instance.data)
    if k not in fr.admissible_k:
        raise FormatRangeError(
            f"M_{k} not computable for '{instance.name}': admissible k are {fr.admissible_k}"
        )


@dataclass(frozen=True)
class PairVectors:
    """The tensor pair whose log-norm difference is the k-th energy."""

    k: int
    v: FormalTensor
    w: FormalTensor

    def __post_init__(self):
        if self.v.total_degree() != self.w.total_degree():
            raise KEnergyError("pair vectors must have equal total degree")


def build_pair_vectors(instance: VarietyInstance, k: int) -> PairVectors:
    """Exponent bookkeeping for v_k and w_k.

    With degrees dv[i] = deg Delta^(n-i) (dv[0] the Chow degree),

      v = R^{sum_j C(n-2j, n-k) dv[2j]}   (x)  prod_j Delta^(n-2j+1) ^ {C(n-2j+1, n-k) dv[0]}
      w = R^{sum_j C(n-2j+1, n-k) dv[2j-1]} (x) prod_j Delta^(n-2j) ^ {C(n-2j, n-k) dv[0]}

    where j runs over 1..floor(k/2) for the even-index pieces and
    1..ceil(k/2) for the odd-index ones; zero exponents are omitted.
    """
    _check_admissible(instance, k)
    n = instance.n
    dv = degree_vector(instance.data, k)
    chow = instance.discriminants.chow

    v_chow_exp = sum(comb(n - 2 * j, n - k) * dv[2 * j] for j in range(1, k // 2 + 1))
    w_chow_exp = sum(
        comb(n - 2 * j + 1, n - k) * dv[2 * j - 1] for j in range(1, (k + 1) // 2 + 1)
    )

    v_factors = []
    if v_chow_exp:
        v_factors.append(("chow", chow, v_chow_exp))
    for j in range(1, (k + 1) // 2 + 1):
        i = 2 * j - 1
        e = comb(n - i, n - k) * dv[0]
        if e:
            v_factors.append((f"hyper_{i}", instance.polynomial(i), e))

    w_factors = []
    if w_chow_exp:
        w_factors.append(("chow", chow, w_chow_exp))
    for j in range(1, k // 2 + 1):
        i = 2 * j
        e = comb(n - i, n - k) * dv[0]
        if e:
            w_factors.append((f"hyper_{i}", instance.polynomial(i), e))

    return PairVectors(
        k=k, v=FormalTensor(tuple(v_factors)), w=FormalTensor(tuple(w_factors))
    )


@dataclass(frozen=True)
class TermContribution:
    i: int
    coefficient: int  # (-1)^{i+1} C(n-i, n-k)
    deg_chow: int
    deg_hyper: int
    lr_hyper: float
    lr_chow: float
    contribution: float


@dataclass(frozen=True)
class EnergyBreakdown:
    k: int
    n: int
    terms: tuple
    total: float


def _ratio_provider(instance: VarietyInstance, sigma: GroupElement, k: int, ratios=None):
    """Map i -> LR(Delta^(n-i)) for i = 0..k (i = 0 is the Chow form)."""
    if ratios is not None:
        return lambda i: ratios[i]
    return lambda i: log_norm_ratio(sigma, instance.polynomial(i))


def energy_via_formula(instance, sigma, k, ratios=None) -> EnergyBreakdown:
    """Closed-form evaluation; returns the per-index breakdown."""
    _check_admissible(instance, k)
    n = instance.n
    dv = degree_vector(instance.data, k)
    lr = _ratio_provider(instance, sigma, k, ratios)
    lr_chow = lr(0)
    terms = []
    total = None
    for i in range(1, k + 1):
        coeff = (-1) ** (i + 1) * comb(n - i, n - k)
        lr_i = lr(i)
        contribution = coeff * (dv[0] * lr_i - dv[i] * lr_chow)
        terms.append(
            TermContribution(
                i=i,
                coefficient=coeff,
                deg_chow=dv[0],
                deg_hyper=dv[i],
                lr_hyper=lr_i,
                lr_chow=lr_chow,
                contribution=contribution,
            )
        )
        total = contribution if total is None else total + contribution
    return EnergyBreakdown(k=k, n=n, terms=tuple(terms), total=total)


def energy_via_pair(instance, sigma, k) -> float:
    """log-norm ratio of v_k minus that of w_k (tensor norms multiplicative)."""
    pair = build_pair_vectors(instance, k)
    return tensor_log_norm_ratio(sigma, pair.v) - tensor_log_norm_ratio(sigma, pair.w)


def energy_via_recursion(instance, sigma, k, ratios=None):
    """Recursive evaluation through the lower energies M_1, ..., M_{k-1}."""
    _check_admissible(instance, k)
    n = instance.n
    dv = degree_vector(instance.data, k)
    lr = _ratio_provider(instance, sigma, k, ratios)
    lr_chow = lr(0)

    memo = {}

    def m(j):
        if j in memo:
            return memo[j]
        inner = dv[0] * lr(j) - dv[j] * lr_chow
        for i in range(1, j):
            inner = inner + (-1) ** i * comb(n - i, n - j) * m(i)
        value = inner if (j + 1) % 2 == 0 else -inner  # (-1)^{j+1} prefactor
        memo[j] = value
        return value

    return m(k)


def energy(instance, sigma, k, method="formula"):
    if method == "formula":
        return energy_via_formula(instance, sigma, k).total
    if method == "pair":
        return energy_via_pair(instance, sigma, k)
    if method == "recursion":
        return energy_via_recursion(instance, sigma, k)
    raise KEnergyError(f"unknown evaluation method '{method}'")


# ---------------------------------------------------------------------------
# Directional derivatives and descent
# ---------------------------------------------------------------------------


def _log_norm_sq_derivative(poly: MatrixPoly, sigma: GroupElement, xi) -> float:
    """d/ds log |(sigma e^{s xi}) . p|^2 at s = 0.

    The substitution generator acts first, then sigma:
    d/ds p(A sigma e^{s xi}) = (D_xi p)(A sigma).
    """
    q = right_substitute(poly.to_float(), sigma.entries)
    qdot = right_substitute(lie_derivative(poly.to_float(), xi), sigma.entries)
    if qdot.is_zero:
        return 0.0
    return 2.0 * fs_inner(qdot, q).real / fs_norm_sq(q)


def directional_derivative(instance, sigma, k, xi) -> float:
    """Analytic d/ds M_k(sigma e^{s xi}) at s = 0."""
    _check_admissible(instance, k)
    n = instance.n
    dv = degree_vector(instance.data, k)
    d_chow = _log_norm_sq_derivative(instance.discriminants.chow, sigma, xi)
    total = 0.0
    for i in range(1, k + 1):
        coeff = (-1) ** (i + 1) * comb(n - i, n - k)
        d_i = _log_norm_sq_derivative(instance.polynomial(i), sigma, xi)
        total += coeff * (dv[0] * d_i - dv[i] * d_chow)
    return total


def sl_basis(size):
    """Real basis of sl(size, C): elementary shears, i-shears, and (i-)diagonal
    traceless differences."""
    basis = []
    for i in range(size):
        for j in range(size):
            if i == j:
                continue
            e = np.zeros((size, size), dtype=complex)
            e[i, j] = 1.0
            basis.append(e)
            basis.append(1j * e.copy())
    for r in range(size - 1):
        e = np.zeros((size, size), dtype=complex)
        e[r, r] = 1.0
        e[r + 1, r + 1] = -1.0
        basis.append(e)
        basis.append(1j * e.copy())
    return basis


@dataclass(frozen=True)
class MinimizeTrace:
    """Descent iterates: sigmas, energies and gradient norms, in step order."""

    sigmas: tuple
    energies: tuple
    gradient_norms: tuple
    converged: bool

    @property
    def final_energy(self):
        return self.energies[-1]


def minimize_energy(instance, k, sigma0, max_iters=100, step=0.5, tol=1e-8):
    """Gradient descent with Armijo backtracking, renormalized to det = 1.

    The gradient comes from the analytic directional derivatives along the
    sl basis; the trace of energies is nonincreasing by construction.
    """
    _check_admissible(instance, k)
    sigma = sigma0
    basis = sl_basis(sigma0.size)
    energies = [energy_via_formula(instance, sigma, k).total]
    sigmas = [sigma]
    grad_norms = []
    converged = False
    for _ in range(max_iters):
        grads = np.array(
            [directional_derivative(instance, sigma, k, b) for b in basis]
        )
        gnorm = float(np.linalg.norm(grads))
        grad_norms.append(gnorm)
        if gnorm < tol:
            converged = True
            break
        direction = -sum(g * b for g, b in zip(grads, basis))
        current = energies[-1]
        s = step / (1.0 + gnorm)  # keep the first trial step O(1) in the metric
        accepted = False
        while s > 1e-14:
            candidate = GroupElement.from_matrix(
                sigma.matrix @ expm(s * direction), normalize=True
            )
            value = energy_via_formula(instance, candidate, k).total
            if np.isfinite(value) and value <= current - 1e-4 * s * gnorm * gnorm:
                sigma = candidate
                energies.append(value)
                sigmas.append(sigma)
                accepted = True
                break
            s *= 0.5
        if not accepted:
            converged = gnorm < 10 * tol
            break
    if len(grad_norms) < len(energies):
        grad_norms.append(grad_norms[-1] if grad_norms else 0.0)
    return MinimizeTrace(
        sigmas=tuple(sigmas),
        energies=tuple(energies),
        gradient_norms=tuple(grad_norms),
        converged=converged,
    )
