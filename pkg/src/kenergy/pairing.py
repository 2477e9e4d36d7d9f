"""Factorial-weighted norms, group bookkeeping, weights and formal tensors.

The squared norm of a polynomial is sum |c_alpha|^2 / alpha! with alpha! the
product of factorials of all matrix-entry exponents.  Log-norms are always
evaluated in floating point with max-term factoring (a log-sum-exp), so
one-parameter degenerations down to |t| ~ 1e-300 stay finite.  Norms of formal
tensors are multiplicative over factors and powers, which is what makes the
pair evaluation of the energies agree exactly with the degree formula.

The weight of a monomial under an integer one-parameter subgroup is the dot
product of its column-degree vector with the weights; the asymptotic slope of
log |lambda(t) p|^2 against log|t|^2 as |t| -> 0 is the MINIMUM such weight,
because the smallest power of |t| dominates.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache

import numpy as np

from .errors import KEnergyError, ZeroPolynomialError
from .exactpoly import (
    GaussianRational,
    MatrixPoly,
    as_coefficient,
    coeff_abs_sq,
    column_degree,
    right_substitute,
)

DET_TOL = 1e-12


@dataclass(frozen=True)
class GroupElement:
    """Element of SL(N+1, C): exact (Gaussian rational) or floating entries."""

    entries: tuple
    exact: bool

    @classmethod
    def from_matrix(cls, matrix, normalize=False):
        """Wrap a matrix, checking det = 1 (exactly, or within 1e-12 for floats).

        normalize=True rescales floating input onto det = 1 instead of
        checking; the result is then det-1 to the accuracy of the floating
        determinant itself, so no further check is applied.
        """
        rows = [list(row) for row in matrix]
        size = len(rows)
        if any(len(r) != size for r in rows):
            raise KEnergyError("group element must be square")
        coeffs = [[as_coefficient(v) for v in row] for row in rows]
        exact = all(isinstance(v, GaussianRational) for row in coeffs for v in row)
        if normalize and not exact:
            det = np.linalg.det(np.array([[complex(v) for v in row] for row in coeffs]))
            if det == 0:
                raise KEnergyError("matrix is singular")
            root = det ** (1.0 / size)
            coeffs = [[complex(v) / root for v in row] for row in coeffs]
            return cls(entries=tuple(tuple(row) for row in coeffs), exact=False)
        ge = cls(entries=tuple(tuple(row) for row in coeffs), exact=exact)
        ge._check_determinant()
        return ge

    @classmethod
    def identity(cls, size):
        return cls.diagonal([1] * size)

    @classmethod
    def diagonal(cls, values):
        vals = [as_coefficient(v) for v in values]
        size = len(vals)
        zero_exact = GaussianRational(0)
        rows = []
        for i in range(size):
            row = []
            for j in range(size):
                if i == j:
                    row.append(vals[i])
                elif isinstance(vals[i], GaussianRational):
                    row.append(zero_exact)
                else:
                    row.append(0j)
            rows.append(tuple(row))
        ge = cls(entries=tuple(rows), exact=all(isinstance(v, GaussianRational) for v in vals))
        ge._check_determinant()
        return ge

    def _check_determinant(self):
        size = len(self.entries)
        if self.is_diagonal:
            det = self.entries[0][0]
            for i in range(1, size):
                det = det * self.entries[i][i]
        elif self.exact:
            det = _exact_det([list(row) for row in self.entries])
        else:
            det = np.linalg.det(self.matrix)
        if self.exact:
            if det != GaussianRational(1):
                raise KEnergyError(f"exact group element has determinant {det} != 1")
        elif abs(complex(det) - 1.0) > DET_TOL:
            raise KEnergyError(f"determinant {complex(det)} is not 1 within {DET_TOL}")

    @property
    def size(self):
        return len(self.entries)

    @property
    def is_diagonal(self):
        return all(
            not self.entries[i][j]
            for i in range(self.size)
            for j in range(self.size)
            if i != j
        )

    @property
    def matrix(self):
        return np.array([[complex(v) for v in row] for row in self.entries])

    def compose(self, other):
        """Matrix product self @ other (exact when both are exact)."""
        if self.size != other.size:
            raise KEnergyError("size mismatch")
        rows = []
        for i in range(self.size):
            row = []
            for j in range(self.size):
                acc = as_coefficient(0) if self.exact and other.exact else 0j
                for m in range(self.size):
                    acc = acc + self.entries[i][m] * other.entries[m][j]
                row.append(acc)
            rows.append(tuple(row))
        return GroupElement(
            entries=tuple(rows), exact=self.exact and other.exact
        )


def _exact_det(rows):
    size = len(rows)
    memo = {}

    def minor(cols):
        if not cols:
            return GaussianRational(1)
        if cols in memo:
            return memo[cols]
        r = size - len(cols)
        acc = GaussianRational(0)
        for idx, c in enumerate(cols):
            if not rows[r][c]:
                continue
            term = rows[r][c] * minor(cols[:idx] + cols[idx + 1:])
            acc = acc + term if idx % 2 == 0 else acc - term
        memo[cols] = acc
        return acc

    return minor(tuple(range(size)))


@dataclass(frozen=True)
class OneParamSubgroup:
    """Integer weight vector (a_0, ..., a_N) with sum zero."""

    weights: tuple

    def __post_init__(self):
        object.__setattr__(self, "weights", tuple(int(w) for w in self.weights))
        if sum(self.weights) != 0:
            raise KEnergyError("one-parameter subgroup weights must sum to zero")

    def at(self, t):
        """The diagonal element diag(t^a_0, ..., t^a_N)."""
        if isinstance(t, (int, Fraction)):
            t = Fraction(t)
            return GroupElement.diagonal([t ** w for w in self.weights])
        return GroupElement.diagonal([complex(t) ** w for w in self.weights])

    def __neg__(self):
        return OneParamSubgroup(tuple(-w for w in self.weights))


# ---------------------------------------------------------------------------
# Norms
# ---------------------------------------------------------------------------


def _log_factorial_weight(exp):
    return sum(math.lgamma(e + 1) for row in exp for e in row if e)


def fs_norm_sq_exact(p: MatrixPoly) -> Fraction:
    """Exact squared norm sum |c|^2 / alpha! (exact polynomials only)."""
    if p.is_zero:
        raise ZeroPolynomialError("norm of the zero polynomial")
    total = Fraction(0)
    for exp, coeff in p.term_dict().items():
        if not isinstance(coeff, GaussianRational):
            raise KEnergyError("exact norm requires exact coefficients")
        w = 1
        for row in exp:
            for e in row:
                if e > 1:
                    w *= math.factorial(e)
        total += coeff.abs_sq() / w
    return total


def log_fs_norm_sq(p: MatrixPoly, column_log_scale=None) -> float:
    """log of the squared factorial-weighted norm, via max-term factoring.

    column_log_scale optionally adds sum_c coldeg_c * 2*log|t_c| per term,
    the stable evaluation of a diagonal substitution without forming it.
    """
    if p.is_zero:
        raise ZeroPolynomialError("norm of the zero polynomial")
    logs = []
    for exp, coeff in p.term_dict().items():
        sq = coeff_abs_sq(coeff)
        if isinstance(sq, Fraction):
            ll = math.log(sq.numerator) - math.log(sq.denominator)
        else:
            if sq == 0.0:
                continue
            ll = math.log(sq)
        ll -= _log_factorial_weight(exp)
        if column_log_scale is not None:
            ll += sum(
                2.0 * d * s for d, s in zip(column_degree(exp), column_log_scale) if d
            )
        logs.append(ll)
    if not logs:
        raise ZeroPolynomialError("norm of a numerically zero polynomial")
    top = max(logs)
    return top + math.log(sum(math.exp(v - top) for v in logs))


def fs_norm_sq(p: MatrixPoly) -> float:
    """Squared factorial-weighted norm as a float (overflow safe)."""
    return math.exp(log_fs_norm_sq(p))


@lru_cache(maxsize=8192)
def _cached_log_ratio(sigma: GroupElement, p: MatrixPoly) -> float:
    if sigma.is_diagonal:
        scale = [math.log(abs(complex(sigma.entries[j][j]))) for j in range(sigma.size)]
        return log_fs_norm_sq(p, column_log_scale=scale) - log_fs_norm_sq(p)
    return log_fs_norm_sq(right_substitute(p, sigma.entries)) - log_fs_norm_sq(p)


def log_norm_ratio(sigma: GroupElement, p: MatrixPoly) -> float:
    """log ( |sigma . p|^2 / |p|^2 ); exactly 0.0 at the identity."""
    if p.is_zero:
        raise ZeroPolynomialError("log-norm ratio of the zero polynomial")
    return _cached_log_ratio(sigma, p)


def fs_inner(p: MatrixPoly, q: MatrixPoly) -> complex:
    """Factorial-weighted Hermitian inner product of coefficient vectors."""
    if p.shape != q.shape:
        raise KEnergyError("inner product needs matching variable shapes")
    qterms = q.term_dict()
    total = 0j
    for exp, cp in p.term_dict().items():
        cq = qterms.get(exp)
        if cq is None:
            continue
        w = 1.0
        for row in exp:
            for e in row:
                if e > 1:
                    w *= math.factorial(e)
        total += complex(cp) * complex(cq).conjugate() / w
    return total


# ---------------------------------------------------------------------------
# Weights
# ---------------------------------------------------------------------------


def min_weight(lam: OneParamSubgroup, p: MatrixPoly) -> int:
    """Minimum over terms of <column-degree vector, weights> (the |t| -> 0 slope)."""
    if p.is_zero:
        raise ZeroPolynomialError("weight of the zero polynomial")
    weights = lam.weights
    best = None
    for exp in p.term_dict():
        w = sum(d * a for d, a in zip(column_degree(exp), weights))
        if best is None or w < best:
            best = w
    return best


# ---------------------------------------------------------------------------
# Formal tensors
# ---------------------------------------------------------------------------


@dataclass(frozen=True, eq=False)
class FormalTensor:
    """Formal product of named polynomials with positive integer exponents,
    never expanded; norms and weights extend multiplicatively/additively."""

    factors: tuple  # of (label, MatrixPoly, power)

    def __post_init__(self):
        for label, poly, power in self.factors:
            if power < 1:
                raise KEnergyError(f"factor '{label}' has non-positive power")
            if poly.is_zero:
                raise ZeroPolynomialError(f"factor '{label}' is zero")

    def total_degree(self):
        return sum(power * poly.total_degree() for _, poly, power in self.factors)

    def describe(self):
        return " (x) ".join(
            f"{label}^{power}" if power != 1 else label
            for label, poly, power in self.factors
        ) or "1"


def tensor_log_norm_ratio(sigma: GroupElement, tensor: FormalTensor) -> float:
    return sum(
        power * log_norm_ratio(sigma, poly) for _, poly, power in tensor.factors
    )


def tensor_min_weight(lam: OneParamSubgroup, tensor: FormalTensor) -> int:
    return sum(power * min_weight(lam, poly) for _, poly, power in tensor.factors)


# ---------------------------------------------------------------------------
# Fubini-Study distances on projectivized coefficient vectors
# ---------------------------------------------------------------------------


def fs_distance(p: MatrixPoly, q: MatrixPoly) -> float:
    """arccos( |<p, q>| / (|p| |q|) ) in [0, pi/2]."""
    if p.is_zero or q.is_zero:
        raise ZeroPolynomialError("distance needs nonzero vectors")
    ip = abs(fs_inner(p, q))
    denom = math.sqrt(fs_norm_sq(p) * fs_norm_sq(q))
    return math.acos(max(-1.0, min(1.0, ip / denom)))


def pair_distance(v: MatrixPoly, w: MatrixPoly) -> float:
    """Distance between [(v, w)] and [(v, 0)] in the projective space of the
    direct sum, with the factorial-weighted norm on each summand."""
    if v.is_zero or w.is_zero:
        raise ZeroPolynomialError("distance needs nonzero vectors")
    nv = fs_norm_sq(v)
    nw = fs_norm_sq(w)
    return math.acos(max(-1.0, min(1.0, math.sqrt(nv / (nv + nw)))))


def log_tan_sq(angle: float) -> float:
    return 2.0 * math.log(math.tan(angle))
