"""Explicit variety instances with closed-form Chow forms and discriminants.

Every catalog entry avoids elimination machinery: dual quadrics are adjugate
quadrics, rational-normal-curve discriminants come from Sylvester resultants,
the quadric surface's format-1 hyperdiscriminant is Cayley's 2x2x2
hyperdeterminant, and Chow forms of quadric hypersurfaces are the quadric
evaluated on the generalized cross product of the frame rows.

Coordinate conventions are pinned:

  conic                x0*x2 = x1^2,    T(z) = (1, z, z^2)
  rational normal d    T(z) = (1, z, ..., z^d), hyperplanes = binary forms
  quadric surface      x0*x3 = x1*x2,   T(u, v) = (1, u, v, u*v); the 2x4
                       variable matrix is read as a 2x2x2 tensor via
                       a[i][j][k] = x[i][2j+k]

Stored discriminants are rescaled to a fixed normalization (largest-magnitude
coefficient +1 when a real positive one exists, else leading graded-lex
coefficient 1).  Energies and weights are invariant under rescaling, so this
only serves file reproducibility.
"""

from __future__ import annotations

import json
import os
from dataclasses import dataclass
from fractions import Fraction

from .chern import ChernProfile, hypersurface_mu, rational_curve_profile
from .errors import (
    DegreeMismatchError,
    InvalidInstanceError,
    KEnergyError,
)
from .exactpoly import GaussianRational, MatrixPoly, coeff_abs_sq
from .invariants import VarietyData, hyperdiscriminant_degree, format_range


# ---------------------------------------------------------------------------
# Determinants over polynomial entries
# ---------------------------------------------------------------------------


def poly_det(mat):
    """Determinant of a square matrix of MatrixPoly entries (shared shape).

    Laplace expansion along rows with memoization on the surviving column set,
    which keeps the cost at O(2^size) subset states instead of size!.
    """
    size = len(mat)
    if size == 0 or any(len(row) != size for row in mat):
        raise KEnergyError("determinant needs a nonempty square matrix")
    shape = mat[0][0].shape
    memo = {}

    def minor(cols):
        if not cols:
            return MatrixPoly.constant(shape, 1)
        if cols in memo:
            return memo[cols]
        r = size - len(cols)
        acc = MatrixPoly.zero(shape)
        for idx, c in enumerate(cols):
            entry = mat[r][c]
            if entry.is_zero:
                continue
            sub = minor(cols[:idx] + cols[idx + 1:])
            if sub.is_zero:
                continue
            term = entry * sub
            acc = acc + (term if idx % 2 == 0 else -term)
        memo[cols] = acc
        return acc

    return minor(tuple(range(size)))


def _lift(values, shape):
    return [
        v if isinstance(v, MatrixPoly) else MatrixPoly.constant(shape, v)
        for v in values
    ]


def sylvester_resultant(f, g):
    """Resultant of two polynomials given by ascending coefficient vectors.

    Normalized so that Res(f, g) = lc(g)^{deg f} * prod f(beta) over the roots
    beta of g; concretely the Sylvester determinant with the g rows on top.
    Coefficients may be numbers or MatrixPoly entries (symbolic resultants).
    Formal degrees are len - 1; vanishing leading data is allowed, matching
    the binary-form resultant of possibly degenerate forms.
    """
    if len(f) < 2 or len(g) < 2:
        raise KEnergyError("resultant needs formal degrees >= 1")
    d1, d2 = len(f) - 1, len(g) - 1
    symbolic = [v for v in list(f) + list(g) if isinstance(v, MatrixPoly)]
    if symbolic:
        shape = symbolic[0].shape
        fd = list(reversed(_lift(f, shape)))
        gd = list(reversed(_lift(g, shape)))
        size = d1 + d2
        zero = MatrixPoly.zero(shape)
        rows = []
        for i in range(d1):  # g block
            rows.append([zero] * i + gd + [zero] * (size - d2 - 1 - i))
        for i in range(d2):  # f block
            rows.append([zero] * i + fd + [zero] * (size - d1 - 1 - i))
        return poly_det(rows)
    # scalar path, exact over Fractions / GaussianRationals
    fd = list(reversed([_scalar(v) for v in f]))
    gd = list(reversed([_scalar(v) for v in g]))
    size = d1 + d2
    rows = []
    for i in range(d1):
        rows.append([0] * i + gd + [0] * (size - d2 - 1 - i))
    for i in range(d2):
        rows.append([0] * i + fd + [0] * (size - d1 - 1 - i))
    return _scalar_det(rows)


def _scalar(v):
    if isinstance(v, (int, Fraction)):
        return Fraction(v)
    return v


def _scalar_det(rows):
    size = len(rows)
    memo = {}

    def minor(cols):
        if not cols:
            return 1
        if cols in memo:
            return memo[cols]
        r = size - len(cols)
        acc = 0
        for idx, c in enumerate(cols):
            entry = rows[r][c]
            if not entry:
                continue
            sub = minor(cols[:idx] + cols[idx + 1:])
            term = entry * sub
            acc = acc + term if idx % 2 == 0 else acc - term
        memo[cols] = acc
        return acc

    return minor(tuple(range(size)))


def binary_discriminant(d):
    """Discriminant of the degree-d binary form sum a_c z^c, as a polynomial
    on the 1 x (d+1) variable matrix.

    Computed as (-1)^{d(d-1)/2} Res(f, f') / a_d by exact monomial division,
    so Disc has degree 2(d-1) and Disc(z^2 + 1) = -4 under the classical sign.
    """
    if d < 2:
        raise KEnergyError("discriminant needs degree d >= 2")
    shape = (1, d + 1)
    a = [MatrixPoly.variable(shape, 0, c) for c in range(d + 1)]
    fprime = [a[c + 1].scale(c + 1) for c in range(d)]
    res = sylvester_resultant(a, fprime)
    lead_exp = tuple(
        tuple(1 if c == d else 0 for c in range(d + 1)) for _ in range(1)
    )
    sign = (-1) ** (d * (d - 1) // 2)
    return res.divide_by_monomial(lead_exp, 1).scale(sign)


# ---------------------------------------------------------------------------
# Quadrics and their duals
# ---------------------------------------------------------------------------


def _fraction_matrix(Q):
    return [[Fraction(v) for v in row] for row in Q]


def dual_quadric(Q):
    """Dual of the smooth quadric x^T Q x = 0: the adjugate quadric a^T adj(Q) a."""
    Q = _fraction_matrix(Q)
    m = len(Q)
    if any(len(row) != m for row in Q):
        raise KEnergyError("quadric matrix must be square")
    if any(Q[i][j] != Q[j][i] for i in range(m) for j in range(m)):
        raise KEnergyError("quadric matrix must be symmetric")
    det, inv = _det_inverse(Q)
    if det == 0:
        raise KEnergyError("variety not smooth: quadric matrix is singular")
    shape = (1, m)
    terms = {}
    for i in range(m):
        for j in range(m):
            adj = det * inv[i][j]
            if adj == 0:
                continue
            exp = [0] * m
            exp[i] += 1
            exp[j] += 1
            key = (tuple(exp),)
            terms[key] = terms.get(key, Fraction(0)) + adj
    return MatrixPoly(shape, {k: v for k, v in terms.items() if v})


def _det_inverse(Q):
    """Exact determinant and inverse of a rational matrix via Gauss-Jordan."""
    m = len(Q)
    a = [row[:] + [Fraction(1) if i == j else Fraction(0) for j in range(m)]
         for i, row in enumerate(Q)]
    det = Fraction(1)
    for col in range(m):
        pivot = next((r for r in range(col, m) if a[r][col] != 0), None)
        if pivot is None:
            return Fraction(0), None
        if pivot != col:
            a[col], a[pivot] = a[pivot], a[col]
            det = -det
        det *= a[col][col]
        inv_p = 1 / a[col][col]
        a[col] = [v * inv_p for v in a[col]]
        for r in range(m):
            if r != col and a[r][col] != 0:
                factor = a[r][col]
                a[r] = [x - factor * y for x, y in zip(a[r], a[col])]
    inv = [row[m:] for row in a]
    return det, inv


def quadric_poly(Q):
    """The quadric x^T Q x as a polynomial on the 1 x m variable matrix."""
    Q = _fraction_matrix(Q)
    m = len(Q)
    terms = {}
    for i in range(m):
        for j in range(m):
            if Q[i][j] == 0:
                continue
            exp = [0] * m
            exp[i] += 1
            exp[j] += 1
            key = (tuple(exp),)
            terms[key] = terms.get(key, Fraction(0)) + Q[i][j]
    return MatrixPoly((1, m), {k: v for k, v in terms.items() if v})


def cayley_hyperdet():
    """Cayley's 2x2x2 hyperdeterminant on the 2x4 variable matrix.

    Column index 2j+k of row i carries the tensor entry a[i][j][k]; the
    classical polynomial has 4 square terms, 6 terms with coefficient -2 and
    2 terms with coefficient +4.
    """
    shape = (2, 4)

    def var(i, j, k):
        return MatrixPoly.variable(shape, i, 2 * j + k)

    a = {(i, j, k): var(i, j, k) for i in (0, 1) for j in (0, 1) for k in (0, 1)}
    squares = (
        a[0, 0, 0] * a[0, 0, 0] * a[1, 1, 1] * a[1, 1, 1]
        + a[0, 0, 1] * a[0, 0, 1] * a[1, 1, 0] * a[1, 1, 0]
        + a[0, 1, 0] * a[0, 1, 0] * a[1, 0, 1] * a[1, 0, 1]
        + a[0, 1, 1] * a[0, 1, 1] * a[1, 0, 0] * a[1, 0, 0]
    )
    pairs = (
        a[0, 0, 0] * a[0, 0, 1] * a[1, 1, 0] * a[1, 1, 1]
        + a[0, 0, 0] * a[0, 1, 0] * a[1, 0, 1] * a[1, 1, 1]
        + a[0, 0, 0] * a[0, 1, 1] * a[1, 0, 0] * a[1, 1, 1]
        + a[0, 0, 1] * a[0, 1, 0] * a[1, 0, 1] * a[1, 1, 0]
        + a[0, 0, 1] * a[0, 1, 1] * a[1, 0, 0] * a[1, 1, 0]
        + a[0, 1, 0] * a[0, 1, 1] * a[1, 0, 0] * a[1, 0, 1]
    )
    diagonals = (
        a[0, 0, 0] * a[0, 1, 1] * a[1, 0, 1] * a[1, 1, 0]
        + a[0, 0, 1] * a[0, 1, 0] * a[1, 0, 0] * a[1, 1, 1]
    )
    return squares + pairs.scale(-2) + diagonals.scale(4)


def generalized_cross(m):
    """Signed maximal minors c_j of the (m-1) x m variable matrix.

    The vector c satisfies A c = 0 row by row (x . c = det of x stacked on A),
    so [c] is the common zero of the m-1 hyperplanes cut by the rows.
    """
    shape = (m - 1, m)
    out = []
    for j in range(m):
        cols = [c for c in range(m) if c != j]
        minor = [[MatrixPoly.variable(shape, r, c) for c in cols] for r in range(m - 1)]
        out.append(poly_det(minor).scale((-1) ** j))
    return out


def chow_form_hypersurface(q, rows):
    """Chow form of the hypersurface q = 0: the quadric evaluated on the
    generalized cross product of the frame rows.

    q must be a homogeneous quadric on 1 x m variables and rows must be m-1;
    the result is homogeneous of total degree 2(m-1) on the (m-1) x m matrix.
    """
    m = q.shape[1]
    if q.shape[0] != 1 or q.homogeneous_degree() != 2:
        raise KEnergyError("chow_form_hypersurface expects a homogeneous quadric")
    if rows != m - 1:
        raise KEnergyError(f"frame must have {m - 1} rows for a hypersurface in P^{m - 1}")
    cross = generalized_cross(m)
    shape = (m - 1, m)
    out = MatrixPoly.zero(shape)
    cache = {}
    for exp, coeff in q.terms():
        idx = [c for c, e in enumerate(exp[0]) for _ in range(e)]
        key = tuple(idx)
        if key not in cache:
            prod = MatrixPoly.constant(shape, 1)
            for c in idx:
                prod = prod * cross[c]
            cache[key] = prod
        out = out + cache[key].scale(coeff)
    return out


# ---------------------------------------------------------------------------
# Normalization and the instance catalog
# ---------------------------------------------------------------------------


def normalize_scaling(p: MatrixPoly) -> MatrixPoly:
    """Fixed scaling: largest-magnitude coefficient becomes +1 when a real
    positive one of that magnitude exists, else the graded-lex-first
    coefficient becomes 1."""
    if p.is_zero:
        return p
    mags = {exp: coeff_abs_sq(c) for exp, c in p.term_dict().items()}
    top = max(mags.values())
    for exp, c in p.term_dict().items():
        if mags[exp] == top and isinstance(c, GaussianRational) and c.im == 0 and c.re > 0:
            return p.scale(1 / c.re)
    lead_coeff = p.terms()[0][1]
    return p.scale(GaussianRational(1) / lead_coeff if isinstance(lead_coeff, GaussianRational) else 1 / lead_coeff)


@dataclass(frozen=True, eq=False)
class DiscriminantSet:
    """Chow form plus the hyperdiscriminants, indexed so hyper[i] lives on the
    (n-i+1) x (N+1) variable matrix (format n-i)."""

    chow: MatrixPoly
    hyper: dict


@dataclass(frozen=True, eq=False)
class VarietyInstance:
    name: str
    data: VarietyData
    parametrization: tuple
    discriminants: DiscriminantSet

    @property
    def n(self):
        return self.data.n

    @property
    def N(self):
        return self.data.N

    def polynomial(self, i):
        """Delta^(n-i): the Chow form for i = 0, else hyper[i]."""
        if i == 0:
            return self.discriminants.chow
        if i not in self.discriminants.hyper:
            raise InvalidInstanceError(
                f"instance '{self.name}' has no stored format-{self.n - i} hyperdiscriminant"
            )
        return self.discriminants.hyper[i]


def validate_instance(instance: VarietyInstance):
    """Check shapes, homogeneity and the degree formula for every stored polynomial."""
    data = instance.data
    n, N = data.n, data.N
    if len(instance.parametrization) != N + 1:
        raise InvalidInstanceError("parametrization must list N+1 monomial sections")
    if any(len(e) != n for e in instance.parametrization):
        raise InvalidInstanceError("each section exponent must have length n")
    if tuple(instance.parametrization[0]) != (0,) * n:
        raise InvalidInstanceError("first section must be the constant chart section")
    fr = format_range(data)
    expected = {0: instance.discriminants.chow}
    for i in range(1, n - data.delta + 1):
        expected[i] = instance.polynomial(i)
    for i, poly in expected.items():
        want_shape = (n - i + 1, N + 1)
        if poly.shape != want_shape:
            raise InvalidInstanceError(
                f"format-{n - i} polynomial has shape {poly.shape}, expected {want_shape}"
            )
        if poly.is_zero:
            raise InvalidInstanceError(f"format-{n - i} polynomial is zero")
        deg = poly.homogeneous_degree()
        if deg is None:
            raise InvalidInstanceError(f"format-{n - i} polynomial is not homogeneous")
        want = hyperdiscriminant_degree(data, i)
        if deg != want:
            raise DegreeMismatchError(
                f"format-{n - i} polynomial has degree {deg}, formula gives {want}"
            )
    if fr.lo != data.delta or fr.hi != n:
        raise InvalidInstanceError("format range mismatch")
    return True


def _conic_instance():
    data = VarietyData(n=1, N=2, d=2, mu=rational_curve_profile(2), delta=0)
    q = quadric_poly([[0, 0, Fraction(1, 2)], [0, -1, 0], [Fraction(1, 2), 0, 0]])
    chow = normalize_scaling(chow_form_hypersurface(q, rows=2))
    disc = normalize_scaling(binary_discriminant(2))
    return VarietyInstance(
        name="conic",
        data=data,
        parametrization=((0,), (1,), (2,)),
        discriminants=DiscriminantSet(chow=chow, hyper={1: disc}),
    )


def _rational_normal_curve_instance(d):
    data = VarietyData(n=1, N=d, d=d, mu=rational_curve_profile(d), delta=0)
    shape = (2, d + 1)
    f0 = [MatrixPoly.variable(shape, 0, c) for c in range(d + 1)]
    f1 = [MatrixPoly.variable(shape, 1, c) for c in range(d + 1)]
    chow = normalize_scaling(sylvester_resultant(f0, f1))
    disc = normalize_scaling(binary_discriminant(d))
    return VarietyInstance(
        name=f"rational_normal_curve({d})",
        data=data,
        parametrization=tuple((c,) for c in range(d + 1)),
        discriminants=DiscriminantSet(chow=chow, hyper={1: disc}),
    )


def _quadric_surface_instance():
    data = VarietyData(n=2, N=3, d=2, mu=hypersurface_mu(2, 2), delta=0)
    half = Fraction(1, 2)
    Q = [[0, 0, 0, half], [0, 0, -half, 0], [0, -half, 0, 0], [half, 0, 0, 0]]
    chow = normalize_scaling(chow_form_hypersurface(quadric_poly(Q), rows=3))
    return VarietyInstance(
        name="quadric_surface",
        data=data,
        parametrization=((0, 0), (1, 0), (0, 1), (1, 1)),
        discriminants=DiscriminantSet(
            chow=chow,
            hyper={
                1: normalize_scaling(cayley_hyperdet()),
                2: normalize_scaling(dual_quadric(Q)),
            },
        ),
    )


def build_instance(name, **params):
    """Construct a catalog instance.

    Accepted names: "conic", "rational_normal_curve" (keyword degree=d, or the
    compound string "rational_normal_curve(d)"), "quadric_surface",
    "quadric_hypersurface" (keyword dim=n, n <= 2), "user" (keyword path=dir).
    All degree invariants are checked before returning.
    """
    params = {k: v for k, v in params.items() if v is not None}
    base = name.strip()
    if "(" in base and base.endswith(")"):
        head, arg = base[:-1].split("(", 1)
        base = head.strip()
        if base == "user":
            params.setdefault("path", arg.strip())
        else:
            params.setdefault("degree" if "curve" in base else "dim", int(arg))
    if base == "conic":
        instance = _conic_instance()
    elif base == "rational_normal_curve":
        d = int(params.get("degree", 0))
        if d < 2:
            raise InvalidInstanceError("rational_normal_curve needs degree >= 2")
        instance = _rational_normal_curve_instance(d)
    elif base == "quadric_surface":
        instance = _quadric_surface_instance()
    elif base == "quadric_hypersurface":
        n = int(params.get("dim", 0))
        if n == 1:
            instance = _conic_instance()
        elif n == 2:
            instance = _quadric_surface_instance()
        else:
            raise InvalidInstanceError(
                "quadric_hypersurface is cataloged for dim <= 2 only; intermediate "
                "hyperdiscriminant formats of higher quadrics have no closed form here"
            )
    elif base == "user":
        return load_instance(params["path"])
    else:
        raise InvalidInstanceError(f"unknown catalog name '{name}'")
    validate_instance(instance)
    return instance


CATALOG_NAMES = (
    "conic",
    "rational_normal_curve(d)",
    "quadric_surface",
    "quadric_hypersurface(n<=2)",
    "user(path)",
)


# ---------------------------------------------------------------------------
# Instance directories
# ---------------------------------------------------------------------------


def save_instance(instance: VarietyInstance, outdir):
    os.makedirs(outdir, exist_ok=True)
    meta = {
        "name": instance.name,
        "n": instance.data.n,
        "N": instance.data.N,
        "d": instance.data.d,
        "mu": [_frac_str(m) for m in instance.data.mu_values],
        "delta": instance.data.delta,
        "parametrization": [list(e) for e in instance.parametrization],
    }
    with open(os.path.join(outdir, "instance.json"), "w") as fh:
        json.dump(meta, fh, sort_keys=True, indent=1)
        fh.write("\n")
    with open(os.path.join(outdir, "chow.json"), "w") as fh:
        json.dump(instance.discriminants.chow.to_json_dict(), fh, sort_keys=True)
        fh.write("\n")
    for i, poly in sorted(instance.discriminants.hyper.items()):
        with open(os.path.join(outdir, f"hyper_{i}.json"), "w") as fh:
            json.dump(poly.to_json_dict(), fh, sort_keys=True)
            fh.write("\n")


def load_instance(path) -> VarietyInstance:
    meta_path = os.path.join(path, "instance.json")
    try:
        with open(meta_path) as fh:
            meta = json.load(fh)
    except (OSError, json.JSONDecodeError) as exc:
        raise InvalidInstanceError(f"cannot read {meta_path}: {exc}") from exc
    try:
        n = int(meta["n"])
        profile = ChernProfile(
            n=n, mu=tuple(Fraction(m) for m in meta["mu"]), d=int(meta["d"]), N=int(meta["N"])
        )
        data = VarietyData(
            n=n, N=int(meta["N"]), d=int(meta["d"]), mu=profile, delta=int(meta.get("delta", 0))
        )
        parametrization = tuple(tuple(int(v) for v in e) for e in meta["parametrization"])
    except (KeyError, ValueError, TypeError) as exc:
        raise InvalidInstanceError(f"malformed instance.json: {exc}") from exc
    with open(os.path.join(path, "chow.json")) as fh:
        chow = MatrixPoly.from_json_dict(json.load(fh))
    hyper = {}
    for i in range(1, n - data.delta + 1):
        fname = os.path.join(path, f"hyper_{i}.json")
        if not os.path.exists(fname):
            raise InvalidInstanceError(f"missing {fname}")
        with open(fname) as fh:
            hyper[i] = MatrixPoly.from_json_dict(json.load(fh))
    instance = VarietyInstance(
        name=str(meta.get("name", os.path.basename(str(path)))),
        data=data,
        parametrization=parametrization,
        discriminants=DiscriminantSet(chow=chow, hyper=hyper),
    )
    validate_instance(instance)
    return instance


def _frac_str(f: Fraction) -> str:
    return str(f.numerator) if f.denominator == 1 else f"{f.numerator}/{f.denominator}"
