"""Independent analytic cross-check on rational curves: Bergman metrics,
curvature, and quadrature of the defining energy integral.

Conventions (the 2*pi normalization is chosen so characteristic numbers come
out integral):

  omega            (1/pi) h(z) dx dy with h = dd-bar log |sigma T|^2, so the
                   volume integral(omega) equals deg(X)
  c_1 density      -(1/(4 pi)) Laplacian_z log h, integrating to chi = 2
  energy, k = 1    -(n+1)(n-k+1) V  int_0^1 int_X phidot [c_1 - mu_1 omega] dt

Surface integration works in log-polar coordinates z = exp(u + i theta) per
chart (|z| <= 1 in the affine chart, |w| <= 1 in the chart at infinity), with
Gauss-Legendre nodes in u and a trapezoidal angular rule.  In these
coordinates the metric density against du dtheta is

  htilde := h |z|^2 = sum_{i<j} |U_i V_j - U_j V_i|^2 / |U|^4,

with U = sigma T and V = sigma (z T'), a cancellation-free Lagrange-identity
form that stays accurate through severe torus degenerations; since
log h = log htilde - 2u, the curvature Laplacian may be taken on log htilde
directly.  Quadrature nodes are evaluated in parallel-friendly vectorized
batches and summed in fixed order.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from numpy.polynomial.legendre import leggauss
from scipy.linalg import expm

from .catalog import VarietyInstance
from .errors import KEnergyError


@dataclass(frozen=True)
class CurveChart:
    """Monomial chart T_i(z) = z^{powers[i]} of a rational curve."""

    powers: tuple
    name: str

    def __post_init__(self):
        if 0 not in self.powers:
            raise KEnergyError("chart needs a nonvanishing section at z = 0")

    def sections(self, z):
        z = np.asarray(z, dtype=complex)
        k = np.asarray(self.powers, dtype=float)[:, None]
        return z[None, :] ** k

    def z_sections_prime(self, z):
        """z * T'(z) elementwise, the log-derivative-friendly combination."""
        z = np.asarray(z, dtype=complex)
        k = np.asarray(self.powers, dtype=float)[:, None]
        return k * (z[None, :] ** k)

    def sections_prime(self, z):
        z = np.asarray(z, dtype=complex)
        k = np.asarray(self.powers, dtype=float)[:, None]
        out = np.zeros((len(self.powers), z.size), dtype=complex)
        for i, e in enumerate(self.powers):
            if e:
                out[i] = e * z ** (e - 1)
        return out


def curve_charts(instance: VarietyInstance):
    """The affine chart and the chart at infinity of a catalog curve."""
    if instance.n != 1:
        raise KEnergyError("numeric cross-checks cover curves (n = 1) only")
    powers = tuple(e[0] for e in instance.parametrization)
    top = max(powers)
    return (
        CurveChart(powers=powers, name="affine"),
        CurveChart(powers=tuple(top - e for e in powers), name="infinity"),
    )


@dataclass(frozen=True)
class QuadratureSpec:
    """Node counts and tolerances for the curve quadrature."""

    radial: int = 160
    angular: int = 64
    path_nodes: int = 24
    fd_step: float = 1e-3
    u_min: float = -25.0
    tol: float = 1e-6

    def __post_init__(self):
        if self.radial < 8 or self.angular < 8 or self.path_nodes < 8:
            raise KEnergyError("node counts must be at least 8")
        if self.tol <= 0:
            raise KEnergyError("tolerance must be positive")


# ---------------------------------------------------------------------------
# Pointwise metric quantities
# ---------------------------------------------------------------------------


def _sigma_matrix(sigma):
    if hasattr(sigma, "matrix"):
        return sigma.matrix
    return np.asarray(sigma, dtype=complex)


def _gram_ratio(U, V):
    """(|U|^2 |V|^2 - |<V,U>|^2) / |U|^4 via the Lagrange identity."""
    nU = np.einsum("im,im->m", U, U.conj()).real
    W = np.zeros(U.shape[1], dtype=float)
    for i in range(U.shape[0]):
        for j in range(i + 1, U.shape[0]):
            W += np.abs(U[i] * V[j] - U[j] * V[i]) ** 2
    return W / nU**2


def bergman_metric(chart: CurveChart, sigma, z):
    """Metric coefficient h(z) = dd-bar log |sigma T(z)|^2, positive at
    immersion points."""
    S = _sigma_matrix(sigma)
    zs = np.atleast_1d(np.asarray(z, dtype=complex))
    U = S @ chart.sections(zs)
    V = S @ chart.sections_prime(zs)
    h = _gram_ratio(U, V)
    return float(h[0]) if np.isscalar(z) or np.asarray(z).ndim == 0 else h


def metric_density_log(chart: CurveChart, S, u, theta):
    """log( h(z) |z|^2 ) at z = exp(u + i theta), the du dtheta density of
    omega up to 1/pi."""
    z = np.exp(u + 1j * theta)
    U = S @ chart.sections(z)
    V = S @ chart.z_sections_prime(z)
    return np.log(_gram_ratio(U, V))


def chern1_density(chart: CurveChart, sigma, z, step=None):
    """Curvature density -(1/(4 pi)) Laplacian_z log h against dx dy,
    by fourth-order central differences with a scale-aware step."""
    S = _sigma_matrix(sigma)
    z = complex(z)
    if step is None:
        step = 6e-4 * (1.0 + abs(z))

    def logh(point):
        return math.log(bergman_metric(chart, S, complex(point)))

    lap = 0.0
    for direction in (1.0, 1j):
        d = direction * step
        lap += (
            -logh(z + 2 * d)
            + 16 * logh(z + d)
            - 30 * logh(z)
            + 16 * logh(z - d)
            - logh(z - 2 * d)
        ) / (12 * step * step)
    return -lap / (4 * math.pi)


def potential_path(chart: CurveChart, xi, t, z):
    """(phi_t, phidot_t) for the exponential potential path through e^xi.

    phi_t = log(|e^{xi t} T|^2 / |T|^2) and
    phidot_t = <(xi + xi^*) u, u> / |u|^2 with u = e^{xi t} T, so phi_0 = 0 and
    |phidot| is bounded by the operator norm of xi + xi^*.
    """
    xi = np.asarray(xi, dtype=complex)
    S = expm(xi * t)
    zs = np.atleast_1d(np.asarray(z, dtype=complex))
    T = chart.sections(zs)
    u = S @ T
    nu = np.einsum("im,im->m", u, u.conj()).real
    nT = np.einsum("im,im->m", T, T.conj()).real
    phi = np.log(nu / nT)
    herm = xi + xi.conj().T
    phidot = np.einsum("im,im->m", herm @ u, u.conj()).real / nu
    if np.asarray(z).ndim == 0:
        return float(phi[0]), float(phidot[0])
    return phi, phidot


# ---------------------------------------------------------------------------
# Surface quadrature
# ---------------------------------------------------------------------------


def _log_polar_grid(u_min, radial, angular):
    xu, wu = leggauss(radial)
    u = 0.5 * (xu + 1.0) * (0.0 - u_min) + u_min
    wu = wu * 0.5 * (0.0 - u_min)
    theta = np.arange(angular) * (2.0 * math.pi / angular)
    wtheta = np.full(angular, 2.0 * math.pi / angular)
    uu, tt = np.meshgrid(u, theta, indexing="ij")
    ww = np.outer(wu, wtheta)
    return uu.ravel(), tt.ravel(), ww.ravel()


def _surface_fields(chart, S, u, theta, fd_step):
    """omega density h~/pi and c_1 density -(1/4pi) Lap log h~, per du dtheta."""
    f0 = metric_density_log(chart, S, u, theta)
    lap = np.zeros_like(f0)
    for du, dth in ((fd_step, 0.0), (0.0, fd_step)):
        fp1 = metric_density_log(chart, S, u + du, theta + dth)
        fm1 = metric_density_log(chart, S, u - du, theta - dth)
        fp2 = metric_density_log(chart, S, u + 2 * du, theta + 2 * dth)
        fm2 = metric_density_log(chart, S, u - 2 * du, theta - 2 * dth)
        lap += (-fp2 + 16 * fp1 - 30 * f0 + 16 * fm1 - fm2) / (12 * fd_step**2)
    omega = np.exp(f0) / math.pi
    c1 = -lap / (4.0 * math.pi)
    return omega, c1


def _auto_u_min(spec: QuadratureSpec, xi=None):
    if xi is None:
        return spec.u_min
    eig = np.linalg.eigvals(np.asarray(xi, dtype=complex))
    spread = float(np.max(eig.real) - np.min(eig.real))
    return min(spec.u_min, -(spread + 25.0))


def _auto_radial(spec: QuadratureSpec, u_min):
    return max(spec.radial, int(8 * abs(u_min)))


def volume_and_chern(instance, sigma=None, spec=QuadratureSpec(), xi=None):
    """(integral omega, integral c_1) over the curve for the metric of sigma."""
    S = np.eye(instance.N + 1, dtype=complex) if sigma is None else _sigma_matrix(sigma)
    u_min = _auto_u_min(spec, xi)
    radial = _auto_radial(spec, u_min)
    vol = 0.0
    chern = 0.0
    for chart in curve_charts(instance):
        u, theta, w = _log_polar_grid(u_min, radial, spec.angular)
        omega, c1 = _surface_fields(chart, S, u, theta, spec.fd_step)
        vol += float(np.sum(w * omega))
        chern += float(np.sum(w * c1))
    return vol, chern


@dataclass(frozen=True)
class MuReport:
    volume: float
    chern_number: float
    mu1: float


def mu_quadrature(instance, spec=QuadratureSpec()) -> MuReport:
    """mu_1 = (integral c_1) / V for the restricted ambient metric."""
    vol, chern = volume_and_chern(instance, None, spec)
    return MuReport(volume=vol, chern_number=chern, mu1=chern / vol)


def gauss_bonnet(instance, sigma, spec=QuadratureSpec()) -> float:
    """integral of c_1(omega_sigma), which is 2 for every rational curve."""
    _, chern = volume_and_chern(instance, sigma, spec)
    return chern


def energy_quadrature(instance, xi, spec=QuadratureSpec(), path="exponential"):
    """The defining energy integral for k = 1 on a curve, fully normalized.

    path selects the potential path from 0 to phi_sigma (sigma = e^xi):
    "exponential" uses phi_t = log(|e^{xi t}T|^2/|T|^2), "quadratic" its
    t -> t^2 reparametrization, "affine" the linear interpolation of the
    endpoint potential (metric densities blend pointwise).  The value is
    path independent up to quadrature error.
    """
    xi = np.asarray(xi, dtype=complex)
    if abs(np.trace(xi)) > 1e-9:
        raise KEnergyError("path generator must be traceless")
    u_min = _auto_u_min(spec, xi)
    radial = _auto_radial(spec, u_min)
    xt, wt = leggauss(spec.path_nodes)
    taus = 0.5 * (xt + 1.0)
    wtaus = 0.5 * wt

    mu1 = float(instance.data.mu_values[1])
    vol = float(instance.data.d)
    herm = xi + xi.conj().T
    identity = np.eye(instance.N + 1, dtype=complex)
    total = 0.0
    for chart in curve_charts(instance):
        u, theta, w = _log_polar_grid(u_min, radial, spec.angular)
        z = np.exp(u + 1j * theta)
        T = chart.sections(z)
        if path == "affine":
            S1 = expm(xi)
            U1 = S1 @ T
            nT = np.einsum("im,im->m", T, T.conj()).real
            n1 = np.einsum("im,im->m", U1, U1.conj()).real
            phidot = np.log(n1 / nT)  # d/dt of t*phi_1

            def blended_log(du, dth):
                l0 = metric_density_log(chart, identity, u + du, theta + dth)
                l1 = metric_density_log(chart, S1, u + du, theta + dth)
                return l0, l1

            stencil = {}
            for du, dth in (
                (0.0, 0.0),
                (spec.fd_step, 0.0), (-spec.fd_step, 0.0),
                (2 * spec.fd_step, 0.0), (-2 * spec.fd_step, 0.0),
                (0.0, spec.fd_step), (0.0, -spec.fd_step),
                (0.0, 2 * spec.fd_step), (0.0, -2 * spec.fd_step),
            ):
                stencil[(du, dth)] = blended_log(du, dth)
            for tau, wtau in zip(taus, wtaus):
                def hlog(key):
                    l0, l1 = stencil[key]
                    return np.log((1 - tau) * np.exp(l0) + tau * np.exp(l1))

                f0 = hlog((0.0, 0.0))
                lap = np.zeros_like(f0)
                for axis in ((spec.fd_step, 0.0), (0.0, spec.fd_step)):
                    du, dth = axis
                    lap += (
                        -hlog((2 * du, 2 * dth))
                        + 16 * hlog((du, dth))
                        - 30 * f0
                        + 16 * hlog((-du, -dth))
                        - hlog((-2 * du, -2 * dth))
                    ) / (12 * spec.fd_step**2)
                omega = np.exp(f0) / math.pi
                c1 = -lap / (4.0 * math.pi)
                total += wtau * float(np.sum(w * phidot * (c1 - mu1 * omega)))
            continue
        for tau, wtau in zip(taus, wtaus):
            path_t = tau * tau if path == "quadratic" else tau
            scale = 2.0 * tau if path == "quadratic" else 1.0
            S = expm(xi * path_t)
            omega, c1 = _surface_fields(chart, S, u, theta, spec.fd_step)
            U = S @ T
            nu = np.einsum("im,im->m", U, U.conj()).real
            phidot = scale * np.einsum("im,im->m", herm @ U, U.conj()).real / nu
            total += wtau * float(np.sum(w * phidot * (c1 - mu1 * omega)))
    n, k = 1, 1
    return -(n + 1) * (n - k + 1) * vol * total


@dataclass(frozen=True)
class NumericSlopeReport:
    weights: tuple
    samples: tuple
    energies: tuple
    fit_slope: float
    algebraic_slope: int


def numeric_slope(instance, weights, samples, spec=QuadratureSpec(), algebraic=None):
    """Fit the quadrature energy along diag(t^a) against log|t|^2."""
    samples = tuple(float(t) for t in samples)
    energies = []
    for t in samples:
        xi = np.diag(np.array(weights, dtype=float)) * math.log(t)
        energies.append(energy_quadrature(instance, xi, spec))
    xs = np.array([2.0 * math.log(t) for t in samples])
    ys = np.array(energies)
    design = np.vstack([xs, np.ones_like(xs)]).T
    (slope, _), *_ = np.linalg.lstsq(design, ys, rcond=None)
    return NumericSlopeReport(
        weights=tuple(int(w) for w in weights),
        samples=samples,
        energies=tuple(energies),
        fit_slope=float(slope),
        algebraic_slope=algebraic,
    )
