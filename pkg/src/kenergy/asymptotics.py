"""Integer asymptotic slopes along one-parameter subgroups, numeric slope
fits, and the torus boundedness scan.

Along lambda(t) the energy expands as A_k log|t|^2 + O(1) with the integer
slope A_k = w(v_k) - w(w_k), the difference of minimal monomial weights of the
pair tensors.  M_k is bounded below along lambda as |t| -> 0 iff A_k <= 0, so
the scan verdict reports the maximal slope over all enumerated subgroups.
"""

from __future__ import annotations

import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from itertools import product

import numpy as np

from .energy import build_pair_vectors, energy_via_formula
from .errors import KEnergyError
from .pairing import OneParamSubgroup, tensor_min_weight


def slope_integer(instance, k, lam: OneParamSubgroup) -> int:
    """A_k(lambda) = w(v_k) - w(w_k), exact."""
    pair = build_pair_vectors(instance, k)
    return tensor_min_weight(lam, pair.v) - tensor_min_weight(lam, pair.w)


@dataclass(frozen=True)
class SlopeReport:
    lam: OneParamSubgroup
    a_k: int
    fit_slope: float
    fit_residual: float
    bounded_below: bool
    samples: tuple = ()
    values: tuple = ()


def slope_fit(instance, k, lam: OneParamSubgroup, samples) -> SlopeReport:
    """Least-squares slope of M_k(lambda(t)) against log|t|^2.

    Sample magnitudes must lie in (0, 1); at least 4 are required.  Diagonal
    substitutions are evaluated through the log-stable weighted norm, so
    |t| = 1e-6 on degree-30 tensors does not overflow.
    """
    samples = tuple(float(t) for t in samples)
    if len(samples) < 4:
        raise KEnergyError("slope fit needs at least 4 sample magnitudes")
    if any(not 0.0 < t < 1.0 for t in samples):
        raise KEnergyError("sample magnitudes must lie in (0, 1)")
    a_k = slope_integer(instance, k, lam)
    xs = np.array([2.0 * math.log(t) for t in samples])
    ys = np.array(
        [energy_via_formula(instance, lam.at(t), k).total for t in samples]
    )
    design = np.vstack([xs, np.ones_like(xs)]).T
    (slope, intercept), *_ = np.linalg.lstsq(design, ys, rcond=None)
    residual = float(np.max(np.abs(ys - (slope * xs + intercept))))
    return SlopeReport(
        lam=lam,
        a_k=a_k,
        fit_slope=float(slope),
        fit_residual=residual,
        bounded_below=a_k <= 0,
        samples=samples,
        values=tuple(float(v) for v in ys),
    )


# ---------------------------------------------------------------------------
# Torus scan
# ---------------------------------------------------------------------------


def weight_vectors(ncoords, bound, dedup="none"):
    """Integer vectors with entries in [-bound, bound] summing to zero.

    dedup="none" enumerates every vector (A_k is not invariant under
    coordinate permutations or sign flip, so this is the trustworthy mode);
    dedup="signature" keeps one representative per sorted-absolute-value
    signature, a cheaper sampling mode.
    """
    if bound < 0:
        raise KEnergyError("weight bound must be nonnegative")
    seen = set()
    out = []
    for vec in product(range(-bound, bound + 1), repeat=ncoords):
        if sum(vec) != 0:
            continue
        if dedup == "signature":
            key = tuple(sorted(abs(v) for v in vec))
            if key in seen:
                continue
            seen.add(key)
        out.append(vec)
    return out


@dataclass(frozen=True)
class ScanReport:
    k: int
    bound: int
    n_evaluated: int
    max_slope: int
    worst: OneParamSubgroup
    destabilizer_found: bool
    verdict: str


def stability_scan(instance, k, bound, dedup="none") -> ScanReport:
    """Maximal A_k over the enumerated subgroups at the given weight bound."""
    pair = build_pair_vectors(instance, k)
    vectors = weight_vectors(instance.N + 1, bound, dedup=dedup)

    def evaluate(vec):
        lam = OneParamSubgroup(vec)
        return tensor_min_weight(lam, pair.v) - tensor_min_weight(lam, pair.w)

    threads = _thread_count()
    if threads > 1 and len(vectors) > 64:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            slopes = list(pool.map(evaluate, vectors))
    else:
        slopes = [evaluate(v) for v in vectors]

    best_idx = 0
    for idx in range(1, len(vectors)):
        if slopes[idx] > slopes[best_idx] or (
            slopes[idx] == slopes[best_idx] and vectors[idx] < vectors[best_idx]
        ):
            best_idx = idx
    max_slope = slopes[best_idx] if vectors else 0
    worst = OneParamSubgroup(vectors[best_idx]) if vectors else OneParamSubgroup((0,) * (instance.N + 1))
    found = max_slope > 0
    verdict = (
        f"destabilizer found at bound {bound}"
        if found
        else f"no destabilizer found at bound {bound}"
    )
    return ScanReport(
        k=k,
        bound=bound,
        n_evaluated=len(vectors),
        max_slope=max_slope,
        worst=worst,
        destabilizer_found=found,
        verdict=verdict,
    )


def _thread_count():
    raw = os.environ.get("KENERGY_THREADS", "1")
    try:
        return max(1, int(raw))
    except ValueError:
        return 1
