"""Command-line entry point.

Every subcommand echoes its resolved configuration and prints canonical JSON
(sorted keys, floats at 12 significant digits), so identical inputs produce
byte-identical output.  Exit codes: 0 success, 1 domain error (machine
readable error object on stdout), 2 usage error.
"""

from __future__ import annotations

import argparse
import json
import sys
from fractions import Fraction

import numpy as np

from . import asymptotics as asym
from . import catalog as cat
from . import chern
from . import energy as energy_mod
from . import invariants as inv
from . import numeric as num
from .errors import KEnergyError
from .exactpoly import GaussianRational, MatrixPoly
from .pairing import (
    GroupElement,
    OneParamSubgroup,
    fs_norm_sq,
    min_weight,
)


def _canonical(obj):
    if isinstance(obj, dict):
        return {k: _canonical(obj[k]) for k in sorted(obj)}
    if isinstance(obj, (list, tuple)):
        return [_canonical(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return [_canonical(v) for v in obj.tolist()]
    if isinstance(obj, Fraction):
        return str(obj)
    if isinstance(obj, (bool, int, str)) or obj is None:
        return obj
    if isinstance(obj, (float, np.floating)):
        return float(f"{float(obj):.12g}")
    if isinstance(obj, complex):
        return {"re": float(f"{obj.real:.12g}"), "im": float(f"{obj.imag:.12g}")}
    return str(obj)


def emit(payload, fmt="json"):
    payload = _canonical(payload)
    if fmt == "json":
        print(json.dumps(payload, sort_keys=True))
    elif fmt == "pretty":
        print(json.dumps(payload, sort_keys=True, indent=2))
    elif fmt == "csv":
        rows = payload.get("result") if isinstance(payload, dict) else None
        table = rows.get("rows") if isinstance(rows, dict) else None
        if not table:
            print(json.dumps(payload, sort_keys=True))
            return
        header = sorted(table[0])
        print(",".join(header))
        for row in table:
            print(",".join(str(row.get(h, "")) for h in header))
    else:
        raise KEnergyError(f"unknown output format '{fmt}'")


def _parse_int_list(text):
    return tuple(int(v.strip()) for v in text.split(",") if v.strip())


def _parse_fraction_list(text):
    return tuple(Fraction(v.strip()) for v in text.split(",") if v.strip())


def _parse_samples(text):
    """Grid spec 'a:b:count' (geometric from a to b) or a comma list."""
    if ":" in text:
        a, b, count = text.split(":")
        a, b, count = float(a), float(b), int(count)
        if count < 2:
            raise KEnergyError("sample grid needs at least 2 points")
        ratio = (b / a) ** (1.0 / (count - 1))
        return tuple(a * ratio**i for i in range(count))
    return tuple(float(v) for v in text.split(","))


def _load_sigma(path, size=None):
    with open(path) as fh:
        data = json.load(fh)
    rows = []
    for row in data:
        out = []
        for cell in row:
            if isinstance(cell, dict):
                re, im = cell.get("re", 0), cell.get("im", 0)
            elif isinstance(cell, (int, float)):
                re, im = cell, 0
            else:
                re, im = cell[0], cell[1]
            if isinstance(re, str) or isinstance(im, str):
                out.append(GaussianRational(Fraction(str(re)), Fraction(str(im))))
            elif isinstance(re, int) and isinstance(im, int):
                out.append(GaussianRational(re, im))
            else:
                out.append(complex(re, im))
        rows.append(out)
    if size is not None and len(rows) != size:
        raise KEnergyError(f"sigma must be {size}x{size} for this instance")
    return GroupElement.from_matrix(rows)


def _load_poly(path):
    with open(path) as fh:
        return MatrixPoly.from_json_dict(json.load(fh))


# ---------------------------------------------------------------------------
# Subcommands
# ---------------------------------------------------------------------------


def cmd_catalog(args):
    if args.action == "list":
        emit({"config": {"subcommand": "catalog", "action": "list"},
              "result": {"names": list(cat.CATALOG_NAMES)}}, args.format)
        return 0
    instance = cat.build_instance(args.name, degree=args.degree, dim=args.dim)
    cat.save_instance(instance, args.out)
    degs = inv.degree_vector(instance.data, instance.n - instance.data.delta)
    emit(
        {
            "config": {"subcommand": "catalog", "action": "build", "name": args.name,
                       "degree": args.degree, "dim": args.dim, "out": args.out},
            "result": {
                "name": instance.name,
                "n": instance.n,
                "N": instance.N,
                "d": instance.data.d,
                "delta": instance.data.delta,
                "degrees": list(degs),
                "files": ["instance.json", "chow.json"]
                + [f"hyper_{i}.json" for i in sorted(instance.discriminants.hyper)],
            },
        },
        args.format,
    )
    return 0


def cmd_degrees(args):
    mu = _parse_fraction_list(args.mu)
    profile = chern.ChernProfile(n=args.n, mu=mu, d=args.deg, N=args.N)
    data = inv.VarietyData(n=args.n, N=args.N, d=args.deg, mu=profile, delta=args.delta)
    degree = inv.hyperdiscriminant_degree(data, args.k)
    fr = inv.format_range(data)
    degs = inv.degree_vector(data, args.k)
    round_trip = [
        str(inv.mu_from_degrees(degs[: i + 1], args.deg, args.n, i)) for i in range(args.k + 1)
    ]
    emit(
        {
            "config": {"subcommand": "degrees", "n": args.n, "N": args.N,
                       "deg": args.deg, "mu": [str(m) for m in mu],
                       "delta": args.delta, "k": args.k},
            "result": {
                "degree": degree,
                "formatRange": {"lo": fr.lo, "hi": fr.hi,
                                "admissible_k": list(fr.admissible_k)},
                "muRoundTrip": round_trip,
            },
        },
        args.format,
    )
    return 0


def cmd_derive_chern(args):
    derived = chern.derive_jet_top_chern(args.n, args.k)
    closed = chern.jet_top_chern_closed_form(args.n, args.k)
    coeffs = [
        {"i": key[0], "coefficient": str(c)}
        for key, c in sorted(derived.coefficients.items())
    ]
    emit(
        {
            "config": {"subcommand": "derive-chern", "n": args.n, "k": args.k},
            "result": {
                "coefficients": coeffs,
                "match": "PASS" if derived == closed else "FAIL",
            },
        },
        args.format,
    )
    return 0 if derived == closed else 1


def cmd_norm(args):
    poly = _load_poly(args.file)
    emit(
        {
            "config": {"subcommand": "norm", "file": args.file},
            "result": {"normSq": fs_norm_sq(poly), "terms": poly.num_terms(),
                       "degree": poly.total_degree()},
        },
        args.format,
    )
    return 0


def cmd_weight(args):
    poly = _load_poly(args.file)
    lam = OneParamSubgroup(_parse_int_list(args.lam))
    emit(
        {
            "config": {"subcommand": "weight", "lambda": list(lam.weights),
                       "file": args.file},
            "result": {"minWeight": min_weight(lam, poly)},
        },
        args.format,
    )
    return 0


def cmd_energy(args):
    instance = cat.load_instance(args.instance)
    sigma = _load_sigma(args.sigma, size=instance.N + 1)
    breakdown = energy_mod.energy_via_formula(instance, sigma, args.k)
    result = {"Mk": breakdown.total, "k": args.k, "method": "formula"}
    if args.breakdown:
        result["terms"] = [
            {
                "i": t.i,
                "coefficient": t.coefficient,
                "degChow": t.deg_chow,
                "degHyper": t.deg_hyper,
                "lrHyper": t.lr_hyper,
                "lrChow": t.lr_chow,
                "contribution": t.contribution,
            }
            for t in breakdown.terms
        ]
    if args.cross_check:
        result["pair"] = energy_mod.energy_via_pair(instance, sigma, args.k)
        result["recursion"] = energy_mod.energy_via_recursion(instance, sigma, args.k)
    emit(
        {
            "config": {"subcommand": "energy", "instance": args.instance,
                       "k": args.k, "sigma": args.sigma,
                       "breakdown": bool(args.breakdown),
                       "crossCheck": bool(args.cross_check)},
            "result": result,
        },
        args.format,
    )
    return 0


def cmd_asymptotics(args):
    instance = cat.load_instance(args.instance)
    lam = OneParamSubgroup(_parse_int_list(args.lam))
    result = {"Ak": asym.slope_integer(instance, args.k, lam)}
    if args.fit:
        report = asym.slope_fit(instance, args.k, lam, _parse_samples(args.fit))
        result["fitSlope"] = report.fit_slope
        result["fitResidual"] = report.fit_residual
        result["boundedBelow"] = report.bounded_below
        result["rows"] = [
            {"t": t, "Mk": v} for t, v in zip(report.samples, report.values)
        ]
    emit(
        {
            "config": {"subcommand": "asymptotics", "instance": args.instance,
                       "k": args.k, "lambda": list(lam.weights),
                       "fit": args.fit},
            "result": result,
        },
        args.format,
    )
    return 0


def cmd_scan(args):
    instance = cat.load_instance(args.instance)
    report = asym.stability_scan(instance, args.k, args.bound, dedup=args.dedup)
    emit(
        {
            "config": {"subcommand": "scan", "instance": args.instance,
                       "k": args.k, "bound": args.bound, "dedup": args.dedup},
            "result": {
                "maxSlope": report.max_slope,
                "worstLambda": list(report.worst.weights),
                "evaluated": report.n_evaluated,
                "destabilizerFound": report.destabilizer_found,
                "verdict": report.verdict,
            },
        },
        args.format,
    )
    return 0


def cmd_numeric(args):
    instance = cat.load_instance(args.instance)
    spec = num.QuadratureSpec()
    config = {"subcommand": "numeric", "instance": args.instance,
              "check": args.check, "xi": args.xi, "samples": args.samples}
    if args.check == "mu":
        report = num.mu_quadrature(instance, spec)
        result = {"mu1": report.mu1, "volume": report.volume,
                  "chernNumber": report.chern_number,
                  "mu1Exact": str(instance.data.mu_values[1])}
    elif args.check == "gauss-bonnet":
        rng = np.random.default_rng(args.seed)
        values = []
        for _ in range(args.trials):
            xi = 0.3 * (rng.standard_normal((instance.N + 1,) * 2)
                        + 1j * rng.standard_normal((instance.N + 1,) * 2))
            xi -= np.trace(xi) / (instance.N + 1) * np.eye(instance.N + 1)
            from scipy.linalg import expm

            values.append(num.gauss_bonnet(instance, expm(xi), spec))
        result = {"chernNumbers": values, "expected": 2.0}
    elif args.check == "slope":
        weights = _parse_int_list(args.xi)
        samples = _parse_samples(args.samples)
        algebraic = asym.slope_integer(
            instance, 1, OneParamSubgroup(weights)
        )
        report = num.numeric_slope(instance, weights, samples, spec, algebraic)
        result = {
            "fitSlope": report.fit_slope,
            "algebraicSlope": report.algebraic_slope,
            "rows": [
                {"t": t, "Mk": v} for t, v in zip(report.samples, report.energies)
            ],
        }
    elif args.check == "path":
        weights = [float(v) for v in args.xi.split(",")]
        xi = np.diag(np.array(weights, dtype=complex))
        xi -= np.trace(xi) / len(weights) * np.eye(len(weights))
        via_exp = num.energy_quadrature(instance, xi, spec, path="exponential")
        via_affine = num.energy_quadrature(instance, xi, spec, path="affine")
        result = {"exponential": via_exp, "affine": via_affine,
                  "difference": abs(via_exp - via_affine)}
    else:
        raise KEnergyError(f"unknown numeric check '{args.check}'")
    emit({"config": config, "result": result}, args.format)
    return 0


def cmd_minimize(args):
    instance = cat.load_instance(args.instance)
    rng = np.random.default_rng(args.seed)
    size = instance.N + 1
    xi = 0.3 * (rng.standard_normal((size, size)) + 1j * rng.standard_normal((size, size)))
    xi -= np.trace(xi) / size * np.eye(size)
    from scipy.linalg import expm

    sigma0 = GroupElement.from_matrix(expm(xi), normalize=True)
    trace = energy_mod.minimize_energy(
        instance, args.k, sigma0, max_iters=args.iters, step=args.step
    )
    emit(
        {
            "config": {"subcommand": "minimize", "instance": args.instance,
                       "k": args.k, "seed": args.seed, "iters": args.iters,
                       "step": args.step},
            "result": {
                "initialEnergy": trace.energies[0],
                "finalEnergy": trace.final_energy,
                "steps": len(trace.energies) - 1,
                "converged": trace.converged,
                "finalGradientNorm": trace.gradient_norms[-1],
                "energies": list(trace.energies),
            },
        },
        args.format,
    )
    return 0


# ---------------------------------------------------------------------------
# Parser
# ---------------------------------------------------------------------------


def build_parser():
    parser = argparse.ArgumentParser(
        prog="kenergy",
        description="Energy functionals of polarized varieties on Bergman metrics, "
        "computed through Chow forms and hyperdiscriminants, with numeric "
        "quadrature cross-checks on curves.",
    )
    parser.add_argument("--format", choices=("json", "csv", "pretty"),
                        default="json", help="output format (JSON is canonical)")
    sub = parser.add_subparsers(dest="subcommand", required=True)

    p = sub.add_parser(
        "catalog",
        help="build a catalog variety instance directory "
        "(chow.json, hyper_i.json validated against the degree formula "
        "deg = d*sum (-1)^i (n-i+1) C(n-i,n-k) mu_i)",
        description="build a catalog variety instance directory "
        "(chow.json, hyper_i.json validated against the degree formula "
        "deg = d*sum (-1)^i (n-i+1) C(n-i,n-k) mu_i)",
    )
    p.add_argument("action", choices=("build", "list"))
    p.add_argument("name", nargs="?", default="")
    p.add_argument("--degree", type=int, default=None, help="rational normal curve degree")
    p.add_argument("--dim", type=int, default=None, help="quadric hypersurface dimension")
    p.add_argument("--out", default="instance_out")
    p.set_defaults(func=cmd_catalog)

    p = sub.add_parser(
        "degrees",
        help="hyperdiscriminant degree d*sum_{i<=k} (-1)^i (n-i+1) C(n-i,n-k) mu_i, "
        "the format existence range [delta, n], and the inverse recovery of mu",
        description="hyperdiscriminant degree d*sum_{i<=k} (-1)^i (n-i+1) C(n-i,n-k) mu_i, "
        "the format existence range [delta, n], and the inverse recovery of mu",
    )
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--N", type=int, required=True)
    p.add_argument("--deg", type=int, required=True)
    p.add_argument("--mu", required=True, help="comma list, e.g. 1,2,2")
    p.add_argument("--delta", type=int, default=0)
    p.add_argument("--k", type=int, required=True)
    p.set_defaults(func=cmd_degrees)

    p = sub.add_parser(
        "derive-chern",
        help="derive the top Chern class of the 1-jet bundle on X x CP^(n-k) by the "
        "bundle factorization chain and compare with the closed form "
        "sum (-1)^i (n-i+1) C(n-i,n-k) c_i w^(n-i) wFS^(n-k)",
        description="derive the top Chern class of the 1-jet bundle on X x CP^(n-k) by the "
        "bundle factorization chain and compare with the closed form "
        "sum (-1)^i (n-i+1) C(n-i,n-k) c_i w^(n-i) wFS^(n-k)",
    )
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--k", type=int, required=True)
    p.add_argument("--json", action="store_true", help="kept for compatibility; JSON is default")
    p.set_defaults(func=cmd_derive_chern)

    p = sub.add_parser(
        "norm",
        help="factorial-weighted squared norm sum |c|^2/alpha! of a polynomial file",
        description="factorial-weighted squared norm sum |c|^2/alpha! of a polynomial file",
    )
    p.add_argument("file")
    p.set_defaults(func=cmd_norm)

    p = sub.add_parser(
        "weight",
        help="minimal monomial weight min <column degrees, lambda>, the slope of "
        "log|lambda(t) p|^2 against log|t|^2",
        description="minimal monomial weight min <column degrees, lambda>, the slope of "
        "log|lambda(t) p|^2 against log|t|^2",
    )
    p.add_argument("--lambda", dest="lam", required=True, help="comma list, sum zero")
    p.add_argument("file")
    p.set_defaults(func=cmd_weight)

    p = sub.add_parser(
        "energy",
        help="M_k(sigma) = sum (-1)^(i+1) C(n-i,n-k) [deg(R) LR(Delta^(n-i)) - "
        "deg(Delta^(n-i)) LR(R)] with LR the log norm ratio",
        description="M_k(sigma) = sum (-1)^(i+1) C(n-i,n-k) [deg(R) LR(Delta^(n-i)) - "
        "deg(Delta^(n-i)) LR(R)] with LR the log norm ratio",
    )
    p.add_argument("--instance", required=True)
    p.add_argument("--k", type=int, required=True)
    p.add_argument("--sigma", required=True, help="JSON matrix file")
    p.add_argument("--breakdown", action="store_true")
    p.add_argument("--cross-check", action="store_true",
                   help="also evaluate through the tensor pair and the recursion")
    p.set_defaults(func=cmd_energy)

    p = sub.add_parser(
        "asymptotics",
        help="integer slope A_k(lambda) = w(v_k) - w(w_k) of M_k(lambda(t)) against "
        "log|t|^2, optionally with a least-squares fit",
        description="integer slope A_k(lambda) = w(v_k) - w(w_k) of M_k(lambda(t)) against "
        "log|t|^2, optionally with a least-squares fit",
    )
    p.add_argument("--instance", required=True)
    p.add_argument("--k", type=int, required=True)
    p.add_argument("--lambda", dest="lam", required=True)
    p.add_argument("--fit", default=None, help="sample grid a:b:count or comma list")
    p.set_defaults(func=cmd_asymptotics)

    p = sub.add_parser(
        "scan",
        help="boundedness scan: max A_k over integer weight vectors with sum 0 and "
        "max|a_i| <= bound (M_k bounded below along lambda iff A_k <= 0)",
        description="boundedness scan: max A_k over integer weight vectors with sum 0 and "
        "max|a_i| <= bound (M_k bounded below along lambda iff A_k <= 0)",
    )
    p.add_argument("--instance", required=True)
    p.add_argument("--k", type=int, required=True)
    p.add_argument("--bound", type=int, required=True)
    p.add_argument("--dedup", choices=("none", "signature"), default="none")
    p.add_argument("--json", action="store_true", help="kept for compatibility; JSON is default")
    p.set_defaults(func=cmd_scan)

    p = sub.add_parser(
        "numeric",
        help="quadrature cross-checks on curves: mu_1 = (int c_1)/V, Gauss-Bonnet "
        "int c_1 = 2, the energy integral -(n+1)(n-k+1)V int phidot [c_1 - mu_1 w] "
        "and its slope, and potential path independence",
        description="quadrature cross-checks on curves: mu_1 = (int c_1)/V, Gauss-Bonnet "
        "int c_1 = 2, the energy integral -(n+1)(n-k+1)V int phidot [c_1 - mu_1 w] "
        "and its slope, and potential path independence",
    )
    p.add_argument("--instance", required=True)
    p.add_argument("--check", choices=("mu", "gauss-bonnet", "slope", "path"),
                   required=True)
    p.add_argument("--xi", default="2,-1,-1", help="weights for slope/path checks")
    p.add_argument("--samples", default="1e-1:1e-4:4")
    p.add_argument("--seed", type=int, default=7)
    p.add_argument("--trials", type=int, default=3)
    p.set_defaults(func=cmd_numeric)

    p = sub.add_parser(
        "minimize",
        help="gradient descent on M_k over SL(N+1,C) with Armijo backtracking; "
        "directional derivatives are analytic (substitution generator)",
        description="gradient descent on M_k over SL(N+1,C) with Armijo backtracking; "
        "directional derivatives are analytic (substitution generator)",
    )
    p.add_argument("--instance", required=True)
    p.add_argument("--k", type=int, required=True)
    p.add_argument("--seed", type=int, default=42)
    p.add_argument("--iters", type=int, default=50)
    p.add_argument("--step", type=float, default=0.5)
    p.set_defaults(func=cmd_minimize)

    return parser


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except KEnergyError as exc:
        print(json.dumps({"error": {"type": type(exc).__name__, "message": str(exc)}},
                         sort_keys=True))
        return 1
    except FileNotFoundError as exc:
        print(json.dumps({"error": {"type": "FileNotFoundError", "message": str(exc)}},
                         sort_keys=True))
        return 1


if __name__ == "__main__":
    sys.exit(main())
