"""Batch front end: parse a domain file, run one pipeline, emit CSV/JSON.

Exit codes: 0 success, 2 configuration error, 3 numerical failure,
4 violation of an exact invariant (chain or superadditivity).
"""

from __future__ import annotations

import argparse
import json
import math
import sys
import time
from pathlib import Path

import numpy as np

from . import discretization, eigensolve, geometry, heat, oracles, spectral

EXIT_CONFIG = 2
EXIT_NUMERICAL = 3
EXIT_INVARIANT = 4


class ConfigError(ValueError):
    pass


def _parse_lambdas(text: str):
    if text.startswith("auto:"):
        try:
            return ("auto", int(text.split(":", 1)[1]))
        except ValueError as exc:
            raise ConfigError(f"bad --lambdas value {text!r}") from exc
    try:
        return ("list", [float(x) for x in text.split(",")])
    except ValueError as exc:
        raise ConfigError(f"bad --lambdas value {text!r}") from exc


def _parse_tgrid(text: str) -> np.ndarray:
    parts = text.split(":")
    if len(parts) == 4 and parts[0] == "log":
        lo, hi, num = float(parts[1]), float(parts[2]), int(parts[3])
        if lo <= 0 or hi <= lo or num < 2:
            raise ConfigError(f"bad --t-grid range {text!r}")
        return np.logspace(math.log10(lo), math.log10(hi), num)
    try:
        return np.array([float(x) for x in text.split(",")])
    except ValueError as exc:
        raise ConfigError(f"bad --t-grid value {text!r}") from exc


def _load_domain(path: str) -> geometry.DomainSpec:
    p = Path(path)
    if not p.exists():
        raise ConfigError(f"domain file not found: {p}")
    try:
        return geometry.load_domain(p)
    except geometry.GeometryError as exc:
        raise ConfigError(str(exc)) from exc


def _analytic_spectrum(spec: geometry.DomainSpec, lam_max: float):
    k, p = spec.kind, spec.params
    if k == "rectangle":
        return oracles.rectangle_spectrum(p["a"], p["b"], lam_max)
    if k == "interval":
        return oracles.interval_spectrum(p["a"], lam_max)
    if k == "disk":
        return oracles.disk_spectrum(p["r"], lam_max)
    raise ConfigError(f"no analytic spectrum for domain kind {k!r}")


def _out_dir(args) -> Path:
    out = Path(args.output_dir)
    out.mkdir(parents=True, exist_ok=True)
    return out


def _write_summary(out: Path, command: str, config: dict, results: dict) -> None:
    summary = {"command": command, "config": config, "results": results}
    (out / "summary.json").write_text(
        json.dumps(summary, indent=2, sort_keys=True) + "\n"
    )
    with open(out / "run.log", "a") as fh:
        fh.write(f"{time.strftime('%Y-%m-%dT%H:%M:%S')} {command} done\n")


def _write_csv(path: Path, header: str, rows) -> None:
    with open(path, "w") as fh:
        fh.write(header + "\n")
        for row in rows:
            fh.write(",".join(repr(x) if isinstance(x, float) else str(x)
                              for x in row) + "\n")


# -- commands --------------------------------------------------------------


def cmd_solve(args) -> int:
    out = _out_dir(args)
    spec = _load_domain(args.domain)
    mask = geometry.rasterize(spec, args.h)
    a = discretization.assemble_dirichlet_laplacian(mask)
    if args.problem == "dirichlet":
        result = eigensolve.lowest_k(a, args.k, tol=args.tol)
    elif args.problem == "bilaplacian":
        b = discretization.assemble_clamped_bilaplacian(mask)
        omega_sq = eigensolve.lowest_k(b, args.k, tol=args.tol)
        result = eigensolve.Spectrum(
            "bilaplacian_root", np.sqrt(omega_sq.values), source="grid"
        )
    else:
        pencil = discretization.assemble_buckling_pencil(mask)
        result = eigensolve.generalized_spectrum(
            pencil, args.k, dense_limit=args.dense_limit
        )
    result.dump(out / "spectrum.csv", h=args.h)
    _write_summary(out, "solve",
                   {"domain": args.domain, "h": args.h, "k": args.k,
                    "problem": args.problem, "tol": args.tol},
                   {"nodes": mask.n_nodes,
                    "values": [float(v) for v in result.values]})
    return 0


def cmd_count(args) -> int:
    out = _out_dir(args)
    spec = _load_domain(args.domain)
    mask = geometry.rasterize(spec, args.h)
    a = discretization.assemble_dirichlet_laplacian(mask)
    if args.problem == "dirichlet":
        target, theta = a, args.lam
    elif args.problem == "bilaplacian":
        target = discretization.assemble_clamped_bilaplacian(mask)
        theta = args.lam**2
    else:
        target = discretization.assemble_buckling_pencil(mask)
        theta = args.lam
    count = spectral.robust_count(target, theta, args.dense_limit)
    _write_summary(out, "count",
                   {"domain": args.domain, "h": args.h, "lam": args.lam,
                    "problem": args.problem},
                   {"nodes": mask.n_nodes, "count": count})
    return 0


def cmd_chain(args) -> int:
    out = _out_dir(args)
    spec = _load_domain(args.domain)
    mask = geometry.rasterize(spec, args.h)
    mode, payload = _parse_lambdas(args.lambdas)
    if mode == "auto":
        spectra = spectral.solve_all_problems(mask, args.dense_limit)
        lam_grid = spectral.eigenvalue_avoiding_grid(
            spectra.merged_values(), payload
        )
    else:
        lam_grid = np.array(payload)
    report = spectral.verify_chain(mask, lam_grid, method=args.method,
                                   dense_limit=args.dense_limit)
    _write_csv(out / "chain.csv", "lambda,n_buckling,n_bilaplacian,n_dirichlet,status",
               [(float(l), int(b), int(bl), int(d),
                 "PASS" if b <= bl <= d else "FAIL")
                for l, b, bl, d in report.rows()])
    _write_summary(out, "chain",
                   {"domain": args.domain, "h": args.h,
                    "lambdas": args.lambdas, "method": args.method},
                   {"nodes": mask.n_nodes, "points": len(lam_grid),
                    "ok": report.ok})
    return 0


def cmd_super(args) -> int:
    out = _out_dir(args)
    spec = _load_domain(args.domain)
    mask = geometry.rasterize(spec, args.h)
    parts = spectral.split_separated(mask, seed=args.seed)
    if args.lam is not None:
        lam = args.lam
    else:
        spectra = spectral.solve_all_problems(mask, args.dense_limit)
        grid = spectral.eigenvalue_avoiding_grid(spectra.merged_values(), 999)
        lam = float(grid[len(grid) // 2])
    report = spectral.superadditivity_check(mask, parts, lam,
                                            dense_limit=args.dense_limit)
    _write_csv(out / "superadditivity.csv", "problem,whole,parts_sum,status",
               [(p, report.whole[p], sum(q[p] for q in report.parts),
                 "PASS" if report.whole[p] >= sum(q[p] for q in report.parts)
                 else "FAIL")
                for p in sorted(report.whole)])
    _write_summary(out, "super",
                   {"domain": args.domain, "h": args.h, "lam": lam,
                    "seed": args.seed},
                   {"nodes": mask.n_nodes,
                    "part_nodes": [p.n_nodes for p in parts],
                    "ok": report.ok})
    return 0


def cmd_cover(args) -> int:
    out = _out_dir(args)
    spec = _load_domain(args.domain)
    cover = geometry.cube_cover(spec, args.eta)
    results = {
        "cubes": int(len(cover.corners)),
        "side": cover.side,
        "covered_volume": cover.covered_volume,
        "domain_volume": spec.volume,
    }
    if args.lam is not None:
        lb = spectral.cube_lower_bound(cover, args.lam)
        results["lambda"] = args.lam
        results["lower_bound"] = lb
        results["weyl_prediction"] = spectral.weyl_constant(
            2, cover.covered_volume
        ) * args.lam
    _write_csv(out / "cubes.csv", "x,y,side",
               [(float(x), float(y), cover.side) for x, y in cover.corners])
    _write_summary(out, "cover", {"domain": args.domain, "eta": args.eta,
                                  "lam": args.lam}, results)
    return 0


def cmd_heat(args) -> int:
    out = _out_dir(args)
    spec = _load_domain(args.domain)
    spectrum = _analytic_spectrum(spec, args.lam_max)
    times = _parse_tgrid(args.t_grid)
    samples = heat.heat_trace(spectrum, times, spec.dimension, spec.volume)
    rows = heat.heat_upper_bound_check(samples)
    _write_csv(out / "heat.csv",
               "t,value,tail_bound,scaled,free_kernel_bound,trusted,bound_ok",
               [(float(t), float(v), float(tb), r.scaled_value, r.bound,
                 r.trusted, r.ok)
                for t, v, tb, r in zip(samples.times, samples.values,
                                       samples.tail_bounds, rows)])
    _write_summary(out, "heat",
                   {"domain": args.domain, "lam_max": args.lam_max,
                    "t_grid": args.t_grid},
                   {"eigenvalues": len(spectrum),
                    "trusted": int(samples.trusted.sum()),
                    "bound_ok": all(r.ok for r in rows if r.trusted)})
    return 0


def cmd_karamata(args) -> int:
    out = _out_dir(args)
    spec = _load_domain(args.domain)
    spectrum = _analytic_spectrum(spec, args.lam_max)
    times = _parse_tgrid(args.t_grid)
    samples = heat.heat_trace(spectrum, times, spec.dimension, spec.volume)
    est = heat.karamata_estimate(samples)
    expected = (4.0 * math.pi) ** (-spec.dimension / 2.0) * spec.volume
    _write_summary(out, "karamata",
                   {"domain": args.domain, "lam_max": args.lam_max,
                    "t_grid": args.t_grid},
                   {"coefficient": est.coefficient,
                    "eq_constant": est.eq_constant,
                    "expected_coefficient": expected,
                    "relative_error": abs(est.coefficient - expected) / expected,
                    "boundary_term": est.boundary_term,
                    "constant_term": est.constant_term,
                    "fit_window": list(est.fit_window),
                    "residual": est.residual})
    return 0


def cmd_oracle(args) -> int:
    out = _out_dir(args)
    if args.rectangle is not None:
        spectrum = oracles.rectangle_spectrum(*args.rectangle, args.lam_max)
        config = {"rectangle": args.rectangle}
    elif args.interval is not None:
        spectrum = oracles.interval_spectrum(args.interval, args.lam_max)
        config = {"interval": args.interval}
    elif args.disk is not None:
        spectrum = oracles.disk_spectrum(args.disk, args.lam_max)
        config = {"disk": args.disk}
    else:
        raise ConfigError("oracle needs one of --rectangle, --interval, --disk")
    spectrum.dump(out / "spectrum.csv")
    config["lam_max"] = args.lam_max
    _write_summary(out, "oracle", config, {"count": len(spectrum)})
    return 0


# -- argument parsing ------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="weylcheck",
        description="Spectra of planar domains and Weyl-law verification.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p, domain=True):
        if domain:
            p.add_argument("--domain", required=True, help="domain JSON file")
        p.add_argument("-o", "--output-dir", default=".", help="output directory")
        p.add_argument("--dense-limit", type=int, default=eigensolve.DENSE_LIMIT)

    p = sub.add_parser("solve", help="grid eigenvalues of one problem")
    common(p)
    p.add_argument("--h", type=float, required=True)
    p.add_argument("--k", type=int, default=10)
    p.add_argument("--problem", choices=("dirichlet", "buckling", "bilaplacian"),
                   default="dirichlet")
    p.add_argument("--tol", type=float, default=1e-8)
    p.set_defaults(func=cmd_solve)

    p = sub.add_parser("count", help="exact count below a threshold by inertia")
    common(p)
    p.add_argument("--h", type=float, required=True)
    p.add_argument("--lam", type=float, required=True)
    p.add_argument("--problem", choices=("dirichlet", "buckling", "bilaplacian"),
                   default="dirichlet")
    p.set_defaults(func=cmd_count)

    p = sub.add_parser("chain", help="verify N_b <= N_bl <= N_D")
    common(p)
    p.add_argument("--h", type=float, required=True)
    p.add_argument("--lambdas", default="auto:50",
                   help="'auto:K' for K eigenvalue-avoiding midpoints, or a comma list")
    p.add_argument("--method", choices=("dense", "inertia"), default="dense")
    p.set_defaults(func=cmd_chain)

    p = sub.add_parser("super", help="verify counting superadditivity on a split")
    common(p)
    p.add_argument("--h", type=float, required=True)
    p.add_argument("--lam", type=float, default=None,
                   help="threshold; default: median eigenvalue-avoiding midpoint")
    p.add_argument("--seed", type=int, default=0)
    p.set_defaults(func=cmd_super)

    p = sub.add_parser("cover", help="cube cover and its counting lower bound")
    common(p)
    p.add_argument("--eta", type=float, required=True)
    p.add_argument("--lam", type=float, default=None)
    p.set_defaults(func=cmd_cover)

    p = sub.add_parser("heat", help="heat trace and the free-kernel bound")
    common(p)
    p.add_argument("--lam-max", type=float, required=True)
    p.add_argument("--t-grid", default="log:1e-3:1e-2:12",
                   help="'log:lo:hi:n' or a comma list")
    p.set_defaults(func=cmd_heat)

    p = sub.add_parser("karamata", help="tauberian fit of the Weyl coefficient")
    common(p)
    p.add_argument("--lam-max", type=float, required=True)
    p.add_argument("--t-grid", default="log:1e-3:1e-2:12")
    p.set_defaults(func=cmd_karamata)

    p = sub.add_parser("oracle", help="closed-form spectrum to CSV")
    common(p, domain=False)
    p.add_argument("--rectangle", type=float, nargs=2, metavar=("A", "B"))
    p.add_argument("--interval", type=float)
    p.add_argument("--disk", type=float)
    p.add_argument("--lam-max", type=float, required=True)
    p.set_defaults(func=cmd_oracle)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (ConfigError, geometry.GeometryError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except spectral.InvariantViolation as exc:
        print(f"invariant violation: {exc}", file=sys.stderr)
        return EXIT_INVARIANT
    except (eigensolve.SolverError, heat.HeatTraceError,
            discretization.AssemblyError, ValueError) as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL


if __name__ == "__main__":
    sys.exit(main())
