"""Command line front end.

Every subcommand writes its primary output file plus a JSON manifest at
<output>.manifest.json recording the command, parameters, seed, library
versions, and wall time. Primary outputs are byte-identical for the same
argv and seed; manifests carry the timing and are not.

Exit codes: 0 success, 1 domain failure (uncolorable instance, solver
failure, bad input file), 2 usage error.
"""
from __future__ import annotations

import argparse
import json
import sys
import time

import numpy as np

from . import __version__, bethe, coloring, graphs, matching, population, surveys
from .errors import CavitykitError


def _fmt(x: float) -> str:
    return f"{x:.12g}"


def _write_manifest(output_path: str, command: str, params: dict, seed,
                    wall_time: float, results: dict | None = None) -> None:
    import numba
    import scipy
    manifest = {
        "command": command,
        "parameters": params,
        "seed": seed,
        "versions": {
            "cavitykit": __version__,
            "numpy": np.__version__,
            "scipy": scipy.__version__,
            "numba": numba.__version__,
        },
        "wall_time_s": round(wall_time, 3),
    }
    if results is not None:
        manifest["results"] = results
    with open(output_path + ".manifest.json", "w") as fh:
        json.dump(manifest, fh, indent=2, sort_keys=True)
        fh.write("\n")


def _resolve_seed(args) -> int:
    if args.seed is None:
        return int(np.random.SeedSequence().entropy % (2**63))
    return args.seed


def _parse_grid(text: str) -> list[float]:
    parts = text.split(":")
    if len(parts) != 3:
        raise ValueError("grid must look like LO:HI:STEP")
    lo, hi, step = (float(p) for p in parts)
    if step <= 0 or hi < lo:
        raise ValueError("grid needs STEP > 0 and HI >= LO")
    out = []
    k = 0
    while True:
        v = lo + k * step
        if v > hi + 1e-9 * step:
            break
        out.append(v)
        k += 1
    return out


def _read_coloring(path: str, n: int) -> np.ndarray:
    out = np.zeros(n, dtype=np.int64)
    seen = np.zeros(n, dtype=bool)
    with open(path) as fh:
        for line in fh:
            line = line.strip()
            if not line:
                continue
            i_s, c_s = line.split()
            i, c = int(i_s), int(c_s)
            if not 0 <= i < n:
                raise ValueError(f"node {i} out of range")
            out[i] = c
            seen[i] = True
    if not seen.all():
        raise ValueError("coloring file misses some nodes")
    return out


def _cmd_graph_gen(args) -> int:
    seed = _resolve_seed(args)
    if args.model == "poisson-m":
        if args.alpha is None:
            raise ValueError("--model poisson-m requires --alpha")
        model = graphs.PoissonFixedM(alpha=args.alpha)
    elif args.model == "gnp":
        if args.z is None:
            raise ValueError("--model gnp requires --z")
        model = graphs.GNP(z=args.z)
    else:
        if args.z is None:
            raise ValueError("--model regular requires --z")
        model = graphs.Regular(z=int(args.z))
    t0 = time.perf_counter()
    g = graphs.generate(model, args.n, seed=seed)
    graphs.write_edge_list(g, args.output)
    _write_manifest(args.output, "graph-gen",
                    {"model": args.model, "n": args.n, "alpha": args.alpha,
                     "z": args.z},
                    seed, time.perf_counter() - t0,
                    results={"n_nodes": g.n_nodes, "n_edges": g.n_edges})
    print(f"wrote {args.output}: {g.n_nodes} nodes, {g.n_edges} edges")
    return 0


def _cmd_bethe(args) -> int:
    grid = _parse_grid(args.betaj_grid)
    t0 = time.perf_counter()
    rows = []
    for bj in grid:
        params = bethe.BetheParams(beta=bj, j_coupling=args.j, z=args.z)
        report = bethe.cavity_fixed_point(params, init=args.init,
                                          tol=args.tol, damping=args.damping)
        m_c = report.value
        rows.append((bj, m_c, bethe.full_magnetization(params, m_c),
                     bethe.link_energy(params, m_c)))
    with open(args.output, "w") as fh:
        fh.write("betaJ,m_C,m,E_link\n")
        for row in rows:
            fh.write(",".join(_fmt(v) for v in row) + "\n")
    _write_manifest(args.output, "bethe",
                    {"z": args.z, "j": args.j, "betaj_grid": args.betaj_grid,
                     "init": args.init, "tol": args.tol,
                     "damping": args.damping},
                    None, time.perf_counter() - t0)
    print(f"wrote {args.output}: {len(rows)} grid points")
    return 0


def _cmd_matching_ensemble(args) -> int:
    seed = _resolve_seed(args)
    if args.dist == "exponential":
        dist = matching.Exponential()
    else:
        dist = matching.UniformLinear(a=args.a)
    t0 = time.perf_counter()
    stats = matching.ensemble_average(args.n, dist, args.samples, seed=seed)
    target = matching.predicted_mean(args.n, dist)
    z_score = (stats.mean_cost - target) / stats.std_error
    with open(args.output, "w") as fh:
        fh.write("n,samples,mean,stderr,target,z_score\n")
        fh.write(f"{stats.n},{stats.samples},{_fmt(stats.mean_cost)},"
                 f"{_fmt(stats.std_error)},{_fmt(target)},{_fmt(z_score)}\n")
    _write_manifest(args.output, "matching-ensemble",
                    {"n": args.n, "dist": dist.tag, "samples": args.samples},
                    seed, time.perf_counter() - t0,
                    results={"mean": stats.mean_cost, "target": target})
    print(f"n={args.n} mean={_fmt(stats.mean_cost)} target={_fmt(target)} "
          f"z={z_score:+.2f}")
    return 0


def _cmd_wp_run(args) -> int:
    seed = _resolve_seed(args)
    g = graphs.read_edge_list(args.graph)
    col = None
    if args.init == "coloring":
        if args.coloring is None:
            raise ValueError("--init coloring requires --coloring")
        col = _read_coloring(args.coloring, g.n_nodes)
    t0 = time.perf_counter()
    run = coloring.wp_fixed_point(g, args.q, init=args.init, coloring=col,
                                  seed=seed, max_sweeps=args.max_sweeps)
    payload = {
        "status": run.status,
        "sweeps": run.sweeps,
        "histogram": run.state.histogram(),
        "n_nodes": g.n_nodes,
        "n_edges": g.n_edges,
        "q": args.q,
    }
    with open(args.output, "w") as fh:
        json.dump(payload, fh, indent=2, sort_keys=True)
        fh.write("\n")
    _write_manifest(args.output, "wp-run",
                    {"graph": args.graph, "q": args.q, "init": args.init,
                     "max_sweeps": args.max_sweeps},
                    seed, time.perf_counter() - t0,
                    results={"status": run.status})
    print(f"wp: {run.status} after {run.sweeps} sweeps")
    return 0


def _cmd_sp_run(args) -> int:
    seed = _resolve_seed(args)
    g = graphs.read_edge_list(args.graph)
    params = surveys.SPParams(damping=args.damping, tol=args.tol,
                              max_sweeps=args.max_sweeps,
                              init_eta=args.init_eta)
    t0 = time.perf_counter()
    run = surveys.sp_fixed_point(g, args.q, seed=seed, params=params)
    if run.status == surveys.STATUS_UNSAT:
        max_bias = None
        hist = None
    else:
        biases = surveys.node_biases(run.state)
        max_bias = float(np.nanmax(biases))
        counts, _ = np.histogram(biases[~np.isnan(biases)], bins=10,
                                 range=(0.0, 1.0))
        hist = [int(c) for c in counts]
    payload = {
        "status": run.status,
        "sweeps": run.sweeps,
        "max_delta": run.max_delta,
        "max_bias": max_bias,
        "bias_histogram": hist,
        "n_nodes": g.n_nodes,
        "n_edges": g.n_edges,
        "q": args.q,
    }
    with open(args.output, "w") as fh:
        json.dump(payload, fh, indent=2, sort_keys=True)
        fh.write("\n")
    _write_manifest(args.output, "sp-run",
                    {"graph": args.graph, "q": args.q,
                     "damping": args.damping, "tol": args.tol,
                     "max_sweeps": args.max_sweeps, "init_eta": args.init_eta},
                    seed, time.perf_counter() - t0,
                    results={"status": run.status, "max_bias": max_bias})
    print(f"sp: {run.status} after {run.sweeps} sweeps"
          + (f", max_bias={max_bias:.4g}" if max_bias is not None else ""))
    return 0


def _cmd_color(args) -> int:
    seed = _resolve_seed(args)
    g = graphs.read_edge_list(args.graph)
    params = surveys.DecimationParams(
        bias_floor=args.bias_floor,
        ls_steps_per_node=args.ls_steps_per_node,
        sp=surveys.SPParams(damping=args.damping, tol=args.tol,
                            max_sweeps=args.max_sweeps))
    t0 = time.perf_counter()
    result = surveys.decimate_solve(g, args.q, seed=seed, params=params)
    payload = {
        "success": result.success,
        "stage": result.stage,
        "rounds": result.rounds,
        "energy": 0 if result.success else None,
        "diagnostics": result.diagnostics,
        "n_nodes": g.n_nodes,
        "n_edges": g.n_edges,
        "q": args.q,
    }
    with open(args.output, "w") as fh:
        json.dump(payload, fh, indent=2, sort_keys=True)
        fh.write("\n")
    if result.success and args.coloring_out:
        with open(args.coloring_out, "w") as fh:
            for i, c in enumerate(result.coloring):
                fh.write(f"{i} {c}\n")
    _write_manifest(args.output, "color",
                    {"graph": args.graph, "q": args.q,
                     "bias_floor": args.bias_floor,
                     "ls_steps_per_node": args.ls_steps_per_node,
                     "damping": args.damping, "tol": args.tol,
                     "max_sweeps": args.max_sweeps},
                    seed, time.perf_counter() - t0,
                    results={"success": result.success, "stage": result.stage})
    if result.success:
        print(f"colored in {result.rounds} rounds (stage: {result.stage})")
        return 0
    print(f"coloring failed at stage {result.stage} "
          f"after {result.rounds} rounds", file=sys.stderr)
    return 1


def _cmd_complexity_scan(args) -> int:
    seed = _resolve_seed(args)
    grid = _parse_grid(f"{args.z_min}:{args.z_max}:{args.z_step}")
    t0 = time.perf_counter()
    curve, thresholds = population.threshold_scan(
        args.q, grid, S=args.pop_size, sweeps=args.sweeps,
        samples=args.samples, seed=seed, eta=args.eta,
        trivial_floor=args.trivial_floor, refine_steps=args.refine_steps)
    with open(args.output, "w") as fh:
        fh.write("z,sigma,stderr,nontrivial,nonwhite,reject_frac\n")
        for p in curve.points:
            fh.write(f"{_fmt(p.z)},{_fmt(p.sigma)},{_fmt(p.std_error)},"
                     f"{int(p.nontrivial)},{_fmt(p.nonwhite_mass)},"
                     f"{_fmt(p.reject_fraction)}\n")
    results = {
        "z_dynamic": thresholds.z_dynamic,
        "z_dynamic_uncertainty": thresholds.z_dynamic_uncertainty,
        "z_critical": thresholds.z_critical,
        "z_critical_uncertainty": thresholds.z_critical_uncertainty,
    }
    _write_manifest(args.output, "complexity-scan",
                    {"q": args.q, "z_min": args.z_min, "z_max": args.z_max,
                     "z_step": args.z_step, "pop_size": args.pop_size,
                     "sweeps": args.sweeps, "samples": args.samples,
                     "eta": args.eta, "trivial_floor": args.trivial_floor,
                     "refine_steps": args.refine_steps},
                    seed, time.perf_counter() - t0, results=results)
    if thresholds.z_dynamic is not None:
        print(f"branch appears at z = {thresholds.z_dynamic:.4g} "
              f"+- {thresholds.z_dynamic_uncertainty:.2g}")
    else:
        print("no nontrivial branch on the grid")
    if thresholds.z_critical is not None:
        print(f"complexity crosses zero at z = {thresholds.z_critical:.4g} "
              f"+- {thresholds.z_critical_uncertainty:.2g}")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="cavitykit",
        description="cavity-method toolkit: graphs, matching, coloring, "
                    "complexity")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("graph-gen", help="draw a random graph, write edge list")
    p.add_argument("--model", required=True,
                   choices=["poisson-m", "gnp", "regular"])
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--alpha", type=float, default=None,
                   help="edges per node for poisson-m (z = 2*alpha)")
    p.add_argument("--z", type=float, default=None,
                   help="mean (gnp) or exact (regular) degree")
    p.add_argument("--seed", type=int, default=None)
    p.add_argument("-o", "--output", required=True)
    p.set_defaults(func=_cmd_graph_gen)

    p = sub.add_parser("bethe", help="cavity magnetization sweep to CSV")
    p.add_argument("--z", type=int, required=True)
    p.add_argument("--j", type=float, default=1.0)
    p.add_argument("--betaj-grid", required=True, metavar="LO:HI:STEP")
    p.add_argument("--init", type=float, default=0.9)
    p.add_argument("--tol", type=float, default=bethe.DEFAULT_TOL)
    p.add_argument("--damping", type=float, default=bethe.DEFAULT_DAMPING)
    p.add_argument("-o", "--output", required=True)
    p.set_defaults(func=_cmd_bethe)

    p = sub.add_parser("matching-ensemble",
                       help="mean optimal assignment cost vs prediction")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--dist", choices=["exponential", "uniform-linear"],
                   default="exponential")
    p.add_argument("--a", type=float, default=0.0,
                   help="density slope for uniform-linear")
    p.add_argument("--samples", type=int, required=True)
    p.add_argument("--seed", type=int, default=None)
    p.add_argument("-o", "--output", required=True)
    p.set_defaults(func=_cmd_matching_ensemble)

    p = sub.add_parser("wp-run", help="warning propagation on an edge list")
    p.add_argument("--graph", required=True)
    p.add_argument("--q", type=int, required=True)
    p.add_argument("--init", choices=["random", "coloring"], default="random")
    p.add_argument("--coloring", default=None,
                   help="'node color' lines for --init coloring")
    p.add_argument("--max-sweeps", type=int, default=1000)
    p.add_argument("--seed", type=int, default=None)
    p.add_argument("-o", "--output", required=True)
    p.set_defaults(func=_cmd_wp_run)

    p = sub.add_parser("sp-run", help="survey propagation on an edge list")
    p.add_argument("--graph", required=True)
    p.add_argument("--q", type=int, required=True)
    p.add_argument("--damping", type=float, default=0.2)
    p.add_argument("--tol", type=float, default=1e-6)
    p.add_argument("--max-sweeps", type=int, default=2000)
    p.add_argument("--init-eta", type=float, default=0.1)
    p.add_argument("--seed", type=int, default=None)
    p.add_argument("-o", "--output", required=True)
    p.set_defaults(func=_cmd_sp_run)

    p = sub.add_parser("color", help="survey-guided decimation coloring")
    p.add_argument("--graph", required=True)
    p.add_argument("--q", type=int, required=True)
    p.add_argument("--bias-floor", type=float, default=0.05)
    p.add_argument("--ls-steps-per-node", type=int, default=10)
    p.add_argument("--damping", type=float, default=0.2)
    p.add_argument("--tol", type=float, default=1e-6)
    p.add_argument("--max-sweeps", type=int, default=2000)
    p.add_argument("--coloring-out", default=None)
    p.add_argument("--seed", type=int, default=None)
    p.add_argument("-o", "--output", required=True)
    p.set_defaults(func=_cmd_color)

    p = sub.add_parser("complexity-scan",
                       help="population-dynamics complexity curve and "
                            "thresholds")
    p.add_argument("--q", type=int, required=True)
    p.add_argument("--z-min", type=float, required=True)
    p.add_argument("--z-max", type=float, required=True)
    p.add_argument("--z-step", type=float, required=True)
    p.add_argument("--pop-size", type=int, default=100_000)
    p.add_argument("--sweeps", type=int, default=600)
    p.add_argument("--samples", type=int, default=100_000)
    p.add_argument("--eta", type=float, default=population.DEFAULT_ETA)
    p.add_argument("--trivial-floor", type=float,
                   default=population.DEFAULT_TRIVIAL_FLOOR)
    p.add_argument("--refine-steps", type=int, default=3)
    p.add_argument("--seed", type=int, default=None)
    p.add_argument("-o", "--output", required=True)
    p.set_defaults(func=_cmd_complexity_scan)

    return parser


def dispatch(argv) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        # argparse exits 0 for --help, 2 for usage errors
        return int(exc.code or 0)
    try:
        return args.func(args)
    except (CavitykitError, ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


def main() -> int:
    return dispatch(sys.argv[1:])


if __name__ == "__main__":
    sys.exit(main())
