"""Command-line front end.

Subcommands:
  solve       optimize one instance, emit JSON
  sweep       cross-product of knobs over a lag grid, emit CSV curves
  schedule    run a layered prefetch plan, emit the state trajectory
  analyze     head-trace analytics, emit long-format CSV
  oracle      cross-check the DP against the exhaustive reference solver
  gen-traces  write synthetic head traces for the analytics to chew on

Exit codes: 0 success, 1 config or validation error, 2 runtime failure
(including an oracle mismatch).  CSV output uses 6 decimal places and a
deterministic row order, so identical configs and seeds produce identical
bytes.
"""

import argparse
import csv
import io
import json
import sys
from concurrent.futures import ThreadPoolExecutor
from pathlib import Path

import numpy as np

from .config import (
    ConfigError,
    build_probs,
    load_json,
    load_traces,
    parse_analyze,
    parse_gen,
    parse_instance,
    parse_ladder,
    parse_schedule,
    parse_sweep,
    parse_utility,
)
from .model import (
    DirectionGrid,
    Instance,
    QualityLadder,
    UtilityModel,
    eval_objective,
    selection_size,
)
from .optimizer import brute_force, solve_dp, solve_mckp
from .scheduler import run_plan
from .synth import (
    constant_trace,
    explore_then_fixate_trace,
    linear_rotation_trace,
    random_walk_trace,
    sinusoid_trace,
    uniform_random_trace,
)
from .traces import (
    angle_utilization_cdf,
    heatmap,
    origin_conditioned_change,
    pairwise_angular_difference,
    phase_split_cdf,
    velocity_prediction_error,
    write_trace,
    yaw_change_cdf,
)
from .viewprob import circular_smooth, uniform, wrapped_gaussian

# Published head-motion reference bands, emitted as annotations for context.
REFERENCE_BANDS = (
    ("reference", "pairwise_uniform_baseline", "mean_deg", 90.0),
    ("reference", "yaw_change_1s", "p99_abs_deg", 28.0),
    ("reference", "velocity_sign_agreement_1s", "fraction", 0.97),
    ("reference", "exploration_phase", "duration_s", 20.0),
)

ORACLE_TOL = 1e-9


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise ConfigError(message)


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="prefetch360",
                     description="Tile-quality prefetch optimization and trace analytics.")
    sub = parser.add_subparsers(dest="command", required=True)

    def add(name, help_text, traces=False, seed=False, workers=False, out_required=False):
        p = sub.add_parser(name, help=help_text)
        p.add_argument("--config", required=True, help="JSON config file")
        p.add_argument("--out", required=out_required, default=None,
                       help="output path (default: stdout)")
        if traces:
            p.add_argument("--traces", default=None, help="directory of head-trace CSVs")
        if seed:
            p.add_argument("--seed", type=int, default=0, help="RNG seed")
        if workers:
            p.add_argument("--workers", type=int, default=1, help="parallel solver threads")
        return p

    add("solve", "optimize one instance", traces=True)
    add("sweep", "optimal-value curves over a lag grid", traces=True, workers=True)
    add("schedule", "run a layered prefetch plan", traces=True)
    add("analyze", "head-trace analytics", traces=True)
    add("oracle", "cross-check DP against brute force", traces=True, seed=True)
    add("gen-traces", "write synthetic head traces", seed=True, out_required=True)
    return parser


def _emit_text(text: str, out) -> None:
    if out is None:
        sys.stdout.write(text)
    else:
        Path(out).write_text(text)


def _emit_json(payload, out) -> None:
    _emit_text(json.dumps(payload, indent=2, sort_keys=True) + "\n", out)


def _emit_csv(header, rows, out) -> None:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(header)
    writer.writerows(rows)
    _emit_text(buf.getvalue(), out)


def _fmt(x) -> str:
    return f"{float(x):.6f}"


def cmd_solve(args) -> int:
    inst = parse_instance(load_json(args.config), getattr(args, "traces", None))
    report = solve_dp(inst)
    _emit_json({
        "method": report.method,
        "value": report.value,
        "levels": list(report.selection.levels),
        "spend": selection_size(report.selection, inst),
        "capacity": inst.capacity,
        "subproblems": report.stats.subproblems,
    }, args.out)
    return 0


def _sweep_probs(family: dict, grid: DirectionGrid, lags, traces_dir):
    """Probability vectors per lag for one sweep family, plus a label."""
    kind = family["kind"]
    if kind == "uniform":
        return "uniform", [uniform(grid, t) for t in lags]
    if kind == "wrapped_gaussian_sqrt":
        sigma0 = float(family.get("sigma0_deg", 25.0))
        if sigma0 <= 0:
            raise ConfigError("family.sigma0_deg: must be positive")
        return "wrapped_gaussian_sqrt", [wrapped_gaussian(sigma0 * np.sqrt(t), grid, t) for t in lags]
    if kind == "convolved":
        base = wrapped_gaussian(float(family.get("base_sigma_deg", 15.0)), grid, lags[0])
        kernel = wrapped_gaussian(float(family.get("kernel_sigma_deg", 15.0)), grid).probs
        vectors = [base]
        for t in lags[1:]:
            vectors.append(circular_smooth(vectors[-1], kernel))
        return "convolved", vectors
    if kind == "empirical":
        spec = {"family": "empirical", "category": family.get("category"),
                "stride_s": family.get("stride_s", 0.1)}
        label = "empirical" if spec["category"] is None else f"empirical:{spec['category']}"
        vectors = []
        for t in lags:
            vectors.append(build_probs({**spec, "lag_s": t}, grid, traces_dir))
        return label, vectors
    raise ConfigError(f"family: unknown kind {kind!r}")


def cmd_sweep(args) -> int:
    spec = parse_sweep(load_json(args.config))
    utilities = []
    seen = {}
    for i, block in enumerate(spec["utilities"]):
        model = parse_utility({"utility": block})
        label = model.kind if model.kind not in seen else f"{model.kind}#{i}"
        seen[model.kind] = True
        utilities.append((label, model))

    jobs = []
    for n_tiles in spec["tile_counts"]:
        grid = DirectionGrid(n_tiles)
        label, vectors = _sweep_probs(spec["family"], grid, spec["lags"], getattr(args, "traces", None))
        for f in spec["penalties"]:
            ladder = parse_ladder({"rates": spec["rates"], "delta": spec["delta"], "f": f})
            for ulabel, utility in utilities:
                for cap in spec["capacities"]:
                    for beta in spec["betas"]:
                        for lag, probs in zip(spec["lags"], vectors):
                            jobs.append((label, ulabel, n_tiles, cap, f, beta, lag,
                                         grid, ladder, utility, probs))

    def run(job):
        label, ulabel, n_tiles, cap, f, beta, lag, grid, ladder, utility, probs = job
        inst = Instance(grid, ladder, utility, probs, cap, beta)
        report = solve_dp(inst)
        # row values re-evaluate bit-exactly by construction
        value = eval_objective(report.selection, inst)
        return (label, ulabel, n_tiles, cap, f, beta, lag,
                value, "|".join(str(l) for l in report.selection.levels))

    workers = max(1, getattr(args, "workers", 1) or 1)
    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(run, jobs))
    else:
        results = [run(job) for job in jobs]

    results.sort(key=lambda r: (r[0], r[1], r[2], r[3], r[4], r[5], r[6]))
    rows = [(family, ulabel, n, c, _fmt(f), _fmt(beta), _fmt(lag), _fmt(value), levels)
            for family, ulabel, n, c, f, beta, lag, value, levels in results]
    _emit_csv(("family", "utility", "N", "C", "f", "beta", "T", "value", "levels"), rows, args.out)
    return 0


def cmd_schedule(args) -> int:
    plan, ladder, utility, beta, size_model = parse_schedule(load_json(args.config),
                                                             getattr(args, "traces", None))
    results = run_plan(plan, ladder, utility, beta, size_model)
    rows = [(r.index, _fmt(r.lead_time_s), plan.passes[r.index].budget,
             "|".join(str(int(x)) for x in r.state.levels), _fmt(r.value))
            for r in results]
    _emit_csv(("pass", "lead_s", "budget", "levels", "value"), rows, args.out)
    return 0


def _describe_rows(metric, group, cdf):
    return [(metric, group, stat, _fmt(v)) for stat, v in sorted(cdf.describe().items())]


def cmd_analyze(args) -> int:
    spec = parse_analyze(load_json(args.config))
    traces = load_traces(getattr(args, "traces", None), spec["category"])
    rows = []
    for metric in spec["metrics"]:
        if metric == "utilization":
            for axis in ("yaw", "pitch", "roll"):
                rows += _describe_rows("utilization", axis, angle_utilization_cdf(traces, axis))
        elif metric == "heatmap":
            grid = heatmap(traces, spec["yaw_bin_deg"], spec["pitch_bin_deg"])
            for i in range(grid.freq.shape[0]):
                for j in range(grid.freq.shape[1]):
                    if grid.freq[i, j] > 0:
                        group = (f"yaw[{grid.yaw_edges[i]:g},{grid.yaw_edges[i + 1]:g})"
                                 f"|pitch[{grid.pitch_edges[j]:g},{grid.pitch_edges[j + 1]:g})")
                        rows.append(("heatmap", group, "freq", _fmt(grid.freq[i, j])))
        elif metric == "pairwise":
            times, mean_diff = pairwise_angular_difference(traces, spec["pairwise_step_s"])
            rows += [("pairwise", "all", f"t_s={t:.2f}", _fmt(v))
                     for t, v in zip(times, mean_diff)]
        elif metric == "yaw_change":
            for lag in spec["lags"]:
                rows += _describe_rows("yaw_change", f"lag_s={lag:g}",
                                       yaw_change_cdf(traces, lag, spec["stride_s"]))
        elif metric == "velocity_error":
            for lag in spec["lags"]:
                rate = velocity_prediction_error(traces, lag, spec["vel_threshold_dps"],
                                                 spec["safety_angle_deg"], spec["stride_s"])
                rows.append(("velocity_error", f"lag_s={lag:g}", "error_rate", _fmt(rate)))
        elif metric == "origin_sectors":
            for lag in spec["lags"]:
                sectors = origin_conditioned_change(traces, lag, spec["sector_deg"], spec["stride_s"])
                for s, cdf in sectors.items():
                    rows += _describe_rows("origin_sectors", f"lag_s={lag:g}|sector={s}", cdf)
        elif metric == "phase_split":
            for lag in spec["lags"]:
                early, late = phase_split_cdf(traces, lag, spec["split_s"], spec["stride_s"])
                rows += _describe_rows("phase_split", f"lag_s={lag:g}|exploration", early)
                rows += _describe_rows("phase_split", f"lag_s={lag:g}|steady", late)
    rows.sort()
    rows += [(m, g, s, _fmt(v)) for m, g, s, v in REFERENCE_BANDS]
    _emit_csv(("metric", "group", "stat", "value"), rows, args.out)
    return 0


def _random_instance(rng: np.random.Generator, max_tiles=5, max_levels=3, max_capacity=800) -> Instance:
    n_tiles = int(rng.integers(2, max_tiles + 1))
    n_levels = int(rng.integers(1, max_levels + 1))
    rates = np.sort(rng.choice(np.arange(50, 2000), size=n_levels, replace=False)).astype(float)
    ladder = QualityLadder(tuple(rates), chunk_s=1.0,
                           stall_penalty=float(rng.choice([0.0, 0.1, 1.0, 10.0])))
    kind = str(rng.choice(["linear", "sqrt", "log", "large_screen"]))
    # theta below the lowest rate keeps large_screen utilities positive
    utility = UtilityModel(kind, theta_kbps=40.0) if kind == "large_screen" else UtilityModel(kind)
    p = rng.dirichlet(np.ones(n_tiles))
    beta = 0.0 if rng.random() < 0.5 else float(np.round(rng.uniform(0.0, 1.0), 3))
    capacity = int(rng.integers(0, max_capacity + 1))
    return Instance(DirectionGrid(n_tiles), ladder, utility, p / p.sum(), capacity, beta)


def cmd_oracle(args) -> int:
    cfg = load_json(args.config)
    checks = []
    if "batch" in cfg:
        batch = cfg["batch"]
        if not isinstance(batch, dict):
            raise ConfigError("batch: expected an object")
        count = batch.get("count", 100)
        if not isinstance(count, int) or count < 1:
            raise ConfigError("batch.count: expected a positive integer")
        rng = np.random.default_rng(args.seed)
        for i in range(count):
            checks.append((f"batch[{i}]", _random_instance(rng)))
    else:
        checks.append(("config", parse_instance(cfg, getattr(args, "traces", None))))

    mismatches = []
    max_gap = 0.0
    dp = exhaustive = None
    for name, inst in checks:
        dp = solve_dp(inst)
        exhaustive = brute_force(inst)
        gap = abs(dp.value - exhaustive.value)
        max_gap = max(max_gap, gap)
        if gap > ORACLE_TOL:
            mismatches.append({"instance": name, "dp": dp.value, "brute_force": exhaustive.value})
        if inst.beta == 0.0:
            knapsack = solve_mckp(inst)
            if knapsack.value != dp.value:
                mismatches.append({"instance": name, "dp": dp.value, "mckp": knapsack.value})
    payload = {
        "checked": len(checks),
        "max_abs_gap": max_gap,
        "tolerance": ORACLE_TOL,
        "mismatches": mismatches,
        "match": not mismatches,
    }
    if len(checks) == 1:
        payload["dp"] = {"value": dp.value, "levels": list(dp.selection.levels)}
        payload["brute_force"] = {"value": exhaustive.value,
                                  "levels": list(exhaustive.selection.levels)}
    _emit_json(payload, args.out)
    return 0 if not mismatches else 2


def cmd_gen_traces(args) -> int:
    spec = parse_gen(load_json(args.config))
    out_dir = Path(args.out)
    out_dir.mkdir(parents=True, exist_ok=True)
    duration, rate = spec["duration_s"], spec["rate_hz"]
    written = []
    for k, kind in enumerate(spec["kinds"]):
        for i in range(spec["count"]):
            rng = np.random.default_rng([args.seed, k, i])
            user = f"u{i:03d}"
            if kind == "constant":
                trace = constant_trace(((30.0 + 70.0 * i + 180.0) % 360.0) - 180.0,
                                       duration, rate, video_id=kind, user_id=user)
            elif kind == "rotation":
                trace = linear_rotation_trace((10.0 + 5.0 * i) * (-1 if i % 2 else 1),
                                              duration, rate, video_id=kind, user_id=user)
            elif kind == "sinusoid":
                trace = sinusoid_trace(30.0 + 10.0 * (i % 5), 8.0 + 2.0 * i,
                                       duration, rate, video_id=kind, user_id=user)
            elif kind == "uniform":
                trace = uniform_random_trace(duration, rate, rng, video_id=kind, user_id=user)
            elif kind == "walk":
                trace = random_walk_trace(duration, rate, 1.0 + 0.5 * i, rng=rng,
                                          video_id=kind, user_id=user)
            else:
                trace = explore_then_fixate_trace(duration, rate, rng=rng,
                                                  video_id=kind, user_id=user)
            path = out_dir / f"{kind}_{i:03d}.csv"
            write_trace(trace, path)
            written.append(path.name)
    _emit_json({"dir": str(out_dir), "written": sorted(written)}, None)
    return 0


_COMMANDS = {
    "solve": cmd_solve,
    "sweep": cmd_sweep,
    "schedule": cmd_schedule,
    "analyze": cmd_analyze,
    "oracle": cmd_oracle,
    "gen-traces": cmd_gen_traces,
}


def main(argv=None) -> int:
    try:
        args = build_parser().parse_args(argv)
        return _COMMANDS[args.command](args)
    except (ConfigError, ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except Exception as exc:  # pragma: no cover - defensive
        print(f"internal error: {exc}", file=sys.stderr)
        return 2


def entrypoint() -> None:
    sys.exit(main(sys.argv[1:]))
