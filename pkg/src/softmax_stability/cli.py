"""Command-line interface: certification, simulation, experiment data.

Commands emit JSON reports and CSV figure data only; plotting is external.
Every command is deterministic for fixed flags (CSV output is byte
identical across reruns), floats are written with 17 significant digits,
and batch commands order their output by instance index. The environment
variable SOFTMAX_STABILITY_THREADS caps how many worker threads batch
commands may use; results do not depend on it.

Exit codes: 0 success, 1 input error, 2 nonconvergence or assertion miss.
"""

from __future__ import annotations

import argparse
import csv
import json
import os
import sys
from concurrent.futures import ThreadPoolExecutor

import numpy as np

from .certificates import certified_beta_range, certify
from .dynamics import logit_ode, multi_start_collapse, picard, write_trajectory_csv
from .geometry import ProductPoint
from .instances import (
    RANDOM_KINDS,
    SeedSpec,
    dirichlet_start,
    hadamard_separation,
    pitchfork_diagram,
    random_instance,
)
from .system import AffineLogitSystem, load_system

# Stream ids at or above this base address the start-point draws of the
# newly-certified experiment; below it they address instance draws.
_START_STREAM_BASE = 1_000_000


def _fmt(x) -> str:
    if isinstance(x, float) or isinstance(x, np.floating):
        return format(float(x), ".17g")
    return str(x)


def _write_csv(path, header, rows) -> None:
    with open(path, "w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(header)
        for row in rows:
            writer.writerow([_fmt(x) for x in row])


def _max_workers() -> int:
    raw = os.environ.get("SOFTMAX_STABILITY_THREADS", "")
    if not raw:
        return 1
    try:
        return max(1, int(raw))
    except ValueError:
        return 1


def _ordered_map(fn, items) -> list:
    items = list(items)
    workers = min(_max_workers(), max(1, len(items)))
    if workers <= 1:
        return [fn(item) for item in items]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(fn, items))


# ---------------------------------------------------------------------------
# experiment cores (pure; the cmd_* wrappers only parse flags and write files)
# ---------------------------------------------------------------------------


def run_pitchfork_rows(beta_min: float, beta_max: float, steps: int, tol: float = 1e-12):
    """Rows (beta, m, stability) for the two-action fixed-point diagram.

    Marker rows for the classical and tangent certified thresholds (beta 1
    and 2) come first, with an empty m cell.
    """
    if steps < 2:
        raise ValueError("need at least 2 grid points")
    if not (0.0 < beta_min <= beta_max):
        raise ValueError("need 0 < beta-min <= beta-max")
    grid = np.linspace(beta_min, beta_max, steps)
    diagram = pitchfork_diagram(grid, tol)
    rows = [[1.0, "", "old_threshold"], [2.0, "", "new_threshold"]]
    for beta, points in zip(diagram.beta_grid, diagram.points):
        for m, label in points:
            rows.append([beta, m, label])
    return rows


def run_separation_rows(max_blocks: int, alpha: float):
    """Rows (m, q_l2, rho_C) for Hadamard block counts 1, 2, 4, ..."""
    if max_blocks < 1:
        raise ValueError("need max-blocks >= 1")
    ms = []
    m = 1
    while m <= max_blocks:
        ms.append(m)
        m *= 2

    def one(m: int):
        report = certify(hadamard_separation(m, alpha))
        return [m, report.q_new, report.dobrushin_rho]

    return _ordered_map(one, ms)


def run_gain_rows(n: int, draws: int, kinds, seed: int):
    """Rows (kind, seed, norm_ambient, norm_tangent, gain), one per draw.

    Draw k of kind i uses stream i * draws + k, so kinds consume disjoint
    deterministic streams.
    """
    kinds = list(kinds)
    for kind in kinds:
        if kind not in RANDOM_KINDS:
            raise ValueError(f"unknown kind {kind!r}; choose from {RANDOM_KINDS}")

    def one(task):
        kind_idx, kind, k = task
        spec = SeedSpec(seed, stream=kind_idx * draws + k)
        system = random_instance(kind, n, spec)
        br = certified_beta_range(system)
        return [
            kind,
            f"{spec.seed}:{spec.stream}",
            br.norm_ambient,
            br.norm_tangent,
            br.gain,
        ]

    tasks = [(i, kind, k) for i, kind in enumerate(kinds) for k in range(draws)]
    return _ordered_map(one, tasks)


def run_newly_certified(
    instances: int,
    n: int,
    starts: int,
    beta_frac: float,
    seed: int,
    max_iter: int = 200,
    tol: float = 1e-13,
):
    """Shifted non-symmetric instances run at beta = beta_frac * beta_new.

    Returns (threshold_rows, diameter_rows): per instance the certified
    thresholds around the chosen beta, and the per-step maximum pairwise
    distance among Picard iterates started from `starts` Dirichlet points.
    Instances where beta would not exceed beta_old (measure zero) are
    discarded and redrawn from the next stream id.
    """
    if instances < 1:
        raise ValueError("need at least 1 instance")
    if starts < 1:
        raise ValueError("need at least 1 start")
    if not 0.0 < beta_frac < 1.0:
        raise ValueError("beta-frac must lie strictly between 0 and 1")

    prepared = []
    stream = 0
    for idx in range(instances):
        while True:
            base = random_instance("shifted", n, SeedSpec(seed, stream=stream))
            stream += 1
            br = certified_beta_range(base)
            beta = beta_frac * br.beta_new
            if np.isfinite(beta) and beta > br.beta_old:
                break
        system = AffineLogitSystem(base.block_dims, base.W, base.b, (beta,))
        prepared.append((idx, system, br, beta))

    def one(task):
        idx, system, br, beta = task
        points = [
            dirichlet_start(
                system.block_dims,
                SeedSpec(seed, stream=_START_STREAM_BASE + idx * starts + j),
            )
            for j in range(starts)
        ]
        if starts == 1:
            record = picard(system, points[0], max_iter=max_iter, tol=tol)
            series = np.zeros(len(record.samples))
        else:
            series = multi_start_collapse(system, points, max_iter=max_iter, tol=tol)
        return idx, br, beta, series

    results = _ordered_map(one, prepared)
    threshold_rows = []
    diameter_rows = []
    for idx, br, beta, series in results:
        threshold_rows.append([idx, br.beta_old, beta, br.beta_new])
        for k, d in enumerate(series):
            diameter_rows.append([idx, k, float(d)])
    return threshold_rows, diameter_rows


# ---------------------------------------------------------------------------
# commands
# ---------------------------------------------------------------------------


def _print_report(report) -> None:
    names = {
        "old": "q_old (ambient)",
        "new": "q_new (tangent)",
        "symmetric": "kappa_scaled",
        "dobrushin": "dobrushin_rho",
    }
    for key in ("old", "new", "symmetric", "dobrushin"):
        if key not in report.checks:
            continue
        chk = report.checks[key]
        verdict = "PASS" if chk.passed else ("BOUNDARY: not certified" if chk.boundary else "FAIL")
        print(
            f"{names[key]:<16} value={_fmt(chk.value)}  threshold<{_fmt(chk.threshold)}  "
            f"margin={_fmt(chk.margin)}  {verdict}"
        )
    if report.beta_old is not None:
        print(
            f"beta thresholds  beta_old={_fmt(report.beta_old)}  "
            f"beta_new={_fmt(report.beta_new)}  gain={_fmt(report.gain)}"
        )


def cmd_certify(args) -> int:
    system = load_system(args.system)
    report = certify(system)
    print(
        f"system: {system.n_blocks} block(s), dims {system.block_dims}, "
        f"beta {system.beta}, symmetric={system.is_symmetric()}"
    )
    _print_report(report)
    if args.json_out:
        with open(args.json_out, "w", encoding="utf-8") as fh:
            json.dump(report.to_dict(), fh, indent=2)
            fh.write("\n")
        print(f"wrote {args.json_out}")
    return 0


def _parse_start(raw: str, system: AffineLogitSystem) -> ProductPoint:
    if raw.startswith("dirichlet:"):
        parts = raw.split(":")[1:]
        if len(parts) not in (1, 2) or any(not p for p in parts):
            raise ValueError(f"bad start spec {raw!r}; expected dirichlet:SEED[:STREAM]")
        seed = int(parts[0])
        stream = int(parts[1]) if len(parts) == 2 else 0
        return dirichlet_start(system.block_dims, SeedSpec(seed, stream=stream))
    if raw.lstrip().startswith("["):
        values = json.loads(raw)
    else:
        with open(raw, "r", encoding="utf-8") as fh:
            try:
                values = json.load(fh)
            except json.JSONDecodeError as exc:
                raise ValueError(
                    f"parse error in {raw} at line {exc.lineno}, column {exc.colno}: {exc.msg}"
                ) from exc
    return ProductPoint.from_flat(np.asarray(values, dtype=float), system.block_dims)


def cmd_simulate(args) -> int:
    system = load_system(args.system)
    x0 = _parse_start(args.start, system)
    if args.mode == "picard":
        record = picard(system, x0, max_iter=args.max_iter, tol=args.tol)
    else:
        record = logit_ode(
            system, x0, t_end=args.t_end, dt=args.dt, equilibrium_tol=args.tol
        )
    if args.csv_out:
        write_trajectory_csv(record, args.csv_out)
        print(f"wrote {args.csv_out}")
    last = record.residuals[-1] if record.residuals.size else 0.0
    print(
        f"mode={record.mode} steps={len(record.samples) - 1} converged={record.converged} "
        f"q_new={_fmt(record.q)} certified={record.certified} last_residual={_fmt(float(last))}"
    )
    return 0 if record.converged else 2


def cmd_pitchfork(args) -> int:
    rows = run_pitchfork_rows(args.beta_min, args.beta_max, args.steps)
    _write_csv(args.csv_out, ["beta", "m", "stability"], rows)
    print(f"wrote {args.csv_out} ({len(rows)} rows)")
    return 0


def cmd_separation(args) -> int:
    rows = run_separation_rows(args.max_blocks, args.alpha)
    _write_csv(args.csv_out, ["m", "q_l2", "rho_C"], rows)
    print(f"wrote {args.csv_out} ({len(rows)} rows)")
    return 0


def cmd_gain(args) -> int:
    kinds = [k.strip() for k in args.kinds.split(",") if k.strip()]
    rows = run_gain_rows(args.n, args.draws, kinds, args.seed)
    _write_csv(args.csv_out, ["kind", "seed", "norm_ambient", "norm_tangent", "gain"], rows)
    print(f"wrote {args.csv_out} ({len(rows)} rows)")
    return 0


def cmd_newly_certified(args) -> int:
    thresholds, diameters = run_newly_certified(
        instances=args.instances,
        n=args.n,
        starts=args.starts,
        beta_frac=args.beta_frac,
        seed=args.seed,
        max_iter=args.max_iter,
        tol=args.tol,
    )
    _write_csv(args.csv_out, ["instance", "step", "diameter"], diameters)
    thresholds_out = args.thresholds_out
    if not thresholds_out:
        root, ext = os.path.splitext(args.csv_out)
        thresholds_out = f"{root}-thresholds{ext or '.csv'}"
    _write_csv(thresholds_out, ["instance", "beta_old", "beta", "beta_new"], thresholds)
    print(f"wrote {args.csv_out} ({len(diameters)} rows) and {thresholds_out}")
    return 0


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(
        prog="softmax-stability",
        description=(
            "Certify global stability of affine softmax feedback systems, "
            "simulate their dynamics, and emit experiment data."
        ),
    )
    sub = p.add_subparsers(dest="command", required=True)

    c = sub.add_parser("certify", help="compute all stability certificates for a system")
    c.add_argument("--system", required=True, help="path to a system JSON file")
    c.add_argument("--json-out", help="write the full report as JSON")
    c.set_defaults(func=cmd_certify)

    s = sub.add_parser("simulate", help="run Picard iteration or the logit adjustment flow")
    s.add_argument("--system", required=True, help="path to a system JSON file")
    s.add_argument("--mode", choices=("picard", "ode"), default="picard")
    s.add_argument(
        "--start",
        default="dirichlet:0",
        help="dirichlet:SEED[:STREAM], an inline JSON array, or a JSON file path",
    )
    s.add_argument("--tol", type=float, default=1e-10)
    s.add_argument("--max-iter", type=int, default=10_000)
    s.add_argument("--t-end", type=float, default=50.0)
    s.add_argument("--dt", type=float, default=0.01)
    s.add_argument("--csv-out", help="write the trajectory as CSV")
    s.set_defaults(func=cmd_simulate)

    f = sub.add_parser("pitchfork", help="two-action fixed-point diagram over a beta grid")
    f.add_argument("--beta-min", type=float, default=0.1)
    f.add_argument("--beta-max", type=float, default=4.0)
    f.add_argument("--steps", type=int, default=79, help="number of grid points")
    f.add_argument("--csv-out", required=True)
    f.set_defaults(func=cmd_pitchfork)

    d = sub.add_parser(
        "separation", help="Euclidean vs Dobrushin certificates on Hadamard block systems"
    )
    d.add_argument("--max-blocks", type=int, default=32)
    d.add_argument("--alpha", type=float, default=1.0)
    d.add_argument("--csv-out", required=True)
    d.set_defaults(func=cmd_separation)

    g = sub.add_parser("gain", help="certified range gain over random instance draws")
    g.add_argument("--n", type=int, default=32)
    g.add_argument("--draws", type=int, default=200)
    g.add_argument("--kinds", default=",".join(RANDOM_KINDS))
    g.add_argument("--seed", type=int, default=0)
    g.add_argument("--csv-out", required=True)
    g.set_defaults(func=cmd_gain)

    nc = sub.add_parser(
        "newly-certified",
        help="multi-start collapse on instances between the old and new thresholds",
    )
    nc.add_argument("--instances", type=int, default=12)
    nc.add_argument("--n", type=int, default=20)
    nc.add_argument("--starts", type=int, default=10)
    nc.add_argument("--beta-frac", type=float, default=0.72)
    nc.add_argument("--seed", type=int, default=0)
    nc.add_argument("--max-iter", type=int, default=200)
    nc.add_argument("--tol", type=float, default=1e-13)
    nc.add_argument("--csv-out", required=True)
    nc.add_argument("--thresholds-out", help="default: <csv-out stem>-thresholds.csv")
    nc.set_defaults(func=cmd_newly_certified)

    return p


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (ValueError, OSError, json.JSONDecodeError, KeyError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except ArithmeticError as exc:
        print(f"numeric failure: {exc}", file=sys.stderr)
        return 2


def entry_point() -> None:  # pragma: no cover
    sys.exit(main())


if __name__ == "__main__":  # pragma: no cover
    entry_point()
