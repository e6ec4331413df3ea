"""Operator command line.

Exit codes: 0 success, 2 parse/validation failure, 3 infeasible,
4 time limit reached with an incumbent, 5 numerical failure.
"""

from __future__ import annotations

import json
import sys
from pathlib import Path

import click

from . import bnb, experiments, fixtures, verify
from .formulations import CtcasBuildOptions, build_ctc, build_ctcas
from .instance import InstanceError, load_instance, save_instance
from .ingest import ingest_bts_csv
from .linearize import VARIANTS
from .oracle import OracleConfig, OracleError, enumerate_optimum
from .runstore import RunRecord, RunStore, instance_hash, run_id
from .solution import Solution

EXIT_PARSE = 2
EXIT_INFEASIBLE = 3
EXIT_TIME_LIMIT = 4
EXIT_NUMERICAL = 5


def _load(path):
    try:
        return load_instance(path)
    except (OSError, InstanceError) as exc:
        click.echo(f"error: {exc}", err=True)
        sys.exit(EXIT_PARSE)


def _solve_config(time_limit, gap, seed, threads):
    return bnb.SolveConfig(time_limit=time_limit, rel_gap=gap, seed=seed,
                           threads=threads)


@click.group()
def main():
    """Insert new round-trip flights into an existing schedule."""


@main.command()
@click.option("--instance", "instance_path", required=True,
              type=click.Path(exists=True, dir_okay=False))
@click.option("--model", "model_kind", type=click.Choice(["ctc", "ctcas"]),
              default="ctcas", show_default=True)
@click.option("--variant", type=click.Choice(VARIANTS), default="micq2+mc",
              show_default=True)
@click.option("--max-swap", type=int, default=None,
              help="Cap on the number of swaps (ctcas only).")
@click.option("--swap-cost-mode",
              type=click.Choice(["flat", "aircraft_dependent"]),
              default="flat", show_default=True)
@click.option("--time-limit", type=float, default=18000.0,
              show_default=True)
@click.option("--gap", type=float, default=1e-4, show_default=True)
@click.option("--seed", type=int, default=0, show_default=True)
@click.option("--threads", type=int, default=1, show_default=True)
@click.option("--out", type=click.Path(dir_okay=False), default=None,
              help="Write the solution JSON here.")
@click.option("--store", type=click.Path(file_okay=False), default=None,
              help="Persist the run into this store directory.")
def solve(instance_path, model_kind, variant, max_swap, swap_cost_mode,
          time_limit, gap, seed, threads, out, store):
    """Solve one instance and write solution + cost breakdown."""
    if model_kind == "ctc" and max_swap is not None:
        click.echo("error: --max-swap applies to --model ctcas only",
                   err=True)
        sys.exit(EXIT_PARSE)
    inst = _load(instance_path)
    config = _solve_config(time_limit, gap, seed, threads)
    try:
        if model_kind == "ctc":
            model = build_ctc(inst)
        else:
            model = build_ctcas(inst, CtcasBuildOptions(
                max_swap=max_swap, swap_cost_mode=swap_cost_mode))
    except (InstanceError, ValueError) as exc:
        click.echo(f"error: {exc}", err=True)
        sys.exit(EXIT_PARSE)
    events = []
    try:
        sol, stats = bnb.solve(model, variant, config,
                               event_sink=events.append)
    except bnb.SolveError as exc:
        click.echo(f"numerical failure: {exc}", err=True)
        sys.exit(EXIT_NUMERICAL)
    if sol is None:
        click.echo("infeasible: no insertion satisfies the constraints",
                   err=True)
        sys.exit(EXIT_INFEASIBLE)
    if model_kind == "ctc":
        report = verify.verify_ctc_solution(inst, sol)
    else:
        report = verify.verify_ctcas_solution(
            inst, sol, max_swap=max_swap, swap_cost_mode=swap_cost_mode)
    sol.breakdown = report.breakdown
    payload = sol.to_dict()
    payload["verified"] = report.ok
    payload["violations"] = [v.constraint for v in report.violations]
    payload["spilled"] = report.spilled
    text = json.dumps(payload, indent=2, sort_keys=True)
    if out:
        Path(out).write_text(text + "\n")
    else:
        click.echo(text)
    if store:
        st = RunStore(store)
        h = st.put_instance(inst)
        cfg = {"time_limit": time_limit, "gap": gap, "seed": seed,
               "threads": threads, "max_swap": max_swap,
               "swap_cost_mode": swap_cost_mode}
        rid = run_id(h, model_kind, variant, cfg)
        st.put_run(RunRecord(id=rid, instance_hash=h,
                             model_kind=model_kind, variant=variant,
                             config=cfg, solution=sol, stats=stats),
                   events=events)
        click.echo(f"run stored: {rid}", err=True)
    if stats.status == "limit":
        sys.exit(EXIT_TIME_LIMIT)


@main.command()
@click.option("--instance", "instance_path", required=True,
              type=click.Path(exists=True, dir_okay=False))
@click.option("--k-max", type=int, default=5, show_default=True)
@click.option("--variant", type=click.Choice(VARIANTS), default="micq2+mc")
@click.option("--time-limit", type=float, default=18000.0)
@click.option("--gap", type=float, default=1e-4)
@click.option("--out", type=click.Path(dir_okay=False), default=None)
def whatif(instance_path, k_max, variant, time_limit, gap, out):
    """Sweep the swap cap and report the profit/spill frontier."""
    inst = _load(instance_path)
    config = _solve_config(time_limit, gap, 0, 1)
    points = experiments.whatif_sweep(inst, k_max, variant, config)
    payload = {"points": [p.to_dict() for p in points],
               "plateau": experiments.frontier_plateau(points)}
    text = json.dumps(payload, indent=2, sort_keys=True)
    if out:
        Path(out).write_text(text + "\n")
    else:
        click.echo(text)


@main.command()
@click.option("--instances", "paths", multiple=True,
              type=click.Path(exists=True, dir_okay=False))
@click.option("--seeds", type=str, default="",
              help="Comma-separated seeds for generated desk instances.")
@click.option("--variants", type=str,
              default="micq1+bigm,micq1+mc,micq2+bigm,micq2+mc")
@click.option("--model", "model_kind", type=click.Choice(["ctc", "ctcas"]),
              default="ctcas")
@click.option("--time-limit", type=float, default=18000.0)
@click.option("--csv", "csv_out", type=click.Path(dir_okay=False),
              default=None)
def bench(paths, seeds, variants, model_kind, time_limit, csv_out):
    """Benchmark the conic/linearization variants."""
    instances = [(_load(p)) for p in paths]
    for token in filter(None, seeds.split(",")):
        instances.append(
            experiments.generate_solvable_instance("desk", int(token)))
    if not instances:
        click.echo("error: no instances (use --instances or --seeds)",
                   err=True)
        sys.exit(EXIT_PARSE)
    variant_list = [v.strip() for v in variants.split(",") if v.strip()]
    config = _solve_config(time_limit, 1e-4, 0, 1)
    rows, _objs = experiments.benchmark_formulations(
        instances, variant_list, model_kind, config)
    click.echo(json.dumps(rows, indent=2, sort_keys=True))
    if csv_out:
        Path(csv_out).write_text(experiments.rows_to_csv(rows))


@main.command()
@click.option("--csv", "csv_path", required=True,
              type=click.Path(exists=True, dir_okay=False))
@click.option("--hub", required=True)
@click.option("--carrier", default=None)
@click.option("--date", default=None)
@click.option("--out", required=True, type=click.Path(dir_okay=False))
def ingest(csv_path, hub, carrier, date, out):
    """Build an instance skeleton from an on-time-performance CSV."""
    try:
        inst = ingest_bts_csv(csv_path, hub, carrier, date)
    except InstanceError as exc:
        click.echo(f"error: {exc}", err=True)
        sys.exit(EXIT_PARSE)
    save_instance(inst, out)
    click.echo(json.dumps(inst.summary(), sort_keys=True))


@main.command("verify")
@click.option("--instance", "instance_path", required=True,
              type=click.Path(exists=True, dir_okay=False))
@click.option("--solution", "solution_path", required=True,
              type=click.Path(exists=True, dir_okay=False))
def verify_cmd(instance_path, solution_path):
    """Audit a solution file against the original logical constraints."""
    inst = _load(instance_path)
    try:
        sol = Solution.from_dict(json.loads(Path(solution_path).read_text()))
    except (json.JSONDecodeError, KeyError) as exc:
        click.echo(f"error: {exc}", err=True)
        sys.exit(EXIT_PARSE)
    report = verify.verify_solution(inst, sol)
    click.echo(json.dumps({
        "ok": report.ok,
        "violations": [{"constraint": v.constraint, "detail": v.detail}
                       for v in report.violations],
        "breakdown": report.breakdown,
    }, indent=2, sort_keys=True))
    if not report.ok:
        sys.exit(1)


@main.command("oracle")
@click.option("--instance", "instance_path", required=True,
              type=click.Path(exists=True, dir_okay=False))
@click.option("--model", "model_kind", type=click.Choice(["ctc", "ctcas"]),
              default="ctc")
@click.option("--grid-step", type=float, default=0.25, show_default=True)
def oracle_cmd(instance_path, model_kind, grid_step):
    """Brute-force optimum for desk-scale instances."""
    inst = _load(instance_path)
    try:
        res = enumerate_optimum(inst, model_kind,
                                OracleConfig(grid_step=grid_step))
    except OracleError as exc:
        click.echo(f"error: {exc}", err=True)
        sys.exit(EXIT_INFEASIBLE)
    click.echo(json.dumps({
        "objective": res.objective,
        "breakdown": res.breakdown,
        "combos_total": res.combos_total,
        "combos_feasible": res.combos_feasible,
        "grid_bound": res.grid_bound,
    }, indent=2, sort_keys=True))


@main.command()
@click.option("--out", required=True, type=click.Path(dir_okay=False))
@click.option("--which", type=click.Choice(["two-route", "tiny"]),
              default="two-route", show_default=True)
def sample(out, which):
    """Write a reference instance file."""
    inst = (fixtures.two_route_instance() if which == "two-route"
            else fixtures.tiny_instance())
    save_instance(inst, out)
    click.echo(json.dumps(inst.summary(), sort_keys=True))


@main.command()
@click.option("--store", type=click.Path(file_okay=False),
              default="./skedfit-runs", show_default=True)
@click.option("--host", default="127.0.0.1", show_default=True)
@click.option("--port", type=int, default=8234, show_default=True)
@click.option("--workers", type=int, default=2, show_default=True,
              help="Solve worker threads.")
def serve(store, host, port, workers):
    """Run the HTTP API."""
    import uvicorn

    from .service import create_app
    app = create_app(store_dir=store, workers=workers)
    uvicorn.run(app, host=host, port=port, log_level="warning")


if __name__ == "__main__":
    main()
