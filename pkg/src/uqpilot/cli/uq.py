"""The `uq` command: init, sample, run, collate, analyze, validate, status, resume.

Exit codes are a published contract: 0 success, 1 run failures,
2 usage/config problems, 3 refusals, 4 store corruption.
"""

from __future__ import annotations

import argparse
import json
import shutil
import sys
import time
from pathlib import Path

EXIT_OK = 0
EXIT_RUN_FAILURES = 1
EXIT_USAGE = 2
EXIT_REFUSED = 3
EXIT_CORRUPT = 4


def _fail(code: int, message: str) -> int:
    print(f"uq: {message}", file=sys.stderr)
    return code


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="uq", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("init", help="create a campaign from a config document")
    p.add_argument("--config", required=True)
    p.add_argument("--workdir", required=True)
    p.add_argument("--force", action="store_true",
                   help="allow a non-empty working directory")

    p = sub.add_parser("sample", help="append a sampling stage")
    p.add_argument("--workdir", required=True)
    p.add_argument("--sampler", required=True, choices=["mc", "halton", "sc", "pce"])
    p.add_argument("--n", type=int, default=100)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--skip", type=int, default=0)
    p.add_argument("--level", type=int, default=1)
    p.add_argument("--order", type=int, default=1)
    p.add_argument("--growth", choices=["linear", "exp2"], default=None,
                   help="per-dimension growth rule (default: exp2 for sparse, else linear)")
    p.add_argument("--sparse", action="store_true")
    p.add_argument("--dump-grid", metavar="CSV",
                   help="also write the stage's points/weights as CSV")

    p = sub.add_parser("run", help="execute pending runs")
    p.add_argument("--workdir", required=True)
    p.add_argument("--executor", choices=["serial", "local-pool", "pilotjob"],
                   default="serial")
    p.add_argument("--workers", type=int, default=4)
    p.add_argument("--cores-per-run", type=int, default=1)
    p.add_argument("--allocation-cores", type=int, default=None)
    p.add_argument("--retries", type=int, default=0)
    p.add_argument("--stage", type=int, default=None)
    p.add_argument("--no-collate", action="store_true",
                   help="skip automatic collation of completed runs")

    p = sub.add_parser("collate", help="decode completed runs into the store")
    p.add_argument("--workdir", required=True)

    p = sub.add_parser("analyze", help="moments and Sobol indices for a stage")
    p.add_argument("--workdir", required=True)
    p.add_argument("--qoi", required=True)
    p.add_argument("--stage", type=int, default=None, help="default: latest stage")
    p.add_argument("--allow-missing", action="store_true",
                   help="tolerate missing runs (MC stages only)")

    p = sub.add_parser("validate", help="similarity or ensemble validation")
    p.add_argument("--workdir", required=True)
    p.add_argument("--pattern", required=True, choices=["similarity", "ensemble"])
    p.add_argument("--qoi")
    p.add_argument("--metric", default="hellinger")
    p.add_argument("--reference", help="reference CSV (column per qoi)")
    p.add_argument("--at", default="final", help="time index, 'final', or 'flat'")
    p.add_argument("--scorer", nargs="+", default=["mare"],
                   help="'mare' or an external command")
    p.add_argument("--aggregator", default="mean",
                   choices=["mean", "weighted_mean", "max"])

    p = sub.add_parser("status", help="status counts per stage")
    p.add_argument("--workdir", required=True)

    p = sub.add_parser("resume", help="reconcile statuses after an interruption")
    p.add_argument("--workdir", required=True)

    return parser


# --- helpers -------------------------------------------------------------


def _open_campaign(workdir: str):
    from uqpilot.campaign.ops import Campaign

    return Campaign.open(workdir)


def _reports_dir(workdir: str) -> Path:
    path = Path(workdir) / "reports"
    path.mkdir(exist_ok=True)
    return path


def _publish(path: Path, latest_name: str):
    """Keep a stable 'latest' alias next to timestamped reports."""
    latest = path.parent / latest_name
    latest.unlink(missing_ok=True)
    try:
        latest.symlink_to(path.name)
    except OSError:
        shutil.copyfile(path, latest)


# --- subcommands ----------------------------------------------------------


def cmd_init(args) -> int:
    from uqpilot.campaign.ops import Campaign
    from uqpilot.errors import ConfigError, TemplateError

    config = Path(args.config)
    if not config.is_file():
        return _fail(EXIT_USAGE, f"config file not found: {config}")
    workdir = Path(args.workdir)
    if workdir.exists() and any(workdir.iterdir()) and not args.force:
        return _fail(EXIT_REFUSED, f"workdir {workdir} is not empty (use --force)")
    try:
        campaign = Campaign.create(config, workdir)
    except (ConfigError, TemplateError) as exc:
        return _fail(EXIT_USAGE, str(exc))
    print(campaign.store.path)
    campaign.close()
    return EXIT_OK


def cmd_sample(args) -> int:
    from uqpilot.errors import SamplerError, SizeError
    from uqpilot.sampling.samplers import SamplerSpec

    growth = args.growth or ("exp2" if args.sparse else "linear")
    try:
        if args.sampler == "mc":
            spec = SamplerSpec("mc", n=args.n, seed=args.seed)
        elif args.sampler == "halton":
            spec = SamplerSpec("halton", n=args.n, skip=args.skip)
        elif args.sampler == "sc":
            spec = SamplerSpec("sc", level=args.level, growth=growth, sparse=args.sparse)
        else:
            spec = SamplerSpec("pce", order=args.order)
        with _open_campaign(args.workdir) as campaign:
            stage_id = campaign.add_stage(spec)
            rows = campaign.store.runs(stage_id=stage_id)
            if args.dump_grid:
                _dump_grid(campaign, rows, args.dump_grid)
    except (SamplerError, SizeError) as exc:
        return _fail(EXIT_USAGE, str(exc))
    print(f"stage {stage_id}: {len(rows)} runs")
    return EXIT_OK


def _dump_grid(campaign, rows, out_path: str):
    import csv

    names = [p.name for p in campaign.store.parameters()]
    with open(out_path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["index", *names, "weight"])
        for i, row in enumerate(rows):
            params = campaign.store.run_params(row)
            weight = row["weight"]
            writer.writerow(
                [i, *[repr(params[n]) for n in names],
                 "" if weight is None else repr(weight)]
            )


def cmd_run(args) -> int:
    from uqpilot.executors import RunPlan, execute_campaign

    plan = RunPlan(
        executor=args.executor,
        workers=args.workers,
        cores_per_run=args.cores_per_run,
        retries=args.retries,
        allocation_cores=args.allocation_cores,
        auto_collate=not args.no_collate,
        stage_id=args.stage,
    )
    with _open_campaign(args.workdir) as campaign:
        summary = execute_campaign(campaign, plan)
        counts = campaign.store.status_counts()
    print(
        f"executed={summary.executed} completed={summary.completed} "
        f"failed={summary.failed} collated={counts['COLLATED']}"
    )
    for line in summary.errors:
        print(f"uq: {line}", file=sys.stderr)
    return EXIT_OK if summary.ok else EXIT_RUN_FAILURES


def cmd_collate(args) -> int:
    from uqpilot.errors import DecodeError

    failures = 0
    with _open_campaign(args.workdir) as campaign:
        for row in campaign.store.runs(status="COMPLETED"):
            try:
                campaign.decode(row["run_id"])
            except DecodeError as exc:
                failures += 1
                print(f"uq: run {row['run_id']}: {exc}", file=sys.stderr)
        counts = campaign.store.status_counts()
    print(f"collated={counts['COLLATED']} pending={counts['COMPLETED']}")
    return EXIT_OK if failures == 0 else EXIT_RUN_FAILURES


def cmd_analyze(args) -> int:
    from uqpilot.analysis.pipeline import (
        analyze_mc_stage,
        analyze_quadrature_stage,
        stage_sampler,
    )
    from uqpilot.analysis.report import format_final_table, write_csv, write_json
    from uqpilot.errors import MissingRunError, SamplerError

    with _open_campaign(args.workdir) as campaign:
        store = campaign.store
        stage_id = args.stage or store.latest_stage_id()
        if stage_id is None:
            return _fail(EXIT_USAGE, "campaign has no stages to analyze")
        qois = store.qoi_names()
        if args.qoi not in qois:
            return _fail(
                EXIT_USAGE,
                f"unknown qoi {args.qoi!r}; available: {', '.join(qois) or '(none)'}",
            )
        spec = stage_sampler(store, stage_id)
        stamp = time.strftime("%Y%m%d-%H%M%S")
        reports = _reports_dir(args.workdir)
        try:
            if spec.is_quadrature:
                report = analyze_quadrature_stage(store, stage_id, args.qoi)
                json_path = reports / f"analysis-{args.qoi}-{stamp}.json"
                csv_path = reports / f"analysis-{args.qoi}-{stamp}.csv"
                write_json(report, json_path, args.qoi)
                write_csv(report, csv_path)
                _publish(json_path, f"analysis-{args.qoi}-latest.json")
                _publish(csv_path, f"analysis-{args.qoi}-latest.csv")
                print(format_final_table(report, args.qoi))
                print(f"reports: {json_path} {csv_path}")
            else:
                doc = analyze_mc_stage(
                    store, stage_id, args.qoi, allow_missing=args.allow_missing
                )
                if doc["missing"]:
                    print(
                        f"uq: warning: {len(doc['missing'])} runs missing from stage "
                        f"{stage_id}", file=sys.stderr,
                    )
                json_path = reports / f"analysis-{args.qoi}-{stamp}.json"
                payload = {
                    "qoi": args.qoi,
                    "stage": stage_id,
                    "n_runs": doc["n_runs"],
                    "index": None if doc["index"] is None else list(doc["index"]),
                    "mean": [float(v) for v in doc["mean"]],
                    "variance": [float(v) for v in doc["variance"]],
                    "mean_ci": [
                        {"lower": ci.lower, "upper": ci.upper, "point": ci.point}
                        for ci in doc["mean_ci"]
                    ],
                }
                json_path.write_text(json.dumps(payload, indent=2) + "\n")
                _publish(json_path, f"analysis-{args.qoi}-latest.json")
                final = doc["mean"][-1]
                print(f"qoi {args.qoi!r}: n={doc['n_runs']} final mean={final!r}")
                print(f"report: {json_path}")
        except MissingRunError as exc:
            return _fail(EXIT_RUN_FAILURES, str(exc))
        except SamplerError as exc:
            return _fail(EXIT_USAGE, str(exc))
    return EXIT_OK


def cmd_validate(args) -> int:
    import numpy as np

    from uqpilot.errors import BinningError, DomainError, EmptyInput, ScorerError
    from uqpilot.vvp.distances import EmpiricalDist
    from uqpilot.vvp.patterns import (
        METRICS,
        ensemble_validate,
        validate_similarity,
    )

    with _open_campaign(args.workdir) as campaign:
        store = campaign.store
        reports = _reports_dir(args.workdir)
        stamp = time.strftime("%Y%m%d-%H%M%S")
        if args.pattern == "similarity":
            if args.metric not in METRICS:
                return _fail(
                    EXIT_USAGE,
                    f"unknown metric {args.metric!r}; choose from {{{', '.join(METRICS)}}}",
                )
            if not args.qoi:
                return _fail(EXIT_USAGE, "similarity validation needs --qoi")
            if args.reference:
                ref_values = _read_reference(args.reference, args.qoi)
                if ref_values is None:
                    return _fail(EXIT_USAGE, f"reference lacks column {args.qoi!r}")
                reference = EmpiricalDist.from_samples(ref_values)
            else:
                from uqpilot.vvp.patterns import ensemble_distribution

                reference = ensemble_distribution(store, args.qoi, args.at)
            try:
                result = validate_similarity(
                    store, [args.qoi], reference, args.metric, at=args.at
                )
            except (BinningError, EmptyInput, DomainError) as exc:
                return _fail(EXIT_USAGE, str(exc))
            doc = {
                "pattern": "similarity",
                "metric": result.metric,
                "distance": result.distance,
                "per_qoi": result.per_qoi,
            }
            print(f"{result.metric} distance: {result.distance:.6g}")
        else:
            scorer = args.scorer[0] if args.scorer == ["mare"] else args.scorer
            reference = None
            if scorer == "mare":
                if not (args.qoi and args.reference):
                    return _fail(EXIT_USAGE, "mare scorer needs --qoi and --reference")
                ref = _read_reference(args.reference, args.qoi)
                if ref is None:
                    return _fail(EXIT_USAGE, f"reference lacks column {args.qoi!r}")
                reference = np.asarray(ref)
            try:
                score = ensemble_validate(
                    store,
                    scorer,
                    aggregator=args.aggregator,
                    qoi=args.qoi,
                    reference=reference,
                )
            except (ScorerError, DomainError, EmptyInput) as exc:
                return _fail(EXIT_USAGE, str(exc))
            doc = {
                "pattern": "ensemble",
                "scorer": score.scorer,
                "aggregator": score.aggregator,
                "aggregate": score.aggregate,
                "per_run": {str(k): v for k, v in score.per_run.items()},
            }
            print(f"aggregate ({score.aggregator}): {score.aggregate:.6g}")
        path = reports / f"validation-{args.pattern}-{stamp}.json"
        path.write_text(json.dumps(doc, indent=2) + "\n")
        _publish(path, f"validation-{args.pattern}-latest.json")
        print(f"report: {path}")
    return EXIT_OK


def _read_reference(path: str, qoi: str):
    import csv

    with open(path, newline="") as fh:
        rows = list(csv.DictReader(fh))
    if not rows or qoi not in rows[0]:
        return None
    return [float(r[qoi]) for r in rows]


def cmd_status(args) -> int:
    with _open_campaign(args.workdir) as campaign:
        doc = campaign.describe()
    print(f"campaign {doc['name']!r} ({len(doc['parameters'])} parameters)")
    for stage in doc["stages"]:
        counts = ", ".join(
            f"{k}={v}" for k, v in stage["status_counts"].items() if v
        ) or "empty"
        print(f"  stage {stage['stage_id']}: {stage['sampler']['variant']} "
              f"n={stage['n_runs']} [{counts}]")
    totals = ", ".join(f"{k}={v}" for k, v in doc["status_counts"].items() if v)
    print(f"  totals: {totals or 'no runs'}")
    return EXIT_OK


def cmd_resume(args) -> int:
    with _open_campaign(args.workdir) as campaign:
        summary = campaign.resume()
    print(json.dumps(summary))
    return EXIT_OK


HANDLERS = {
    "init": cmd_init,
    "sample": cmd_sample,
    "run": cmd_run,
    "collate": cmd_collate,
    "analyze": cmd_analyze,
    "validate": cmd_validate,
    "status": cmd_status,
    "resume": cmd_resume,
}


def main(argv: list[str] | None = None) -> int:
    from uqpilot.errors import StoreCorrupt

    args = build_parser().parse_args(argv)
    try:
        return HANDLERS[args.command](args)
    except StoreCorrupt as exc:
        return _fail(EXIT_CORRUPT, f"{exc} (store may need manual recovery)")


if __name__ == "__main__":
    sys.exit(main())
