"""Run execution backends: serial, local thread pool, pilot job.

All three consume the same contract: encode anything NEW, execute every
ENCODED run (ENCODED -> SUBMITTED -> COMPLETED/FAILED), optionally
collate, and loop on failures up to the retry limit. Every status change
is one store commit, so an interrupted execution resumes exactly where
it stopped.
"""

from __future__ import annotations

import subprocess
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path

from uqpilot.campaign.ops import Campaign
from uqpilot.errors import DecodeError, ExecutorError

EXECUTORS = ("serial", "local-pool", "pilotjob")


@dataclass
class RunPlan:
    executor: str = "serial"
    workers: int = 4
    cores_per_run: int = 1
    retries: int = 0
    allocation_cores: int | None = None
    auto_collate: bool = True
    stage_id: int | None = None          # None = all pending runs

    def __post_init__(self):
        if self.executor not in EXECUTORS:
            raise ExecutorError(
                f"unknown executor {self.executor!r}; choose from {', '.join(EXECUTORS)}"
            )
        if self.workers < 1 or self.cores_per_run < 1:
            raise ExecutorError("workers and cores-per-run must be >= 1")
        if self.retries < 0:
            raise ExecutorError("retry limit must be >= 0")


@dataclass
class RunSummary:
    executed: int = 0
    completed: int = 0
    failed: int = 0
    collated: int = 0
    recovered: int = 0
    errors: list[str] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return self.failed == 0


def execute_campaign(campaign: Campaign, plan: RunPlan) -> RunSummary:
    """Run the campaign's pending work to completion under `plan`."""
    summary = RunSummary()
    resumed = campaign.resume()
    summary.recovered = resumed.get("recovered", 0)

    rounds = 0
    while True:
        for row in campaign.store.runs(stage_id=plan.stage_id, status="NEW"):
            campaign.encode(row["run_id"])
        targets = [
            r["run_id"]
            for r in campaign.store.runs(stage_id=plan.stage_id, status="ENCODED")
        ]
        if not targets:
            break
        summary.executed += len(targets)
        if plan.executor == "pilotjob":
            _run_pilotjob(campaign, plan, targets)
        elif plan.executor == "local-pool":
            with ThreadPoolExecutor(max_workers=plan.workers) as pool:
                list(pool.map(lambda rid: _run_one(campaign, rid), targets))
        else:
            for rid in targets:
                _run_one(campaign, rid)

        failed = campaign.store.runs(stage_id=plan.stage_id, status="FAILED")
        if failed and rounds < plan.retries:
            for row in failed:
                campaign.store.set_status(row["run_id"], "ENCODED", bump_attempts=True)
            rounds += 1
            continue
        break

    if plan.auto_collate:
        for row in campaign.store.runs(stage_id=plan.stage_id, status="COMPLETED"):
            try:
                campaign.decode(row["run_id"])
                summary.collated += 1
            except DecodeError as exc:
                summary.errors.append(f"run {row['run_id']}: {exc}")

    counts = campaign.store.status_counts(stage_id=plan.stage_id)
    summary.completed = counts["COMPLETED"] + counts["COLLATED"]
    summary.failed = counts["FAILED"]
    return summary


def _run_one(campaign: Campaign, run_id: int):
    """Execute one run's command in its run directory."""
    store = campaign.store
    row = store.run(run_id)
    app = store.app_spec()
    run_dir = Path(row["run_dir"])
    store.set_status(run_id, "SUBMITTED")
    out = run_dir / "run.stdout"
    err = run_dir / "run.stderr"
    try:
        with open(out, "wb") as fo, open(err, "wb") as fe:
            code = subprocess.call(list(app.command), cwd=run_dir, stdout=fo, stderr=fe)
    except OSError:
        code = 127
    store.set_status(run_id, "COMPLETED" if code == 0 else "FAILED")


def _run_pilotjob(campaign: Campaign, plan: RunPlan, run_ids: list[int]):
    """One JobSpec per run, submitted over the manager socket."""
    from uqpilot.pilotjob.jobs import Allocation, detected_cores
    from uqpilot.pilotjob.protocol import ManagerServer, PjClient
    from uqpilot.pilotjob.scheduler import PilotManager

    store = campaign.store
    app = store.app_spec()
    if plan.allocation_cores:
        allocation = Allocation.virtual(plan.allocation_cores)
    else:
        allocation = Allocation.local(detected_cores())
    manager = PilotManager(allocation, workdir=campaign.workdir, clock="wall")
    server = ManagerServer(manager).start()
    try:
        with PjClient(*server.address) as client:
            names = {}
            for rid in run_ids:
                run_dir = str(Path(store.run(rid)["run_dir"]))
                name = f"run_{rid:06d}"
                client.call(
                    "submit",
                    {
                        "name": name,
                        "command": list(app.command),
                        "cores": plan.cores_per_run,
                        "workdir": run_dir,
                        "stdout": "run.stdout",
                        "stderr": "run.stderr",
                    },
                )
                names[name] = rid
                store.set_status(rid, "SUBMITTED")
            client.call("finish")
    finally:
        server.stop()
    report = server.report or manager.report()
    by_name = {j["name"]: j for j in report["jobs"]}
    for name, rid in names.items():
        job = by_name.get(name)
        status = "COMPLETED" if job and job["status"] == "SUCCEEDED" else "FAILED"
        store.set_status(rid, status)
