import json
import stat
import sys

import pytest

from tests.conftest import uniform_param, write_config
from uqpilot.campaign.ops import Campaign
from uqpilot.executors import RunPlan, execute_campaign
from uqpilot.sampling.samplers import SamplerSpec


def echo_campaign(tmp_path, n_runs=10, workdir_name="camp") -> Campaign:
    """App copies its rendered input straight to the output CSV."""
    cfg = write_config(
        tmp_path,
        [uniform_param("a", 0.0, 1.0)],
        "y\n$a\n",
        ["cp", "input.json", "out.csv"],
        decoder={"output_relpath": "out.csv", "format": "csv", "qoi_columns": ["y"]},
    )
    campaign = Campaign.create(cfg, tmp_path / workdir_name)
    campaign.add_stage(SamplerSpec("mc", n=n_runs, seed=31))
    return campaign


def script_campaign(tmp_path, script_body: str, n_runs=10) -> Campaign:
    """App runs a custom python script with the run dir as cwd."""
    script = tmp_path / "app.py"
    script.write_text(script_body)
    script.chmod(script.stat().st_mode | stat.S_IEXEC)
    cfg = write_config(
        tmp_path,
        [uniform_param("a", 0.0, 1.0)],
        "y\n$a\n",
        [sys.executable, str(script)],
        decoder={"output_relpath": "out.csv", "format": "csv", "qoi_columns": ["y"]},
    )
    campaign = Campaign.create(cfg, tmp_path / "camp")
    campaign.add_stage(SamplerSpec("mc", n=n_runs, seed=31))
    return campaign


FAIL_RUN_3 = """
import pathlib, shutil, sys
run_dir = pathlib.Path.cwd()
if run_dir.name == "run_000003" and not (run_dir / "retry-marker").exists():
    (run_dir / "retry-marker").write_text("failed once")
    sys.exit(1)
shutil.copy("input.json", "out.csv")
"""

ALWAYS_FAIL_RUN_3 = """
import pathlib, shutil, sys
if pathlib.Path.cwd().name == "run_000003":
    sys.exit(1)
shutil.copy("input.json", "out.csv")
"""


class TestSerialAndPool:
    def test_local_pool_completes_all(self, tmp_path):
        campaign = echo_campaign(tmp_path)
        summary = execute_campaign(campaign, RunPlan(executor="local-pool", workers=4))
        assert summary.ok
        assert summary.failed == 0
        counts = campaign.store.status_counts()
        assert counts["COLLATED"] == 10

    def test_single_failure_reported(self, tmp_path):
        campaign = script_campaign(tmp_path, ALWAYS_FAIL_RUN_3)
        summary = execute_campaign(campaign, RunPlan(executor="local-pool", retries=0))
        assert not summary.ok
        assert summary.failed == 1
        counts = campaign.store.status_counts()
        assert counts["COLLATED"] == 9
        assert campaign.store.run(3)["status"] == "FAILED"

    def test_retry_recovers_transient_failure(self, tmp_path):
        campaign = script_campaign(tmp_path, FAIL_RUN_3)
        summary = execute_campaign(campaign, RunPlan(executor="serial", retries=1))
        assert summary.ok
        assert campaign.store.status_counts()["COLLATED"] == 10
        assert campaign.store.run(3)["attempts"] == 1

    def test_rerun_is_idempotent(self, tmp_path):
        campaign = echo_campaign(tmp_path)
        execute_campaign(campaign, RunPlan(executor="serial"))
        second = execute_campaign(campaign, RunPlan(executor="serial"))
        assert second.executed == 0
        assert campaign.store.status_counts()["COLLATED"] == 10

    def test_stdout_captured_per_run(self, tmp_path):
        cfg = write_config(
            tmp_path,
            [uniform_param("a", 0.0, 1.0)],
            "y\n$a\n",
            ["sh", "-c", "echo hello-from-run && cp input.json out.csv"],
            decoder={"output_relpath": "out.csv", "format": "csv", "qoi_columns": ["y"]},
        )
        campaign = Campaign.create(cfg, tmp_path / "camp")
        campaign.add_stage(SamplerSpec("mc", n=1, seed=0))
        execute_campaign(campaign, RunPlan(executor="serial"))
        out = (campaign.run_dir(1) / "run.stdout").read_text()
        assert "hello-from-run" in out


class TestPilotExecutor:
    def test_completes_all(self, tmp_path):
        campaign = echo_campaign(tmp_path)
        summary = execute_campaign(
            campaign, RunPlan(executor="pilotjob", allocation_cores=4)
        )
        assert summary.ok
        assert campaign.store.status_counts()["COLLATED"] == 10

    def test_failure_synchronized_back(self, tmp_path):
        campaign = script_campaign(tmp_path, ALWAYS_FAIL_RUN_3)
        summary = execute_campaign(
            campaign, RunPlan(executor="pilotjob", allocation_cores=4)
        )
        assert not summary.ok
        assert campaign.store.run(3)["status"] == "FAILED"


class TestExecutorEquivalence:
    def test_qoi_frames_bitwise_identical(self, tmp_path):
        frames = {}
        for executor in ("serial", "local-pool", "pilotjob"):
            base = tmp_path / executor
            base.mkdir()
            campaign = echo_campaign(base, workdir_name="camp")
            plan = RunPlan(executor=executor, workers=3, allocation_cores=4)
            summary = execute_campaign(campaign, plan)
            assert summary.ok
            rows = campaign.store._conn.execute(
                "SELECT run_id, qoi, values_json FROM qoi_values ORDER BY run_id, qoi"
            ).fetchall()
            frames[executor] = json.dumps([tuple(r) for r in rows])
        assert frames["serial"] == frames["local-pool"] == frames["pilotjob"]
