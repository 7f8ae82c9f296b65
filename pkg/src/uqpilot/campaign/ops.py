"""Campaign operations: create, sample in stages, encode, decode, resume."""

from __future__ import annotations

import json
from pathlib import Path

from uqpilot.campaign.config import CampaignConfig, load_config
from uqpilot.campaign.decode import decode_output
from uqpilot.campaign.encode import render
from uqpilot.campaign.store import CampaignStore
from uqpilot.errors import SamplerError

RUNS_SUBDIR = "runs"


class Campaign:
    """A campaign workdir: the store plus its run directories."""

    def __init__(self, workdir: str | Path, store: CampaignStore):
        self.workdir = Path(workdir)
        self.store = store

    # --- construction -------------------------------------------------

    @classmethod
    def create(cls, config: CampaignConfig | str | Path, workdir: str | Path) -> "Campaign":
        if not isinstance(config, CampaignConfig):
            config = load_config(config)
        workdir = Path(workdir)
        store = CampaignStore.create(workdir, config)
        (workdir / RUNS_SUBDIR).mkdir(exist_ok=True)
        return cls(workdir, store)

    @classmethod
    def open(cls, workdir: str | Path) -> "Campaign":
        return cls(workdir, CampaignStore.open(workdir))

    def close(self):
        self.store.close()

    def __enter__(self):
        return self

    def __exit__(self, *exc):
        self.close()

    # --- sampling -------------------------------------------------------

    def add_stage(self, spec) -> int:
        """Draw a stage from the sampler spec and append it to the store."""
        from uqpilot.sampling.samplers import RNG_ALGORITHM, draw

        params = self.store.parameters()
        space = [(p.name, p.distribution) for p in params]
        if spec.is_quadrature and all(p.distribution.is_constant for p in params):
            raise SamplerError("quadrature sampler over a constant-only space")
        sets, weights = draw(space, spec)
        by_name = {p.name: p for p in params}
        sets = [{k: by_name[k].coerce(v) for k, v in s.items()} for s in sets]
        return self.store.add_stage(
            sampler_json=spec.to_json(),
            param_sets=sets,
            weights=weights,
            rng_algorithm=RNG_ALGORITHM if spec.variant == "mc" else None,
            seed=spec.seed if spec.variant == "mc" else None,
        )

    # --- encode / decode ---------------------------------------------------

    def run_dir(self, run_id: int) -> Path:
        return self.workdir / RUNS_SUBDIR / f"run_{run_id:06d}"

    def encode(self, run_id: int) -> Path:
        """Render the template into the run directory; NEW/FAILED -> ENCODED."""
        row = self.store.run(run_id)
        app = self.store.app_spec()
        params = self.store.run_params(row)
        rdir = self.run_dir(run_id)
        rdir.mkdir(parents=True, exist_ok=True)
        text = Path(app.template_path).read_text()
        (rdir / app.target).write_text(render(text, params, app.delimiter))
        self.store.set_status(run_id, "ENCODED", run_dir=str(rdir))
        return rdir

    def decode(self, run_id: int):
        """Parse the run's output and collate it; COMPLETED -> COLLATED."""
        row = self.store.run(run_id)
        app = self.store.app_spec()
        index, columns = decode_output(row["run_dir"], app.decoder)
        self.store.insert_qoi(run_id, index, columns)
        return index, columns

    def try_decode(self, row):
        """Decode attempt for crash recovery; None when output is unusable."""
        from uqpilot.errors import DecodeError

        if not row["run_dir"]:
            return None
        try:
            return decode_output(row["run_dir"], self.store.app_spec().decoder)
        except DecodeError:
            return None

    # --- resume --------------------------------------------------------------

    def resume(self) -> dict:
        """Reconcile statuses after interruption; see CampaignStore.resume."""
        return self.store.resume(self.try_decode)

    # --- inspection ------------------------------------------------------------

    def describe(self) -> dict:
        store = self.store
        stages = []
        for s in store.stages():
            stages.append(
                {
                    "stage_id": s["stage_id"],
                    "sampler": json.loads(s["sampler_json"]),
                    "n_runs": s["n_runs"],
                    "status_counts": store.status_counts(stage_id=s["stage_id"]),
                }
            )
        return {
            "name": store.meta("name"),
            "created_at": store.meta("created_at"),
            "parameters": [p.name for p in store.parameters()],
            "stages": stages,
            "status_counts": store.status_counts(),
            "qois": store.qoi_names(),
        }
