"""Pilot manager core: FIFO scheduling with opportunistic backfill.

One lock serializes every state mutation; task execution runs in worker
threads (wall clock) or through an event heap (simulated clock, declared
durations). The scheduler scans the queue in submission order: eligible
tasks that fit start immediately, and when the head does not fit, later
eligible tasks that do fit are backfilled.
"""

from __future__ import annotations

import heapq
import itertools
import os
import signal
import subprocess
import threading
import time
from collections import deque
from pathlib import Path

from uqpilot.errors import AlreadyTerminal, JobNotFound, ValidationError
from uqpilot.pilotjob.jobs import (
    BROKEN,
    CANCELED,
    EXECUTING,
    FAILED,
    OMITTED,
    QUEUED,
    SUCCEEDED,
    Allocation,
    Job,
    JobSpec,
    Task,
)

CANCEL_GRACE_SECONDS = 5.0


class PilotManager:
    """Schedules and executes sub-jobs inside one allocation."""

    def __init__(self, allocation: Allocation, workdir: str | Path = ".",
                 clock: str = "wall"):
        if clock not in ("wall", "simulated"):
            raise ValidationError(f"clock must be wall or simulated, got {clock!r}")
        self.allocation = allocation
        self.workdir = Path(workdir)
        self.clock = clock
        self._cond = threading.Condition()
        self._jobs: dict[str, Job] = {}
        self._order: dict[str, int] = {}
        self._queue: deque[Task] = deque()
        self._free: dict[str, int] = {name: cores for name, cores in allocation.nodes}
        self._busy_cores = 0
        self._accepting = True
        self._epoch = time.monotonic()
        self._sim_now = 0.0
        self._events: list[tuple[float, int, Task]] = []   # (end, seq, task)
        self._seq = itertools.count()
        self._procs: dict[tuple[str, int], subprocess.Popen] = {}
        self._trace: list[tuple[float, str, str, int]] = []  # (t, event, job, iteration)

    # --- time ------------------------------------------------------------

    def now(self) -> float:
        if self.clock == "simulated":
            return self._sim_now
        return time.monotonic() - self._epoch

    # --- submission --------------------------------------------------------

    def submit(self, spec: JobSpec) -> str:
        """Validate and enqueue a job; every iteration becomes one task."""
        with self._cond:
            if not self._accepting:
                raise ValidationError("manager is finishing; no new submissions")
            if spec.name in self._jobs:
                raise ValidationError(f"duplicate job name {spec.name!r}")
            for dep in spec.after:
                if dep not in self._jobs:
                    raise ValidationError(f"job {spec.name!r}: unknown dependency {dep!r}")
            if spec.cores > self.allocation.total_cores:
                raise ValidationError(
                    f"job {spec.name!r} wants {spec.cores} cores; allocation has "
                    f"{self.allocation.total_cores}"
                )
            if self.clock == "simulated" and spec.duration is None:
                raise ValidationError(
                    f"job {spec.name!r}: simulated clock needs a declared duration"
                )
            job = Job(spec=spec)
            now = self.now()
            for k in range(spec.iterations):
                task = Task(job=spec.name, iteration=k, cores=spec.cores, submit=now)
                job.tasks.append(task)
                self._queue.append(task)
            self._order[spec.name] = len(self._order)
            self._jobs[spec.name] = job
            self._tick()
            return spec.name

    # --- scheduling core (lock held) ------------------------------------------

    def _eligible(self, task: Task) -> bool:
        job = self._jobs[task.job]
        for dep in job.spec.after:
            if self._jobs[dep].status != SUCCEEDED:
                return False
        if task.iteration > 0 and not job.spec.parallel_iterations:
            if job.tasks[task.iteration - 1].status != SUCCEEDED:
                return False
        return True

    def _allocate(self, cores: int) -> tuple[tuple[str, int], ...] | None:
        if cores > self.allocation.total_cores - self._busy_cores:
            return None
        taken: list[tuple[str, int]] = []
        need = cores
        for name, _ in self.allocation.nodes:
            if need == 0:
                break
            grab = min(self._free[name], need)
            if grab > 0:
                taken.append((name, grab))
                need -= grab
        if need > 0:
            return None
        for name, n in taken:
            self._free[name] -= n
        self._busy_cores += cores
        assert self._busy_cores <= self.allocation.total_cores
        return tuple(taken)

    def _release(self, assigned: tuple[tuple[str, int], ...]):
        for name, n in assigned:
            self._free[name] += n
        self._busy_cores -= sum(n for _, n in assigned)
        assert self._busy_cores >= 0

    def _tick(self):
        """Dispatch every eligible queued task that fits, in FIFO order."""
        for task in list(self._queue):
            if task.status != QUEUED:
                continue
            if not self._eligible(task):
                continue
            assigned = self._allocate(task.cores)
            if assigned is None:
                continue   # head blocked; later eligible tasks may backfill
            task.assigned = assigned
            task.status = EXECUTING
            task.start = self.now()
            self._trace.append((task.start, "start", task.job, task.iteration))
            if self.clock == "simulated":
                duration = self._jobs[task.job].spec.duration
                heapq.heappush(self._events, (task.start + duration, next(self._seq), task))
            else:
                threading.Thread(
                    target=self._run_task, args=(task,), daemon=True
                ).start()
        self._prune_queue()

    def _prune_queue(self):
        while self._queue and self._queue[0].status != QUEUED:
            self._queue.popleft()

    # --- wall-clock execution ----------------------------------------------

    def _io_path(self, spec: JobSpec, task: Task, kind: str) -> Path:
        configured = spec.stdout if kind == "stdout" else spec.stderr
        if configured:
            path = Path(configured)
            if spec.iterations > 1:
                path = path.with_name(f"{path.name}.{task.iteration}")
        else:
            suffix = f".{task.iteration}" if spec.iterations > 1 else ""
            path = self._logs_dir() / f"{spec.name}{suffix}.{kind}"
        if not path.is_absolute():
            base = Path(spec.workdir) if spec.workdir else self.workdir
            path = base / path
        return path

    def _logs_dir(self) -> Path:
        return self.workdir / "pj-logs"

    def _run_task(self, task: Task):
        spec = self._jobs[task.job].spec
        cwd = spec.workdir or str(self.workdir)
        env = None
        if spec.env:
            env = dict(os.environ)
            env.update(dict(spec.env))
        out_path = self._io_path(spec, task, "stdout")
        err_path = self._io_path(spec, task, "stderr")
        out_path.parent.mkdir(parents=True, exist_ok=True)
        err_path.parent.mkdir(parents=True, exist_ok=True)
        proc = None
        exit_code: int | None = None
        try:
            with open(out_path, "wb") as out, open(err_path, "wb") as err:
                proc = subprocess.Popen(
                    list(spec.command), cwd=cwd, env=env, stdout=out, stderr=err
                )
                with self._cond:
                    if task.cancel_requested:
                        proc.terminate()
                    self._procs[(task.job, task.iteration)] = proc
                exit_code = proc.wait()
        except OSError:
            exit_code = 127
        finally:
            self._on_task_exit(task, exit_code)

    def _on_task_exit(self, task: Task, exit_code: int | None):
        with self._cond:
            self._procs.pop((task.job, task.iteration), None)
            task.end = self.now()
            task.exit_code = exit_code
            self._trace.append((task.end, "end", task.job, task.iteration))
            if task.cancel_requested:
                task.status = CANCELED
            elif exit_code == 0:
                task.status = SUCCEEDED
            else:
                task.status = FAILED
            self._release(task.assigned)
            self._after_state_change(task)
            self._tick()
            self._cond.notify_all()

    # --- simulated execution -------------------------------------------------

    def drain_simulated(self):
        """Run the event loop until every task is terminal (lock held by caller)."""
        while self._events:
            end, _, task = heapq.heappop(self._events)
            self._sim_now = max(self._sim_now, end)
            task.end = self._sim_now
            task.exit_code = 0
            self._trace.append((task.end, "end", task.job, task.iteration))
            task.status = CANCELED if task.cancel_requested else SUCCEEDED
            self._release(task.assigned)
            self._after_state_change(task)
            self._tick()

    # --- state cascade ----------------------------------------------------------

    def _after_state_change(self, task: Task):
        job = self._jobs[task.job]
        if task.status in BROKEN and not job.spec.parallel_iterations:
            for later in job.tasks[task.iteration + 1:]:
                if later.status == QUEUED:
                    later.status = OMITTED
        if job.terminal and job.status in BROKEN:
            self._omit_dependents(job.spec.name)

    def _omit_dependents(self, name: str):
        for other in self._jobs.values():
            if name in other.spec.after:
                changed = False
                for t in other.tasks:
                    if t.status == QUEUED:
                        t.status = OMITTED
                        changed = True
                if changed and other.terminal:
                    self._omit_dependents(other.spec.name)

    # --- operations -----------------------------------------------------------

    def cancel(self, name: str):
        """QUEUED tasks cancel immediately; EXECUTING ones get a grace signal."""
        with self._cond:
            job = self._jobs.get(name)
            if job is None:
                raise JobNotFound(f"no job named {name!r}")
            if job.terminal:
                raise AlreadyTerminal(f"job {name!r} is already terminal")
            executing: list[Task] = []
            for t in job.tasks:
                if t.status == QUEUED:
                    t.status = CANCELED
                    t.cancel_requested = True
                elif t.status == EXECUTING:
                    t.cancel_requested = True
                    executing.append(t)
            for t in executing:
                proc = self._procs.get((t.job, t.iteration))
                if proc is not None:
                    proc.terminate()
                    timer = threading.Timer(CANCEL_GRACE_SECONDS, self._force_kill, (proc,))
                    timer.daemon = True
                    timer.start()
            if job.terminal:
                self._omit_dependents(name)
            self._tick()
            self._cond.notify_all()

    @staticmethod
    def _force_kill(proc: subprocess.Popen):
        if proc.poll() is None:
            try:
                proc.send_signal(signal.SIGKILL)
            except OSError:
                pass

    def job_snapshot(self, name: str) -> dict:
        with self._cond:
            job = self._jobs.get(name)
            if job is None:
                raise JobNotFound(f"no job named {name!r}")
            return self._job_doc(job)

    def _job_doc(self, job: Job) -> dict:
        return {
            "name": job.spec.name,
            "status": job.status,
            "cores": job.spec.cores,
            "iterations": [
                {
                    "iteration": t.iteration,
                    "status": t.status,
                    "submit": t.submit,
                    "start": t.start,
                    "end": t.end,
                    "cores": t.cores,
                    "exit_code": t.exit_code,
                }
                for t in job.tasks
            ],
        }

    def status_snapshot(self) -> dict:
        with self._cond:
            counts: dict[str, int] = {}
            for job in self._jobs.values():
                counts[job.status] = counts.get(job.status, 0) + 1
            return {
                "jobs": len(self._jobs),
                "status_counts": counts,
                "total_cores": self.allocation.total_cores,
                "busy_cores": self._busy_cores,
                "free_cores": self.allocation.total_cores - self._busy_cores,
                "time": self.now(),
            }

    def resources_snapshot(self) -> dict:
        with self._cond:
            return {
                "mode": self.allocation.mode,
                "total_cores": self.allocation.total_cores,
                "free_cores": self.allocation.total_cores - self._busy_cores,
                "nodes": [
                    {"name": n, "cores": c, "free": self._free[n]}
                    for n, c in self.allocation.nodes
                ],
            }

    def dispatch_trace(self) -> list[tuple[float, str, str, int]]:
        """Chronological (time, event, job, iteration) start/end records."""
        with self._cond:
            return list(self._trace)

    def drain(self):
        """Stop accepting work and wait until every task is terminal."""
        with self._cond:
            self._accepting = False
            if self.clock == "simulated":
                self._tick()
                self.drain_simulated()
                return
            while not all(j.terminal for j in self._jobs.values()):
                self._cond.wait(timeout=0.5)

    def report(self) -> dict:
        """Makespan, overhead against the ideal bound, utilization trace."""
        with self._cond:
            records = []
            for name in sorted(self._jobs, key=self._order.get):
                records.append(self._job_doc(self._jobs[name]))
            executed = [
                t
                for job in self._jobs.values()
                for t in job.tasks
                if t.start is not None and t.end is not None
            ]
            if executed:
                t0 = min(t.start for t in executed)
                t1 = max(t.end for t in executed)
                makespan = t1 - t0
                core_seconds = sum(t.cores * (t.end - t.start) for t in executed)
                longest = max(t.end - t.start for t in executed)
                ideal = max(core_seconds / self.allocation.total_cores, longest)
                trace = self._utilization(executed, t0)
            else:
                makespan = 0.0
                ideal = 0.0
                trace = []
            return {
                "allocation": self.allocation.to_json(),
                "clock": self.clock,
                "makespan": makespan,
                "ideal_lower_bound": ideal,
                "overhead": makespan - ideal,
                "overhead_fraction": (makespan / ideal - 1.0) if ideal > 0 else 0.0,
                "utilization": trace,
                "jobs": records,
            }

    @staticmethod
    def _utilization(tasks, t0: float) -> list[list[float]]:
        events: list[tuple[float, int]] = []
        for t in tasks:
            events.append((t.start - t0, t.cores))
            events.append((t.end - t0, -t.cores))
        events.sort()
        trace: list[list[float]] = []
        busy = 0
        for when, delta in events:
            busy += delta
            if trace and abs(trace[-1][0] - when) < 1e-12:
                trace[-1][1] = busy
            else:
                trace.append([when, busy])
        return trace
