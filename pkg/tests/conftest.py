import json
from pathlib import Path

import pytest

REPO_ROOT = Path(__file__).resolve().parent.parent
DEMO_CONFIG = REPO_ROOT / "demo" / "covid-demo" / "config.json"

_terminal = None


def pytest_configure(config):
    global _terminal
    _terminal = config.pluginmanager.get_plugin("terminalreporter")


def pytest_runtest_logreport(report):
    """One visible pass/fail line per acceptance criterion."""
    if report.when != "call" or "test_acceptance.py" not in report.nodeid:
        return
    if _terminal is None:
        return
    name = report.nodeid.split("::")[-1]
    outcome = "PASS" if report.passed else ("SKIP" if report.skipped else "FAIL")
    _terminal.write_line(f"[acceptance] {name}: {outcome}")


@pytest.fixture
def demo_config_path(tmp_path) -> Path:
    """Copy of the covid-demo config rooted in a temp dir."""
    doc = json.loads(DEMO_CONFIG.read_text())
    template = (DEMO_CONFIG.parent / doc["app"]["template"]).read_text()
    (tmp_path / "input.template").write_text(template)
    doc["app"]["template"] = "input.template"
    path = tmp_path / "config.json"
    path.write_text(json.dumps(doc))
    return path


def write_config(
    tmp_path: Path,
    parameters: list[dict],
    template: str,
    command: list[str],
    decoder: dict | None = None,
    name: str = "test-campaign",
    delimiter: str = "$",
    target: str = "input.json",
) -> Path:
    """Write a minimal campaign config + template into tmp_path."""
    (tmp_path / "input.template").write_text(template)
    doc = {
        "schema_version": 1,
        "name": name,
        "app": {
            "template": "input.template",
            "delimiter": delimiter,
            "target": target,
            "command": command,
            "decoder": decoder
            or {
                "output_relpath": "out.csv",
                "format": "csv",
                "qoi_columns": ["y"],
                "index_column": "t",
            },
        },
        "parameters": parameters,
    }
    path = tmp_path / "config.json"
    path.write_text(json.dumps(doc))
    return path


def uniform_param(name: str, lo: float, hi: float, default: float | None = None) -> dict:
    return {
        "name": name,
        "kind": "real",
        "default": (lo + hi) / 2 if default is None else default,
        "distribution": {"type": "uniform", "args": [lo, hi]},
    }
