"""Output decoding: parse simulation output files into QoI vectors."""

from __future__ import annotations

import csv
import json
from pathlib import Path

from uqpilot.campaign.config import DecoderSpec
from uqpilot.errors import DecodeError


def decode_output(run_dir: str | Path, spec: DecoderSpec) -> tuple[list[float] | None, dict[str, list[float]]]:
    """Parse the run's output file.

    Returns (index, {qoi_name: values}). The index is None when the
    decoder declares no index column; otherwise it must be strictly
    increasing.
    """
    path = Path(run_dir) / spec.output_relpath
    if not path.is_file():
        raise DecodeError(f"output file {path} does not exist")
    if spec.format == "csv":
        rows = _read_csv(path)
    else:
        rows = _read_json_lines(path)

    wanted = list(spec.qoi_columns)
    if spec.index_column:
        wanted = [spec.index_column] + wanted
    columns: dict[str, list[float]] = {name: [] for name in wanted}
    for lineno, row in enumerate(rows, start=1):
        for name in wanted:
            if name not in row or row[name] in (None, ""):
                raise DecodeError(f"{path}: row {lineno} missing column {name!r}")
            try:
                columns[name].append(float(row[name]))
            except (TypeError, ValueError) as exc:
                raise DecodeError(
                    f"{path}: row {lineno} column {name!r}: unparsable value {row[name]!r}"
                ) from exc

    n_rows = len(columns[wanted[0]]) if wanted else 0
    if n_rows == 0:
        raise DecodeError(f"{path}: no data rows")

    index = None
    if spec.index_column:
        index = columns.pop(spec.index_column)
        for a, b in zip(index, index[1:]):
            if not b > a:
                raise DecodeError(
                    f"{path}: index column {spec.index_column!r} not strictly "
                    f"increasing ({a} then {b})"
                )
    return index, columns


def _read_csv(path: Path) -> list[dict]:
    with open(path, newline="") as fh:
        reader = csv.DictReader(fh)
        if reader.fieldnames is None:
            raise DecodeError(f"{path}: empty csv")
        return list(reader)


def _read_json_lines(path: Path) -> list[dict]:
    rows = []
    with open(path) as fh:
        for lineno, line in enumerate(fh, start=1):
            line = line.strip()
            if not line:
                continue
            try:
                row = json.loads(line)
            except json.JSONDecodeError as exc:
                raise DecodeError(f"{path}: line {lineno} is not valid JSON: {exc}") from exc
            if not isinstance(row, dict):
                raise DecodeError(f"{path}: line {lineno} is not a JSON object")
            rows.append(row)
    return rows
