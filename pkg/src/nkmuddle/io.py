"""Reading experiment specs and writing result files."""

from __future__ import annotations

import csv
import json
from dataclasses import asdict
from pathlib import Path

from .experiments import AggregateStats, ExperimentResult, ExperimentSpec, SpecError

RECORD_COLUMNS = [
    "replication",
    "k",
    "algorithm",
    "landscape_seed",
    "best_fitness",
    "hamming",
    "evaluations",
    "steps",
    "termination",
]
TRACE_COLUMNS = [
    "replication",
    "k",
    "algorithm",
    "step",
    "proposal",
    "accepted",
    "current_fitness",
    "best_fitness",
]

RECORDS_FILE = "records.csv"
AGGREGATES_CSV = "aggregates.csv"
AGGREGATES_JSON = "aggregates.json"
METADATA_FILE = "metadata.json"
ORACLE_FILE = "oracle.json"
TRACES_FILE = "traces.csv"


def parse_spec(path: str | Path) -> ExperimentSpec:
    """Load a JSON experiment spec, filling defaults and rejecting unknown keys."""
    p = Path(path)
    if not p.is_file():
        raise SpecError(f"<file>: spec file not found: {p}")
    try:
        data = json.loads(p.read_text())
    except json.JSONDecodeError as exc:
        raise SpecError(f"<file>: malformed JSON in {p} (line {exc.lineno}, column {exc.colno}): {exc.msg}") from None
    return ExperimentSpec.from_dict(data)


def _fmt(value) -> str:
    if isinstance(value, float):
        return repr(value)
    return str(value)


def write_records(records, path: str | Path) -> None:
    normalized = bool(records) and all(r.normalized_fitness is not None for r in records)
    columns = RECORD_COLUMNS + (["normalized_fitness"] if normalized else [])
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(columns)
        for r in records:
            w.writerow([_fmt(getattr(r, c)) for c in columns])


def read_records(path: str | Path) -> list[dict]:
    with open(path, newline="") as fh:
        return list(csv.DictReader(fh))


def _aggregate_rows(aggregates: list[AggregateStats]) -> list[dict]:
    rows = [asdict(a) for a in aggregates]
    if all(r["normalized_fitness_mean"] is None for r in rows):
        for r in rows:
            del r["normalized_fitness_mean"], r["normalized_fitness_se"]
    return rows


def write_aggregates(aggregates, csv_path: str | Path, json_path: str | Path) -> None:
    rows = _aggregate_rows(aggregates)
    with open(csv_path, "w", newline="") as fh:
        if rows:
            w = csv.writer(fh, lineterminator="\n")
            w.writerow(list(rows[0]))
            for r in rows:
                w.writerow([_fmt(v) for v in r.values()])
    Path(json_path).write_text(json.dumps(rows, indent=1) + "\n")


def read_aggregates(path: str | Path) -> list[dict]:
    """Aggregates from either the CSV or the JSON file, numeric fields as numbers."""
    p = Path(path)
    if p.suffix == ".json":
        return json.loads(p.read_text())
    out = []
    with open(p, newline="") as fh:
        for row in csv.DictReader(fh):
            parsed = {}
            for key, v in row.items():
                if key == "algorithm":
                    parsed[key] = v
                elif key in ("k", "count"):
                    parsed[key] = int(v)
                else:
                    parsed[key] = None if v in ("", "None") else float(v)
            out.append(parsed)
    return out


def write_traces(traces, path: str | Path) -> None:
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(TRACE_COLUMNS)
        for row in traces:
            w.writerow([_fmt(v) for v in row])


def write_result(result: ExperimentResult, out_dir: str | Path, metadata: dict | None = None) -> list[Path]:
    """Write records, aggregates, metadata and any oracle/trace files; return the paths."""
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    paths = [out / RECORDS_FILE, out / AGGREGATES_CSV, out / AGGREGATES_JSON, out / METADATA_FILE]
    write_records(result.records, paths[0])
    write_aggregates(result.aggregates, paths[1], paths[2])
    meta = {"spec": result.spec.to_dict(), **(metadata or {})}
    paths[3].write_text(json.dumps(meta, indent=1) + "\n")
    if result.oracle:
        p = out / ORACLE_FILE
        reports = [
            {"replication": rep, "k": k, **rep_.to_dict()}
            for (rep, k), rep_ in sorted(result.oracle.items(), key=lambda kv: (kv[0][1], kv[0][0]))
        ]
        p.write_text(json.dumps(reports, indent=1) + "\n")
        paths.append(p)
    if result.traces:
        p = out / TRACES_FILE
        write_traces(result.traces, p)
        paths.append(p)
    return paths
