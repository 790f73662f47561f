"""Tabular output: typed columns, config-echo metadata, CSV/JSON round trip.

Numbers are serialized with 12 significant digits, which sits below every
tolerance used by the checks and above round-trip noise.  CSV places the
header on the first row and appends the metadata block as a single
trailing comment line; JSON carries rows and metadata side by side.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field

from .errors import InputError

SIGNIFICANT_DIGITS = 12
_METADATA_PREFIX = "# metadata: "


def format_number(x) -> str:
    if isinstance(x, bool):
        return str(x)
    if isinstance(x, int):
        return str(x)
    if isinstance(x, float):
        return f"{x:.{SIGNIFICANT_DIGITS}g}"
    return str(x)


def normalize_value(x):
    """Collapse a float to its 12-significant-digit representative."""
    if isinstance(x, float):
        return float(f"{x:.{SIGNIFICANT_DIGITS}g}")
    return x


@dataclass
class OutputTable:
    """Header row, typed columns and a metadata block."""

    columns: list[str]
    rows: list[list] = field(default_factory=list)
    metadata: dict = field(default_factory=dict)

    def __post_init__(self):
        for i, row in enumerate(self.rows):
            if len(row) != len(self.columns):
                raise InputError(
                    f"row {i} has {len(row)} cells for {len(self.columns)} columns"
                )

    @classmethod
    def from_records(cls, records: list[dict], metadata: dict | None = None,
                     columns: list[str] | None = None) -> "OutputTable":
        if columns is None:
            if not records:
                raise InputError("cannot infer columns from an empty record list")
            columns = list(records[0].keys())
        rows = [[rec[c] for c in columns] for rec in records]
        return cls(columns=columns, rows=rows, metadata=dict(metadata or {}))

    def normalized(self) -> "OutputTable":
        rows = [[normalize_value(v) for v in row] for row in self.rows]
        return OutputTable(columns=list(self.columns), rows=rows,
                           metadata=dict(self.metadata))


def _render_csv(table: OutputTable) -> str:
    lines = [",".join(table.columns)]
    for row in table.rows:
        lines.append(",".join(format_number(v) for v in row))
    if table.metadata:
        lines.append(_METADATA_PREFIX + json.dumps(table.metadata, sort_keys=True))
    return "\n".join(lines) + "\n"


def _render_json(table: OutputTable) -> str:
    norm = table.normalized()
    payload = {
        "columns": norm.columns,
        "rows": [[v for v in row] for row in norm.rows],
        "metadata": norm.metadata,
    }
    return json.dumps(payload, sort_keys=True, indent=1) + "\n"


def emit(table: OutputTable, path: str, fmt: str = "csv") -> str:
    """Write the table; returns the path.  ``fmt`` is 'csv' or 'json'."""
    if fmt not in ("csv", "json"):
        raise InputError(f"format must be 'csv' or 'json', got {fmt!r}")
    text = _render_csv(table) if fmt == "csv" else _render_json(table)
    try:
        with open(path, "w", encoding="utf-8") as fh:
            fh.write(text)
    except OSError as exc:
        raise InputError(f"cannot write table to {path!r}: {exc}") from exc
    return path


def _parse_cell(text: str):
    try:
        return int(text)
    except ValueError:
        pass
    try:
        return float(text)
    except ValueError:
        return text


def read_table(path: str, fmt: str | None = None) -> OutputTable:
    """Parse a table previously written by :func:`emit`."""
    try:
        with open(path, "r", encoding="utf-8") as fh:
            text = fh.read()
    except OSError as exc:
        raise InputError(f"cannot read table from {path!r}: {exc}") from exc
    if fmt is None:
        fmt = "json" if text.lstrip().startswith("{") else "csv"
    if fmt == "json":
        payload = json.loads(text)
        return OutputTable(columns=payload["columns"], rows=payload["rows"],
                           metadata=payload.get("metadata", {}))
    lines = [ln for ln in text.splitlines() if ln.strip()]
    if not lines:
        raise InputError(f"no table content in {path!r}")
    metadata = {}
    body = []
    for ln in lines:
        if ln.startswith(_METADATA_PREFIX):
            metadata = json.loads(ln[len(_METADATA_PREFIX):])
        elif not ln.startswith("#"):
            body.append(ln)
    columns = body[0].split(",")
    rows = [[_parse_cell(cell) for cell in ln.split(",")] for ln in body[1:]]
    return OutputTable(columns=columns, rows=rows, metadata=metadata)
