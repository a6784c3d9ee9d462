"""
Table Emitter - JSON, CSV and LaTeX renderings of command results
"""

import csv
import io
import json
import logging
from datetime import datetime, timezone
from typing import Any, Dict, List, Mapping, Sequence

logger = logging.getLogger(__name__)

FORMATS = ("json", "csv", "latex")


def envelope(command: str, params: Mapping[str, Any], result: Any) -> Dict[str, Any]:
    """The {"command", "params", "result", "timestamp"} payload; only the timestamp varies between runs"""
    return {
        "command": command,
        "params": dict(params),
        "result": result,
        "timestamp": datetime.now(timezone.utc).isoformat(timespec="seconds"),
    }


def strip_timestamp(payload: Mapping[str, Any]) -> Dict[str, Any]:
    return {k: v for k, v in payload.items() if k != "timestamp"}


def rows_of(result: Any) -> List[Dict[str, Any]]:
    """Flatten a result into table rows: lists of dicts pass through, dicts of scalars become one row"""
    if isinstance(result, list):
        if all(isinstance(r, dict) for r in result):
            return [_flatten(r) for r in result]
        return [{"index": i, "value": v} for i, v in enumerate(result)]
    if isinstance(result, dict):
        for key in ("rows", "entries", "records", "groups"):
            if isinstance(result.get(key), list):
                return rows_of(result[key])
        return [_flatten(result)]
    return [{"value": result}]


def _flatten(row: Mapping[str, Any], prefix: str = "") -> Dict[str, Any]:
    out: Dict[str, Any] = {}
    for key, value in row.items():
        name = f"{prefix}{key}"
        if isinstance(value, dict):
            out.update(_flatten(value, f"{name}."))
        elif isinstance(value, list):
            out[name] = " ".join(str(v) for v in value)
        else:
            out[name] = value
    return out


def _columns(rows: Sequence[Mapping[str, Any]]) -> List[str]:
    columns: List[str] = []
    for row in rows:
        for key in row:
            if key not in columns:
                columns.append(key)
    return columns


def to_json(payload: Mapping[str, Any]) -> str:
    return json.dumps(payload, sort_keys=True, indent=2, ensure_ascii=False)


def to_csv(payload: Mapping[str, Any]) -> str:
    rows = rows_of(payload.get("result"))
    buffer = io.StringIO()
    writer = csv.DictWriter(buffer, fieldnames=_columns(rows), lineterminator="\n")
    writer.writeheader()
    writer.writerows(rows)
    return buffer.getvalue()


def _latex_cell(value: Any) -> str:
    text = "" if value is None else str(value)
    for char, escaped in (("\\", r"\textbackslash{}"), ("_", r"\_"), ("&", r"\&"), ("%", r"\%"), ("#", r"\#")):
        text = text.replace(char, escaped)
    return text


def to_latex(payload: Mapping[str, Any]) -> str:
    rows = rows_of(payload.get("result"))
    columns = _columns(rows)
    lines = [
        f"% {payload.get('command', '')} {json.dumps(payload.get('params', {}), sort_keys=True)}",
        r"\begin{tabular}{" + "r" * max(len(columns), 1) + "}",
        r"\hline",
        " & ".join(_latex_cell(c) for c in columns) + r" \\",
        r"\hline",
    ]
    for row in rows:
        lines.append(" & ".join(_latex_cell(row.get(c)) for c in columns) + r" \\")
    lines += [r"\hline", r"\end{tabular}"]
    return "\n".join(lines) + "\n"


def emit(payload: Mapping[str, Any], fmt: str = "json") -> str:
    if fmt == "json":
        return to_json(payload) + "\n"
    if fmt == "csv":
        return to_csv(payload)
    if fmt == "latex":
        return to_latex(payload)
    raise ValueError(f"unknown output format {fmt!r}; choose from {', '.join(FORMATS)}")
