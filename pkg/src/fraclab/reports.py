"""Bit-stable report serialization.

JSON documents use a fixed field order (experiment, params, results,
verdicts, runtime_seconds) and 17-significant-digit decimal floats, so
identical reports serialize to identical bytes. The CSV flattening emits
one row per result record; verdicts live in the JSON document and on the
console.
"""

from __future__ import annotations

import csv
import io
import json

from .errors import FraclabError
from .experiments import ExperimentReport

_FLOAT_FMT = ".17g"


def _format_float(x: float) -> str:
    if x != x:  # NaN
        return '"nan"'
    if x == float("inf"):
        return '"inf"'
    if x == float("-inf"):
        return '"-inf"'
    return format(x, _FLOAT_FMT)


def _json_scalar(value) -> str:
    if value is None:
        return "null"
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, int):
        return str(value)
    if isinstance(value, float):
        return _format_float(value)
    if isinstance(value, str):
        return json.dumps(value, ensure_ascii=False)
    raise FraclabError(f"cannot serialize value of type {type(value).__name__}")


def _json_value(value, indent: int) -> str:
    pad = "  " * indent
    inner = "  " * (indent + 1)
    if isinstance(value, dict):
        if not value:
            return "{}"
        parts = [
            f"{inner}{json.dumps(str(k))}: {_json_value(v, indent + 1)}"
            for k, v in value.items()
        ]
        return "{\n" + ",\n".join(parts) + f"\n{pad}}}"
    if isinstance(value, (list, tuple)):
        if not value:
            return "[]"
        parts = [f"{inner}{_json_value(v, indent + 1)}" for v in value]
        return "[\n" + ",\n".join(parts) + f"\n{pad}]"
    return _json_scalar(value)


def _record_dict(record) -> dict:
    return {
        "quantity": record.quantity,
        "spectral_value": record.spectral_value,
        "kernel_value": record.kernel_value,
        "discrepancy": record.discrepancy,
        "spectral_error": record.spectral_error,
        "kernel_error": record.kernel_error,
    }


def _verdict_dict(verdict) -> dict:
    return {
        "claim": verdict.claim,
        "status": verdict.status,
        "detail": verdict.detail,
    }


def report_to_json(report: ExperimentReport) -> str:
    doc = {
        "experiment": report.experiment,
        "params": dict(report.params),
        "results": [_record_dict(r) for r in report.results],
        "verdicts": [_verdict_dict(v) for v in report.verdicts],
        "runtime_seconds": float(report.runtime_seconds),
    }
    return _json_value(doc, 0) + "\n"


_CSV_HEADER = (
    "experiment",
    "quantity",
    "spectral_value",
    "kernel_value",
    "discrepancy",
    "spectral_error",
    "kernel_error",
)


def _csv_cell(value) -> str:
    if value is None:
        return ""
    if isinstance(value, float):
        return format(value, _FLOAT_FMT)
    return str(value)


def report_to_csv(report: ExperimentReport) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(_CSV_HEADER)
    for r in report.results:
        writer.writerow(
            [
                report.experiment,
                r.quantity,
                _csv_cell(r.spectral_value),
                _csv_cell(r.kernel_value),
                _csv_cell(r.discrepancy),
                _csv_cell(r.spectral_error),
                _csv_cell(r.kernel_error),
            ]
        )
    return buf.getvalue()


def write_report(report: ExperimentReport, path, fmt: str = "json") -> None:
    if fmt not in ("json", "csv"):
        raise FraclabError(f"unknown report format {fmt!r}")
    text = report_to_json(report) if fmt == "json" else report_to_csv(report)
    try:
        with open(path, "w", encoding="utf-8") as fh:
            fh.write(text)
    except OSError as exc:
        raise FraclabError(f"cannot write report to {path}: {exc}") from exc
