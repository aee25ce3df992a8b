"""Persistencia de resultados: records.csv, summary.csv y plotdata.json."""

from __future__ import annotations

import csv
import dataclasses
import json
import logging
from pathlib import Path
from typing import Any, Sequence

from src.errors import ValidationError
from src.simulation.harness import RECORD_FLOAT_FIELDS, ResultRecord, SummaryRow

logger = logging.getLogger(__name__)

RECORDS_HEADER = "# tacts-records v2"
SUMMARY_HEADER = "# tacts-summary v2"
PLOTDATA_SCHEMA = "tacts-plotdata v2"

RECORD_COLUMNS = tuple(f.name for f in dataclasses.fields(ResultRecord))
SUMMARY_COLUMNS = tuple(f.name for f in dataclasses.fields(SummaryRow)) + ("missing",)
_INT_COLUMNS = {"repetition", "origin", "destination", "modality_count", "wall_clock_micros", "seed"}
_FLOAT_COLUMNS = set(RECORD_FLOAT_FIELDS)


def _cell(value: Any) -> str:
    if value is None:
        return ""
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, float):
        return f"{value:.6f}"
    return str(value)


def _round(value: float | None) -> float | None:
    return None if value is None else round(value, 6)


def _write_csv(path: Path, header: str, columns: Sequence[str], rows: list[list[str]]) -> None:
    try:
        with path.open("w", encoding="utf-8", newline="") as handle:
            handle.write(header + "\n")
            writer = csv.writer(handle, lineterminator="\n")
            writer.writerow(columns)
            writer.writerows(rows)
    except OSError as exc:
        raise OSError(exc.errno, f"No se pudo escribir {path}: {exc.strerror}", str(path)) from exc


def plot_series(records: Sequence[ResultRecord], summary: Sequence[SummaryRow]) -> dict[str, Any]:
    """Una serie por celda (algoritmo, red, congestion, f_c) para las figuras de comparacion."""
    series = []
    for row in summary:
        key = (row.algorithm, row.network, row.congestion, row.f_c)
        cell = [
            r
            for r in records
            if (r.algorithm, r.network, r.congestion, r.f_c) == key and not r.failed
        ]
        series.append(
            {
                "algorithm": row.algorithm,
                "network": row.network,
                "congestion": row.congestion,
                "f_c": row.f_c,
                "performance_ratios": [
                    _round(r.performance_ratio) for r in cell if r.performance_ratio is not None
                ],
                "mean_ratio": _round(row.mean_ratio),
                "std_ratio": _round(row.std_ratio),
                "mean_vehicle_time": _round(row.mean_vehicle_time),
                "exec_time_ratio": _round(row.exec_time_ratio),
            }
        )
    return {"schema": PLOTDATA_SCHEMA, "series": series}


def emit_results(
    records: Sequence[ResultRecord], summary: Sequence[SummaryRow], out_dir: str | Path
) -> list[Path]:
    """Escribe los tres artefactos del experimento y devuelve sus rutas."""
    out = Path(out_dir)
    try:
        out.mkdir(parents=True, exist_ok=True)
    except OSError as exc:
        raise OSError(exc.errno, f"No se pudo crear {out}: {exc.strerror}", str(out)) from exc

    records_path = out / "records.csv"
    _write_csv(
        records_path,
        RECORDS_HEADER,
        RECORD_COLUMNS,
        [[_cell(getattr(r, column)) for column in RECORD_COLUMNS] for r in records],
    )
    summary_path = out / "summary.csv"
    _write_csv(
        summary_path,
        SUMMARY_HEADER,
        SUMMARY_COLUMNS,
        [[_cell(getattr(row, column)) for column in SUMMARY_COLUMNS] for row in summary],
    )
    plot_path = out / "plotdata.json"
    try:
        plot_path.write_text(
            json.dumps(plot_series(records, summary), indent=2) + "\n",
            encoding="utf-8",
            newline="\n",
        )
    except OSError as exc:
        raise OSError(exc.errno, f"No se pudo escribir {plot_path}: {exc.strerror}", str(plot_path)) from exc
    logger.info("results written dir=%s records=%d cells=%d", out, len(records), len(summary))
    return [records_path, summary_path, plot_path]


def _parse(column: str, raw: str) -> Any:
    if raw == "":
        return None
    if column == "failed":
        return raw == "true"
    if column in _INT_COLUMNS:
        return int(raw)
    if column in _FLOAT_COLUMNS:
        return float(raw)
    return raw


def read_records(path: str | Path) -> list[ResultRecord]:
    """Lee un records.csv escrito por ``emit_results``."""
    with Path(path).open(encoding="utf-8", newline="") as handle:
        first = handle.readline().rstrip("\n")
        if first != RECORDS_HEADER:
            raise ValidationError(f"{path}: encabezado de version inesperado {first!r}.")
        reader = csv.DictReader(handle)
        if tuple(reader.fieldnames or ()) != RECORD_COLUMNS:
            raise ValidationError(f"{path}: columnas inesperadas.")
        return [
            ResultRecord(**{column: _parse(column, row[column]) for column in RECORD_COLUMNS})
            for row in reader
        ]
