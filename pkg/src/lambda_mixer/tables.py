"""CSV/JSON artifact writers and readers.

All floating-point values are printed with 17 significant digits so the
double-precision value round-trips bit-exactly; row order is fixed by
the producers, which makes identical configurations produce byte
identical artifacts.
"""
from __future__ import annotations

import csv
import io
import json
import math
from typing import Iterable, Sequence, TextIO

import numpy as np

from .analysis import SweepRow, relative_phase
from .errors import UndefinedPhase
from .levelsys import EigenResult
from .propagator import Trajectory

__all__ = [
    "format_float",
    "TRAJECTORY_COLUMNS",
    "SWEEP_COLUMNS",
    "trajectory_rows",
    "write_trajectory_csv",
    "read_trajectory_csv",
    "sweep_table_rows",
    "write_sweep_csv",
    "read_sweep_csv",
    "eigen_payload",
    "write_json",
]

TRAJECTORY_COLUMNS = [
    "zeta",
    "om1_re", "om1_im", "om2_re", "om2_im",
    "e1_re", "e1_im", "e2_re", "e2_im",
    "I_om1", "I_om2", "I_e1", "I_e2",
    "phi", "c1", "c2", "c3", "c4", "lambda0",
]

SWEEP_COLUMNS = [
    "epsilon", "model", "phase_terms",
    "L_measured", "e_measured", "L_analytic", "e_analytic",
    "validity_flag",
]


def format_float(x: float) -> str:
    if math.isnan(x):
        return "nan"
    return f"{x:.17g}"


def trajectory_rows(traj: Trajectory) -> list[list[float]]:
    rows = []
    for s in traj.samples:
        st = s.state
        try:
            phi = relative_phase(st)
        except UndefinedPhase:
            phi = math.nan
        rows.append([
            s.zeta,
            st.omega1.real, st.omega1.imag,
            st.omega2.real, st.omega2.imag,
            st.e1.real, st.e1.imag,
            st.e2.real, st.e2.imag,
            abs(st.omega1) ** 2, abs(st.omega2) ** 2,
            abs(st.e1) ** 2, abs(st.e2) ** 2,
            phi,
            s.invariants.c1, s.invariants.c2, s.invariants.c3, s.invariants.c4,
            s.lambda0,
        ])
    return rows


def _write_csv(stream: TextIO, header: Sequence[str], rows: Iterable[Sequence]) -> None:
    writer = csv.writer(stream, lineterminator="\n")
    writer.writerow(header)
    for row in rows:
        writer.writerow(
            [format_float(v) if isinstance(v, float) else str(v) for v in row]
        )


def write_trajectory_csv(traj: Trajectory, path: str) -> None:
    with open(path, "w", encoding="utf-8", newline="") as fh:
        _write_csv(fh, TRAJECTORY_COLUMNS, trajectory_rows(traj))


def read_trajectory_csv(path: str) -> dict[str, np.ndarray]:
    with open(path, encoding="utf-8", newline="") as fh:
        reader = csv.reader(fh)
        header = next(reader)
        if header != TRAJECTORY_COLUMNS:
            raise ValueError(f"unexpected trajectory header: {header}")
        data = [[float(v) for v in row] for row in reader]
    arr = np.array(data, dtype=float)
    return {name: arr[:, i] for i, name in enumerate(TRAJECTORY_COLUMNS)}


def sweep_table_rows(rows: Iterable[SweepRow]) -> list[list]:
    return [
        [
            r.epsilon, r.model, r.phase_terms,
            r.length_measured, r.efficiency_measured,
            r.length_analytic, r.efficiency_analytic,
            r.validity_flag,
        ]
        for r in rows
    ]


def write_sweep_csv(rows: Iterable[SweepRow], path: str) -> None:
    with open(path, "w", encoding="utf-8", newline="") as fh:
        _write_csv(fh, SWEEP_COLUMNS, sweep_table_rows(rows))


def read_sweep_csv(path: str) -> list[SweepRow]:
    with open(path, encoding="utf-8", newline="") as fh:
        reader = csv.reader(fh)
        header = next(reader)
        if header != SWEEP_COLUMNS:
            raise ValueError(f"unexpected sweep header: {header}")
        out = []
        for row in reader:
            out.append(SweepRow(
                epsilon=float(row[0]),
                model=row[1],
                phase_terms=row[2],
                length_measured=float(row[3]),
                efficiency_measured=float(row[4]),
                length_analytic=float(row[5]),
                efficiency_analytic=float(row[6]),
                validity_flag=row[7],
            ))
    return out


def eigen_payload(results: Sequence[EigenResult]) -> list[dict]:
    """JSON-ready spectrum: value, eigenvector as re/im arrays, residual."""
    return [
        {
            "value_re": r.value.real,
            "value_im": r.value.imag,
            "vector_re": [float(v.real) for v in r.vector],
            "vector_im": [float(v.imag) for v in r.vector],
            "residual": r.residual,
        }
        for r in results
    ]


def write_json(payload, path: str) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(payload, fh, indent=2, sort_keys=True)
        fh.write("\n")


def csv_text(header: Sequence[str], rows: Iterable[Sequence]) -> str:
    buf = io.StringIO()
    _write_csv(buf, header, rows)
    return buf.getvalue()
