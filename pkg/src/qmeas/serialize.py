"""JSON and CSV encodings for measurements, reports and sweep tables.

Complex matrices are stored as nested row-major lists of [re, im] pairs.
CSV output uses '.' as the decimal separator, 12 significant digits for
floats and 0/1 for booleans; waveplate angles are fixed to 6 decimals.
"""

from __future__ import annotations

import json
from typing import Sequence

import numpy as np

from .bounds import BoundReport
from .errors import ConfigError
from .experiment import ExperimentResult
from .families import AngleRow, SweepRow
from .measurement import Measurement

__all__ = [
    "encode_matrix",
    "decode_matrix",
    "measurement_to_dict",
    "measurement_from_dict",
    "load_measurement",
    "dump_measurement",
    "fmt",
    "sweep_csv",
    "simulate_csv",
    "angles_csv",
    "report_csv",
]

SWEEP_FIELDS = (
    "t", "p", "G", "F", "R",
    "gap_global", "gap_GF", "gap_GR", "gap_FR",
    "sat_global", "sat_GF", "sat_GR", "sat_FR",
)


def encode_matrix(m: np.ndarray) -> list:
    m = np.asarray(m, dtype=complex)
    return [[[float(x.real), float(x.imag)] for x in row] for row in m]


def decode_matrix(data) -> np.ndarray:
    try:
        arr = np.asarray(data, dtype=float)
    except (TypeError, ValueError) as exc:
        raise ConfigError(f"malformed matrix data: {exc}") from exc
    if arr.ndim != 3 or arr.shape[2] != 2:
        raise ConfigError(f"matrix entries must be [re, im] pairs, got shape {arr.shape}")
    return arr[..., 0] + 1j * arr[..., 1]


def measurement_to_dict(m: Measurement) -> dict:
    return {"dim": m.dim, "kraus": [encode_matrix(op) for op in m.kraus]}


def measurement_from_dict(data: dict, tol: float = 1e-6) -> Measurement:
    """Parse {"dim": d, "kraus": [...]} with completeness tolerance ``tol``.

    The looser default tolerance accommodates matrices that went through
    decimal serialization.
    """
    if not isinstance(data, dict) or "dim" not in data or "kraus" not in data:
        raise ConfigError("measurement JSON needs 'dim' and 'kraus' keys")
    try:
        dim = int(data["dim"])
    except (TypeError, ValueError) as exc:
        raise ConfigError(f"bad 'dim' value: {data['dim']!r}") from exc
    kraus = data["kraus"]
    if not isinstance(kraus, list) or not kraus:
        raise ConfigError("'kraus' must be a non-empty list of matrices")
    ops = np.stack([decode_matrix(mat) for mat in kraus])
    if ops.shape[1:] != (dim, dim):
        raise ConfigError(
            f"operator shape {ops.shape[1:]} does not match declared dim {dim}"
        )
    return Measurement(ops, tol=tol)


def load_measurement(path, tol: float = 1e-6) -> Measurement:
    try:
        with open(path, "r", encoding="utf-8") as fh:
            data = json.load(fh)
    except OSError as exc:
        raise ConfigError(f"cannot read {path}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise ConfigError(f"invalid JSON in {path}: {exc}") from exc
    return measurement_from_dict(data, tol)


def dump_measurement(m: Measurement, path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(measurement_to_dict(m), fh, indent=2)
        fh.write("\n")


def fmt(x) -> str:
    """Format a float with 12 significant digits (CSV convention)."""
    return f"{float(x):.12g}"


def _report_values(report: BoundReport) -> list[str]:
    return [
        fmt(report.G), fmt(report.F), fmt(report.R),
        fmt(report.gap_global), fmt(report.gap_GF), fmt(report.gap_GR), fmt(report.gap_FR),
        str(int(report.sat_global)), str(int(report.sat_GF)),
        str(int(report.sat_GR)), str(int(report.sat_FR)),
    ]


def sweep_csv(rows: Sequence[SweepRow]) -> str:
    lines = [",".join(SWEEP_FIELDS)]
    for row in rows:
        lines.append(",".join([str(row.t), fmt(row.p)] + _report_values(row.report)))
    return "\n".join(lines) + "\n"


def simulate_csv(rows: Sequence[tuple[ExperimentResult, BoundReport]]) -> str:
    header = ",".join(SWEEP_FIELDS + ("sigma_G", "sigma_F", "sigma_R"))
    lines = [header]
    for result, report in rows:
        lines.append(
            ",".join(
                [str(result.t), fmt(result.p)]
                + _report_values(report)
                + [fmt(result.sigma_G), fmt(result.sigma_F), fmt(result.sigma_R)]
            )
        )
    return "\n".join(lines) + "\n"


def report_csv(report: BoundReport) -> str:
    header = ",".join(("dim",) + SWEEP_FIELDS[2:])
    return header + "\n" + ",".join([str(report.dim)] + _report_values(report)) + "\n"


def angles_csv(rows: Sequence[AngleRow]) -> str:
    if not rows:
        raise ConfigError("no angle rows to write")
    dim = len(rows[0].thetas)
    header = (
        ["outcome"]
        + [f"theta{i}_deg" for i in range(dim)]
        + [f"rev_theta{i}_deg" for i in range(dim)]
    )
    lines = [",".join(header)]
    for row in rows:
        lines.append(
            ",".join(
                [str(row.outcome)]
                + [f"{x:.6f}" for x in row.thetas]
                + [f"{x:.6f}" for x in row.reversal_thetas]
            )
        )
    return "\n".join(lines) + "\n"
