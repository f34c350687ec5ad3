"""Parametric qutrit measurement families and waveplate angle compilation.

Five one-parameter families of diagonal qutrit measurements are built in.
Families 0..3 have three outcomes whose singular values follow a cyclic
pattern: outcome r places the j-th entry of a p-dependent triple at
diagonal position (r + j) mod 3, so completeness is automatic. Family 4
has two outcomes

    M_0 = diag(1, sqrt(1-p), 1),   M_1 = diag(0, sqrt(p), 0)

and is the only one that keeps a finite distance from the global trade-off
bound for p > 0.

Each diagonal entry is realizable as the transmittance cos(2 theta) of a
half-wave-plate-style attenuator, which is what ``compile_angles`` emits.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .bounds import BoundReport, bound_report
from .errors import ConfigError, NotRealizableError
from .linalg import ZERO_TOL
from .measurement import InfoTriple, Measurement

__all__ = [
    "FamilySpec",
    "SweepRow",
    "AngleRow",
    "FAMILY_IDS",
    "family_domain",
    "family",
    "closed_form_triple",
    "default_grid",
    "sweep",
    "compile_angles",
    "operators_from_angles",
    "load_family_table",
]

FAMILY_IDS = (0, 1, 2, 3, 4)
DEFAULT_GRID_POINTS = 101
DIM = 3

# Realizability tolerance for compile_angles: off-diagonal leakage and
# imaginary parts beyond this are rejected rather than silently dropped.
REALIZABLE_TOL = 1e-9


@dataclass(frozen=True)
class FamilySpec:
    """Cyclic diagonal family given by polynomial singular-value entries.

    ``components`` holds ascending polynomial coefficients in p for each of
    the three entries. ``space`` says whether the polynomials produce the
    singular values themselves ("lambda") or their squares ("lambda2");
    with ``normalize`` the value vector is rescaled to unit 2-norm in
    lambda space, which enforces completeness for cyclic assignment.
    """

    space: str
    normalize: bool
    domain: tuple[float, float]
    components: tuple[tuple[float, ...], ...]


_BUILTIN_TABLE: dict[int, FamilySpec] = {
    0: FamilySpec(
        space="lambda2",
        normalize=False,
        domain=(0.0, 1.0),
        components=((1 / 3, 2 / 3), (1 / 3, -1 / 3), (1 / 3, -1 / 3)),
    ),
    1: FamilySpec(
        space="lambda",
        normalize=True,
        domain=(0.0, 1.0),
        components=((1.0,), (1.0, -0.5), (1.0, -1.0)),
    ),
    2: FamilySpec(
        space="lambda2",
        normalize=False,
        domain=(1 / 3, 2 / 3),
        components=((0.0, 1.0), (1 / 3,), (2 / 3, -1.0)),
    ),
    3: FamilySpec(
        space="lambda",
        normalize=True,
        domain=(0.0, 1.0),
        components=((1.0,), (1.0, 0.0, -1.0), (1.0, -2.0, 1.0)),
    ),
}


def load_family_table(path) -> dict[int, FamilySpec]:
    """Load replacement specs for the cyclic families (ids 0..3) from JSON.

    The file maps family id to an object with keys ``space``, ``normalize``,
    ``domain`` and ``components`` mirroring FamilySpec. Family 4 is fixed.
    """
    with open(path, "r", encoding="utf-8") as fh:
        raw = json.load(fh)
    table = {}
    for key, entry in raw.items():
        t = int(key)
        if t not in (0, 1, 2, 3):
            raise ConfigError(f"family table may only override ids 0..3, got {t}")
        try:
            spec = FamilySpec(
                space=str(entry["space"]),
                normalize=bool(entry["normalize"]),
                domain=(float(entry["domain"][0]), float(entry["domain"][1])),
                components=tuple(tuple(float(c) for c in comp) for comp in entry["components"]),
            )
        except (KeyError, TypeError, ValueError) as exc:
            raise ConfigError(f"malformed family table entry for id {t}: {exc}") from exc
        if spec.space not in ("lambda", "lambda2"):
            raise ConfigError(f"family {t}: space must be 'lambda' or 'lambda2'")
        if len(spec.components) != DIM:
            raise ConfigError(f"family {t}: expected {DIM} component polynomials")
        table[t] = spec
    return table


def family_domain(t: int, table: dict[int, FamilySpec] | None = None) -> tuple[float, float]:
    """Closed parameter interval of family ``t``."""
    if t == 4:
        return (0.0, 1.0)
    spec = _spec_for(t, table)
    return spec.domain


def _spec_for(t: int, table: dict[int, FamilySpec] | None) -> FamilySpec:
    if t not in (0, 1, 2, 3):
        raise ConfigError(f"unknown family id {t}; valid ids are 0..4")
    if table and t in table:
        return table[t]
    return _BUILTIN_TABLE[t]


def _check_domain(t: int, p: float, lo: float, hi: float) -> None:
    if not (lo <= p <= hi):
        raise ConfigError(f"family {t}: parameter p={p:.6g} outside domain [{lo:.6g}, {hi:.6g}]")


def _lambda_triple(spec: FamilySpec, p: float) -> np.ndarray:
    vals = np.array([np.polynomial.polynomial.polyval(p, c) for c in spec.components])
    if spec.space == "lambda2":
        lam = np.sqrt(np.clip(vals, 0.0, None))
    else:
        lam = vals
    if np.any(lam < -1e-12):
        raise ConfigError(f"family entry went negative at p={p:.6g}")
    lam = np.clip(lam, 0.0, None)
    if spec.normalize:
        lam = lam / np.linalg.norm(lam)
    return lam


def family(t: int, p: float, table: dict[int, FamilySpec] | None = None) -> Measurement:
    """Construct the family-``t`` measurement at parameter ``p``."""
    if t == 4:
        _check_domain(t, p, 0.0, 1.0)
        m0 = np.diag([1.0, np.sqrt(1.0 - p), 1.0]).astype(complex)
        m1 = np.diag([0.0, np.sqrt(p), 0.0]).astype(complex)
        return Measurement(np.array([m0, m1]))
    spec = _spec_for(t, table)
    _check_domain(t, p, *spec.domain)
    lam = _lambda_triple(spec, p)
    ops = np.zeros((DIM, DIM, DIM), dtype=complex)
    for r in range(DIM):
        for j in range(DIM):
            ops[r, (r + j) % DIM, (r + j) % DIM] = lam[j]
    return Measurement(ops)


def closed_form_triple(
    t: int, p: float, table: dict[int, FamilySpec] | None = None
) -> InfoTriple:
    """Analytic (G, F, R) of family ``t`` at ``p``, bypassing the operators."""
    if t == 4:
        _check_domain(t, p, 0.0, 1.0)
        return InfoTriple(
            G=(4.0 + p) / 12.0,
            F=(2.0 + np.sqrt(1.0 - p)) / 3.0,
            R=1.0 - p,
        )
    spec = _spec_for(t, table)
    _check_domain(t, p, *spec.domain)
    lam = _lambda_triple(spec, p)
    # one copy of the triple per outcome, cyclically placed
    g = (DIM + DIM * lam.max() ** 2) / (DIM * (DIM + 1))
    f = (DIM + DIM * lam.sum() ** 2) / (DIM * (DIM + 1))
    r = DIM * lam.min() ** 2
    return InfoTriple(float(g), float(f), float(r))


def default_grid(t: int, table: dict[int, FamilySpec] | None = None) -> np.ndarray:
    lo, hi = family_domain(t, table)
    return np.linspace(lo, hi, DEFAULT_GRID_POINTS)


@dataclass(frozen=True)
class SweepRow:
    t: int
    p: float
    report: BoundReport


def sweep(
    t: int,
    grid: Sequence[float] | None = None,
    table: dict[int, FamilySpec] | None = None,
) -> list[SweepRow]:
    """Evaluate the closed-form triple and all bound gaps over a parameter grid.

    The default grid is 101 uniform points over the family domain. Rows use
    the analytic closed forms; agreement with the operator-level values is a
    test-suite concern, not a runtime one.
    """
    if grid is None:
        grid = default_grid(t, table)
    rows = []
    for p in np.asarray(grid, dtype=float):
        triple = closed_form_triple(t, float(p), table)
        rows.append(SweepRow(t=t, p=float(p), report=bound_report(triple, DIM)))
    return rows


@dataclass(frozen=True)
class AngleRow:
    """Waveplate angles (degrees) realizing one outcome and its reversal."""

    outcome: int
    thetas: tuple[float, ...]
    reversal_thetas: tuple[float, ...]


def compile_angles(measurement) -> list[AngleRow]:
    """Compile a diagonal measurement into waveplate angles.

    Every Kraus operator must be diagonal with entries in [0, 1] after
    removing one global phase per operator; anything else raises
    NotRealizableError. Entry lambda maps to theta = arccos(lambda) / 2 in
    degrees. Reversal angles realize lmin / lambda_i per entry; outcomes
    with lmin = 0 are not reversible and get 45 degrees everywhere (full
    extinction).
    """
    m = measurement if isinstance(measurement, Measurement) else Measurement(measurement)
    rows = []
    for r, op in enumerate(m.kraus):
        diag = np.diag(op)
        k = int(np.argmax(np.abs(diag)))
        if np.abs(diag[k]) > 0:
            op = op / (diag[k] / np.abs(diag[k]))
        off = op - np.diag(np.diag(op))
        if np.abs(off).max() > REALIZABLE_TOL:
            raise NotRealizableError(
                f"outcome {r}: off-diagonal entries up to {np.abs(off).max():.3g}"
            )
        vals = np.diag(op)
        if np.abs(vals.imag).max() > REALIZABLE_TOL:
            raise NotRealizableError(f"outcome {r}: complex diagonal entries remain")
        v = vals.real
        if v.min() < -REALIZABLE_TOL or v.max() > 1.0 + REALIZABLE_TOL:
            raise NotRealizableError(
                f"outcome {r}: diagonal entries outside [0, 1]: {np.array2string(v, precision=6)}"
            )
        v = np.clip(v, 0.0, 1.0)
        thetas = np.degrees(np.arccos(v)) / 2.0
        lmin = float(v.min())
        if lmin <= ZERO_TOL:
            rev = np.full(m.dim, 45.0)
        else:
            rev = np.degrees(np.arccos(lmin / v)) / 2.0
        rows.append(AngleRow(r, tuple(float(x) for x in thetas), tuple(float(x) for x in rev)))
    return rows


def operators_from_angles(rows: Sequence[AngleRow], dim: int = DIM) -> np.ndarray:
    """Rebuild the diagonal Kraus stack from compiled angles (inverse map)."""
    ops = np.zeros((len(rows), dim, dim), dtype=complex)
    for i, row in enumerate(rows):
        if len(row.thetas) != dim:
            raise ConfigError(f"angle row {i} has {len(row.thetas)} entries, expected {dim}")
        np.fill_diagonal(ops[i], np.cos(2.0 * np.radians(row.thetas)))
    return ops
