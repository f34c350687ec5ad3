"""Trade-off bounds between information gain, fidelity and reversibility.

For any d-dimensional measurement the triple (G, F, R) obeys one global
inequality and three pairwise ones:

    global: sqrt(F - 1/(d+1)) <= sqrt(G - 1/(d+1)) + sqrt(R / (d (d+1)))
            + sqrt((d - 2) (2/(d+1) - G - R / (d (d+1))))
    G-F:    sqrt(F - 1/(d+1)) <= sqrt(G - 1/(d+1)) + sqrt((d-1) (2/(d+1) - G))
    G-R:    d (d+1) G + (d-1) R <= 2 d
    F-R:    2 <= (d+1) F - (d-1) R

Gaps are reported as (bound side) - (bounded side), so a valid triple has
all gaps >= 0 and a saturating one has gap = 0.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import ConfigError, InfeasibleTripleError
from .measurement import InfoTriple, Measurement, info_triple

__all__ = [
    "BoundReport",
    "SaturationFlags",
    "global_gap",
    "pairwise_gaps",
    "bound_report",
    "classify_saturation",
]

SATURATION_TOL = 1e-9


def _sqrt_clipped(x, clamp: float, what: str, floor: bool):
    """sqrt with a small negative tolerance window.

    Radicands in [-clamp, 0) are rounded up to 0. More negative values mean
    the triple is outside the reachable region; that raises unless ``floor``
    is set (used when evaluating noisy measured triples).
    """
    x = np.asarray(x, dtype=float)
    if not floor and np.any(x < -clamp):
        raise InfeasibleTripleError(
            f"{what} radicand is negative beyond tolerance (min {x.min():.3g})"
        )
    return np.sqrt(np.clip(x, 0.0, None))


def _unpack(triple):
    g, f, r = triple
    return np.asarray(g, dtype=float), np.asarray(f, dtype=float), np.asarray(r, dtype=float)


def _maybe_float(x):
    return float(x) if np.ndim(x) == 0 else x


def global_gap(triple, dim: int, *, clamp: float = 1e-9, floor: bool = False):
    """Slack in the global trade-off inequality; >= 0 for valid triples.

    Accepts scalars or broadcastable arrays in the triple. With ``floor``
    set, infeasible radicands are clipped to zero instead of raising, which
    is the right behaviour for statistically scattered measured triples.
    """
    if dim < 2:
        raise ConfigError(f"dimension must be >= 2, got {dim}")
    g, f, r = _unpack(triple)
    lhs = _sqrt_clipped(f - 1.0 / (dim + 1), clamp, "fidelity", floor)
    t1 = _sqrt_clipped(g - 1.0 / (dim + 1), clamp, "gain", floor)
    t2 = _sqrt_clipped(r / (dim * (dim + 1)), clamp, "reversibility", floor)
    t3 = _sqrt_clipped(
        (dim - 2) * (2.0 / (dim + 1) - g - r / (dim * (dim + 1))),
        clamp,
        "global",
        floor,
    )
    return _maybe_float(t1 + t2 + t3 - lhs)


def pairwise_gaps(triple, dim: int, *, clamp: float = 1e-9, floor: bool = False):
    """Slacks (gap_GF, gap_GR, gap_FR) of the three pairwise bounds."""
    if dim < 2:
        raise ConfigError(f"dimension must be >= 2, got {dim}")
    g, f, r = _unpack(triple)
    lhs = _sqrt_clipped(f - 1.0 / (dim + 1), clamp, "fidelity", floor)
    gf = (
        _sqrt_clipped(g - 1.0 / (dim + 1), clamp, "gain", floor)
        + _sqrt_clipped((dim - 1) * (2.0 / (dim + 1) - g), clamp, "gain-fidelity", floor)
        - lhs
    )
    gr = 2.0 * dim - dim * (dim + 1) * g - (dim - 1) * r
    fr = (dim + 1) * f - (dim - 1) * r - 2.0
    return _maybe_float(gf), _maybe_float(gr), _maybe_float(fr)


@dataclass(frozen=True)
class SaturationFlags:
    sat_global: bool
    sat_GF: bool
    sat_GR: bool
    sat_FR: bool


@dataclass(frozen=True)
class BoundReport:
    """Numeric gap evaluation of all four bounds for one triple.

    Saturation flags are numeric: |gap| <= 1e-9.
    """

    dim: int
    G: float
    F: float
    R: float
    gap_global: float
    gap_GF: float
    gap_GR: float
    gap_FR: float
    sat_global: bool
    sat_GF: bool
    sat_GR: bool
    sat_FR: bool

    def to_dict(self) -> dict:
        return {
            "dim": self.dim,
            "G": self.G,
            "F": self.F,
            "R": self.R,
            "gap_global": self.gap_global,
            "gap_GF": self.gap_GF,
            "gap_GR": self.gap_GR,
            "gap_FR": self.gap_FR,
            "sat_global": self.sat_global,
            "sat_GF": self.sat_GF,
            "sat_GR": self.sat_GR,
            "sat_FR": self.sat_FR,
        }


def bound_report(source, dim: int | None = None, *, floor: bool = False) -> BoundReport:
    """Build a BoundReport from a measurement or an explicit triple.

    When ``source`` is a triple, ``dim`` is required.
    """
    if isinstance(source, (InfoTriple, tuple, list)) and len(source) == 3:
        if dim is None:
            raise ConfigError("dim is required when reporting on a bare triple")
        triple = InfoTriple(*(float(x) for x in source))
    else:
        triple = info_triple(source)
        dim = source.dim if dim is None else dim
    gg = global_gap(triple, dim, floor=floor)
    gf, gr, fr = pairwise_gaps(triple, dim, floor=floor)
    return BoundReport(
        dim=dim,
        G=triple.G,
        F=triple.F,
        R=triple.R,
        gap_global=gg,
        gap_GF=gf,
        gap_GR=gr,
        gap_FR=fr,
        sat_global=abs(gg) <= SATURATION_TOL,
        sat_GF=abs(gf) <= SATURATION_TOL,
        sat_GR=abs(gr) <= SATURATION_TOL,
        sat_FR=abs(fr) <= SATURATION_TOL,
    )


def classify_saturation(measurement, tol: float = SATURATION_TOL) -> SaturationFlags:
    """Structural saturation conditions read off the Kraus operators.

    Collect the singular values into vectors v_i = (l_{0,i}, ..., l_{N,i}),
    one per size rank i (descending within each outcome, v_1 largest). Then:

      global: all v_i collinear and |v_2| = ... = |v_{d-1}|
      G-F:    all v_i collinear and |v_2| = ... = |v_d|
      G-R:    every M_r^dag M_r has its d-1 smallest eigenvalues equal
              (i.e. a_r |i><i| + b_r 1 with a_r, b_r >= 0)
      F-R:    every outcome is proportional to a unitary or has rank <= 1
              (covers von Neumann projections and unitary evolutions)

    Flags imply the corresponding numeric gap vanishes within tolerance.
    """
    m = measurement if isinstance(measurement, Measurement) else Measurement(measurement)
    svals = m.singular_values  # (K, d), descending rows
    d = m.dim
    s_matrix = svals.T  # rows are the v_i
    sv = np.linalg.svd(s_matrix, compute_uv=False)
    collinear = bool(sv[1] <= tol) if sv.shape[0] > 1 else True
    norms = np.linalg.norm(s_matrix, axis=1)

    def norms_equal(idx: slice) -> bool:
        chunk = norms[idx]
        return bool(chunk.size <= 1 or chunk.max() - chunk.min() <= tol)

    sat_global = collinear and norms_equal(slice(1, d - 1))
    sat_gf = collinear and norms_equal(slice(1, d))

    squared = svals**2
    # descending rows: the d-1 smallest eigenvalues are columns 1..d-1
    tails = squared[:, 1:]
    sat_gr = bool((tails.max(axis=1) - tails.min(axis=1) <= tol).all())

    unitary_like = svals[:, 0] - svals[:, -1] <= tol
    rank_one = svals[:, 1] <= tol if d > 1 else np.ones(m.n_outcomes, bool)
    sat_fr = bool(np.all(unitary_like | rank_one))

    return SaturationFlags(sat_global, sat_gf, sat_gr, sat_fr)
