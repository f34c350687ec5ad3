"""Quantum measurements as Kraus operator sets and their information triple.

A measurement on a d-level system is a finite set {M_r} of d x d Kraus
operators with sum_r M_r^dag M_r = 1. Writing each operator in singular
value form M_r = V_r D_r U_r, three figures of merit are determined by the
singular values alone:

    information gain   G = (d + sum_r lmax_r^2) / (d (d + 1))
    operation fidelity F = (d + sum_r (sum_i l_{r,i})^2) / (d (d + 1))
    reversibility      R = sum_r lmin_r^2

G is the mean estimation fidelity with the optimal estimate per outcome,
F the mean input-output fidelity after the optimal outcome-wise unitary
correction, and R the success probability of the optimal reversing
operation, all averaged over uniformly random pure inputs.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import NamedTuple, Sequence

import numpy as np

from . import kernels
from .errors import CompletenessError, ConfigError, ImpossibleOutcomeError
from .linalg import ZERO_TOL, SVDTriple, dagger, svd

__all__ = [
    "InfoTriple",
    "EmpiricalTriple",
    "ReversalOperation",
    "Measurement",
    "validate",
    "info_gain",
    "operation_fidelity",
    "reversibility",
    "info_triple",
    "triple_from_singulars",
    "post_measurement",
    "optimal_estimate",
    "optimal_reversal",
    "empirical_triple",
    "random_measurement",
    "random_kraus_batch",
]


class InfoTriple(NamedTuple):
    G: float
    F: float
    R: float


class ReversalOperation(NamedTuple):
    """Reversing operator for one outcome.

    Applying ``operator`` after the outcome's Kraus operator returns any
    input state with probability ``scale**2`` (independent of the input).
    A null reversal (zero operator, scale 0) is returned when the outcome
    is not reversible.
    """

    operator: np.ndarray
    scale: float

    @property
    def success(self) -> float:
        """Input-independent success probability scale**2."""
        return self.scale**2


@dataclass(frozen=True)
class EmpiricalTriple:
    """Monte-Carlo estimate of (G, F, R) with standard errors of the mean."""

    G: float
    F: float
    R: float
    se_G: float
    se_F: float
    se_R: float
    samples: int

    def as_triple(self) -> InfoTriple:
        return InfoTriple(self.G, self.F, self.R)


class Measurement:
    """A validated Kraus operator set with cached singular decompositions."""

    def __init__(self, kraus: Sequence[np.ndarray], *, tol: float = 1e-10, check: bool = True):
        ops = np.asarray(kraus, dtype=complex)
        if ops.ndim != 3 or ops.shape[1] != ops.shape[2]:
            raise ConfigError(f"expected a stack of square operators, got shape {ops.shape}")
        if ops.shape[1] < 2:
            raise ConfigError(f"system dimension must be >= 2, got {ops.shape[1]}")
        if ops.shape[0] < 1:
            raise ConfigError("measurement needs at least one outcome")
        self.kraus = ops
        self.tol = tol
        if check:
            ok, dev = validate(ops, tol)
            if not ok:
                raise CompletenessError(
                    f"Kraus operators violate completeness by {dev:.3g} (tol {tol:.3g})"
                )
        self._svds: list[SVDTriple] | None = None

    @property
    def dim(self) -> int:
        return self.kraus.shape[1]

    @property
    def n_outcomes(self) -> int:
        return self.kraus.shape[0]

    @property
    def svds(self) -> list[SVDTriple]:
        if self._svds is None:
            self._svds = [svd(m) for m in self.kraus]
        return self._svds

    @property
    def singular_values(self) -> np.ndarray:
        """(n_outcomes, dim) singular values, descending within each row."""
        return np.array([t.singulars for t in self.svds])

    def canonical_operators(self) -> np.ndarray:
        """Positive polar factors sqrt(M_r^dag M_r), stacked."""
        out = np.empty_like(self.kraus)
        for r, t in enumerate(self.svds):
            out[r] = dagger(t.right) @ np.diag(t.singulars) @ t.right
        return out

    def completeness_deviation(self) -> float:
        return validate(self.kraus, self.tol)[1]

    def __repr__(self) -> str:  # pragma: no cover
        return f"Measurement(dim={self.dim}, n_outcomes={self.n_outcomes})"


def _coerce(measurement) -> Measurement:
    if isinstance(measurement, Measurement):
        return measurement
    return Measurement(measurement)


def validate(kraus, tol: float = 1e-10) -> tuple[bool, float]:
    """Check completeness sum_r M_r^dag M_r = 1.

    Returns (ok, deviation) where deviation is the max absolute entry of
    the difference from the identity.
    """
    ops = kraus.kraus if isinstance(kraus, Measurement) else np.asarray(kraus, dtype=complex)
    total = np.einsum("rij,rik->jk", ops.conj(), ops)
    dev = float(np.abs(total - np.eye(ops.shape[1])).max())
    return dev <= tol, dev


def triple_from_singulars(svals: np.ndarray) -> InfoTriple:
    """(G, F, R) from a (n_outcomes, dim) array of singular values."""
    svals = np.asarray(svals, dtype=float)
    d = svals.shape[1]
    norm = d * (d + 1)
    g = (d + (svals.max(axis=1) ** 2).sum()) / norm
    f = (d + (svals.sum(axis=1) ** 2).sum()) / norm
    r = float((svals.min(axis=1) ** 2).sum())
    return InfoTriple(float(g), float(f), r)


def info_triple(measurement) -> InfoTriple:
    """Closed-form (G, F, R) of a measurement."""
    return triple_from_singulars(_coerce(measurement).singular_values)


def info_gain(measurement) -> float:
    """Mean estimation fidelity G over uniformly random pure inputs."""
    return info_triple(measurement).G


def operation_fidelity(measurement) -> float:
    """Mean input-output fidelity F over uniformly random pure inputs."""
    return info_triple(measurement).F


def reversibility(measurement) -> float:
    """Success probability R of the optimal reversing operation."""
    return info_triple(measurement).R


def post_measurement(measurement, outcome: int, psi: np.ndarray) -> tuple[np.ndarray, float]:
    """Conditional post-measurement state and outcome probability.

    Raises ImpossibleOutcomeError when the outcome probability vanishes
    for the given input.
    """
    m = _coerce(measurement)
    if not 0 <= outcome < m.n_outcomes:
        raise ConfigError(f"outcome {outcome} out of range for {m.n_outcomes} outcomes")
    psi = np.asarray(psi, dtype=complex)
    phi = m.kraus[outcome] @ psi
    p = float(np.real(np.conj(phi) @ phi))
    if p <= 1e-14:
        raise ImpossibleOutcomeError(f"outcome {outcome} has probability {p:.3g}")
    return phi / np.sqrt(p), p


def optimal_estimate(measurement, outcome: int) -> np.ndarray:
    """Best single-state guess of the input given the outcome.

    This is the right singular vector of M_r for its largest singular
    value; it maximizes the mean estimation fidelity.
    """
    m = _coerce(measurement)
    if not 0 <= outcome < m.n_outcomes:
        raise ConfigError(f"outcome {outcome} out of range for {m.n_outcomes} outcomes")
    return np.conj(m.svds[outcome].right[0, :])


def optimal_reversal(measurement, outcome: int) -> ReversalOperation:
    """Optimal reversing operator for one outcome.

    With M_r = V D U the reversal is lmin U^dag D^{-1} V^dag, which maps
    M_r |psi> back to lmin |psi>; the reversal succeeds with probability
    lmin^2 whatever the input. Outcomes with lmin = 0 (within 1e-12) get
    the null reversal.
    """
    m = _coerce(measurement)
    if not 0 <= outcome < m.n_outcomes:
        raise ConfigError(f"outcome {outcome} out of range for {m.n_outcomes} outcomes")
    left, s, right = m.svds[outcome]
    lmin = float(s[-1])
    if lmin <= ZERO_TOL:
        return ReversalOperation(np.zeros((m.dim, m.dim), dtype=complex), 0.0)
    op = lmin * dagger(right) @ np.diag(1.0 / s) @ dagger(left)
    return ReversalOperation(op, lmin)


def empirical_triple(measurement, samples: int = 10_000, seed=0) -> EmpiricalTriple:
    """Monte-Carlo estimate of (G, F, R) over Haar-random pure inputs.

    Outcome probabilities are evaluated exactly per sampled state (no count
    noise). The fidelity term scores the post-measurement state after the
    optimal outcome-wise unitary correction, i.e. against the positive polar
    factor of each Kraus operator, which is the quantity the closed form
    describes. The reversal success probability is input-independent, so R
    is analytic and carries zero standard error.
    """
    m = _coerce(measurement)
    if samples < 2:
        raise ConfigError("need at least 2 samples")
    rng = seed if isinstance(seed, np.random.Generator) else np.random.default_rng(seed)
    z = rng.standard_normal((samples, m.dim)) + 1j * rng.standard_normal((samples, m.dim))
    states = z / np.linalg.norm(z, axis=1, keepdims=True)
    ests = np.array([optimal_estimate(m, r) for r in range(m.n_outcomes)])
    xg, xf = kernels.mc_info_samples(states, m.kraus, ests, m.canonical_operators())
    r_exact = reversibility(m)
    return EmpiricalTriple(
        G=float(xg.mean()),
        F=float(xf.mean()),
        R=r_exact,
        se_G=float(xg.std(ddof=1) / np.sqrt(samples)),
        se_F=float(xf.std(ddof=1) / np.sqrt(samples)),
        se_R=0.0,
        samples=samples,
    )


def random_kraus_batch(dim: int, n_outcomes: int, count: int, rng) -> np.ndarray:
    """Stack of ``count`` random Kraus sets, shape (count, n_outcomes, dim, dim).

    Each set is a Haar-random isometry from C^dim to C^(n_outcomes * dim)
    split into square blocks, so completeness holds by construction.
    """
    if dim < 2 or n_outcomes < 1 or count < 1:
        raise ConfigError("dim >= 2, n_outcomes >= 1 and count >= 1 required")
    z = rng.standard_normal((count, n_outcomes * dim, dim)) + 1j * rng.standard_normal(
        (count, n_outcomes * dim, dim)
    )
    q, r = np.linalg.qr(z)
    diag = np.einsum("bii->bi", r)
    q = q * (diag / np.abs(diag))[:, None, :]
    return q.reshape(count, n_outcomes, dim, dim)


def random_measurement(dim: int, n_outcomes: int, rng=None) -> Measurement:
    """A single random measurement drawn as in ``random_kraus_batch``."""
    rng = rng if isinstance(rng, np.random.Generator) else np.random.default_rng(rng)
    return Measurement(random_kraus_batch(dim, n_outcomes, 1, rng)[0])
