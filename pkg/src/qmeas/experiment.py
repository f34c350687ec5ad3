"""Simulated qutrit experiment: SIC probes, photon counting, tomography.

The optical experiment this mirrors prepares the nine states of a qutrit
SIC set, sends each through the measurement (and optionally the reversing
operation), and analyzes the output with the same SIC set as a POVM,
recording Poissonian photon counts. State tomography is linear inversion
over the SIC frame followed by projection onto physical states. Estimation
and operation fidelities are averaged over the nine inputs; because the
SIC set is a projective 2-design, these averages coincide exactly with the
uniform (Haar) averages entering the closed forms.

Imperfect preparation is modeled as a depolarized input
rho(e) = e |psi><psi| + (1 - e) I/3; the noise parameter can be re-fitted
from measured sweeps with a scalar golden-section search.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .errors import ConfigError, ImpossibleOutcomeError, InsufficientDataError
from .families import FamilySpec, closed_form_triple, family
from .linalg import ZERO_TOL, dagger, fidelity_pure
from .measurement import InfoTriple, Measurement, optimal_estimate, optimal_reversal

__all__ = [
    "sic_states",
    "sic_povm",
    "NoisyInput",
    "CountsTable",
    "ExperimentResult",
    "ProcessResult",
    "simulate_counts",
    "experiment_counts",
    "qst_reconstruct",
    "sic_average_triple",
    "noisy_model_triple",
    "run_experiment",
    "process_tomography",
    "fit_noise",
]

DIM = 3
N_SIC = 9


def sic_states() -> np.ndarray:
    """The nine qutrit SIC states, shape (9, 3).

    Orbit of the fiducial (|1> - |2>)/sqrt(2) under the displacement
    operators X^j Z^k, with X the cyclic shift and Z = diag(1, w, w^2),
    w = exp(2 pi i / 3). State index is a = 3 j + k. All pairwise overlaps
    satisfy |<a|b>|^2 = 1/4 and the set is a projective 2-design.
    """
    w = np.exp(2j * np.pi / 3)
    fid = np.array([0.0, 1.0, -1.0], dtype=complex) / np.sqrt(2.0)
    x = np.zeros((3, 3), dtype=complex)
    for i in range(3):
        x[(i + 1) % 3, i] = 1.0
    z = np.diag([1.0, w, w**2])
    states = np.empty((N_SIC, 3), dtype=complex)
    for j in range(3):
        for k in range(3):
            states[3 * j + k] = np.linalg.matrix_power(x, j) @ np.linalg.matrix_power(z, k) @ fid
    return states


def sic_povm() -> np.ndarray:
    """SIC analysis POVM elements |psi_a><psi_a| / 3, shape (9, 3, 3)."""
    st = sic_states()
    return np.einsum("ai,aj->aij", st, st.conj()) / 3.0


@dataclass(frozen=True)
class NoisyInput:
    """A pure target state prepared with depolarizing noise e."""

    pure: np.ndarray
    e: float

    def __post_init__(self):
        if not 0.0 <= self.e <= 1.0:
            raise ConfigError(f"noise parameter e must lie in [0, 1], got {self.e}")

    @property
    def rho(self) -> np.ndarray:
        psi = np.asarray(self.pure, dtype=complex)
        d = psi.shape[0]
        return self.e * np.outer(psi, psi.conj()) + (1.0 - self.e) * np.eye(d) / d


@dataclass(frozen=True)
class CountsTable:
    """Poissonian counts for all SIC inputs.

    ``counts[k, r, a]`` is the number of photons prepared in SIC state k,
    heralded on measurement outcome r and detected in analysis setting a.
    """

    counts: np.ndarray
    shots_per_setting: int


@dataclass(frozen=True)
class ExperimentResult:
    """Averaged triple from the simulated experiment, with run-to-run spread."""

    t: int
    p: float
    e_injected: float
    shots: int
    runs: int
    G: float
    F: float
    R: float
    sigma_G: float
    sigma_F: float
    sigma_R: float
    e_fitted: float | None = None

    def to_dict(self) -> dict:
        out = {
            "t": self.t,
            "p": self.p,
            "e_injected": self.e_injected,
            "shots": self.shots,
            "runs": self.runs,
            "G": self.G,
            "F": self.F,
            "R": self.R,
            "sigma_G": self.sigma_G,
            "sigma_F": self.sigma_F,
            "sigma_R": self.sigma_R,
        }
        if self.e_fitted is not None:
            out["e_fitted"] = self.e_fitted
        return out


def _joint_probabilities(measurement: Measurement, rho: np.ndarray) -> np.ndarray:
    """Exact joint probabilities P[r, a] of outcome r and analysis click a."""
    povm = sic_povm()
    out = np.empty((measurement.n_outcomes, N_SIC))
    for r, m in enumerate(measurement.kraus):
        sigma = m @ rho @ dagger(m)
        out[r] = np.real(np.einsum("aij,ji->a", povm, sigma))
    return out


def simulate_counts(measurement, source: NoisyInput, shots: int, rng=None) -> np.ndarray:
    """Poisson counts for one input state, shape (n_outcomes, 9).

    Each cell is Poisson with mean shots * Tr[E_a M_r rho M_r^dag].
    """
    if shots < 1:
        raise ConfigError(f"shots must be >= 1, got {shots}")
    m = measurement if isinstance(measurement, Measurement) else Measurement(measurement)
    rng = rng if isinstance(rng, np.random.Generator) else np.random.default_rng(rng)
    joint = _joint_probabilities(m, source.rho)
    return rng.poisson(shots * np.clip(joint, 0.0, None))


def experiment_counts(measurement, e: float, shots: int, rng=None) -> CountsTable:
    """Counts for all nine SIC inputs prepared with depolarizing noise e."""
    m = measurement if isinstance(measurement, Measurement) else Measurement(measurement)
    rng = rng if isinstance(rng, np.random.Generator) else np.random.default_rng(rng)
    st = sic_states()
    counts = np.stack(
        [simulate_counts(m, NoisyInput(st[k], e), shots, rng) for k in range(N_SIC)]
    )
    return CountsTable(counts=counts, shots_per_setting=shots)


def qst_reconstruct(frequencies: np.ndarray) -> np.ndarray:
    """State from SIC click frequencies via linear inversion.

    Uses the dual-frame formula rho = sum_a f_a (12 Pi_a - 3 I) / 3 for the
    qutrit SIC POVM, then projects onto the physical set by clipping
    negative eigenvalues and renormalizing the trace.
    """
    f = np.asarray(frequencies, dtype=float)
    if f.shape != (N_SIC,):
        raise ConfigError(f"expected 9 frequencies, got shape {f.shape}")
    total = f.sum()
    if total <= 0.0:
        raise InsufficientDataError("no counts to reconstruct from")
    f = f / total
    st = sic_states()
    proj = np.einsum("ai,aj->aij", st, st.conj())
    rho = 4.0 * np.einsum("a,aij->ij", f, proj) - np.eye(3)
    w, v = np.linalg.eigh(rho)
    w = np.clip(w, 0.0, None)
    return (v * w) @ dagger(v) / w.sum()


def sic_average_triple(measurement) -> InfoTriple:
    """(G, F, R) averaged over the SIC inputs with exact probabilities.

    Equals the closed forms exactly (up to rounding): the SIC set is a
    2-design and all three quantities are quadratic in the input projector.
    F is scored after the outcome-wise unitary correction, as in the
    Monte-Carlo estimator.
    """
    m = measurement if isinstance(measurement, Measurement) else Measurement(measurement)
    if m.dim != DIM:
        raise ConfigError(f"SIC averaging is for qutrits, got dim {m.dim}")
    st = sic_states()
    ests = np.array([optimal_estimate(m, r) for r in range(m.n_outcomes)])
    canonical = m.canonical_operators()
    g = 0.0
    f = 0.0
    for k in range(N_SIC):
        psi = st[k]
        for r in range(m.n_outcomes):
            phi = m.kraus[r] @ psi
            p = float(np.real(np.conj(phi) @ phi))
            g += p * abs(np.conj(ests[r]) @ psi) ** 2
            f += abs(np.conj(psi) @ (canonical[r] @ psi)) ** 2
    svals = m.singular_values
    return InfoTriple(g / N_SIC, f / N_SIC, float((svals.min(axis=1) ** 2).sum()))


def noisy_model_triple(
    t: int, p: float, e: float, table: dict[int, FamilySpec] | None = None
) -> InfoTriple:
    """Expected measured triple for family t at p with depolarizing noise e.

    Input depolarization mixes both fidelity-type averages linearly toward
    the random-guess value 1/3; the reversal success probability does not
    depend on the input at all.
    """
    if not 0.0 <= e <= 1.0:
        raise ConfigError(f"noise parameter e must lie in [0, 1], got {e}")
    ideal = closed_form_triple(t, p, table)
    return InfoTriple(
        G=e * ideal.G + (1.0 - e) / 3.0,
        F=e * ideal.F + (1.0 - e) / 3.0,
        R=ideal.R,
    )


def _exact_experiment_triple(m: Measurement, e: float) -> InfoTriple:
    """Infinite-shot limit of the measured triple for noisy SIC inputs."""
    st = sic_states()
    ests = np.array([optimal_estimate(m, r) for r in range(m.n_outcomes)])
    g = 0.0
    f = 0.0
    for k in range(N_SIC):
        rho = NoisyInput(st[k], e).rho
        for r in range(m.n_outcomes):
            sigma = m.kraus[r] @ rho @ dagger(m.kraus[r])
            p = float(np.real(np.trace(sigma)))
            g += p * abs(np.conj(ests[r]) @ st[k]) ** 2
            f += fidelity_pure(st[k], sigma)
    svals = m.singular_values
    return InfoTriple(g / N_SIC, f / N_SIC, float((svals.min(axis=1) ** 2).sum()))


def _sampled_run_triple(
    m: Measurement,
    joint: np.ndarray,
    outcome_probs: np.ndarray,
    est_overlaps: np.ndarray,
    lmin_sq: np.ndarray,
    st: np.ndarray,
    shots: int,
    rng: np.random.Generator,
) -> tuple[float, float, float]:
    """One Monte-Carlo run: counts, tomography, triple over the 9 inputs."""
    g_acc = 0.0
    f_acc = 0.0
    r_acc = 0.0
    for k in range(N_SIC):
        counts = rng.poisson(shots * joint[k])  # (n_outcomes, 9)
        per_outcome = counts.sum(axis=1)
        total = per_outcome.sum()
        if total == 0:
            raise InsufficientDataError(f"input {k} received no counts; increase shots")
        p_hat = per_outcome / total
        for r in range(m.n_outcomes):
            if per_outcome[r] == 0:
                continue
            rho_rec = qst_reconstruct(counts[r].astype(float))
            g_acc += p_hat[r] * est_overlaps[r, k]
            f_acc += p_hat[r] * fidelity_pure(st[k], rho_rec)
        # separate reversal stage: route fresh photons through M then R
        n_r = rng.poisson(shots * outcome_probs[k])
        for r in range(m.n_outcomes):
            if lmin_sq[r] <= 0.0 or n_r[r] == 0:
                continue
            pass_prob = min(1.0, lmin_sq[r] / outcome_probs[k, r])
            r_acc += rng.binomial(n_r[r], pass_prob) / shots
    return g_acc / N_SIC, f_acc / N_SIC, r_acc / N_SIC


def reversal_success_counts(measurement, e: float, shots: int, rng=None) -> np.ndarray:
    """Per-input reversal success counts over the nine SIC probes.

    Same sampling scheme as the reversal stage of ``run_experiment``:
    Poissonian routing through the measurement, then a Bernoulli filter with
    pass probability lambda_min^2 / p(r|k) per outcome. The expected success
    rate is shots * R for every input, which is what makes R measurable
    without state-dependent corrections.
    """
    m = measurement if isinstance(measurement, Measurement) else Measurement(measurement)
    rng = rng if isinstance(rng, np.random.Generator) else np.random.default_rng(rng)
    st = sic_states()
    lmin_sq = m.singular_values.min(axis=1) ** 2
    successes = np.zeros(N_SIC, dtype=np.int64)
    for k in range(N_SIC):
        probs = _joint_probabilities(m, NoisyInput(st[k], e).rho).sum(axis=1)
        n_r = rng.poisson(shots * probs)
        for r in range(m.n_outcomes):
            if lmin_sq[r] <= 0.0 or n_r[r] == 0:
                continue
            successes[k] += rng.binomial(n_r[r], min(1.0, lmin_sq[r] / probs[r]))
    return successes


def run_experiment(
    t: int,
    p: float,
    e: float = 1.0,
    shots: int = 10_000,
    runs: int = 100,
    seed=0,
    exact: bool = False,
    table: dict[int, FamilySpec] | None = None,
) -> ExperimentResult:
    """Simulate the full experiment for family t at parameter p.

    Sampled mode performs ``runs`` independent repetitions, each with
    Poissonian counts at ``shots`` photons per input setting, and reports
    the mean triple with the run-to-run standard deviation. Exact mode
    evaluates the infinite-statistics limit (zero sigmas; shots and runs
    are reported as 0). Survivor-state tomography after the reversal is
    available separately through ``process_tomography``.
    """
    m = family(t, p, table)
    if exact:
        triple = _exact_experiment_triple(m, e)
        return ExperimentResult(
            t=t, p=p, e_injected=e, shots=0, runs=0,
            G=triple.G, F=triple.F, R=triple.R,
            sigma_G=0.0, sigma_F=0.0, sigma_R=0.0,
        )
    if shots < 1 or runs < 1:
        raise ConfigError("shots and runs must be >= 1 in sampled mode")
    st = sic_states()
    joint = np.stack([_joint_probabilities(m, NoisyInput(st[k], e).rho) for k in range(N_SIC)])
    outcome_probs = joint.sum(axis=2)  # (9, n_outcomes)
    ests = np.array([optimal_estimate(m, r) for r in range(m.n_outcomes)])
    est_overlaps = np.abs(ests.conj() @ st.T) ** 2  # (n_outcomes, 9)
    lmin_sq = m.singular_values.min(axis=1) ** 2
    samples = np.empty((runs, 3))
    base = list(seed) if isinstance(seed, (list, tuple)) else [seed]
    base = [int(x) for x in base]
    for i in range(runs):
        rng = np.random.default_rng(base + [i])
        samples[i] = _sampled_run_triple(
            m, joint, outcome_probs, est_overlaps, lmin_sq, st, shots, rng
        )
    mean = samples.mean(axis=0)
    sigma = samples.std(axis=0, ddof=1) if runs > 1 else np.zeros(3)
    return ExperimentResult(
        t=t, p=p, e_injected=e, shots=shots, runs=runs,
        G=float(mean[0]), F=float(mean[1]), R=float(mean[2]),
        sigma_G=float(sigma[0]), sigma_F=float(sigma[1]), sigma_R=float(sigma[2]),
    )


@dataclass(frozen=True)
class ProcessResult:
    """Choi matrix and fidelity of the probed conditional channel."""

    choi: np.ndarray
    process_fidelity: float
    average_gate_fidelity: float
    survival: float


def process_tomography(
    measurement,
    outcome: int,
    include_reversal: bool = True,
    probes: np.ndarray | None = None,
    exact: bool = True,
    shots: int = 10_000,
    seed=0,
) -> ProcessResult:
    """Tomograph the conditional channel of one outcome (plus reversal).

    The channel rho -> K rho K^dag with K = R_r M_r (or M_r alone) is probed
    with the SIC inputs by default; outputs are reconstructed per probe and
    reassembled into the Choi matrix through the probe frame. Requires the
    probes to span operator space, otherwise the reconstruction is
    under-determined. Process fidelity is taken to the identity channel and
    the average gate fidelity (d F_pro + 1)/(d + 1) is derived from it.
    """
    m = measurement if isinstance(measurement, Measurement) else Measurement(measurement)
    d = m.dim
    if not 0 <= outcome < m.n_outcomes:
        raise ConfigError(f"outcome {outcome} out of range for {m.n_outcomes} outcomes")
    if probes is None:
        if d != DIM:
            raise ConfigError("default SIC probes require dim 3; pass explicit probes")
        probes = sic_states()
    probes = np.asarray(probes, dtype=complex)
    n_probe = probes.shape[0]
    proj = np.einsum("ki,kj->kij", probes, probes.conj())
    frame = proj.reshape(n_probe, d * d).T  # columns vec(Pi_k), row-major vec
    if n_probe < d * d or np.linalg.matrix_rank(frame) < d * d:
        raise InsufficientDataError(
            f"probe set is under-determined: need {d * d} independent states, got rank "
            f"{np.linalg.matrix_rank(frame)}"
        )
    k_op = m.kraus[outcome]
    if include_reversal:
        rev = optimal_reversal(m, outcome)
        if rev.scale <= ZERO_TOL:
            raise ImpossibleOutcomeError(
                f"outcome {outcome} is not reversible; the composed channel has zero throughput"
            )
        k_op = rev.operator @ k_op
    outputs = np.empty((n_probe, d, d), dtype=complex)
    if exact:
        for k in range(n_probe):
            out = k_op @ proj[k] @ dagger(k_op)
            outputs[k] = out
    else:
        if d != DIM:
            raise ConfigError("sampled process tomography uses the SIC analysis POVM (dim 3)")
        rng = np.random.default_rng(seed)
        povm = sic_povm()
        for k in range(n_probe):
            out = k_op @ proj[k] @ dagger(k_op)
            q = np.clip(np.real(np.einsum("aij,ji->a", povm, out)), 0.0, None)
            counts = rng.poisson(shots * q)
            if counts.sum() == 0:
                raise InsufficientDataError(f"probe {k} received no counts; increase shots")
            outputs[k] = (counts.sum() / shots) * qst_reconstruct(counts.astype(float))
    # expansion coefficients of the matrix units in the probe frame
    beta = (
        np.linalg.solve(frame, np.eye(d * d, dtype=complex))
        if n_probe == d * d
        else np.linalg.lstsq(frame, np.eye(d * d, dtype=complex), rcond=None)[0]
    )
    c_units = np.einsum("kc,kab->cab", beta, outputs).reshape(d, d, d, d)
    choi = c_units.transpose(0, 2, 1, 3).reshape(d * d, d * d)
    trace = float(np.real(np.trace(choi)))
    if trace <= 1e-14:
        raise InsufficientDataError("channel throughput is zero; nothing to normalize")
    phi_overlap = sum(choi[i * d + i, j * d + j] for i in range(d) for j in range(d)) / d
    f_pro = float(np.real(phi_overlap)) / trace
    return ProcessResult(
        choi=choi,
        process_fidelity=f_pro,
        average_gate_fidelity=(d * f_pro + 1.0) / (d + 1.0),
        survival=trace / d,
    )


def _golden_section(fun, lo: float, hi: float, tol: float) -> float:
    """Minimize a unimodal scalar function on [lo, hi]."""
    invphi = (np.sqrt(5.0) - 1.0) / 2.0
    a, b = lo, hi
    c = b - invphi * (b - a)
    d = a + invphi * (b - a)
    fc, fd = fun(c), fun(d)
    while b - a > tol:
        if fc < fd:
            b, d, fd = d, c, fc
            c = b - invphi * (b - a)
            fc = fun(c)
        else:
            a, c, fc = c, d, fd
            d = a + invphi * (b - a)
            fd = fun(d)
    return 0.5 * (a + b)


def fit_noise(
    points: Sequence[tuple[float, tuple[float, float, float]]],
    t: int,
    tol: float = 1e-6,
    table: dict[int, FamilySpec] | None = None,
) -> float:
    """Fit the depolarizing-noise parameter e to a measured family sweep.

    ``points`` holds (p, (G, F, R)) pairs. Minimizes the summed squared
    distance to the noisy-input model over e in [0, 1] with a golden-section
    search. At least three sweep points are required.
    """
    pts = [(float(p), InfoTriple(*map(float, triple))) for p, triple in points]
    if len(pts) < 3:
        raise InsufficientDataError(f"noise fit needs at least 3 sweep points, got {len(pts)}")
    models = {}

    def objective(e: float) -> float:
        total = 0.0
        for p, triple in pts:
            ideal = models.get(p)
            if ideal is None:
                ideal = closed_form_triple(t, p, table)
                models[p] = ideal
            total += (e * ideal.G + (1.0 - e) / 3.0 - triple.G) ** 2
            total += (e * ideal.F + (1.0 - e) / 3.0 - triple.F) ** 2
            total += (ideal.R - triple.R) ** 2
        return total

    return _golden_section(objective, 0.0, 1.0, tol)
