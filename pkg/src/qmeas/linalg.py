"""Qudit states and small dense linear algebra helpers.

Everything here works on plain numpy arrays: pure states are complex
vectors of unit norm, density matrices are Hermitian PSD with unit trace.
Dimensions are tiny (d <= 5 in practice), so clarity wins over speed.
"""

from __future__ import annotations

from typing import NamedTuple

import numpy as np

from .errors import ConfigError

__all__ = [
    "SVDTriple",
    "dagger",
    "haar_random_state",
    "random_unitary",
    "check_state",
    "check_density_matrix",
    "svd",
    "fidelity_pure",
]

# Singular values at or below this are treated as exact zeros.
ZERO_TOL = 1e-12


class SVDTriple(NamedTuple):
    """Decomposition M = left @ diag(singulars) @ right.

    ``left`` and ``right`` are unitary, ``singulars`` is real and sorted
    in descending order.
    """

    left: np.ndarray
    singulars: np.ndarray
    right: np.ndarray


def dagger(a: np.ndarray) -> np.ndarray:
    """Conjugate transpose."""
    return np.conj(a.swapaxes(-1, -2))


def _as_generator(seed) -> np.random.Generator:
    if isinstance(seed, np.random.Generator):
        return seed
    return np.random.default_rng(seed)


def haar_random_state(dim: int, rng=None) -> np.ndarray:
    """Draw a pure state uniformly from the unit sphere in C^dim.

    Sampling d complex standard normals and normalizing gives the
    unitarily invariant (Haar) distribution.
    """
    if dim < 2:
        raise ConfigError(f"state dimension must be >= 2, got {dim}")
    rng = _as_generator(rng)
    z = rng.standard_normal(dim) + 1j * rng.standard_normal(dim)
    return z / np.linalg.norm(z)


def random_unitary(dim: int, rng=None) -> np.ndarray:
    """Haar-random unitary via QR of a complex Ginibre matrix.

    The R factor's diagonal phases are divided out so the distribution
    is exactly Haar rather than merely QR-shaped.
    """
    if dim < 1:
        raise ConfigError(f"unitary dimension must be >= 1, got {dim}")
    rng = _as_generator(rng)
    z = rng.standard_normal((dim, dim)) + 1j * rng.standard_normal((dim, dim))
    q, r = np.linalg.qr(z)
    phases = np.diag(r) / np.abs(np.diag(r))
    return q * phases


def check_state(psi: np.ndarray, tol: float = 1e-10) -> np.ndarray:
    """Validate a pure state vector; returns it as a complex array."""
    psi = np.asarray(psi, dtype=complex)
    if psi.ndim != 1 or psi.shape[0] < 2:
        raise ConfigError(f"expected a state vector of length >= 2, got shape {psi.shape}")
    if abs(np.linalg.norm(psi) - 1.0) > tol:
        raise ConfigError(f"state norm deviates from 1 by {abs(np.linalg.norm(psi) - 1.0):.3g}")
    return psi


def check_density_matrix(rho: np.ndarray, tol: float = 1e-10) -> np.ndarray:
    """Validate Hermiticity, positivity and unit trace of a density matrix."""
    rho = np.asarray(rho, dtype=complex)
    if rho.ndim != 2 or rho.shape[0] != rho.shape[1]:
        raise ConfigError(f"expected a square matrix, got shape {rho.shape}")
    if np.abs(rho - dagger(rho)).max() > tol:
        raise ConfigError("density matrix is not Hermitian")
    if abs(np.trace(rho).real - 1.0) > tol:
        raise ConfigError(f"trace deviates from 1 by {abs(np.trace(rho).real - 1.0):.3g}")
    if np.linalg.eigvalsh(rho).min() < -tol:
        raise ConfigError("density matrix has a negative eigenvalue")
    return rho


def _complete_orthonormal(cols: np.ndarray, dim: int) -> np.ndarray:
    """Extend a set of orthonormal columns to a full orthonormal basis.

    Deterministic modified Gram-Schmidt over the canonical basis; fine for
    the tiny dimensions used here.
    """
    basis = [cols[:, j] for j in range(cols.shape[1])]
    for k in range(dim):
        v = np.zeros(dim, dtype=complex)
        v[k] = 1.0
        for b in basis:
            v = v - b * (np.conj(b) @ v)
        n = np.linalg.norm(v)
        if n > 0.5:  # canonical vector not already in the span
            basis.append(v / n)
        if len(basis) == dim:
            break
    return np.column_stack(basis)


def svd(m: np.ndarray) -> SVDTriple:
    """Singular value decomposition M = left @ diag(s) @ right.

    Computed from the eigen-decomposition of M^dag M, which is adequate and
    well conditioned for the small dense matrices used throughout. Left
    singular vectors for zero singular values are completed by
    orthonormalization, so ``left`` is always unitary.
    """
    m = np.asarray(m, dtype=complex)
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        raise ConfigError(f"expected a square matrix, got shape {m.shape}")
    d = m.shape[0]
    h = dagger(m) @ m
    w, v = np.linalg.eigh(h)  # ascending eigenvalues, v columns orthonormal
    order = np.argsort(w)[::-1]
    w = w[order]
    v = v[:, order]
    s = np.sqrt(np.clip(w, 0.0, None))
    right = dagger(v)
    nonzero = s > ZERO_TOL
    left = np.zeros((d, d), dtype=complex)
    if nonzero.any():
        left[:, nonzero] = (m @ v[:, nonzero]) / s[nonzero]
    left = _complete_orthonormal(left[:, nonzero], d) if not nonzero.all() else left
    return SVDTriple(left=left, singulars=s, right=right)


def fidelity_pure(psi: np.ndarray, rho: np.ndarray) -> float:
    """Fidelity <psi|rho|psi> between a pure state and a density matrix."""
    psi = np.asarray(psi, dtype=complex)
    rho = np.asarray(rho, dtype=complex)
    if rho.shape != (psi.shape[0], psi.shape[0]):
        raise ConfigError(f"shape mismatch: state {psi.shape}, matrix {rho.shape}")
    return float(np.real(np.conj(psi) @ rho @ psi))
