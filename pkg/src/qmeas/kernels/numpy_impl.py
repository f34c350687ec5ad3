"""Vectorized pure-numpy implementations of the hot kernels."""

from __future__ import annotations

import numpy as np


def mc_info_samples(states, kraus, estimates, canonical):
    """Per-sample estimation and operation fidelity terms.

    Args:
        states: (n, d) complex, unit-norm input states.
        kraus: (K, d, d) complex Kraus operator stack.
        estimates: (K, d) complex, one estimate vector per outcome.
        canonical: (K, d, d) complex, positive polar factor of each Kraus
            operator (outcome-wise unitary correction already absorbed).

    Returns:
        (xg, xf): two (n,) float arrays. xg[j] sums p(r|psi_j) times the
        overlap of psi_j with the outcome estimate; xf[j] sums the post-
        measurement fidelity terms |<psi_j|P_r|psi_j>|^2.
    """
    st = states.T  # (d, n)
    y = kraus @ st  # (K, d, n)
    p = (y.real**2 + y.imag**2).sum(axis=1)  # (K, n)
    ov = estimates.conj() @ st  # (K, n)
    xg = (p * (ov.real**2 + ov.imag**2)).sum(axis=0)
    z = canonical @ st  # (K, d, n)
    amp = np.einsum("dn,kdn->kn", st.conj(), z)
    xf = (amp.real**2 + amp.imag**2).sum(axis=0)
    return xg, xf


def block_singulars(blocks):
    """Sorted (descending) singular values of a stack of square matrices.

    Uses the eigenvalues of M^dag M, matching the decomposition route used
    elsewhere in the package.
    """
    h = blocks.conj().swapaxes(-1, -2) @ blocks
    w = np.linalg.eigvalsh(h)  # ascending
    return np.sqrt(np.clip(w[..., ::-1], 0.0, None))
