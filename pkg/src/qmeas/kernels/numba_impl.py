"""Numba-compiled implementations of the hot kernels.

Signatures and results match ``numpy_impl`` (up to float rounding from the
different accumulation order); see that module for argument docs.
"""

from __future__ import annotations

import numpy as np
from numba import njit


@njit(cache=True)
def _mc_info_samples_impl(states, kraus, estimates, canonical):
    n, d = states.shape
    nk = kraus.shape[0]
    xg = np.zeros(n)
    xf = np.zeros(n)
    for j in range(n):
        psi = states[j]
        for r in range(nk):
            p = 0.0
            for a in range(d):
                amp = 0.0 + 0.0j
                for b in range(d):
                    amp += kraus[r, a, b] * psi[b]
                p += amp.real**2 + amp.imag**2
            ov = 0.0 + 0.0j
            for a in range(d):
                ov += np.conj(estimates[r, a]) * psi[a]
            xg[j] += p * (ov.real**2 + ov.imag**2)
            post = 0.0 + 0.0j
            for a in range(d):
                row = 0.0 + 0.0j
                for b in range(d):
                    row += canonical[r, a, b] * psi[b]
                post += np.conj(psi[a]) * row
            xf[j] += post.real**2 + post.imag**2
    return xg, xf


@njit(cache=True)
def _block_singulars_impl(blocks):
    nb, d = blocks.shape[0], blocks.shape[1]
    out = np.empty((nb, d))
    for k in range(nb):
        h = np.conj(blocks[k].T) @ blocks[k]
        w = np.linalg.eigvalsh(h)
        for i in range(d):
            v = w[d - 1 - i]
            out[k, i] = np.sqrt(v) if v > 0.0 else 0.0
    return out


def mc_info_samples(states, kraus, estimates, canonical):
    return _mc_info_samples_impl(
        np.ascontiguousarray(states),
        np.ascontiguousarray(kraus),
        np.ascontiguousarray(estimates),
        np.ascontiguousarray(canonical),
    )


def block_singulars(blocks):
    return _block_singulars_impl(np.ascontiguousarray(blocks))
