"""Numba kernels for the collapsed Gibbs sampler.

The random stream is a splitmix64 generator carried in a one-element uint64
array, so a kernel call is a pure function of its inputs and the incoming
state.  All count arrays are int64; `n_kw`/`n_k` are read-only in the
inference kernel.
"""

from __future__ import annotations

import numpy as np
from numba import njit

_U64 = np.uint64
_GOLDEN = _U64(0x9E3779B97F4A7C15)
_MIX1 = _U64(0xBF58476D1CE4E5B9)
_MIX2 = _U64(0x94D049BB133111EB)
_INV53 = 1.0 / 9007199254740992.0  # 2**-53


def new_rng_state(seed: int) -> np.ndarray:
    return np.array([seed & 0xFFFFFFFFFFFFFFFF], dtype=np.uint64)


@njit(cache=True, nogil=True)
def _next_uniform(state):
    # splitmix64, then take the top 53 bits as a double in [0, 1)
    state[0] = state[0] + _GOLDEN
    z = state[0]
    z = (z ^ (z >> _U64(30))) * _MIX1
    z = (z ^ (z >> _U64(27))) * _MIX2
    z = z ^ (z >> _U64(31))
    return (z >> _U64(11)) * _INV53


@njit(cache=True, nogil=True)
def init_assignments(tokens, doc_of, z, n_dk, n_kw, n_k, state):
    """Assign a uniform random topic to every token and build all counts."""
    n_topics = n_kw.shape[0]
    for i in range(tokens.shape[0]):
        k = int(_next_uniform(state) * n_topics)
        z[i] = k
        n_dk[doc_of[i], k] += 1
        n_kw[k, tokens[i]] += 1
        n_k[k] += 1


@njit(cache=True, nogil=True)
def train_sweep(tokens, doc_of, alpha, beta, z, n_dk, n_kw, n_k, state, probs):
    """One full Gibbs sweep: resample the topic of every token in order."""
    n_topics = n_kw.shape[0]
    v_beta = beta * n_kw.shape[1]
    for i in range(tokens.shape[0]):
        w = tokens[i]
        d = doc_of[i]
        k_old = z[i]
        n_dk[d, k_old] -= 1
        n_kw[k_old, w] -= 1
        n_k[k_old] -= 1
        total = 0.0
        for k in range(n_topics):
            total += (n_dk[d, k] + alpha) * (n_kw[k, w] + beta) / (n_k[k] + v_beta)
            probs[k] = total
        u = _next_uniform(state) * total
        k_new = 0
        while probs[k_new] <= u and k_new < n_topics - 1:
            k_new += 1
        z[i] = k_new
        n_dk[d, k_new] += 1
        n_kw[k_new, w] += 1
        n_k[k_new] += 1


@njit(cache=True, nogil=True)
def infer_doc(tokens, n_kw, n_k, alpha, beta, n_iters, burn_in, state):
    """Gibbs-sample topic assignments for one held-out document.

    Model counts stay frozen; only the document's own topic counts move.
    Returns the per-topic posterior mean (n_dk + alpha) / (n + K*alpha)
    averaged over the post-burn-in sweeps.
    """
    n_topics = n_kw.shape[0]
    v_beta = beta * n_kw.shape[1]
    n = tokens.shape[0]
    z = np.empty(n, dtype=np.int32)
    n_dk = np.zeros(n_topics, dtype=np.int64)
    for i in range(n):
        k = int(_next_uniform(state) * n_topics)
        z[i] = k
        n_dk[k] += 1
    probs = np.empty(n_topics, dtype=np.float64)
    acc = np.zeros(n_topics, dtype=np.float64)
    for it in range(n_iters):
        for i in range(n):
            w = tokens[i]
            k_old = z[i]
            n_dk[k_old] -= 1
            total = 0.0
            for k in range(n_topics):
                total += (n_dk[k] + alpha) * (n_kw[k, w] + beta) / (n_k[k] + v_beta)
                probs[k] = total
            u = _next_uniform(state) * total
            k_new = 0
            while probs[k_new] <= u and k_new < n_topics - 1:
                k_new += 1
            z[i] = k_new
            n_dk[k_new] += 1
        if it >= burn_in:
            for k in range(n_topics):
                acc[k] += n_dk[k] + alpha
    denom = (n_iters - burn_in) * (n + n_topics * alpha)
    return acc / denom
