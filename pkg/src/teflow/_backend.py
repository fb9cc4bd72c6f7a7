"""Hot numeric kernels: numba-jitted with a pure-numpy fallback.

The jitted path is used by default. Set ``TEFLOW_DISABLE_NUMBA=1`` to force
the numpy fallback (it is also selected automatically when numba cannot be
imported). Both paths are individually deterministic; across backends the
transfer-entropy values agree to ~1e-12 (floating summation order differs)
and the resampled integer paths are bit-identical.

Kernel contracts
----------------
``te_batch(xnext, xblk, sources, l, ay, t0, ax, axk)``
    One transfer-entropy value (bits, un-clamped) per row of ``sources``.
    ``xnext``/``xblk`` are the destination's precomputed future symbols and
    history-block codes over the valid embedding range; each source row is a
    full-length symbol series whose history blocks are re-coded on the fly.
    Cells are accumulated in ascending flat (next, xblock, yblock) order.

``markov_paths(init_blocks, trans, row_tot, marg, uniforms, order, ay)``
    One resampled path per row of ``uniforms``: initial block drawn from the
    observed blocks (uniform index via ``uniforms[r, 0]``), then each step
    consumes ``uniforms[r, t]`` against the cumulative transition counts of
    the current state; states with no observed outgoing transition fall back
    to the marginal symbol distribution.
"""

from __future__ import annotations

import math
import os

import numpy as np


def _te_batch_loops(xnext, xblk, sources, l, ay, t0, ax, axk):
    """Loop form of the batch TE kernel (numba-compilable)."""
    n_rep = sources.shape[0]
    T = xnext.shape[0]
    ayl = 1
    for _ in range(l):
        ayl *= ay
    n_states = ax * axk * ayl
    out = np.empty(n_rep, dtype=np.float64)
    for rep in range(n_rep):
        counts = np.zeros(n_states, dtype=np.int64)
        for r in range(T):
            t = t0 + r
            yb = 0
            p = 1
            for j in range(l):
                yb += sources[rep, t - j] * p
                p *= ay
            counts[(xnext[r] * axk + xblk[r]) * ayl + yb] += 1
        c_xy = np.zeros(axk * ayl, dtype=np.int64)
        c_nx = np.zeros(ax * axk, dtype=np.int64)
        c_x = np.zeros(axk, dtype=np.int64)
        for nx in range(ax):
            for xb in range(axk):
                base = (nx * axk + xb) * ayl
                for yb in range(ayl):
                    c = counts[base + yb]
                    c_xy[xb * ayl + yb] += c
                    c_nx[nx * axk + xb] += c
        for nx in range(ax):
            for xb in range(axk):
                c_x[xb] += c_nx[nx * axk + xb]
        te = 0.0
        for nx in range(ax):
            for xb in range(axk):
                base = (nx * axk + xb) * ayl
                for yb in range(ayl):
                    c = counts[base + yb]
                    if c > 0:
                        num = c * c_x[xb]
                        den = c_xy[xb * ayl + yb] * c_nx[nx * axk + xb]
                        te += c * math.log2(num / den)
        out[rep] = te / T
    return out


def _te_batch_numpy(xnext, xblk, sources, l, ay, t0, ax, axk):
    """Vectorized fallback for te_batch."""
    n_rep = sources.shape[0]
    T = xnext.shape[0]
    ayl = ay**l
    n_states = ax * axk * ayl
    out = np.empty(n_rep, dtype=np.float64)
    base = (xnext * axk + xblk) * ayl
    for rep in range(n_rep):
        src = sources[rep]
        yb = np.zeros(T, dtype=np.int64)
        p = 1
        for j in range(l):
            yb += src[t0 - j : t0 - j + T] * p
            p *= ay
        counts = np.bincount(base + yb, minlength=n_states).reshape(ax, axk, ayl)
        c_xy = counts.sum(axis=0)
        c_nx = counts.sum(axis=2)
        c_x = c_nx.sum(axis=0)
        nz = np.nonzero(counts.reshape(-1))[0]  # ascending flat order
        inx, ixb, iyb = np.unravel_index(nz, (ax, axk, ayl))
        c = counts.reshape(-1)[nz]
        num = c * c_x[ixb]
        den = c_xy[ixb, iyb] * c_nx[inx, ixb]
        out[rep] = float(np.sum(c * np.log2(num / den))) / T
    return out


def _markov_paths_loops(init_blocks, trans, row_tot, marg, uniforms, order, ay):
    """Loop form of the Markov resampler (numba-compilable)."""
    n_rep, n = uniforms.shape
    n_blocks = init_blocks.shape[0]
    n_sym = 0
    for v in range(ay):
        n_sym += marg[v]
    shift = 1
    for _ in range(order - 1):
        shift *= ay
    out = np.empty((n_rep, n), dtype=np.int64)
    for rep in range(n_rep):
        b = int(uniforms[rep, 0] * n_blocks)
        if b >= n_blocks:
            b = n_blocks - 1
        for j in range(order):
            out[rep, j] = init_blocks[b, j]
        # state code: the most recent symbol carries weight ay**0
        s = 0
        for j in range(order):
            s += out[rep, order - 1 - j] * (ay**j)
        for t in range(order, n):
            tot = row_tot[s]
            if tot > 0:
                thresh = uniforms[rep, t] * tot
                cum = 0
                v = ay - 1
                for cand in range(ay):
                    cum += trans[s, cand]
                    if thresh < cum:
                        v = cand
                        break
            else:
                thresh = uniforms[rep, t] * n_sym
                cum = 0
                v = ay - 1
                for cand in range(ay):
                    cum += marg[cand]
                    if thresh < cum:
                        v = cand
                        break
            out[rep, t] = v
            s = (s % shift) * ay + v
    return out


def _markov_paths_numpy(init_blocks, trans, row_tot, marg, uniforms, order, ay):
    """Vectorized fallback: advances all replicates one step at a time."""
    n_rep, n = uniforms.shape
    n_blocks = init_blocks.shape[0]
    n_sym = int(marg.sum())
    shift = ay ** (order - 1)
    out = np.empty((n_rep, n), dtype=np.int64)
    b = (uniforms[:, 0] * n_blocks).astype(np.int64)
    np.minimum(b, n_blocks - 1, out=b)
    out[:, :order] = init_blocks[b]
    weights = ay ** np.arange(order - 1, -1, -1, dtype=np.int64)
    s = out[:, :order] @ weights
    cum_trans = np.cumsum(trans, axis=1)
    cum_marg = np.cumsum(marg)
    for t in range(order, n):
        tot = row_tot[s]
        thresh = np.where(tot > 0, uniforms[:, t] * tot, uniforms[:, t] * n_sym)
        cum = np.where(tot[:, None] > 0, cum_trans[s], cum_marg[None, :])
        v = (cum <= thresh[:, None]).sum(axis=1)
        np.minimum(v, ay - 1, out=v)
        out[:, t] = v
        s = (s % shift) * ay + v
    return out


_env_flag = os.environ.get("TEFLOW_DISABLE_NUMBA", "").strip().lower()
_DISABLED = _env_flag in {"1", "true", "yes"}

try:
    from numba import njit

    _HAVE_NUMBA = True
except ImportError:  # pragma: no cover - numba is a hard dependency normally
    _HAVE_NUMBA = False

if _HAVE_NUMBA:
    _te_batch_jit = njit(cache=True)(_te_batch_loops)
    _markov_paths_jit = njit(cache=True)(_markov_paths_loops)

USE_NUMBA = _HAVE_NUMBA and not _DISABLED

if USE_NUMBA:
    te_batch = _te_batch_jit
    markov_paths = _markov_paths_jit
else:
    te_batch = _te_batch_numpy
    markov_paths = _markov_paths_numpy


def backend_name() -> str:
    """Name of the active kernel backend ("numba" or "numpy")."""
    return "numba" if USE_NUMBA else "numpy"
