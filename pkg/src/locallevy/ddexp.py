"""Divided differences of the exponential over complex nodes.

The series pricer needs the bracket

    sum_k e^{t x_k} / prod_{j != k} (x_k - x_j)

which is the Newton divided difference of s -> e^{t s} over the nodes x_k.
Evaluating that sum literally is numerically hopeless when nodes (nearly)
coincide, which happens systematically as beta -> 0 and accidentally on any
shifted contour.  Instead we use the Opitz representation: the table of
divided differences of f equals f(J), where J is the upper bidiagonal matrix
with the nodes on the diagonal and ones above it.  The first row of e^J
therefore carries every order at once:

    (e^J)[0, n] = e[x_0, ..., x_n].

e^J is computed by a shifted, scaled Taylor sum.  After subtracting the node
mean, the Taylor sum has no catastrophic cancellation as long as the node
spread is O(1); wider node sets are scaled down by 2^s and squared back up.
Nodes within a batch row share one matrix, so all orders n = 0..m-1 cost a
single pass.
"""

from __future__ import annotations

import numpy as np

__all__ = ["expdd_first_row", "divided_diff_exp"]

# Max node spread (after centering) handled by the direct Taylor sum; wider
# sets go through scaling-and-squaring.  Cancellation in the Taylor sum grows
# like e^{2 theta}, so keep theta small.
_THETA = 1.75
_MAX_TERMS = 64


def _taylor_first_row(zc: np.ndarray) -> np.ndarray:
    """First row of e^A, A = bidiag(zc; ones), via the direct Taylor sum.

    zc: (B, m) centered nodes with spread <= ~theta.  Exploits bidiagonality:
    a row vector v maps to (v A)[i] = v[i] zc[i] + v[i-1].
    """
    B, m = zc.shape
    v = np.zeros((B, m), dtype=complex)
    v[:, 0] = 1.0
    acc = v.copy()
    for j in range(1, _MAX_TERMS):
        shifted = np.zeros_like(v)
        shifted[:, 1:] = v[:, :-1]
        v = (v * zc + shifted) / j
        acc += v
        if np.max(np.abs(v)) <= 1e-20 * max(np.max(np.abs(acc)), 1.0):
            break
    return acc


def _squared_first_row(zc: np.ndarray, s: np.ndarray) -> np.ndarray:
    """First row of e^A for wide node sets, by scaling 2^-s, Taylor, squaring."""
    B, m = zc.shape
    out = np.empty((B, m), dtype=complex)
    for s_val in np.unique(s):
        sel = s == s_val
        scale = 0.5**s_val
        A = np.zeros((int(np.count_nonzero(sel)), m, m), dtype=complex)
        idx = np.arange(m)
        A[:, idx, idx] = zc[sel] * scale
        A[:, idx[:-1], idx[:-1] + 1] = scale
        F = np.broadcast_to(np.eye(m, dtype=complex), A.shape).copy()
        term = F.copy()
        for j in range(1, _MAX_TERMS):
            term = term @ A / j
            F += term
            if np.max(np.abs(term)) <= 1e-20:
                break
        for _ in range(int(s_val)):
            F = F @ F
        out[sel] = F[:, 0, :]
    return out


def expdd_first_row(z: np.ndarray) -> np.ndarray:
    """All-order divided differences of exp over batches of complex nodes.

    z: (..., m) nodes.  Returns r with r[..., n] = e[z_0, ..., z_n], the
    divided difference of the exponential over the first n+1 nodes of each
    row.  Confluent (coinciding) nodes are handled exactly by construction.
    """
    z = np.asarray(z, dtype=complex)
    if z.ndim == 0 or z.shape[-1] == 0:
        raise ValueError("need at least one node")
    lead_shape = z.shape[:-1]
    m = z.shape[-1]
    zf = z.reshape(-1, m)

    mu = zf.mean(axis=1, keepdims=True)
    zc = zf - mu
    if m == 1:
        return np.exp(zf).reshape(*lead_shape, m)

    spread = np.max(np.abs(zc), axis=1)
    out = np.empty_like(zf)
    fast = spread <= _THETA
    if np.any(fast):
        out[fast] = _taylor_first_row(zc[fast])
    if not np.all(fast):
        slow = ~fast
        s = np.ceil(np.log2(spread[slow] / _THETA)).astype(int)
        out[slow] = _squared_first_row(zc[slow], s)
    out *= np.exp(mu)
    return out.reshape(*lead_shape, m)


def divided_diff_exp(t: float, nodes) -> complex:
    """Divided difference of s -> e^{t s} over the given complex nodes.

    Single node gives e^{t x}; a confluent pair gives t e^{t x}; in general
    this is the bracket sum_k e^{t x_k} / prod_{j != k}(x_k - x_j) with exact
    confluent limits.
    """
    x = np.atleast_1d(np.asarray(nodes, dtype=complex))
    if x.ndim != 1 or x.size == 0:
        raise ValueError("nodes must be a nonempty 1-d sequence")
    n = x.size - 1
    row = expdd_first_row(t * x[None, :])[0]
    return complex(t**n * row[n])
