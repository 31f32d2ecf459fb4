"""Hot loops: bounded BFS, the likelihood-ratio test matrix, plus-variant counts.

Every public function dispatches to a numba kernel or to a numpy/scipy
fallback, depending on :func:`awcd._accel.numba_enabled`.  Both paths
compute the same quantities; the numba versions avoid the large dense
temporaries of the vectorised fallbacks.
"""
import math

import numpy as np
import scipy.sparse as sp

from ._accel import njit, numba_enabled

ROW_BLOCK = 512
EDGE_BLOCK = 2048


# --------------------------------------------------------------------------
# bounded BFS distances

@njit(cache=True)
def _bounded_distances_nb(indptr, indices, n, k):
    dist = np.full((n, n), -1, dtype=np.int16)
    queue = np.empty(n, dtype=np.int64)
    for s in range(n):
        row = dist[s]
        row[s] = 0
        head = 0
        tail = 1
        queue[0] = s
        while head < tail:
            u = queue[head]
            head += 1
            du = row[u]
            if du >= k:
                continue
            for p in range(indptr[u], indptr[u + 1]):
                v = indices[p]
                if row[v] < 0:
                    row[v] = du + 1
                    queue[tail] = v
                    tail += 1
    return dist


def _bounded_distances_np(adj, k):
    n = adj.shape[0]
    dist = np.full((n, n), -1, dtype=np.int16)
    np.fill_diagonal(dist, 0)
    a = adj.astype(np.float32).tocsr()
    frontier = sp.identity(n, dtype=np.float32, format="csr")
    reached = np.eye(n, dtype=bool)
    for d in range(1, k + 1):
        nxt = (frontier @ a).toarray() > 0
        nxt &= ~reached
        if not nxt.any():
            break
        dist[nxt] = d
        reached |= nxt
        frontier = sp.csr_matrix(nxt.astype(np.float32))
    return dist


def bounded_distances(adj, k):
    adj = sp.csr_matrix(adj)
    n = adj.shape[0]
    if numba_enabled():
        return _bounded_distances_nb(adj.indptr.astype(np.int64), adj.indices.astype(np.int64), n, int(k))
    return _bounded_distances_np(adj, int(k))


# --------------------------------------------------------------------------
# likelihood-ratio test matrix

@njit(cache=True)
def _kl_nb(p, q):
    out = 0.0
    if p > 0.0:
        if q <= 0.0:
            return np.inf
        out += p * math.log(p / q)
    if p < 1.0:
        if q >= 1.0:
            return np.inf
        out += (1.0 - p) * math.log((1.0 - p) / (1.0 - q))
    return out if out > 0.0 else 0.0


@njit(cache=True)
def _term_nb(s, n, pooled):
    if n <= 0.0:
        return 0.0
    kl = _kl_nb(s / n, pooled)
    if kl == 0.0:
        return 0.0
    return n * kl


@njit(cache=True)
def _test_matrix_nb(S, N):
    n = S.shape[0]
    T = np.zeros((n, n), dtype=np.float64)
    for i in range(n):
        s_ii = S[i, i]
        n_ii = N[i, i]
        for j in range(i + 1, n):
            n_ij = N[i, j]
            if n_ij <= 0.0:
                t = np.inf
            else:
                s_jj = S[j, j]
                n_jj = N[j, j]
                s_ij = S[i, j]
                pooled = (s_ii + 2.0 * s_ij + s_jj) / (n_ii + 2.0 * n_ij + n_jj)
                t = _term_nb(s_ii, n_ii, pooled) + _term_nb(s_jj, n_jj, pooled) + _term_nb(s_ij, n_ij, pooled)
            T[i, j] = t
            T[j, i] = t
    return T


def kl_array(p, q):
    """Vectorised Bernoulli KL divergence with the 0 log 0 = 0 convention."""
    p = np.asarray(p, dtype=np.float64)
    q = np.asarray(q, dtype=np.float64)
    with np.errstate(divide="ignore", invalid="ignore"):
        a = np.where(p > 0, p * np.log(p / q), 0.0)
        b = np.where(p < 1, (1 - p) * np.log((1 - p) / (1 - q)), 0.0)
    out = a + b
    return np.maximum(out, 0.0)


def _terms_np(s, n, pooled):
    with np.errstate(divide="ignore", invalid="ignore"):
        theta = np.where(n > 0, s / np.where(n > 0, n, 1.0), 0.0)
        kl = kl_array(theta, pooled)
        return np.where((n > 0) & (kl > 0), n * kl, 0.0)


def _test_matrix_np(S, N):
    n = S.shape[0]
    T = np.empty((n, n), dtype=np.float64)
    s_diag = np.diag(S).copy()
    n_diag = np.diag(N).copy()
    for lo in range(0, n, ROW_BLOCK):
        hi = min(lo + ROW_BLOCK, n)
        s_ij = S[lo:hi]
        n_ij = N[lo:hi]
        s_ii = s_diag[lo:hi, None]
        n_ii = n_diag[lo:hi, None]
        den = n_ii + 2.0 * n_ij + n_diag[None, :]
        with np.errstate(divide="ignore", invalid="ignore"):
            pooled = np.where(den > 0, (s_ii + 2.0 * s_ij + s_diag[None, :]) / np.where(den > 0, den, 1.0), 0.0)
        block = _terms_np(np.broadcast_to(s_ii, s_ij.shape), np.broadcast_to(n_ii, n_ij.shape), pooled)
        block += _terms_np(np.broadcast_to(s_diag, s_ij.shape), np.broadcast_to(n_diag, n_ij.shape), pooled)
        block += _terms_np(s_ij, n_ij, pooled)
        block[n_ij <= 0] = np.inf
        T[lo:hi] = block
    # the per-pair value is computed from (i, j); mirror the upper triangle
    iu = np.triu_indices(n, 1)
    T[(iu[1], iu[0])] = T[iu]
    np.fill_diagonal(T, 0.0)
    return T


def test_matrix(S, N):
    """Test statistics for every pair from the count matrices ``S`` and ``N``.

    ``T[i, i] = 0``.  For ``i != j`` with ``N[i, j] == 0`` the pair has no
    cross evidence and gets ``+inf``.
    """
    S = np.ascontiguousarray(S, dtype=np.float64)
    N = np.ascontiguousarray(N, dtype=np.float64)
    if numba_enabled():
        return _test_matrix_nb(S, N)
    return _test_matrix_np(S, N)


# --------------------------------------------------------------------------
# plus-variant counts: S and N over (C_i^k \ C_j^{k-1}) x (C_j^k \ C_i^{k-1})

@njit(cache=True)
def _plus_counts_nb(R, P, RA, r_ptr, r_idx, p_ptr, p_idx, a_ptr, a_idx):
    n = R.shape[0]
    S = np.zeros((n, n), dtype=np.float64)
    N = np.zeros((n, n), dtype=np.float64)
    for i in range(n):
        ri = r_ptr[i + 1] - r_ptr[i]
        for j in range(i, n):
            rj = r_ptr[j + 1] - r_ptr[j]
            # sum over v2 in R_j \ P_i of (R A)[i, v2], and |R_i & R_j|
            s = 0.0
            overlap = 0
            rj_minus_pi = 0
            for q in range(r_ptr[j], r_ptr[j + 1]):
                v2 = r_idx[q]
                if R[i, v2]:
                    overlap += 1
                if not P[i, v2]:
                    s += RA[i, v2]
                    rj_minus_pi += 1
            # remove v1 in R_i & P_j
            ri_and_pj = 0
            for q in range(p_ptr[j], p_ptr[j + 1]):
                v1 = p_idx[q]
                if not R[i, v1]:
                    continue
                ri_and_pj += 1
                for e in range(a_ptr[v1], a_ptr[v1 + 1]):
                    v2 = a_idx[e]
                    if R[j, v2] and not P[i, v2]:
                        s -= 1.0
            a_size = ri - ri_and_pj
            count = a_size * rj_minus_pi - overlap
            S[i, j] = s
            S[j, i] = s
            N[i, j] = count
            N[j, i] = count
    return S, N


def _plus_counts_np(R, P, adj):
    Rf = R.astype(np.float64)
    Pf = P.astype(np.float64)
    RA = np.asarray((adj @ Rf.T).T)  # = R @ A for symmetric A
    S = RA @ Rf.T
    S -= Rf @ (Pf.T * RA.T)
    S -= (RA * Pf) @ Rf.T
    coo = sp.coo_matrix(adj)
    u_all, v_all = coo.row, coo.col
    for lo in range(0, u_all.size, EDGE_BLOCK):
        u = u_all[lo:lo + EDGE_BLOCK]
        v = v_all[lo:lo + EDGE_BLOCK]
        X = Rf[:, u].T * Pf[:, v].T
        Y = Pf[:, u].T * Rf[:, v].T
        S += X.T @ Y
    RP = Rf @ Pf.T
    rs = Rf.sum(axis=1)
    a_size = rs[:, None] - RP
    b_size = rs[None, :] - RP.T
    N = a_size * b_size - Rf @ Rf.T
    # the enumeration is defined for i <= j; mirror to keep the result symmetric
    iu = np.triu_indices(R.shape[0], 1)
    for M in (S, N):
        M[(iu[1], iu[0])] = M[iu]
    return S, N


def plus_counts(R, P, adj):
    """Plus-variant ``(S, N)`` for all pairs.

    ``R`` marks each vertex's starting community, ``P`` the set removed from
    the other side (the ``k-1`` ring, or the identity for ``k = 1``);
    ``adj`` is the sparse adjacency.
    """
    R = np.ascontiguousarray(R, dtype=bool)
    P = np.ascontiguousarray(P, dtype=bool)
    adj = sp.csr_matrix(adj)
    if not numba_enabled():
        return _plus_counts_np(R, P, adj)
    RA = np.ascontiguousarray(np.asarray((adj.astype(np.float64) @ R.T.astype(np.float64)).T))
    r_csr = sp.csr_matrix(R)
    p_csr = sp.csr_matrix(P)
    i64 = np.int64
    return _plus_counts_nb(
        R, P, RA,
        r_csr.indptr.astype(i64), r_csr.indices.astype(i64),
        p_csr.indptr.astype(i64), p_csr.indices.astype(i64),
        adj.indptr.astype(i64), adj.indices.astype(i64),
    )
