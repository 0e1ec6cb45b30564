"""Small dense complex-matrix kernel.

Operators are plain ``numpy.ndarray`` of shape (d, d) and dtype complex128.
"""

from __future__ import annotations

from functools import reduce

import numpy as np
import scipy.linalg

ATOL = 1e-10
CLUSTER_TOL = 1e-8
RANK_RTOL = 1e-8
# fixed seed for the random Hermitian combination used in joint diagonalization
JOINT_SEED = 20130911


class NotCommutingError(ValueError):
    pass


def _square(A):
    A = np.asarray(A)
    if A.ndim != 2 or A.shape[0] != A.shape[1]:
        raise ValueError(f"expected a square matrix, got shape {A.shape}")
    return A


def dag(A):
    return np.conj(np.asarray(A)).T


def hs_inner(A, B) -> complex:
    """Hilbert-Schmidt inner product ``tr(A^* B)``."""
    A, B = _square(A), _square(B)
    if A.shape != B.shape:
        raise ValueError(f"dimension mismatch: {A.shape} vs {B.shape}")
    return complex(np.vdot(A, B))


def kron(*mats):
    return reduce(np.kron, mats)


def commutator(A, B):
    return A @ B - B @ A


def is_hermitian(A, tol: float = ATOL) -> bool:
    A = _square(A)
    return bool(np.allclose(A, dag(A), atol=tol, rtol=0))


def is_unitary(A, tol: float = ATOL) -> bool:
    A = _square(A)
    return bool(np.allclose(dag(A) @ A, np.eye(len(A)), atol=tol, rtol=0))


def is_projection(A, tol: float = ATOL) -> bool:
    A = _square(A)
    return is_hermitian(A, tol) and bool(np.allclose(A @ A, A, atol=tol, rtol=0))


def rank_one_projector(v):
    v = np.asarray(v, dtype=complex)
    v = v / np.linalg.norm(v)
    return np.outer(v, v.conj())


def _cluster(values, tol):
    """Split sorted-by-angle eigenvalues into groups closer than ``tol``."""
    order = np.argsort(np.mod(np.angle(values), 2 * np.pi), kind="stable")
    groups = []
    for i in order:
        for g in groups:
            if abs(values[g[0]] - values[i]) < tol:
                g.append(i)
                break
        else:
            groups.append([i])
    return groups


def _split(basis, op, tol):
    """Refine the subspace spanned by ``basis`` columns into eigenspaces of ``op``."""
    if basis.shape[1] == 1:
        return [basis]
    M = dag(basis) @ op @ basis
    T, Z = scipy.linalg.schur(M, output="complex")
    vals = np.diag(T)
    return [basis @ Z[:, g] for g in _cluster(vals, tol)]


def joint_eigensystem(ops, tol: float = CLUSTER_TOL, check_tol: float = ATOL):
    """Common eigenspaces of a commuting family of unitaries.

    Returns ``(projections, eigenvalues)`` where ``eigenvalues[i][j]`` is
    the eigenvalue of ``ops[j]`` on ``projections[i]``.  Projections are
    ordered by their eigenvalue tuples, each entry compared by angle in
    [0, 2 pi) after rounding at ``tol``.
    """
    ops = [_square(np.asarray(U, dtype=complex)) for U in ops]
    if not ops:
        raise ValueError("empty operator list")
    d = len(ops[0])
    for U in ops:
        if U.shape != (d, d):
            raise ValueError("dimension mismatch")
        if not is_unitary(U, check_tol):
            raise ValueError("input operator is not unitary")
    for i, A in enumerate(ops):
        for B in ops[i + 1 :]:
            if np.linalg.norm(commutator(A, B)) > check_tol * max(1, d):
                raise NotCommutingError("operators do not commute")

    rng = np.random.default_rng(JOINT_SEED)
    c = rng.standard_normal((len(ops), 2))
    H = sum(a * (U + dag(U)) / 2 + b * (U - dag(U)) / 2j for (a, b), U in zip(c, ops))
    w, V = np.linalg.eigh(H)
    blocks = []
    start = 0
    for i in range(1, d + 1):
        if i == d or w[i] - w[i - 1] >= tol:
            blocks.append(V[:, start:i])
            start = i
    for U in ops:
        blocks = [piece for B in blocks for piece in _split(B, U, tol)]

    projs = [B @ dag(B) for B in blocks]
    evals = [
        tuple(complex(np.trace(P @ U) / np.trace(P).real) for U in ops) for P in projs
    ]

    def key(i):
        angles = np.mod(np.angle(evals[i]), 2 * np.pi)
        return tuple(np.round(angles / tol) * tol)

    order = sorted(range(len(projs)), key=key)
    return [projs[i] for i in order], [evals[i] for i in order]


def joint_eigenprojections(ops, tol: float = CLUSTER_TOL):
    """Mutually orthogonal projections onto the joint eigenspaces of ``ops``."""
    return joint_eigensystem(ops, tol)[0]


def hermitian_vectors(mats):
    """Stack Hermitian matrices as real vectors (real and imaginary parts)."""
    M = np.array([np.asarray(A) for A in mats])
    flat = M.reshape(len(M), -1)
    return np.concatenate([flat.real, flat.imag], axis=1)


def real_span_rank(mats, tol: float = RANK_RTOL, herm_tol: float = ATOL) -> int:
    """Dimension of the real span of a list of Hermitian matrices."""
    mats = list(mats)
    if not mats:
        return 0
    for A in mats:
        if not is_hermitian(A, herm_tol):
            raise ValueError("real_span_rank needs Hermitian input")
    V = hermitian_vectors(mats)
    # Gram matrix in whichever space is smaller; nonzero spectra coincide
    G = V @ V.T if V.shape[0] <= V.shape[1] else V.T @ V
    sv = np.linalg.svd(G, compute_uv=False)
    if sv[0] == 0:
        return 0
    return int(np.sum(sv > tol * sv[0]))
