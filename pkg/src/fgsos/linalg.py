"""Dense complex matrix kernel.

Everything funnels through :func:`herm_eig`, which dispatches to the
compiled cyclic-Jacobi kernel when available (see :mod:`fgsos._backends`).
All randomness is explicit: :func:`haar_unitary` takes a seed and never
touches global state.
"""
from __future__ import annotations

import numpy as np

from ._backends import backend_name, eigh_core
from .exceptions import MalformedInputError, NotHermitianError, NotPsdError

__all__ = [
    "herm_eig",
    "min_eigenvalue",
    "psd_sqrt",
    "rank_factor",
    "haar_unitary",
    "backend_name",
]


def _as_square(a) -> np.ndarray:
    arr = np.asarray(a, dtype=complex)
    if arr.ndim != 2 or arr.shape[0] != arr.shape[1]:
        raise MalformedInputError(f"expected a square matrix, got shape {arr.shape}")
    if not np.all(np.isfinite(arr.view(float))):
        raise MalformedInputError("matrix contains NaN or Inf")
    return arr


def herm_eig(a, herm_tol: float = 1e-10):
    """Eigendecomposition of a Hermitian matrix.

    Returns ``(w, V)`` with eigenvalues descending and unitary V whose k-th
    column is the eigenvector for ``w[k]``.  The input is symmetrized
    internally; deviation from Hermitian symmetry beyond
    ``herm_tol * max|A|`` is an error.
    """
    arr = _as_square(a)
    scale = float(np.abs(arr).max()) if arr.size else 0.0
    if scale > 0.0 and float(np.abs(arr - arr.conj().T).max()) > herm_tol * scale:
        raise NotHermitianError(
            f"matrix is not Hermitian within {herm_tol:g} relative tolerance"
        )
    sym = (arr + arr.conj().T) / 2
    w, v = eigh_core(sym)
    return w[::-1].copy(), np.ascontiguousarray(v[:, ::-1])


def min_eigenvalue(a) -> float:
    """Smallest eigenvalue of a Hermitian matrix."""
    w, _ = herm_eig(a)
    return float(w[-1])


def psd_sqrt(a, clamp_tol: float = 1e-8) -> np.ndarray:
    """Hermitian PSD square root V sqrt(max(lambda, 0)) V^dagger.

    Eigenvalues below ``-clamp_tol`` are an error; small negatives inside
    the clamp are treated as zero.
    """
    w, v = herm_eig(a)
    if w[-1] < -clamp_tol:
        raise NotPsdError(f"matrix has eigenvalue {w[-1]:.3e} < -clamp_tol")
    root = np.sqrt(np.clip(w, 0.0, None))
    return (v * root) @ v.conj().T


def rank_factor(a, rank_tol: float = 1e-9, neg_tol: float | None = None):
    """Low-rank factor of a Hermitian PSD matrix: A = L L^dagger.

    ``rank`` counts eigenvalues above ``rank_tol * lambda_max``; L has that
    many columns.  A significantly negative eigenvalue is an error; the
    default threshold is ``rank_tol * max|lambda|``, overridable through
    ``neg_tol`` (absolute) when the caller tolerates a known PSD slack.
    """
    w, v = herm_eig(a)
    if w.size == 0:
        return np.zeros((0, 0), complex), 0
    wmax_abs = float(np.abs(w).max())
    if neg_tol is None:
        neg_tol = rank_tol * wmax_abs
    if w[-1] < -neg_tol:
        raise NotPsdError(
            f"matrix has eigenvalue {w[-1]:.3e}, beyond PSD tolerance {neg_tol:g}"
        )
    lam_max = max(float(w[0]), 0.0)
    rank = int(np.sum(w > rank_tol * lam_max)) if lam_max > 0.0 else 0
    L = v[:, :rank] * np.sqrt(np.clip(w[:rank], 0.0, None))
    return L, rank


def haar_unitary(N: int, seed: int) -> np.ndarray:
    """Haar-distributed random unitary, deterministic for a given seed.

    QR of an i.i.d. complex Gaussian matrix with the phases of R's diagonal
    folded into Q.
    """
    if N < 1:
        raise MalformedInputError(f"dimension must be >= 1, got {N}")
    rng = np.random.default_rng(seed)
    z = (rng.standard_normal((N, N)) + 1j * rng.standard_normal((N, N))) / np.sqrt(2)
    q, r = np.linalg.qr(z)
    d = np.diagonal(r)
    phases = np.where(np.abs(d) > 0, d / np.where(np.abs(d) > 0, np.abs(d), 1.0), 1.0)
    return q * phases


def svd_triplets(a, zero_tol: float = 1e-12):
    """SVD ``A = U diag(s) V^dagger`` built on the Hermitian eigensolver.

    Uses the Hermitian embedding [[0, A], [A^dagger, 0]] whose positive
    spectrum is the singular values.  Eigenvectors inside the near-zero
    cluster mix the +/- pairs, so the corresponding singular vectors are
    re-orthonormalized against the well-separated ones.

    Internal helper (the dilation needs left and right factors that commute
    through the same singular values exactly); not part of the public kernel
    surface.
    """
    arr = _as_square(a)
    h = arr.shape[0]
    emb = np.zeros((2 * h, 2 * h), complex)
    emb[:h, h:] = arr
    emb[h:, :h] = arr.conj().T
    w, z = herm_eig(emb)  # descending; spectrum is symmetric +/- s
    sig = np.clip(w[:h], 0.0, None)
    U = np.sqrt(2.0) * z[:h, :h]
    V = np.sqrt(2.0) * z[h:, :h]
    cut = max(zero_tol * (sig[0] if h else 0.0), 1e2 * np.finfo(float).tiny)
    small = sig <= cut
    if np.any(small):
        U = _repair_zero_block(U, small)
        V = _repair_zero_block(V, small)
    return U, sig, V


def _repair_zero_block(B: np.ndarray, small: np.ndarray) -> np.ndarray:
    """Replace the near-zero singular columns by an orthonormal complement."""
    good = B[:, ~small]
    proj = np.eye(B.shape[0], dtype=complex) - good @ good.conj().T
    w, v = herm_eig(proj)
    k = int(np.sum(small))
    out = B.copy()
    out[:, small] = v[:, :k]
    return out
