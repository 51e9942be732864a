# cython: boundscheck=False, wraparound=False, cdivision=True, initializedcheck=False
"""Cyclic Jacobi eigendecomposition for complex Hermitian matrices.

This is the hot kernel: the semidefinite feasibility solver projects onto
the PSD cone once per iteration, so it performs thousands of small
eigendecompositions per certificate. A direct C loop avoids the LAPACK
dispatch overhead that dominates at these sizes.
"""
import numpy as np

cimport numpy as cnp
from libc.math cimport sqrt

cnp.import_array()


cdef double _offdiag_norm(double complex[:, ::1] A, Py_ssize_t n) noexcept nogil:
    cdef double acc = 0.0
    cdef Py_ssize_t p, q
    cdef double complex z
    for p in range(n - 1):
        for q in range(p + 1, n):
            z = A[p, q]
            acc += z.real * z.real + z.imag * z.imag
    return sqrt(2.0 * acc)


cdef double _frobenius(double complex[:, ::1] A, Py_ssize_t n) noexcept nogil:
    cdef double acc = 0.0
    cdef Py_ssize_t p, q
    cdef double complex z
    for p in range(n):
        for q in range(n):
            z = A[p, q]
            acc += z.real * z.real + z.imag * z.imag
    return sqrt(acc)


cdef void _rotate(double complex[:, ::1] A, double complex[:, ::1] Vt,
                  Py_ssize_t n, Py_ssize_t p, Py_ssize_t q) noexcept nogil:
    # Annihilates A[p,q] with a complex rotation; touches rows p and q of A
    # (mirroring into the columns) and rows p and q of the transposed
    # eigenvector accumulator, so all inner loops run over contiguous memory.
    cdef double complex g = A[p, q]
    cdef double absg = sqrt(g.real * g.real + g.imag * g.imag)
    if absg == 0.0:
        return
    cdef double alpha = A[p, p].real
    cdef double beta = A[q, q].real
    cdef double tau = (beta - alpha) / (2.0 * absg)
    cdef double t
    if tau >= 0.0:
        t = 1.0 / (tau + sqrt(1.0 + tau * tau))
    else:
        t = -1.0 / (-tau + sqrt(1.0 + tau * tau))
    cdef double c = 1.0 / sqrt(1.0 + t * t)
    cdef double s = t * c
    cdef double complex phase = g / absg
    cdef double complex sph = s * phase              # s e^{+i phi}
    cdef double complex sphc = sph.conjugate()       # s e^{-i phi}

    cdef Py_ssize_t i
    cdef double complex api, aqi, npi, nqi, vp, vq
    for i in range(p):
        api = A[p, i]
        aqi = A[q, i]
        npi = c * api - sph * aqi
        nqi = sphc * api + c * aqi
        A[p, i] = npi
        A[q, i] = nqi
        A[i, p] = npi.conjugate()
        A[i, q] = nqi.conjugate()
    for i in range(p + 1, q):
        api = A[p, i]
        aqi = A[q, i]
        npi = c * api - sph * aqi
        nqi = sphc * api + c * aqi
        A[p, i] = npi
        A[q, i] = nqi
        A[i, p] = npi.conjugate()
        A[i, q] = nqi.conjugate()
    for i in range(q + 1, n):
        api = A[p, i]
        aqi = A[q, i]
        npi = c * api - sph * aqi
        nqi = sphc * api + c * aqi
        A[p, i] = npi
        A[q, i] = nqi
        A[i, p] = npi.conjugate()
        A[i, q] = nqi.conjugate()
    A[p, p] = alpha * c * c - 2.0 * c * s * absg + beta * s * s
    A[q, q] = alpha * s * s + 2.0 * c * s * absg + beta * c * c
    A[p, q] = 0.0
    A[q, p] = 0.0
    for i in range(n):
        vp = Vt[p, i]
        vq = Vt[q, i]
        Vt[p, i] = c * vp - sphc * vq
        Vt[q, i] = sph * vp + c * vq


cdef int _sweeps(double complex[:, ::1] A, double complex[:, ::1] Vt,
                 Py_ssize_t n, double tol) noexcept nogil:
    cdef int sweep
    cdef Py_ssize_t p, q
    cdef double complex g
    cdef double skip = tol / (4.0 * n)
    cdef double skip2 = skip * skip
    for sweep in range(64):
        if _offdiag_norm(A, n) <= tol:
            return sweep
        for p in range(n - 1):
            for q in range(p + 1, n):
                g = A[p, q]
                if g.real * g.real + g.imag * g.imag > skip2:
                    _rotate(A, Vt, n, p, q)
    if _offdiag_norm(A, n) <= tol:
        return 64
    return -1


def eigh(a):
    """Eigenpairs of a Hermitian matrix; eigenvalues ascending.

    Returns ``(w, V)`` with ``a ~= V @ diag(w) @ V.conj().T`` and unitary V.
    The input is not checked for Hermitian symmetry; callers symmetrize.
    """
    A = np.array(a, dtype=np.complex128, order="C", copy=True)
    if A.ndim != 2 or A.shape[0] != A.shape[1]:
        raise ValueError(f"matrix must be square, got shape {A.shape}")
    cdef Py_ssize_t n = A.shape[0]
    if n == 0:
        return np.zeros(0), np.zeros((0, 0), dtype=np.complex128)
    Vt = np.eye(n, dtype=np.complex128)
    cdef double complex[:, ::1] Am = A
    cdef double complex[:, ::1] Vm = Vt
    cdef double fro = _frobenius(Am, n)
    cdef int status
    if fro > 0.0:
        with nogil:
            status = _sweeps(Am, Vm, n, 1e-14 * fro)
        if status < 0:
            raise RuntimeError("jacobi sweeps did not converge")
    w = np.diagonal(A).real.copy()
    order = np.argsort(w, kind="stable")
    return w[order], np.ascontiguousarray(Vt.T[:, order])
