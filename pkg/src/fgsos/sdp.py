"""Hermitian semidefinite feasibility with Farkas-type dual certificates.

Decides ``{G >= 0 : <A_t, G> = c_t for all t}`` where ``<X, Y> =
trace(X^dagger Y)``.  On infeasibility it returns real multipliers y with

    Z = sum_t y_t A_t   >=  -eps_psd   (as a matrix, after normalization)
    sum_t y_t c_t       <=  -delta_gap

so no PSD matrix can satisfy the constraints: ``<Z, G> >= 0`` for any
``G >= 0`` while ``<Z, G> = sum y_t c_t < 0`` for any G on the affine set.

Algorithm: averaged alternating reflections (Douglas-Rachford) between the
affine subspace and the PSD cone.  The PSD-side shadow iterate converges to
a feasible point when one exists; when the sets are disjoint the affine
projection residual of the shadow stabilizes on the gap displacement, whose
multiplier coefficients are exactly the Farkas certificate.  Plain
alternating projections were measured to stall sublinearly on boundary
instances (every feasible point singular); reflections close them at
machine precision within ~100 iterations.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from ._backends import eigh_core
from .exceptions import MalformedInputError, NotHermitianError

__all__ = ["SdpProblem", "SdpOutcome", "SolveConfig", "solve"]

FEASIBLE = "feasible"
INFEASIBLE = "infeasible"
INCONCLUSIVE = "inconclusive"


@dataclass(frozen=True)
class SdpProblem:
    """PSD variable of side ``dim`` with trace-inner-product equality constraints.

    Every coefficient matrix must be Hermitian; right-hand sides must be real
    (a Hermitian pairing of Hermitian matrices is always real, so a complex
    target is unsatisfiable and is rejected up front).
    """

    dim: int
    matrices: tuple
    rhs: tuple

    @classmethod
    def build(cls, dim: int, constraints: Sequence[tuple]) -> "SdpProblem":
        if dim < 1:
            raise MalformedInputError(f"variable dimension must be >= 1, got {dim}")
        if not constraints:
            raise MalformedInputError("need at least one constraint")
        mats = []
        rhs = []
        for k, (a, c) in enumerate(constraints):
            arr = np.asarray(a, dtype=complex)
            if arr.shape != (dim, dim):
                raise MalformedInputError(
                    f"constraint {k}: expected {dim}x{dim} matrix, got {arr.shape}"
                )
            scale = float(np.abs(arr).max())
            if scale > 0 and float(np.abs(arr - arr.conj().T).max()) > 1e-10 * scale:
                raise NotHermitianError(f"constraint {k}: coefficient matrix not Hermitian")
            cval = complex(c)
            if abs(cval.imag) > 1e-12 * (1.0 + abs(cval)):
                raise MalformedInputError(
                    f"constraint {k}: right-hand side must be real, got {cval}"
                )
            arr = (arr + arr.conj().T) / 2
            arr.flags.writeable = False
            mats.append(arr)
            rhs.append(float(cval.real))
        return cls(dim, tuple(mats), tuple(rhs))


@dataclass(frozen=True)
class SolveConfig:
    eps_feas: float = 1e-7
    eps_psd: float = 1e-8
    delta_gap: float | None = None  # defaults to 1e-6 * ||c||_2
    max_iters: int = 50_000
    check_every: int = 10
    # moment assembly rescales the dual by up to the basis size; callers that
    # need the normalized dual PSD within eps_psd tighten this factor
    dual_psd_margin: float = 1.0
    # keep iterating past the certificate tolerance until the dual is clean at
    # this level: spurious dual eigenvalues must fall below the GNS rank cut
    dual_clean: float = 1e-12


@dataclass
class SdpOutcome:
    status: str
    gram: np.ndarray | None = None
    residual: float | None = None
    psd_slack: float | None = None
    multipliers: np.ndarray | None = None
    dual_matrix: np.ndarray | None = None
    gap: float | None = None
    iterations: int = 0


def solve(problem: SdpProblem, cfg: SolveConfig = SolveConfig()) -> SdpOutcome:
    """Deterministic feasibility decision; see module docstring.

    Feasible: ``gram`` satisfies ``lambda_min >= -eps_psd`` and every
    constraint within ``eps_feas * max(1, |c|_inf)``.  Infeasible:
    ``multipliers`` (normalized so ``||Z||_F = 1``) pass the Farkas
    inequalities above.  Inconclusive only after ``max_iters``.
    """
    dim = problem.dim
    mats = problem.matrices
    c = np.asarray(problem.rhs, dtype=float)

    # rows are conj(vec(A_t)), so Av @ vec(G) stacks <A_t, G>
    Av = np.stack([a.reshape(-1).conj() for a in mats])
    gram_ct = (Av @ Av.conj().T).real
    wk, vk = eigh_core(gram_ct)
    vk = vk.real  # real symmetric input, eigenvectors are real
    keep = wk > 1e-12 * max(wk[-1], 0.0) if wk.size else wk > 0
    if not np.any(keep):
        raise MalformedInputError("all constraint matrices are zero")
    pinv_apply = (vk[:, keep] / wk[keep]) @ vk[:, keep].T

    def apply_A(G):
        return (Av @ G.reshape(-1)).real

    def apply_adjoint(y):
        M = (Av.conj().T @ y).reshape(dim, dim)
        return (M + M.conj().T) / 2

    def project_affine(X):
        return X - apply_adjoint(pinv_apply @ (apply_A(X) - c))

    delta_gap = cfg.delta_gap if cfg.delta_gap is not None else 1e-6 * float(np.linalg.norm(c))
    eps_dual = min(cfg.eps_psd * cfg.dual_psd_margin, cfg.dual_clean)
    scale_c = max(1.0, float(np.abs(c).max()))

    # linear consistency: c must lie in the range of the constraint Gram
    c_perp = c - gram_ct @ (pinv_apply @ c)
    gap0 = float(np.linalg.norm(c_perp))
    if gap0 > max(delta_gap, 1e-10 * (1.0 + float(np.linalg.norm(c)))):
        y = -c_perp
        z = apply_adjoint(y)
        nz = float(np.linalg.norm(z))
        if nz <= 1e-12 * gap0:
            # A*(y) = 0 exactly: the affine set is empty outright
            y = y / gap0
            return SdpOutcome(
                status=INFEASIBLE,
                multipliers=y,
                dual_matrix=apply_adjoint(y),
                gap=float(y @ c),
                iterations=0,
            )

    x = project_affine(np.zeros((dim, dim), complex))
    for it in range(cfg.max_iters):
        x = (x + x.conj().T) / 2
        w, v = eigh_core(x)
        shadow = (v * np.clip(w, 0.0, None)) @ v.conj().T
        resvec = apply_A(shadow) - c
        res = float(np.abs(resvec).max())
        if res <= cfg.eps_feas * scale_c:
            return SdpOutcome(
                status=FEASIBLE,
                gram=shadow,
                residual=res,
                psd_slack=float(min(w[0], 0.0)) if w.size else 0.0,
                iterations=it,
            )
        if it % cfg.check_every == 0:
            y = pinv_apply @ resvec
            z = apply_adjoint(y)
            nz = float(np.linalg.norm(z))
            if nz > 0 and float(y @ c) / nz <= -delta_gap:
                y = y / nz
                z = z / nz
                wz = eigh_core(z)[0]
                if wz[0] >= -eps_dual:
                    return SdpOutcome(
                        status=INFEASIBLE,
                        multipliers=y,
                        dual_matrix=z,
                        gap=float(y @ c),
                        psd_slack=float(wz[0]),
                        iterations=it,
                    )
        x = x + project_affine(2 * shadow - x) - shadow
    return SdpOutcome(status=INCONCLUSIVE, iterations=cfg.max_iters)
