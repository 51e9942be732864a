"""Sum-of-Hermitian-squares membership via the Gram matrix method.

A symmetric b in M_m(C[F_n]) is a sum sum_k a_k* a_k with factor words in
the basis W_d iff the linear system

    sum_{v^{-1} w = g} G[(v,i), (w,j)] = (B_g)_{ij}   for every reachable g

has a PSD solution G indexed by (word, matrix row).  Zero right-hand sides
for reachable words outside the support are mandatory: the support must be
matched exactly.  An infeasible system yields Farkas multipliers whose
adjoint image is automatically a word-consistent PSD matrix, i.e. a
truncated moment functional with f(b) < 0 after normalization.
"""
from __future__ import annotations

import json
from dataclasses import dataclass

import numpy as np

from .algebra import (
    MatrixPolynomial,
    decode_matrix,
    encode_matrix,
    hermitian_square_sum,
)
from .exceptions import (
    BasisTooSmallError,
    DegenerateNumericsError,
    MalformedInputError,
)
from .linalg import min_eigenvalue, rank_factor
from .sdp import FEASIBLE, INFEASIBLE, SdpProblem, SolveConfig, solve
from .witness import MomentCertificate, pair_table
from .words import ReducedWord, enumerate_basis, format_word, invert, parse_word

__all__ = [
    "GramCertificate",
    "Inconclusive",
    "build_gram_system",
    "extract_factors",
    "certify_sos",
    "default_degree",
    "sos_tolerance",
]


def sos_tolerance(b: MatrixPolynomial) -> float:
    """Default residual tolerance: 1e-6 * (1 + max coefficient magnitude)."""
    return 1e-6 * (1.0 + b.max_abs())


def default_degree(b: MatrixPolynomial) -> int:
    """ceil(d / 2) for d the max word length in b."""
    return (b.degree + 1) // 2


@dataclass(frozen=True)
class GramCertificate:
    """Word basis, PSD Gram matrix, and verified factor decomposition."""

    m: int
    n: int
    degree: int
    basis: tuple
    gram: np.ndarray
    factors: tuple
    residual: float

    def to_obj(self) -> dict:
        return {
            "kind": "sos",
            "m": self.m,
            "n": self.n,
            "degree": self.degree,
            "basis": [format_word(w) for w in self.basis],
            "gram": encode_matrix(self.gram),
            "factors": [a.to_obj() for a in self.factors],
            "residual": float(self.residual),
        }

    def dumps(self, indent: int | None = 2) -> str:
        return json.dumps(self.to_obj(), indent=indent)

    @classmethod
    def from_obj(cls, obj: dict) -> "GramCertificate":
        try:
            m = int(obj["m"])
            n = int(obj["n"])
            degree = int(obj["degree"])
            basis = tuple(parse_word(t, n) for t in obj["basis"])
            gram = decode_matrix(obj["gram"])
            factors = tuple(MatrixPolynomial.from_obj(o) for o in obj["factors"])
            residual = float(obj["residual"])
        except (KeyError, TypeError, ValueError) as exc:
            raise MalformedInputError(f"bad sos certificate: {exc}") from exc
        return cls(m, n, degree, basis, gram, factors, residual)


@dataclass(frozen=True)
class Inconclusive:
    """Neither a Gram certificate nor a dual certificate at this degree."""

    degree: int
    iterations: int
    reason: str = "iteration limit reached with neither tolerance met"


def _gram_layout(b: MatrixPolynomial, d_basis: int):
    """Basis, pair table, and the merged Hermitian constraint list."""
    if d_basis < 0:
        raise MalformedInputError(f"basis degree must be >= 0, got {d_basis}")
    sym_tol = 1e-10 * (1.0 + b.max_abs())
    if not b.is_symmetric(tol=sym_tol):
        raise MalformedInputError("polynomial is not symmetric; SOS is undefined")
    m, n = b.m, b.n
    basis = enumerate_basis(n, d_basis)
    table = pair_table(basis)
    for g in b.support:
        if g not in table:
            raise BasisTooSmallError(
                f"support word {format_word(g)} (length {len(g)}) is unreachable "
                f"at basis degree {d_basis}"
            )
    dim = len(basis) * m
    constraints = []
    seen = set()
    for g in sorted(table, key=ReducedWord.sort_key):
        coeff = b.coeff(g)
        for i in range(m):
            for j in range(m):
                key = (g, i, j)
                if key in seen:
                    continue
                partner = (invert(g), j, i)
                seen.add(key)
                seen.add(partner)
                sel = np.zeros((dim, dim), complex)
                for pv, pw in table[g]:
                    sel[pv * m + i, pw * m + j] += 1.0
                rhs = complex(coeff[i, j])
                if key == partner:
                    constraints.append((sel, rhs.real))
                else:
                    # <S, G> = rhs splits into real and imaginary Hermitian parts
                    constraints.append(((sel + sel.conj().T) / 2, rhs.real))
                    imag_part = (sel - sel.conj().T) / 2j
                    if np.abs(imag_part).max() > 0:
                        constraints.append((imag_part, -rhs.imag))
    return basis, table, dim, constraints


def build_gram_system(b: MatrixPolynomial, d_basis: int) -> SdpProblem:
    """The SDP whose PSD solutions are exactly the Gram matrices of b."""
    _, _, dim, constraints = _gram_layout(b, d_basis)
    return SdpProblem.build(dim, constraints)


def extract_factors(gram: np.ndarray, basis, m: int, n: int,
                    rank_tol: float = 1e-9) -> list[MatrixPolynomial]:
    """Factors a_k from a feasible Gram matrix via its rank factorization.

    Column k of L becomes one factor with a single nonzero row (slot k mod m):
    (A_w)_{slot, j} = conj(L[(w, j), k]).  Then sum_k a_k* a_k reproduces the
    Gram map of L L^dagger.
    """
    L, rank = rank_factor(gram, rank_tol=rank_tol)
    factors = []
    for k in range(rank):
        col = L[:, k]
        slot = k % m
        terms = {}
        for pos, w in enumerate(basis):
            block = col[pos * m:(pos + 1) * m]
            if np.abs(block).max() == 0.0:
                continue
            mat = np.zeros((m, m), complex)
            mat[slot, :] = block.conj()
            terms[w] = mat
        if terms:
            factors.append(MatrixPolynomial(m, n, terms))
    return factors


def _assemble_moment(dual: np.ndarray, basis, m: int, n: int, degree: int,
                     b: MatrixPolynomial) -> MomentCertificate | None:
    """Normalize the Farkas dual matrix into a moment certificate.

    The dual lies in the span of the constraint selectors, so it is
    word-consistent by construction; normalization fixes sum_j f_jj(e) = 1.
    """
    from .witness import average_consistent, moment_objective

    avg, _ = average_consistent(dual, list(basis), m)
    pos_e = 0
    scale = sum(avg[pos_e * m + j, pos_e * m + j].real for j in range(m))
    if scale <= 1e-12:
        return None
    matrix = avg / scale
    objective = moment_objective(matrix, list(basis), m, b)
    if objective >= 0:
        return None
    return MomentCertificate(m, n, degree, tuple(basis), matrix, objective)


def certify_sos(b: MatrixPolynomial, d_basis: int | None = None,
                cfg: SolveConfig | None = None):
    """Decide SOS membership at one basis degree.

    Returns a :class:`GramCertificate` (with independently recomputed
    residual), a :class:`MomentCertificate` (normalized Farkas dual with
    negative objective), or :class:`Inconclusive`.
    """
    if d_basis is None:
        d_basis = default_degree(b)
    basis, table, dim, constraints = _gram_layout(b, d_basis)
    problem = SdpProblem.build(dim, constraints)
    if cfg is None:
        cfg = SolveConfig()
    # the moment normalization rescales the dual spectrum by at most the
    # basis size, so require the dual PSD slack to absorb that factor
    cfg = SolveConfig(
        eps_feas=cfg.eps_feas,
        eps_psd=cfg.eps_psd,
        delta_gap=cfg.delta_gap,
        max_iters=cfg.max_iters,
        check_every=cfg.check_every,
        dual_psd_margin=1.0 / len(basis),
    )
    outcome = solve(problem, cfg)
    if outcome.status == FEASIBLE:
        factors = extract_factors(outcome.gram, basis, b.m, b.n)
        recon = hermitian_square_sum(factors, m=b.m, n=b.n)
        residual = (b - recon).max_abs()
        if residual > sos_tolerance(b):
            raise DegenerateNumericsError(
                f"gram extraction residual {residual:.3e} exceeds "
                f"{sos_tolerance(b):.3e}"
            )
        return GramCertificate(
            m=b.m, n=b.n, degree=d_basis, basis=tuple(basis),
            gram=outcome.gram, factors=tuple(factors), residual=residual,
        )
    if outcome.status == INFEASIBLE:
        cert = _assemble_moment(outcome.dual_matrix, basis, b.m, b.n, d_basis, b)
        if cert is None:
            return Inconclusive(d_basis, outcome.iterations,
                                "degenerate dual certificate")
        return cert
    return Inconclusive(d_basis, outcome.iterations)


def verify_gram(cert: GramCertificate, b: MatrixPolynomial,
                eps_psd: float = 1e-8, eps_sos: float | None = None) -> list[str]:
    """Solver-free re-validation; returns human-readable failure reasons.

    Checks the basis, the PSD Gram matrix, the Gram map against b's
    coefficients, the factor reconstruction, and the declared residual.
    """
    reasons: list[str] = []
    if eps_sos is None:
        eps_sos = sos_tolerance(b)
    if (cert.m, cert.n) != (b.m, b.n):
        return [f"certificate is for M_{cert.m}(C[F_{cert.n}]), polynomial is "
                f"M_{b.m}(C[F_{b.n}])"]
    expected_basis = enumerate_basis(cert.n, cert.degree)
    if list(cert.basis) != expected_basis:
        reasons.append("basis is not the shortlex word basis of the stated degree")
        return reasons
    dim = len(cert.basis) * cert.m
    if cert.gram.shape != (dim, dim):
        reasons.append(f"gram matrix has shape {cert.gram.shape}, expected {dim}x{dim}")
        return reasons
    herm = float(np.abs(cert.gram - cert.gram.conj().T).max())
    if herm > 1e-9 * max(1.0, float(np.abs(cert.gram).max())):
        reasons.append(f"gram matrix is not Hermitian (defect {herm:.3e})")
        return reasons
    lam = min_eigenvalue(cert.gram)
    if lam < -eps_psd:
        reasons.append(f"gram matrix has eigenvalue {lam:.3e} < -{eps_psd:g}")
    table = pair_table(list(cert.basis))
    m = cert.m
    for g in sorted(table, key=ReducedWord.sort_key):
        target = b.coeff(g)
        got = np.zeros((m, m), complex)
        for pv, pw in table[g]:
            got += cert.gram[pv * m:(pv + 1) * m, pw * m:(pw + 1) * m]
        err = float(np.abs(got - target).max())
        if err > eps_sos:
            reasons.append(
                f"gram map misses coefficient of {format_word(g)} by {err:.3e}"
            )
            break
    for k, a in enumerate(cert.factors):
        if (a.m, a.n) != (cert.m, cert.n):
            reasons.append(f"factor {k} has mismatched size")
            return reasons
        if any(w not in table or len(w) > cert.degree for w in a.support):
            reasons.append(f"factor {k} uses words outside the basis")
    recon = hermitian_square_sum(list(cert.factors), m=cert.m, n=cert.n)
    residual = (b - recon).max_abs()
    if residual > eps_sos:
        reasons.append(f"factor reconstruction residual {residual:.3e} > {eps_sos:.3e}")
    if abs(residual - cert.residual) > 1e-9 + 0.1 * eps_sos:
        reasons.append(
            f"declared residual {cert.residual:.3e} does not match recomputed "
            f"{residual:.3e}"
        )
    return reasons
