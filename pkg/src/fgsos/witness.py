"""From a refuting moment certificate to an explicit unitary counterexample.

Pipeline: the moment matrix is the Gram matrix of truncated GNS coordinate
vectors; left multiplication by each generator compresses to a contraction
on that space; each contraction dilates to a unitary on the doubled space;
evaluating the polynomial at those unitaries against the embedded cyclic
vector reproduces the moment functional's negative value.

The reproduction is exact in exact arithmetic whenever every support word of
the polynomial splits as u^{-1} v with u, v in the basis: the compressed
generators act isometrically on the directly-defined coordinate vectors, so
the dilation's defect blocks annihilate them and products of dilated
unitaries track the GNS action letter by letter.
"""
from __future__ import annotations

import json
from dataclasses import dataclass

import numpy as np

from .algebra import MatrixPolynomial, decode_matrix, encode_matrix
from .exceptions import (
    CertificateError,
    ContractionViolationError,
    DegenerateNumericsError,
    MalformedInputError,
    WitnessExtractionError,
)
from .linalg import herm_eig, min_eigenvalue, rank_factor, svd_triplets
from .words import ReducedWord, concat, enumerate_basis, format_word, invert, parse_word

__all__ = [
    "MomentCertificate",
    "FiniteRep",
    "WitnessReport",
    "gns_space",
    "compress_generators",
    "dilate",
    "evaluate_rep",
    "extract_witness",
    "trivial_moment",
    "verify_moment",
    "verify_witness",
]


def pair_table(basis: list[ReducedWord]) -> dict[ReducedWord, list[tuple[int, int]]]:
    """For each reachable word g, the basis index pairs (pv, pw) with v^{-1} w = g."""
    table: dict[ReducedWord, list[tuple[int, int]]] = {}
    inverses = [invert(v) for v in basis]
    for pv, vinv in enumerate(inverses):
        for pw, w in enumerate(basis):
            table.setdefault(concat(vinv, w), []).append((pv, pw))
    return table


@dataclass(frozen=True)
class MomentCertificate:
    """Truncated state refuting an SOS decomposition.

    ``matrix[(pv*m + i, pw*m + j)] = f_ij(v^{-1} w)`` over the word basis;
    ``sum_j f_jj(e) = 1``; ``objective = sum_g sum_ij (B_g)_ij f_ji(g^{-1})``
    is required to be negative.
    """

    m: int
    n: int
    degree: int
    basis: tuple
    matrix: np.ndarray
    objective: float

    def __post_init__(self):
        dim = len(self.basis) * self.m
        if self.matrix.shape != (dim, dim):
            raise MalformedInputError(
                f"moment matrix must be {dim}x{dim}, got {self.matrix.shape}"
            )

    def consistency_deviation(self) -> float:
        """Max spread among entries that share (i, j, v^{-1} w)."""
        _, dev = average_consistent(self.matrix, list(self.basis), self.m)
        return dev

    def normalization_deviation(self) -> float:
        pos_e = 0  # shortlex basis starts at the identity
        total = sum(self.matrix[pos_e * self.m + j, pos_e * self.m + j].real
                    for j in range(self.m))
        return abs(total - 1.0)

    def recompute_objective(self, b: MatrixPolynomial) -> float:
        avg, _ = average_consistent(self.matrix, list(self.basis), self.m)
        return moment_objective(avg, list(self.basis), self.m, b)

    def to_obj(self) -> dict:
        return {
            "kind": "moment",
            "m": self.m,
            "n": self.n,
            "degree": self.degree,
            "basis": [format_word(w) for w in self.basis],
            "matrix": encode_matrix(self.matrix),
            "objective": float(self.objective),
        }

    def dumps(self, indent: int | None = 2) -> str:
        return json.dumps(self.to_obj(), indent=indent)

    @classmethod
    def from_obj(cls, obj: dict) -> "MomentCertificate":
        try:
            m = int(obj["m"])
            n = int(obj["n"])
            degree = int(obj["degree"])
            basis = tuple(parse_word(t, n) for t in obj["basis"])
            matrix = decode_matrix(obj["matrix"])
            objective = float(obj["objective"])
        except (KeyError, TypeError, ValueError) as exc:
            raise MalformedInputError(f"bad moment certificate: {exc}") from exc
        return cls(m, n, degree, basis, matrix, objective)


@dataclass(frozen=True)
class FiniteRep:
    """A unitary representation of F_n given by one N x N unitary per generator."""

    n: int
    N: int
    unitaries: tuple

    def __post_init__(self):
        if len(self.unitaries) != self.n:
            raise MalformedInputError(
                f"need {self.n} unitaries, got {len(self.unitaries)}"
            )
        for k, u in enumerate(self.unitaries):
            if u.shape != (self.N, self.N):
                raise MalformedInputError(f"unitary {k + 1} has shape {u.shape}")

    def unitarity_defect(self) -> float:
        eye = np.eye(self.N)
        return max(
            float(np.abs(u.conj().T @ u - eye).max()) for u in self.unitaries
        )

    def word_image(self, w: ReducedWord) -> np.ndarray:
        """Product of the generator unitaries along the word's letters."""
        out = np.eye(self.N, dtype=complex)
        for letter in w:
            u = self.unitaries[abs(letter) - 1]
            out = out @ (u if letter > 0 else u.conj().T)
        return out


@dataclass(frozen=True)
class WitnessReport:
    """Self-contained refutation: unitaries, unit vector, and the negative value."""

    rep: FiniteRep
    xi: np.ndarray
    value: float
    lambda_min: float

    def to_obj(self) -> dict:
        return {
            "kind": "witness",
            "N": self.rep.N,
            "unitaries": [encode_matrix(u) for u in self.rep.unitaries],
            "xi": [[float(z.real), float(z.imag)] for z in self.xi],
            "value": float(self.value),
            "lambda_min": float(self.lambda_min),
        }

    def dumps(self, indent: int | None = 2) -> str:
        return json.dumps(self.to_obj(), indent=indent)

    @classmethod
    def from_obj(cls, obj: dict) -> "WitnessReport":
        try:
            N = int(obj["N"])
            unitaries = tuple(decode_matrix(u) for u in obj["unitaries"])
            xi = np.array([complex(p[0], p[1]) for p in obj["xi"]])
            value = float(obj["value"])
            lam = float(obj["lambda_min"])
        except (KeyError, TypeError, ValueError) as exc:
            raise MalformedInputError(f"bad witness report: {exc}") from exc
        rep = FiniteRep(len(unitaries), N, unitaries)
        return cls(rep, xi, value, lam)


def average_consistent(matrix: np.ndarray, basis: list[ReducedWord], m: int):
    """Average entries sharing (i, j, v^{-1} w); returns (averaged, max deviation)."""
    sym = (matrix + matrix.conj().T) / 2
    out = sym.copy()
    table = pair_table(basis)
    deviation = float(np.abs(matrix - sym).max())
    for g, plist in table.items():
        if len(plist) == 1:
            continue
        for i in range(m):
            for j in range(m):
                vals = np.array([sym[pv * m + i, pw * m + j] for pv, pw in plist])
                mean = vals.mean()
                deviation = max(deviation, float(np.abs(vals - mean).max()))
                for pv, pw in plist:
                    out[pv * m + i, pw * m + j] = mean
    return (out + out.conj().T) / 2, deviation


def moment_objective(matrix: np.ndarray, basis: list[ReducedWord], m: int,
                     b: MatrixPolynomial) -> float:
    """f(b) = sum_g sum_ij (B_g)_ij f_ji(g^{-1}), read from the moment matrix."""
    table = pair_table(basis)
    total = 0j
    for g, coeff in b.items():
        ginv = invert(g)
        if ginv not in table:
            raise MalformedInputError(
                f"support word {format_word(g)} is outside the certificate's reach"
            )
        pv, pw = table[ginv][0]
        for i in range(m):
            for j in range(m):
                total += coeff[i, j] * matrix[pv * m + j, pw * m + i]
    if abs(total.imag) > 1e-8 * (1.0 + abs(total)):
        raise DegenerateNumericsError(
            f"moment objective has imaginary part {total.imag:.3e}"
        )
    return float(total.real)


def trivial_moment(b: MatrixPolynomial, degree: int) -> MomentCertificate:
    """The state of the trivial representation (every generator acts as 1).

    f_ij(g) = delta_ij / m for every word; the moment matrix is the all-ones
    block pattern J (x) I_m / m.  Useful as an oracle: its objective equals
    the evaluation of b at the identity representation.
    """
    basis = enumerate_basis(b.n, degree)
    P = len(basis)
    matrix = np.kron(np.ones((P, P)), np.eye(b.m) / b.m).astype(complex)
    objective = moment_objective(matrix, basis, b.m, b)
    return MomentCertificate(b.m, b.n, degree, tuple(basis), matrix, objective)


def gns_space(cert: MomentCertificate, rank_tol: float = 1e-9,
              eps_psd: float = 1e-8):
    """Rank-factor the moment matrix into GNS coordinate vectors.

    Returns ``(L, h, coords)`` with ``M = L L^dagger``, ``h`` the space
    dimension, and ``coords[pos*m + j]`` the coordinate vector of the basis
    pair (word pos, matrix row j); inner products of coordinate vectors
    reproduce the moment entries.  Negative eigenvalues within the
    certificate's PSD slack ``eps_psd`` are dropped with the null space.
    """
    avg, _ = average_consistent(cert.matrix, list(cert.basis), cert.m)
    L, h = rank_factor(avg, rank_tol=rank_tol, neg_tol=eps_psd)
    coords = L.conj()
    return L, h, coords


def compress_generators(coords: np.ndarray, cert: MomentCertificate) -> list[np.ndarray]:
    """Matrices of left multiplication by each generator on the GNS space.

    Where |x_i w| stays within the basis degree the action is exact:
    coords(j, w) -> coords(j, x_i w).  The remaining basis vectors are fit by
    least squares against the defined moment entries; the joint solution is
    an isometry on the directly-defined span, extended contractively.
    Singular values are clipped to 1; exceeding 1 + 1e-6 means the
    certificate is too noisy to compress.
    """
    basis = list(cert.basis)
    m, n, degree = cert.m, cert.n, cert.degree
    avg, _ = average_consistent(cert.matrix, basis, m)
    index = {w: pos for pos, w in enumerate(basis)}
    table = pair_table(basis)
    h = coords.shape[1]
    dim = len(basis) * m
    X = coords.T  # columns are coordinate vectors

    out = []
    for i in range(1, n + 1):
        gen = ReducedWord(n, (i,))
        targets = np.zeros((h, dim), complex)
        for pos, w in enumerate(basis):
            xiw = concat(gen, w)
            if len(xiw) <= degree:
                tpos = index[xiw]
                for j in range(m):
                    targets[:, pos * m + j] = coords[tpos * m + j]
            else:
                for j in range(m):
                    rows = []
                    rhs = []
                    for qpos, wq in enumerate(basis):
                        g = concat(invert(wq), xiw)
                        plist = table.get(g)
                        if plist is None:
                            continue
                        pv, pw = plist[0]
                        for jq in range(m):
                            rows.append(coords[qpos * m + jq].conj())
                            rhs.append(avg[pv * m + jq, pw * m + j])
                    if rows:
                        tau, *_ = np.linalg.lstsq(np.array(rows), np.array(rhs), rcond=None)
                        targets[:, pos * m + j] = tau
        C = targets @ np.linalg.pinv(X, rcond=1e-12)
        u_s, sig, v_s = svd_triplets(C)
        smax = float(sig[0]) if sig.size else 0.0
        if smax > 1.0 + 1e-6:
            raise ContractionViolationError(
                f"generator {i} compression has singular value {smax:.9f}; "
                "certificate too noisy"
            )
        if smax > 1.0:
            C = (u_s * np.clip(sig, None, 1.0)) @ v_s.conj().T
        out.append(C)
    return out


def dilate(contraction) -> np.ndarray:
    """Unitary dilation [[C, -sqrt(1-CC*)], [sqrt(1-C*C), C*]].

    Both defect square roots are built from one SVD of C so they commute
    through C exactly up to rounding; the top-left block is C itself.
    """
    C = np.asarray(contraction, dtype=complex)
    if C.ndim != 2 or C.shape[0] != C.shape[1]:
        raise MalformedInputError(f"contraction must be square, got {C.shape}")
    h = C.shape[0]
    u_s, sig, v_s = svd_triplets(C)
    sig = np.clip(sig, 0.0, 1.0)
    defect = np.sqrt((1.0 - sig) * (1.0 + sig))
    lower_left = (v_s * defect) @ v_s.conj().T    # sqrt(1 - C*C)
    upper_right = -(u_s * defect) @ u_s.conj().T  # -sqrt(1 - CC*)
    U = np.block([[C, upper_right], [lower_left, C.conj().T]])
    defect_unitary = float(np.abs(U.conj().T @ U - np.eye(2 * h)).max())
    if defect_unitary > 1e-8:
        raise DegenerateNumericsError(
            f"dilation is not unitary (defect {defect_unitary:.3e})"
        )
    inter = float(np.abs(C @ lower_left + upper_right @ C).max())
    if inter > 1e-8:
        raise DegenerateNumericsError(
            f"dilation intertwining identity fails (defect {inter:.3e})"
        )
    return U


def evaluate_rep(rep: FiniteRep, b: MatrixPolynomial) -> np.ndarray:
    """rho_m(b) = sum_g B_g (x) pi(g), block (i, j) of size N at ((i-1)N, (j-1)N)."""
    if rep.n != b.n:
        raise MalformedInputError(
            f"representation of F_{rep.n} applied to a polynomial over F_{b.n}"
        )
    size = b.m * rep.N
    rho = np.zeros((size, size), complex)
    for g, coeff in b.items():
        rho += np.kron(coeff, rep.word_image(g))
    if b.is_symmetric(tol=1e-12 * max(b.max_abs(), 1.0)):
        defect = float(np.abs(rho - rho.conj().T).max())
        if defect > 1e-9 * max(1.0, float(np.abs(rho).max())):
            raise DegenerateNumericsError(
                f"evaluation of a symmetric polynomial is not Hermitian ({defect:.3e})"
            )
    return rho


def extract_witness(cert: MomentCertificate, b: MatrixPolynomial) -> WitnessReport:
    """Build the dilated representation and verify it reproduces f(b) < 0.

    Raises :class:`WitnessExtractionError` if the constructed value is not
    negative or does not agree with the certificate's objective within
    1e-6 * (1 + |objective|).
    """
    if (b.m, b.n) != (cert.m, cert.n):
        raise MalformedInputError("certificate and polynomial sizes do not match")
    avg, dev = average_consistent(cert.matrix, list(cert.basis), cert.m)
    if dev > 1e-6:
        raise CertificateError(
            f"moment consistency deviation {dev:.3e} exceeds 1e-6"
        )
    norm_dev = cert.normalization_deviation()
    if norm_dev > 1e-6:
        raise CertificateError(
            f"moment normalization is off by {norm_dev:.3e}"
        )
    objective = moment_objective(avg, list(cert.basis), cert.m, b)
    if objective >= 0:
        raise WitnessExtractionError(
            f"certificate objective {objective:.3e} is not negative"
        )

    L, h, coords = gns_space(cert)
    contractions = compress_generators(coords, cert)
    unitaries = tuple(dilate(C) for C in contractions)
    rep = FiniteRep(cert.n, 2 * h, unitaries)

    xi = np.zeros(cert.m * 2 * h, complex)
    for j in range(cert.m):
        xi[j * 2 * h: j * 2 * h + h] = coords[j]  # basis position 0 is e
    rho = evaluate_rep(rep, b)
    raw = xi.conj() @ rho @ xi
    if abs(raw.imag) > 1e-8 * (1.0 + abs(raw)):
        raise DegenerateNumericsError(f"witness pairing not real ({raw.imag:.3e})")
    raw_value = float(raw.real)
    if abs(raw_value - objective) > 1e-6 * (1.0 + abs(objective)):
        raise WitnessExtractionError(
            f"representation value {raw_value:.9e} does not match the moment "
            f"objective {objective:.9e}"
        )
    norm = float(np.linalg.norm(xi))
    if norm == 0.0:
        raise WitnessExtractionError("cyclic vector vanished")
    xi = xi / norm
    value = raw_value / norm**2
    if value >= 0:
        raise WitnessExtractionError(f"witness value {value:.3e} is not negative")
    lam = min_eigenvalue(rho)
    return WitnessReport(rep=rep, xi=xi, value=value, lambda_min=lam)


def verify_moment(cert: MomentCertificate, b: MatrixPolynomial,
                  eps_psd: float = 1e-8) -> list[str]:
    """Re-validate a moment certificate with kernel arithmetic only."""
    reasons: list[str] = []
    if (cert.m, cert.n) != (b.m, b.n):
        return [f"certificate is for M_{cert.m}(C[F_{cert.n}]), polynomial is "
                f"M_{b.m}(C[F_{b.n}])"]
    expected = enumerate_basis(cert.n, cert.degree)
    if list(cert.basis) != expected:
        return ["basis is not the shortlex word basis of the stated degree"]
    herm = float(np.abs(cert.matrix - cert.matrix.conj().T).max())
    if herm > 1e-9 * max(1.0, float(np.abs(cert.matrix).max())):
        reasons.append(f"moment matrix is not Hermitian (defect {herm:.3e})")
        return reasons
    lam = min_eigenvalue(cert.matrix)
    if lam < -eps_psd:
        reasons.append(f"moment matrix has eigenvalue {lam:.3e} < -{eps_psd:g}")
    dev = cert.consistency_deviation()
    if dev > 1e-9:
        reasons.append(f"word-consistency deviation {dev:.3e} > 1e-9")
    norm_dev = cert.normalization_deviation()
    if norm_dev > 1e-9:
        reasons.append(f"normalization sum_j f_jj(e) is off by {norm_dev:.3e}")
    try:
        objective = cert.recompute_objective(b)
    except (MalformedInputError, DegenerateNumericsError) as exc:
        reasons.append(str(exc))
        return reasons
    if abs(objective - cert.objective) > 1e-8 * (1.0 + abs(objective)):
        reasons.append(
            f"declared objective {cert.objective:.9e} does not match recomputed "
            f"{objective:.9e}"
        )
    if objective >= 0:
        reasons.append(f"objective {objective:.3e} is not negative")
    return reasons


def verify_witness(report: WitnessReport, b: MatrixPolynomial,
                   eps_unitary: float = 1e-8) -> list[str]:
    """Re-validate a witness from its serialized representation alone."""
    reasons: list[str] = []
    rep = report.rep
    if rep.n != b.n:
        return [f"witness has {rep.n} unitaries, polynomial is over F_{b.n}"]
    if report.xi.shape != (b.m * rep.N,):
        return [f"vector length {report.xi.shape} does not match m*N = {b.m * rep.N}"]
    defect = rep.unitarity_defect()
    if defect > eps_unitary:
        reasons.append(f"unitarity defect {defect:.3e} > {eps_unitary:g}")
    norm = float(np.linalg.norm(report.xi))
    if abs(norm - 1.0) > 1e-9:
        reasons.append(f"vector norm {norm:.12f} is not 1 within 1e-9")
    try:
        rho = evaluate_rep(rep, b)
    except (MalformedInputError, DegenerateNumericsError) as exc:
        return reasons + [str(exc)]
    value = float((report.xi.conj() @ rho @ report.xi).real)
    if abs(value - report.value) > 1e-7 * (1.0 + abs(value)):
        reasons.append(
            f"declared value {report.value:.9e} does not match recomputed {value:.9e}"
        )
    if value >= 0:
        reasons.append(f"witness value {value:.3e} is not negative")
    lam = min_eigenvalue(rho)
    if abs(lam - report.lambda_min) > 1e-7 * (1.0 + abs(lam)):
        reasons.append(
            f"declared lambda_min {report.lambda_min:.9e} does not match "
            f"recomputed {lam:.9e}"
        )
    if lam > value + 1e-9 * (1.0 + abs(value)):
        reasons.append(f"lambda_min {lam:.3e} exceeds the witness value {value:.3e}")
    return reasons
