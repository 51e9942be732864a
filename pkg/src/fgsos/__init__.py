"""fgsos: certify-or-refute positivity for matrix polynomials over free groups.

Either exhibits a symmetric element of M_m(C[F_n]) as a sum of Hermitian
squares (with an independently verified factor decomposition), or constructs
a finite-dimensional unitary representation and a unit vector under which it
evaluates negatively.
"""
from .algebra import MatrixPolynomial, hermitian_square_sum
from .linalg import backend_name
from .soscert import GramCertificate, Inconclusive, certify_sos
from .witness import FiniteRep, MomentCertificate, WitnessReport, extract_witness
from .words import ReducedWord, enumerate_basis, parse_word, reduce_letters

__version__ = "0.1.0"

__all__ = [
    "MatrixPolynomial",
    "hermitian_square_sum",
    "ReducedWord",
    "reduce_letters",
    "parse_word",
    "enumerate_basis",
    "certify_sos",
    "GramCertificate",
    "MomentCertificate",
    "WitnessReport",
    "FiniteRep",
    "Inconclusive",
    "extract_witness",
    "backend_name",
]
