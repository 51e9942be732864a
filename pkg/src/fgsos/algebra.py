"""Matrix polynomials over the free group algebra.

An element of M_m(C[F_n]) is stored as a finite map from reduced words to
m x m complex coefficient matrices; only nonzero coefficients are kept.  The
involution is ``(M (x) g)* = M^dagger (x) g^{-1}``, so an element ``a`` is
symmetric iff ``B_{w^{-1}} = B_w^dagger`` for every word ``w``.

The canonical trace picks the identity coefficient and is normalized by 1/m
so that ``trace(1) = 1`` at every matrix size; this matches the state
normalization used by the certificate pipeline.
"""
from __future__ import annotations

import json
from typing import Iterable, Mapping, Sequence

import numpy as np

from .exceptions import DegenerateNumericsError, MalformedInputError
from .words import ReducedWord, concat, format_word, invert, parse_word

__all__ = [
    "MatrixPolynomial",
    "hermitian_square_sum",
    "encode_matrix",
    "decode_matrix",
]

PRUNE_REL = 1e-14


def _as_coeff(matrix, m: int) -> np.ndarray:
    arr = np.asarray(matrix, dtype=complex)
    if arr.shape == () and m == 1:
        arr = arr.reshape(1, 1)
    if arr.shape != (m, m):
        raise MalformedInputError(f"coefficient must be {m}x{m}, got shape {arr.shape}")
    if not np.all(np.isfinite(arr.view(float))):
        raise MalformedInputError("coefficient contains NaN or Inf")
    return arr


class MatrixPolynomial:
    """Element of M_m(C[F_n]) with word-indexed coefficient matrices."""

    __slots__ = ("m", "n", "_terms")

    def __init__(self, m: int, n: int, terms: Mapping[ReducedWord, object] | None = None):
        if m < 1 or n < 1:
            raise MalformedInputError(f"need m >= 1 and n >= 1, got m={m}, n={n}")
        self.m = int(m)
        self.n = int(n)
        data: dict[ReducedWord, np.ndarray] = {}
        for word, coeff in (terms or {}).items():
            if not isinstance(word, ReducedWord):
                raise MalformedInputError(f"term key {word!r} is not a ReducedWord")
            if word.n != n:
                raise MalformedInputError(
                    f"word over F_{word.n} in a polynomial over F_{n}"
                )
            arr = _as_coeff(coeff, self.m)
            if np.abs(arr).max() > 0.0:
                arr = arr.copy()
                arr.flags.writeable = False
                data[word] = arr
        self._terms = data

    # -- constructors ------------------------------------------------------

    @classmethod
    def zero(cls, m: int, n: int) -> "MatrixPolynomial":
        return cls(m, n)

    @classmethod
    def one(cls, m: int, n: int) -> "MatrixPolynomial":
        return cls(m, n, {ReducedWord(n): np.eye(m)})

    @classmethod
    def generator(cls, k: int, n: int, m: int = 1) -> "MatrixPolynomial":
        """The generator x_k (or its inverse for negative k) times the identity."""
        word = ReducedWord(n, (k,))
        return cls(m, n, {word: np.eye(m)})

    @classmethod
    def from_scalar_terms(cls, n: int, terms: Mapping[str, complex]) -> "MatrixPolynomial":
        """Scalar (m=1) polynomial from a map of word strings to coefficients."""
        data: dict[ReducedWord, np.ndarray] = {}
        for text, coeff in terms.items():
            word = parse_word(text, n)
            arr = data.setdefault(word, np.zeros((1, 1), complex)).copy()
            arr[0, 0] += coeff
            data[word] = arr
        return cls(1, n, data)

    # -- accessors ---------------------------------------------------------

    @property
    def support(self) -> list[ReducedWord]:
        return sorted(self._terms, key=ReducedWord.sort_key)

    @property
    def degree(self) -> int:
        """Max word length in the support (0 for the zero polynomial)."""
        return max((len(w) for w in self._terms), default=0)

    def coeff(self, word: ReducedWord) -> np.ndarray:
        """Coefficient matrix B_w (a zero matrix if w is not in the support)."""
        arr = self._terms.get(word)
        if arr is None:
            return np.zeros((self.m, self.m), complex)
        return arr

    def items(self):
        return self._terms.items()

    def __len__(self) -> int:
        return len(self._terms)

    def max_abs(self) -> float:
        return max((float(np.abs(a).max()) for a in self._terms.values()), default=0.0)

    def __eq__(self, other) -> bool:
        if not isinstance(other, MatrixPolynomial):
            return NotImplemented
        if (self.m, self.n) != (other.m, other.n):
            return False
        if set(self._terms) != set(other._terms):
            return False
        return all(np.array_equal(self._terms[w], other._terms[w]) for w in self._terms)

    def __hash__(self):
        return None  # mutable-adjacent; not hashable

    # -- arithmetic --------------------------------------------------------

    def _check_compatible(self, other: "MatrixPolynomial") -> None:
        if (self.m, self.n) != (other.m, other.n):
            raise MalformedInputError(
                f"size mismatch: M_{self.m}(C[F_{self.n}]) vs M_{other.m}(C[F_{other.n}])"
            )

    def __add__(self, other: "MatrixPolynomial") -> "MatrixPolynomial":
        self._check_compatible(other)
        data = {w: a.copy() for w, a in self._terms.items()}
        for w, a in other._terms.items():
            if w in data:
                data[w] = data[w] + a
            else:
                data[w] = a.copy()
        return MatrixPolynomial(self.m, self.n, data)._pruned()

    def __sub__(self, other: "MatrixPolynomial") -> "MatrixPolynomial":
        return self + (-other)

    def __neg__(self) -> "MatrixPolynomial":
        return MatrixPolynomial(self.m, self.n, {w: -a for w, a in self._terms.items()})

    def __mul__(self, other):
        if isinstance(other, MatrixPolynomial):
            self._check_compatible(other)
            data: dict[ReducedWord, np.ndarray] = {}
            for u, au in self._terms.items():
                for v, bv in other._terms.items():
                    w = concat(u, v)
                    prod = au @ bv
                    if w in data:
                        data[w] = data[w] + prod
                    else:
                        data[w] = prod
            return MatrixPolynomial(self.m, self.n, data)._pruned()
        if isinstance(other, (int, float, complex)):
            return MatrixPolynomial(
                self.m, self.n, {w: other * a for w, a in self._terms.items()}
            )._pruned()
        return NotImplemented

    def __rmul__(self, other):
        if isinstance(other, (int, float, complex)):
            return self * other
        return NotImplemented

    def _pruned(self, rel: float = PRUNE_REL) -> "MatrixPolynomial":
        """Drop entries below rel * (max coefficient magnitude) and empty terms."""
        scale = self.max_abs()
        if scale == 0.0:
            return MatrixPolynomial(self.m, self.n)
        cut = rel * scale
        data = {}
        for w, a in self._terms.items():
            b = np.where(np.abs(a) < cut, 0.0, a)
            if np.abs(b).max() > 0.0:
                data[w] = b
        return MatrixPolynomial(self.m, self.n, data)

    # -- involution, symmetry, trace ----------------------------------------

    def star(self) -> "MatrixPolynomial":
        """The involution: B'_w = (B_{w^{-1}})^dagger."""
        return MatrixPolynomial(
            self.m, self.n,
            {invert(w): a.conj().T for w, a in self._terms.items()},
        )

    def is_symmetric(self, tol: float = 0.0) -> bool:
        """True iff the max-norm of (self - self*) coefficients is <= tol."""
        if tol < 0:
            raise MalformedInputError(f"tolerance must be >= 0, got {tol}")
        for w, a in self._terms.items():
            partner = self.coeff(invert(w)).conj().T
            if np.abs(a - partner).max() > tol:
                return False
        return True

    def trace(self) -> complex:
        """Canonical trace (1/m) sum_i (B_e)_{ii}; 0 if e is not in the support."""
        arr = self._terms.get(ReducedWord(self.n))
        if arr is None:
            return 0j
        return complex(np.trace(arr) / self.m)

    # -- serialization -------------------------------------------------------

    def to_obj(self) -> dict:
        return {
            "m": self.m,
            "n": self.n,
            "terms": [
                {"word": format_word(w), "matrix": encode_matrix(self._terms[w])}
                for w in self.support
            ],
        }

    def dumps(self, indent: int | None = 2) -> str:
        return json.dumps(self.to_obj(), indent=indent)

    @classmethod
    def from_obj(cls, obj: dict) -> "MatrixPolynomial":
        try:
            m = int(obj["m"])
            n = int(obj["n"])
            raw_terms = obj["terms"]
        except (KeyError, TypeError, ValueError) as exc:
            raise MalformedInputError(f"bad polynomial object: {exc}") from exc
        data: dict[ReducedWord, np.ndarray] = {}
        for entry in raw_terms:
            word = parse_word(entry["word"], n)
            mat = decode_matrix(entry["matrix"])
            if word in data:
                mat = data[word] + mat
            data[word] = mat
        return cls(m, n, data)

    @classmethod
    def loads(cls, text: str) -> "MatrixPolynomial":
        try:
            obj = json.loads(text)
        except json.JSONDecodeError as exc:
            raise MalformedInputError(f"bad JSON: {exc}") from exc
        return cls.from_obj(obj)

    def __repr__(self) -> str:
        words = ", ".join(format_word(w) for w in self.support[:6])
        more = "..." if len(self._terms) > 6 else ""
        return f"MatrixPolynomial(m={self.m}, n={self.n}, support=[{words}{more}])"


def encode_matrix(arr: np.ndarray) -> list:
    """Row-major nested lists of [re, im] pairs."""
    a = np.asarray(arr, dtype=complex)
    return [[[float(x.real), float(x.imag)] for x in row] for row in a]


def decode_matrix(rows: Sequence) -> np.ndarray:
    try:
        arr = np.array(
            [[complex(pair[0], pair[1]) for pair in row] for row in rows],
            dtype=complex,
        )
    except (TypeError, ValueError, IndexError) as exc:
        raise MalformedInputError(f"bad matrix encoding: {exc}") from exc
    if arr.ndim != 2:
        raise MalformedInputError("matrix encoding must be two-dimensional")
    if not np.all(np.isfinite(arr.view(float))):
        raise MalformedInputError("matrix contains NaN or Inf")
    return arr


def hermitian_square_sum(
    factors: Iterable[MatrixPolynomial],
    *,
    m: int | None = None,
    n: int | None = None,
) -> MatrixPolynomial:
    """sum_k a_k* a_k.  An empty factor list yields the zero polynomial.

    The result is verified to be symmetric up to 1e-12 times its largest
    coefficient magnitude.
    """
    factors = list(factors)
    if not factors:
        if m is None or n is None:
            raise MalformedInputError("empty factor list needs explicit m and n")
        return MatrixPolynomial.zero(m, n)
    total = MatrixPolynomial.zero(factors[0].m, factors[0].n)
    for a in factors:
        total = total + (a.star() * a)
    if not total.is_symmetric(tol=1e-12 * total.max_abs()):
        raise DegenerateNumericsError("hermitian square sum lost symmetry")
    return total
