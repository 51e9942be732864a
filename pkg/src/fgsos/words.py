"""Reduced words in the free group on n generators.

A word is a tuple of nonzero signed indices: ``+k`` is the k-th generator,
``-k`` its inverse, and the empty tuple is the identity ``e``.  Words are
immutable values; two words are equal iff their reduced letter sequences and
ambient generator counts agree.

The letter order used everywhere (basis enumeration, serialization) is
shortlex with ``+1 < -1 < +2 < -2 < ...`` so that matrix indexing is
reproducible across runs and platforms.
"""
from __future__ import annotations

import re
from dataclasses import dataclass
from typing import Iterable, Iterator, Sequence

from .exceptions import MalformedInputError

__all__ = [
    "ReducedWord",
    "reduce_letters",
    "invert",
    "concat",
    "enumerate_basis",
    "basis_size",
    "parse_word",
    "format_word",
]


def _letter_rank(letter: int) -> int:
    # +1 -> 0, -1 -> 1, +2 -> 2, -2 -> 3, ...
    return 2 * (abs(letter) - 1) + (0 if letter > 0 else 1)


def _check_letters(letters: Iterable[int], n: int) -> None:
    for letter in letters:
        if not isinstance(letter, int) or letter == 0 or abs(letter) > n:
            raise MalformedInputError(
                f"letter {letter!r} is not a signed index in 1..{n}"
            )


@dataclass(frozen=True)
class ReducedWord:
    """A freely reduced word in F_n.

    ``letters`` must already be reduced (no adjacent ``k, -k`` pair); use
    :func:`reduce_letters` to build a word from an arbitrary sequence.
    """

    n: int
    letters: tuple[int, ...] = ()

    def __post_init__(self) -> None:
        if self.n < 1:
            raise MalformedInputError(f"generator count must be >= 1, got {self.n}")
        letters = tuple(self.letters)
        object.__setattr__(self, "letters", letters)
        _check_letters(letters, self.n)
        for a, b in zip(letters, letters[1:]):
            if a == -b:
                raise MalformedInputError(
                    f"letter sequence {letters} is not freely reduced"
                )

    def __len__(self) -> int:
        return len(self.letters)

    def __iter__(self) -> Iterator[int]:
        return iter(self.letters)

    @property
    def is_identity(self) -> bool:
        return not self.letters

    def sort_key(self) -> tuple[int, tuple[int, ...]]:
        """Shortlex key: length first, then letter ranks."""
        return (len(self.letters), tuple(_letter_rank(l) for l in self.letters))

    def inverse(self) -> "ReducedWord":
        return ReducedWord(self.n, tuple(-l for l in reversed(self.letters)))

    def __mul__(self, other: "ReducedWord") -> "ReducedWord":
        return concat(self, other)

    def __str__(self) -> str:
        return format_word(self)

    def __repr__(self) -> str:
        return f"ReducedWord(n={self.n}, {format_word(self)!r})"


def reduce_letters(raw: Sequence[int], n: int) -> ReducedWord:
    """Freely reduce an arbitrary letter sequence.

    Idempotent, and never longer than the input.  Raises
    :class:`MalformedInputError` on a zero letter or an index above ``n``.
    """
    _check_letters(raw, n)
    out: list[int] = []
    for letter in raw:
        if out and out[-1] == -letter:
            out.pop()
        else:
            out.append(letter)
    return ReducedWord(n, tuple(out))


def invert(w: ReducedWord) -> ReducedWord:
    """The group inverse; reverses the letters and flips their signs."""
    return w.inverse()


def concat(v: ReducedWord, w: ReducedWord) -> ReducedWord:
    """Freely reduced product ``vw``.  Requires matching ambient n."""
    if v.n != w.n:
        raise MalformedInputError(
            f"cannot multiply words over F_{v.n} and F_{w.n}"
        )
    out = list(v.letters)
    for letter in w.letters:
        if out and out[-1] == -letter:
            out.pop()
        else:
            out.append(letter)
    return ReducedWord(v.n, tuple(out))


def basis_size(n: int, d: int) -> int:
    """Number of reduced words of length <= d: 1 + sum_k 2n(2n-1)^(k-1)."""
    total = 1
    for k in range(1, d + 1):
        total += 2 * n * (2 * n - 1) ** (k - 1)
    return total


def enumerate_basis(n: int, d: int) -> list[ReducedWord]:
    """All reduced words of length <= d in shortlex order.

    Deterministic; the output size is :func:`basis_size`.
    """
    if n < 1:
        raise MalformedInputError(f"generator count must be >= 1, got {n}")
    if d < 0:
        raise MalformedInputError(f"max length must be >= 0, got {d}")
    alphabet = sorted(
        [k for k in range(1, n + 1)] + [-k for k in range(1, n + 1)],
        key=_letter_rank,
    )
    words: list[ReducedWord] = [ReducedWord(n)]
    layer: list[tuple[int, ...]] = [()]
    for _ in range(d):
        nxt: list[tuple[int, ...]] = []
        for prefix in layer:
            for letter in alphabet:
                if prefix and prefix[-1] == -letter:
                    continue
                nxt.append(prefix + (letter,))
        words.extend(ReducedWord(n, t) for t in nxt)
        layer = nxt
    return words


_TOKEN = re.compile(r"^x(\d+)(\^-1)?$")


def parse_word(text: str, n: int) -> ReducedWord:
    """Parse the word grammar: ``e``, ``x1``, ``x2^-1``, joined with ``*``.

    Parsing applies free reduction, so e.g. ``x1*x1^-1`` is the identity.
    """
    text = text.strip()
    if not text:
        raise MalformedInputError("empty word string")
    letters: list[int] = []
    for token in text.split("*"):
        token = token.strip()
        if token == "e":
            continue
        match = _TOKEN.match(token)
        if match is None:
            raise MalformedInputError(f"bad word token {token!r}")
        index = int(match.group(1))
        if index < 1 or index > n:
            raise MalformedInputError(f"generator index {index} out of range 1..{n}")
        letters.append(-index if match.group(2) else index)
    return reduce_letters(letters, n)


def format_word(w: ReducedWord) -> str:
    """Canonical spelling of a reduced word; the identity prints as ``e``."""
    if w.is_identity:
        return "e"
    return "*".join(f"x{abs(l)}" if l > 0 else f"x{abs(l)}^-1" for l in w.letters)
