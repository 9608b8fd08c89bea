"""Z2-graded spaces, permutations and Koszul signs.

Permutations are tuples in one-line notation: ``perm[i]`` is the position
of the letter that ends up in slot ``i``, so rearranging ``(v_0, ..., v_{n-1})``
by ``perm`` gives ``(v_perm[0], ..., v_perm[n-1])``.
"""

from __future__ import annotations

from dataclasses import dataclass
from itertools import combinations
from typing import Iterator, List, Optional, Sequence, Tuple

SYMMETRIC = "symmetric"
TENSOR = "tensor"
KINDS = (SYMMETRIC, TENSOR)


@dataclass(frozen=True)
class GradedSpace:
    """Finite-dimensional Z2-graded vector space with a named basis."""

    names: Tuple[str, ...]
    parities: Tuple[int, ...]

    def __post_init__(self):
        if len(self.names) != len(self.parities):
            raise ValueError("names and parities differ in length")
        if len(set(self.names)) != len(self.names):
            raise ValueError("basis names must be unique")
        if any(p not in (0, 1) for p in self.parities):
            raise ValueError("parities must be 0 or 1")

    @classmethod
    def from_pairs(cls, pairs: Sequence[Tuple[str, int]]) -> "GradedSpace":
        return cls(tuple(n for n, _ in pairs), tuple(int(p) for _, p in pairs))

    @property
    def dim(self) -> int:
        return len(self.names)

    @property
    def superdim(self) -> Tuple[int, int]:
        odd = sum(self.parities)
        return (self.dim - odd, odd)

    def index(self, name: str) -> int:
        try:
            return self.names.index(name)
        except ValueError:
            raise KeyError(f"unknown basis element {name!r}") from None

    def parity_of_word(self, word: Sequence[int]) -> int:
        return sum(self.parities[i] for i in word) % 2


def parity_reversion(v: GradedSpace) -> GradedSpace:
    """Same basis names, every parity flipped."""
    return GradedSpace(v.names, tuple(1 - p for p in v.parities))


def _check_perm(perm: Sequence[int]) -> None:
    if sorted(perm) != list(range(len(perm))):
        raise ValueError(f"{tuple(perm)} is not a permutation")


def sign_of_permutation(perm: Sequence[int]) -> int:
    _check_perm(perm)
    inv = sum(1 for i, j in combinations(range(len(perm)), 2) if perm[i] > perm[j])
    return -1 if inv % 2 else 1


def koszul_sign(perm: Sequence[int], parities: Sequence[int]) -> int:
    """Sign picked up by rearranging graded letters into the order ``perm``.

    Each pair of letters that changes relative order contributes
    ``(-1)^(p*q)``; for an adjacent transposition this is exactly the
    product of the two parities.
    """
    if len(perm) != len(parities):
        raise ValueError("permutation and parity list differ in length")
    _check_perm(perm)
    odd = 0
    for i, j in combinations(range(len(perm)), 2):
        a, b = perm[i], perm[j]
        if a > b and parities[a] and parities[b]:
            odd ^= 1
    return -1 if odd else 1


def compose(sigma: Sequence[int], tau: Sequence[int]) -> Tuple[int, ...]:
    """One-line composition: rearranging by sigma, then by tau."""
    return tuple(sigma[t] for t in tau)


def unshuffles(k: int, l: int) -> List[Tuple[int, ...]]:
    """Permutations of k+l letters increasing on the first k and last l slots.

    Ordered lexicographically by the first block.
    """
    if k < 0 or l < 0:
        raise ValueError("block sizes must be nonnegative")
    n = k + l
    out = []
    for first in combinations(range(n), k):
        chosen = set(first)
        out.append(tuple(first) + tuple(i for i in range(n) if i not in chosen))
    return out


def sort_sign(word: Sequence[int], parities: Sequence[int]) -> Tuple[Tuple[int, ...], int]:
    """Sort a word of basis indices, returning it with the Koszul sign.

    ``parities`` is indexed by basis index.  A repeated odd letter makes the
    symmetric word vanish; that case returns sign 0.
    """
    letters = list(word)
    odd = 0
    # insertion sort, counting swaps of odd pairs
    for i in range(1, len(letters)):
        j = i
        while j > 0 and letters[j - 1] > letters[j]:
            if parities[letters[j - 1]] and parities[letters[j]]:
                odd ^= 1
            letters[j - 1], letters[j] = letters[j], letters[j - 1]
            j -= 1
    for a, b in zip(letters, letters[1:]):
        if a == b and parities[a]:
            return tuple(letters), 0
    return tuple(letters), (-1 if odd else 1)


@dataclass(frozen=True)
class Word:
    """A word over the basis of a graded space.

    Symmetric words are kept sorted; ``sign`` records the Koszul sign that
    sorting incurred, and is 0 for a word containing a repeated odd letter.
    """

    kind: str
    letters: Tuple[int, ...]
    sign: int = 1

    @classmethod
    def make(cls, kind: str, letters: Sequence[int], space: GradedSpace) -> "Word":
        if kind not in KINDS:
            raise ValueError(f"unknown word kind {kind!r}")
        for i in letters:
            if not 0 <= i < space.dim:
                raise IndexError(f"letter {i} outside basis of dimension {space.dim}")
        if kind == TENSOR:
            return cls(kind, tuple(letters), 1)
        srt, s = sort_sign(letters, space.parities)
        return cls(kind, srt, s)

    @property
    def is_zero(self) -> bool:
        return self.sign == 0

    def __len__(self) -> int:
        return len(self.letters)


def words(space: GradedSpace, kind: str, n: int) -> Iterator[Tuple[int, ...]]:
    """All canonical words of length ``n``.

    Tensor words are every n-tuple; symmetric words are nondecreasing
    tuples in which no odd letter repeats.
    """
    d = space.dim
    if kind == TENSOR:
        yield from _tuples(d, n)
        return
    if kind != SYMMETRIC:
        raise ValueError(f"unknown word kind {kind!r}")

    def rec(start: int, left: int, acc: Tuple[int, ...]):
        if left == 0:
            yield acc
            return
        for i in range(start, d):
            nxt = i + 1 if space.parities[i] else i
            yield from rec(nxt, left - 1, acc + (i,))

    yield from rec(0, n, ())


def _tuples(d: int, n: int) -> Iterator[Tuple[int, ...]]:
    if n == 0:
        yield ()
        return
    for head in _tuples(d, n - 1):
        for i in range(d):
            yield head + (i,)


def word_count(space: GradedSpace, kind: str, n: int) -> int:
    return sum(1 for _ in words(space, kind, n))


def parity_from_name(token: str) -> Optional[int]:
    token = token.lower()
    if token in ("even", "0"):
        return 0
    if token in ("odd", "1"):
        return 1
    return None
