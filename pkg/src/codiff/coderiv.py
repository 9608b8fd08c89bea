"""Coderivations of the symmetric and tensor coalgebras.

A coderivation is stored through its multilinear parts: a table mapping
``(word, out)`` to a rational coefficient, meaning that the arity
``len(word)`` part sends the canonical word to ``coef * e_out``.  The whole
coderivation acting on the coalgebra is recovered by the extension rule in
:func:`evaluate`; brackets are computed from composition of those actions.
"""

from __future__ import annotations

import os
from collections import defaultdict
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from typing import Dict, Iterable, List, Mapping, Optional, Sequence, Tuple

from .graded import SYMMETRIC, TENSOR, KINDS, GradedSpace, Word, koszul_sign, sort_sign, unshuffles, words

WordKey = Tuple[int, ...]
Entry = Tuple[WordKey, int]
FormalSum = Dict[WordKey, Fraction]

DEFAULT_MAX_WORDS = 200000


class ResourceLimitError(RuntimeError):
    """Raised when an enumeration would exceed the configured word budget."""


def max_words() -> int:
    raw = os.environ.get("CODIFF_MAX_WORDS")
    if not raw:
        return DEFAULT_MAX_WORDS
    try:
        return int(raw)
    except ValueError:
        raise ValueError(f"CODIFF_MAX_WORDS must be an integer, got {raw!r}") from None


@lru_cache(maxsize=None)
def _unshuffles(k: int, l: int):
    return tuple(unshuffles(k, l))


@lru_cache(maxsize=None)
def _ksign(perm: Tuple[int, ...], parities: Tuple[int, ...]) -> int:
    return koszul_sign(perm, parities)


@dataclass
class MultilinearPart:
    """The arity-k part of a coderivation: canonical word -> vector in W."""

    kind: str
    arity: int
    parity: int
    space: GradedSpace
    table: Dict[WordKey, Dict[int, Fraction]] = field(default_factory=dict)

    def __call__(self, word: Sequence[int]) -> Dict[int, Fraction]:
        if len(word) != self.arity:
            raise ValueError(f"part of arity {self.arity} applied to a word of length {len(word)}")
        w = Word.make(self.kind, word, self.space)
        if w.is_zero:
            return {}
        return {j: w.sign * c for j, c in self.table.get(w.letters, {}).items()}

    @property
    def is_zero(self) -> bool:
        return not any(self.table.values())


class Coderivation:
    """A parity-homogeneous coderivation truncated at arity ``cap``."""

    __slots__ = ("space", "kind", "parity", "cap", "table", "_by_word")

    def __init__(self, space: GradedSpace, kind: str, parity: int, cap: int,
                 table: Optional[Mapping[Entry, object]] = None, check: bool = True):
        if kind not in KINDS:
            raise ValueError(f"unknown coalgebra kind {kind!r}")
        if parity not in (0, 1):
            raise ValueError("parity must be 0 or 1")
        if cap < 1:
            raise ValueError("weight cap must be at least 1")
        self.space = space
        self.kind = kind
        self.parity = parity
        self.cap = cap
        self.table: Dict[Entry, Fraction] = {}
        self._by_word: Optional[Dict[WordKey, Dict[int, Fraction]]] = None
        for (word, out), c in (table or {}).items():
            c = Fraction(c)
            if not c:
                continue
            if check:
                self._check_entry(word, out)
            self.table[(tuple(word), out)] = self.table.get((tuple(word), out), 0) + c
        self.table = {k: v for k, v in self.table.items() if v}

    def _check_entry(self, word, out):
        n = len(word)
        if not 1 <= n <= self.cap:
            raise ValueError(f"arity {n} outside 1..{self.cap}")
        if not 0 <= out < self.space.dim:
            raise IndexError(f"output index {out} out of range")
        if self.kind == SYMMETRIC:
            w = Word.make(SYMMETRIC, word, self.space)
            if w.letters != tuple(word) or w.is_zero:
                raise ValueError(f"symmetric entries must use canonical words, got {tuple(word)}")
        if (self.space.parities[out] - self.space.parity_of_word(word)) % 2 != self.parity:
            raise ValueError(f"entry {tuple(word)} -> {out} has the wrong parity for a parity-{self.parity} map")

    # construction helpers -------------------------------------------------

    @classmethod
    def zero(cls, space: GradedSpace, kind: str, parity: int, cap: int) -> "Coderivation":
        return cls(space, kind, parity, cap)

    @classmethod
    def from_values(cls, space: GradedSpace, kind: str, parity: int, cap: int,
                    values: Iterable[Tuple[Sequence[int], int, object]]) -> "Coderivation":
        """Build from ``(word, out, coef)`` triples; symmetric words may be unsorted."""
        table: Dict[Entry, Fraction] = defaultdict(Fraction)
        for word, out, coef in values:
            if kind == SYMMETRIC:
                w = Word.make(SYMMETRIC, word, space)
                if w.is_zero:
                    continue
                table[(w.letters, out)] += w.sign * Fraction(coef)
            else:
                table[(tuple(word), out)] += Fraction(coef)
        return cls(space, kind, parity, cap, table)

    def like(self, table: Mapping[Entry, Fraction], parity: Optional[int] = None) -> "Coderivation":
        return Coderivation(self.space, self.kind, self.parity if parity is None else parity,
                            self.cap, table, check=False)

    # algebra ---------------------------------------------------------------

    def _compatible(self, other: "Coderivation") -> None:
        if self.kind != other.kind:
            raise ValueError(f"kind mismatch: {self.kind} vs {other.kind}")
        if self.cap != other.cap:
            raise ValueError(f"weight cap mismatch: {self.cap} vs {other.cap}")
        if self.space != other.space:
            raise ValueError("coderivations live on different spaces")

    def __add__(self, other: "Coderivation") -> "Coderivation":
        self._compatible(other)
        if other.parity != self.parity and not (self.is_zero or other.is_zero):
            raise ValueError("cannot add coderivations of different parity")
        parity = self.parity if not self.is_zero else other.parity
        table = dict(self.table)
        for k, v in other.table.items():
            table[k] = table.get(k, 0) + v
        return self.like(table, parity)

    def __neg__(self) -> "Coderivation":
        return self.like({k: -v for k, v in self.table.items()})

    def __sub__(self, other: "Coderivation") -> "Coderivation":
        return self + (-other)

    def scale(self, c) -> "Coderivation":
        c = Fraction(c)
        return self.like({k: c * v for k, v in self.table.items()})

    def __eq__(self, other) -> bool:
        if not isinstance(other, Coderivation):
            return NotImplemented
        if (self.kind, self.cap, self.space) != (other.kind, other.cap, other.space):
            return False
        if self.is_zero and other.is_zero:
            return True
        return self.parity == other.parity and self.table == other.table

    def __repr__(self) -> str:
        return f"Coderivation({self.kind}, parity={self.parity}, cap={self.cap}, entries={len(self.table)})"

    @property
    def is_zero(self) -> bool:
        return not self.table

    @property
    def arities(self) -> List[int]:
        return sorted({len(w) for w, _ in self.table})

    def by_word(self) -> Dict[WordKey, Dict[int, Fraction]]:
        if self._by_word is None:
            idx: Dict[WordKey, Dict[int, Fraction]] = defaultdict(dict)
            for (w, j), c in self.table.items():
                idx[w][j] = c
            self._by_word = dict(idx)
        return self._by_word

    def part(self, k: int) -> MultilinearPart:
        tab: Dict[WordKey, Dict[int, Fraction]] = {}
        for w, outs in self.by_word().items():
            if len(w) == k:
                tab[w] = dict(outs)
        return MultilinearPart(self.kind, k, self.parity, self.space, tab)

    def truncate(self, weights: Iterable[int]) -> "Coderivation":
        keep = set(weights)
        return self.like({k: v for k, v in self.table.items() if len(k[0]) in keep})


def weight_component(c: Coderivation, n: int) -> MultilinearPart:
    if not 1 <= n <= c.cap:
        raise ValueError(f"weight {n} outside 1..{c.cap}")
    return c.part(n)


def _as_word(c: Coderivation, word) -> Tuple[WordKey, int]:
    if isinstance(word, Word):
        if word.kind != c.kind:
            raise ValueError(f"{word.kind} word given to a {c.kind} coderivation")
        return word.letters, word.sign
    w = Word.make(c.kind, word, c.space)
    return w.letters, w.sign


def _apply(c: Coderivation, w: WordKey) -> FormalSum:
    """The coderivation extension of ``c`` applied to a canonical word."""
    out: FormalSum = defaultdict(Fraction)
    n = len(w)
    P = c.space.parities
    table = c.by_word()
    if not table:
        return {}
    arities = {len(k) for k in table}
    if c.kind == SYMMETRIC:
        wp = tuple(P[x] for x in w)
        for k in arities:
            if k > n:
                continue
            for sigma in _unshuffles(k, n - k):
                sub = tuple(w[i] for i in sigma[:k])
                outs = table.get(sub)
                if not outs:
                    continue
                eps = _ksign(sigma, wp)
                rest = tuple(w[i] for i in sigma[k:])
                for j, coef in outs.items():
                    nw, s = sort_sign((j,) + rest, P)
                    if s:
                        out[nw] += eps * s * coef
    else:
        for k in arities:
            if k > n:
                continue
            lead = 0
            for i in range(0, n - k + 1):
                outs = table.get(w[i:i + k])
                if outs:
                    sign = -1 if (lead and c.parity) else 1
                    for j, coef in outs.items():
                        out[w[:i] + (j,) + w[i + k:]] += sign * coef
                lead ^= P[w[i]]
    return {k: v for k, v in out.items() if v}


def evaluate(c: Coderivation, word) -> FormalSum:
    """Apply the coderivation to a word of the coalgebra; returns a formal sum."""
    letters, sign = _as_word(c, word)
    if sign == 0:
        return {}
    res = _apply(c, letters)
    if sign != 1:
        res = {k: sign * v for k, v in res.items()}
    return res


def apply_to_sum(c: Coderivation, s: Mapping[WordKey, Fraction]) -> FormalSum:
    out: FormalSum = defaultdict(Fraction)
    for w, coef in s.items():
        for w2, c2 in _apply(c, w).items():
            out[w2] += coef * c2
    return {k: v for k, v in out.items() if v}


def _project(c: Coderivation, s: Mapping[WordKey, Fraction]) -> Dict[int, Fraction]:
    table = c.by_word()
    out: Dict[int, Fraction] = defaultdict(Fraction)
    for w, coef in s.items():
        outs = table.get(w)
        if outs:
            for j, x in outs.items():
                out[j] += coef * x
    return out


def _bracket_weights(a: Coderivation, b: Coderivation) -> List[int]:
    ns = {k + l - 1 for k in a.arities for l in b.arities}
    return sorted(n for n in ns if 1 <= n <= a.cap)


def bracket(a: Coderivation, b: Coderivation) -> Coderivation:
    """Graded commutator a∘b - (-1)^{|a||b|} b∘a, read off on words of length <= cap."""
    a._compatible(b)
    parity = (a.parity + b.parity) % 2
    sign = -1 if (a.parity and b.parity) else 1
    table: Dict[Entry, Fraction] = {}
    if a.is_zero or b.is_zero:
        return a.like({}, parity)
    for n in _bracket_weights(a, b):
        for w in words(a.space, a.kind, n):
            acc = _project(a, _apply(b, w))
            for j, x in _project(b, _apply(a, w)).items():
                acc[j] = acc.get(j, 0) - sign * x
            for j, x in acc.items():
                if x:
                    table[(w, j)] = x
    return a.like(table, parity)


def is_codifferential(d: Coderivation) -> bool:
    if d.parity != 1:
        raise ValueError("a codifferential must be odd")
    return bracket(d, d).is_zero


def big_d(d: Coderivation, phi: Coderivation) -> Coderivation:
    """The differential D(phi) = [d, phi]."""
    return bracket(d, phi)


def coproduct(space: GradedSpace, kind: str, word: Sequence[int]) -> Dict[Tuple[WordKey, WordKey], Fraction]:
    """Reduced coproduct of a word (no empty tensor factors)."""
    out: Dict[Tuple[WordKey, WordKey], Fraction] = defaultdict(Fraction)
    if kind == TENSOR:
        w = tuple(word)
        for k in range(1, len(w)):
            out[(w[:k], w[k:])] += 1
        return dict(out)
    wd = Word.make(SYMMETRIC, word, space)
    if wd.is_zero:
        return {}
    w = wd.letters
    n = len(w)
    wp = tuple(space.parities[x] for x in w)
    for k in range(1, n):
        for sigma in _unshuffles(k, n - k):
            left = tuple(w[i] for i in sigma[:k])
            right = tuple(w[i] for i in sigma[k:])
            out[(left, right)] += wd.sign * _ksign(sigma, wp)
    return {k: v for k, v in out.items() if v}


class CoderivationAlgebra:
    """Coordinates on the truncated Lie algebra of coderivations.

    Enumerates the basis ``(word, out)`` of every arity 1..cap (both
    parities) and caches brackets of basis elements, so that elements can be
    handled as sparse vectors ``{index: Fraction}``.
    """

    def __init__(self, space: GradedSpace, kind: str, cap: int):
        self.space = space
        self.kind = kind
        self.cap = cap
        budget = max_words()
        self.basis: List[Entry] = []
        self.words_by_weight: Dict[int, List[WordKey]] = {}
        count = 0
        for n in range(1, cap + 1):
            ws = []
            for w in words(space, kind, n):
                count += 1
                if count > budget:
                    raise ResourceLimitError(
                        f"more than {budget} words up to arity {cap}; raise CODIFF_MAX_WORDS to allow this")
                ws.append(w)
            self.words_by_weight[n] = ws
            for w in ws:
                for j in range(space.dim):
                    self.basis.append((w, j))
        self.index = {e: i for i, e in enumerate(self.basis)}
        P = space.parities
        self.parity = [(P[j] - space.parity_of_word(w)) % 2 for w, j in self.basis]
        self.weight = [len(w) for w, _ in self.basis]
        self._memo: Dict[Tuple[int, int], Dict[int, Fraction]] = {}

    @property
    def dim(self) -> int:
        return len(self.basis)

    def indices(self, weights: Optional[Iterable[int]] = None, parity: Optional[int] = None) -> List[int]:
        ws = set(weights) if weights is not None else None
        return [i for i in range(self.dim)
                if (ws is None or self.weight[i] in ws) and (parity is None or self.parity[i] == parity)]

    def vector(self, c: Coderivation) -> Dict[int, Fraction]:
        if (c.kind, c.space) != (self.kind, self.space):
            raise ValueError("coderivation does not belong to this algebra")
        out = {}
        for e, x in c.table.items():
            if len(e[0]) <= self.cap:
                out[self.index[e]] = x
        return out

    def coderivation(self, v: Mapping[int, Fraction], parity: Optional[int] = None) -> Coderivation:
        ps = {self.parity[i] for i, x in v.items() if x}
        if len(ps) > 1:
            raise ValueError("vector is not parity-homogeneous")
        p = ps.pop() if ps else (parity or 0)
        return Coderivation(self.space, self.kind, p, self.cap,
                            {self.basis[i]: x for i, x in v.items() if x}, check=False)

    def basis_element(self, i: int) -> Coderivation:
        return Coderivation(self.space, self.kind, self.parity[i], self.cap, {self.basis[i]: 1}, check=False)

    def _basis_bracket(self, i: int, j: int) -> Dict[int, Fraction]:
        key = (i, j)
        res = self._memo.get(key)
        if res is None:
            br = bracket(self.basis_element(i), self.basis_element(j))
            res = {self.index[e]: x for e, x in br.table.items()}
            self._memo[key] = res
        return res

    def bracket(self, u: Mapping[int, Fraction], v: Mapping[int, Fraction]) -> Dict[int, Fraction]:
        out: Dict[int, Fraction] = defaultdict(Fraction)
        for i, x in u.items():
            if not x:
                continue
            for j, y in v.items():
                if not y or self.weight[i] + self.weight[j] - 1 > self.cap:
                    continue
                xy = x * y
                for k, z in self._basis_bracket(i, j).items():
                    out[k] += xy * z
        return {k: x for k, x in out.items() if x}


def transport_sign(v_parities: Sequence[int]) -> int:
    """Sign relating l_k(x_1..x_k) on V to d_k(πx_1..πx_k) on W = ΠV."""
    k = len(v_parities)
    odd = sum((k - 1 - i) * p for i, p in enumerate(v_parities)) % 2
    return -1 if odd else 1


def structure_coderivation(v_space: GradedSpace, kind: str, cap: int,
                           operations: Iterable[Tuple[Sequence[int], Mapping[int, object]]],
                           strict_check: bool = True, parity: int = 1) -> Coderivation:
    """The coderivation on W = ΠV encoding operations l_k (or m_k) on V.

    With the default ``parity=1`` this is the codifferential of the structure;
    other parities serve the coefficients of deformations over odd monomials.

    ``operations`` yields ``(inputs, {out: coef})`` with indices into V.  For
    the symmetric kind the same canonical word may be reached from several
    input orders; those values must agree, otherwise ``ValueError``.
    """
    w_space = GradedSpace(v_space.names, tuple(1 - p for p in v_space.parities))

    def want(k: int) -> int:
        return k + parity - 1

    table: Dict[Entry, Fraction] = {}
    seen: Dict[WordKey, Dict[int, Fraction]] = {}
    for inputs, outs in operations:
        inputs = tuple(inputs)
        if not 1 <= len(inputs) <= cap:
            raise ValueError(f"operation of arity {len(inputs)} outside 1..{cap}")
        vals = {j: Fraction(c) for j, c in outs.items() if Fraction(c)}
        for i in inputs + tuple(vals):
            if not 0 <= i < v_space.dim:
                raise IndexError(f"basis index {i} out of range")
        s = transport_sign([v_space.parities[i] for i in inputs])
        w = Word.make(kind, inputs, w_space)
        for j, c in vals.items():
            if (v_space.parities[j] - sum(v_space.parities[i] for i in inputs) - want(len(inputs))) % 2 and strict_check:
                raise ValueError(f"operation on {inputs} -> {v_space.names[j]} has the wrong parity "
                                 f"(an arity-{len(inputs)} operation must have parity {want(len(inputs)) % 2})")
        if w.is_zero:
            if vals:
                raise ValueError(f"value on {inputs} contradicts graded symmetry")
            continue
        image = {j: w.sign * s * c for j, c in vals.items()}
        if w.letters in seen:
            if seen[w.letters] != image:
                raise ValueError(f"inconsistent values for inputs {inputs}")
            continue
        seen[w.letters] = image
        for j, c in image.items():
            table[(w.letters, j)] = c
    return Coderivation(w_space, kind, parity % 2, cap, table)


def structure_operations(phi: Coderivation) -> List[Tuple[Tuple[int, ...], int, Fraction]]:
    """Inverse of :func:`structure_coderivation`: ``(inputs, out, coef)`` on V.

    Inputs come in the canonical word order of W, so each symmetric
    operation is listed once.
    """
    v_parities = tuple(1 - p for p in phi.space.parities)
    out = []
    for (letters, j), c in sorted(phi.table.items()):
        s = transport_sign([v_parities[i] for i in letters])
        out.append((tuple(letters), j, s * c))
    return out
