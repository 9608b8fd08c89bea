"""Augmented graded commutative base algebras A = K ⊕ m with m nilpotent.

Only the maximal ideal m is stored: a basis with names, parities and
orders, and a product table on pairs of basis elements.  Elements of m are
sparse dicts ``{basis index: Fraction}``.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Dict, List, Mapping, Optional, Sequence, Tuple

from .linalg import EchelonBasis, as_fraction

Element = Dict[int, Fraction]
Exponents = Tuple[int, ...]


def _add_into(acc: Element, v: Mapping[int, Fraction], c=1) -> None:
    for k, x in v.items():
        nv = acc.get(k, 0) + c * x
        if nv:
            acc[k] = nv
        else:
            acc.pop(k, None)


def scale(v: Mapping[int, Fraction], c) -> Element:
    c = as_fraction(c)
    return {k: c * x for k, x in v.items() if c * x}


def add(u: Mapping[int, Fraction], v: Mapping[int, Fraction], c=1) -> Element:
    out = dict(u)
    _add_into(out, v, c)
    return out


@dataclass(frozen=True)
class Generator:
    name: str
    parity: int
    order: int = 1


@dataclass
class BaseAlgebra:
    """Structure constants of m; the unit is implicit."""

    names: Tuple[str, ...]
    parities: Tuple[int, ...]
    orders: Tuple[int, ...]
    table: Dict[Tuple[int, int], Element]
    generators: Tuple[Generator, ...] = ()
    exponents: Tuple[Optional[Exponents], ...] = ()
    truncation: Optional[int] = None
    _index: Dict[str, int] = field(default_factory=dict, repr=False, compare=False)

    def __post_init__(self):
        if not (len(self.names) == len(self.parities) == len(self.orders)):
            raise ValueError("names, parities and orders differ in length")
        if len(set(self.names)) != len(self.names):
            raise ValueError("basis names must be unique")
        if self.exponents and len(self.exponents) != len(self.names):
            raise ValueError("exponent labels must cover the basis")
        self._index = {n: i for i, n in enumerate(self.names)}
        self.table = {k: {i: as_fraction(x) for i, x in v.items() if x} for k, v in self.table.items()}
        self.table = {k: v for k, v in self.table.items() if v}

    @property
    def dim(self) -> int:
        return len(self.names)

    def index(self, name: str) -> int:
        try:
            return self._index[name]
        except KeyError:
            raise KeyError(f"unknown basis element {name!r}") from None

    def basis_vector(self, i: int) -> Element:
        return {i: Fraction(1)}

    def element(self, coeffs: Mapping[str, object]) -> Element:
        return {self.index(n): as_fraction(c) for n, c in coeffs.items() if as_fraction(c)}

    def mul_basis(self, i: int, j: int) -> Element:
        return self.table.get((i, j), {})

    def mul(self, u: Mapping[int, Fraction], v: Mapping[int, Fraction]) -> Element:
        out: Element = {}
        for i, x in u.items():
            for j, y in v.items():
                prod = self.table.get((i, j))
                if prod:
                    _add_into(out, prod, x * y)
        return out

    def parity_of(self, v: Mapping[int, Fraction]) -> Optional[int]:
        ps = {self.parities[i] for i, x in v.items() if x}
        if len(ps) > 1:
            raise ValueError("element is not parity-homogeneous")
        return ps.pop() if ps else None

    def order_of(self, v: Mapping[int, Fraction]) -> Optional[int]:
        """Least order among the basis elements in the support."""
        os_ = [self.orders[i] for i, x in v.items() if x]
        return min(os_) if os_ else None

    @property
    def is_infinitesimal(self) -> bool:
        return not self.table

    def generator_element(self, name: str) -> Element:
        for g in self.generators:
            if g.name == name:
                exps = tuple(1 if h.name == name else 0 for h in self.generators)
                for i, e in enumerate(self.exponents):
                    if e == exps:
                        return {i: Fraction(1)}
                return {}
        raise KeyError(f"unknown generator {name!r}")

    def power_basis(self, k: int) -> List[Element]:
        """Echelon basis of m^k."""
        if k < 1:
            raise ValueError("power must be at least 1")
        cur = EchelonBasis(self.dim)
        for i in range(self.dim):
            cur.add({i: Fraction(1)})
        for _ in range(k - 1):
            nxt = EchelonBasis(self.dim)
            for v in cur.rows():
                for j in range(self.dim):
                    p = self.mul(v, {j: Fraction(1)})
                    if p:
                        nxt.add(p)
            cur = nxt
        return cur.rows()

    def nilpotency(self) -> int:
        """Least k with m^k = 0."""
        k = 1
        while self.power_basis(k):
            k += 1
        return k

    def check(self, orders: bool = True) -> None:
        """Raise ValueError if commutativity, associativity or order additivity fails."""
        n = self.dim
        for (i, j), v in self.table.items():
            for k in v:
                if self.parities[k] != (self.parities[i] + self.parities[j]) % 2:
                    raise ValueError(f"product {self.names[i]}*{self.names[j]} breaks parity")
                if orders and self.orders[k] < self.orders[i] + self.orders[j]:
                    raise ValueError(f"product {self.names[i]}*{self.names[j]} lowers the order")
        for i in range(n):
            for j in range(n):
                s = -1 if (self.parities[i] and self.parities[j]) else 1
                if self.mul_basis(i, j) != scale(self.mul_basis(j, i), s):
                    raise ValueError(f"{self.names[i]} and {self.names[j]} do not graded-commute")
        for i in range(n):
            for j in range(n):
                ij = self.mul_basis(i, j)
                for k in range(n):
                    if self.mul(ij, {k: 1}) != self.mul({i: 1}, self.mul_basis(j, k)):
                        raise ValueError(
                            f"associativity fails on {self.names[i]}, {self.names[j]}, {self.names[k]}")


def monomial_name(gens: Sequence[Generator], exps: Exponents) -> str:
    parts = []
    for g, e in zip(gens, exps):
        if e == 1:
            parts.append(g.name)
        elif e > 1:
            parts.append(f"{g.name}^{e}")
    return "*".join(parts)


def _monomial_order(gens: Sequence[Generator], exps: Exponents) -> int:
    return sum(g.order * e for g, e in zip(gens, exps))


def _monomial_product_sign(gens: Sequence[Generator], a: Exponents, b: Exponents) -> int:
    # move the odd letters of b left past the larger-indexed odd letters of a
    odd = 0
    for j, (g, eb) in enumerate(zip(gens, b)):
        if g.parity and eb:
            for i in range(j + 1, len(gens)):
                if gens[i].parity and a[i]:
                    odd ^= 1
    return -1 if odd else 1


def free_truncated(generators: Sequence, k: int) -> BaseAlgebra:
    """Free graded-commutative algebra on ``generators`` modulo total order >= k.

    ``generators`` holds :class:`Generator` objects or ``(name, parity[, order])``
    tuples.  Monomials are listed by order, then lexicographically by exponent.
    """
    if k < 1:
        raise ValueError("truncation order must be at least 1")
    gens = tuple(g if isinstance(g, Generator) else Generator(*g) for g in generators)
    if len({g.name for g in gens}) != len(gens):
        raise ValueError("generator names must be unique")
    for g in gens:
        if g.order < 1:
            raise ValueError("generator orders must be at least 1")
    monos: List[Exponents] = []

    def rec(pos: int, left: int, acc: List[int]) -> None:
        if pos == len(gens):
            if left < k - 1:
                monos.append(tuple(acc))
            return
        g = gens[pos]
        top = 1 if g.parity else left // g.order
        for e in range(0, min(top, left // g.order) + 1):
            acc.append(e)
            rec(pos + 1, left - e * g.order, acc)
            acc.pop()

    rec(0, k - 1, [])
    monos.sort(key=lambda e: (_monomial_order(gens, e), tuple(-x for x in e)))
    index = {e: i for i, e in enumerate(monos)}
    table: Dict[Tuple[int, int], Element] = {}
    for i, a in enumerate(monos):
        for j, b in enumerate(monos):
            c = tuple(x + y for x, y in zip(a, b))
            if c not in index:
                continue
            table[(i, j)] = {index[c]: Fraction(_monomial_product_sign(gens, a, b))}
    return BaseAlgebra(
        names=tuple(monomial_name(gens, e) for e in monos),
        parities=tuple(sum(g.parity * x for g, x in zip(gens, e)) % 2 for e in monos),
        orders=tuple(_monomial_order(gens, e) for e in monos),
        table=table,
        generators=gens,
        exponents=tuple(monos),
        truncation=k,
    )


def ground_field() -> BaseAlgebra:
    return BaseAlgebra((), (), (), {})


def ideal_span(a: BaseAlgebra, generators: Sequence[Mapping[int, Fraction]]) -> EchelonBasis:
    """Echelon basis of the ideal of m generated by the given elements."""
    ech = EchelonBasis(a.dim)
    queue = [dict(g) for g in generators]
    while queue:
        v = queue.pop()
        if not v or not ech.add(v):
            continue
        for j in range(a.dim):
            p = a.mul(v, {j: Fraction(1)})
            if p:
                queue.append(p)
    return ech


@dataclass
class AlgebraMorphism:
    """A K-algebra morphism, given by the images of the basis of m."""

    source: BaseAlgebra
    target: BaseAlgebra
    images: Dict[int, Element]

    def __call__(self, v: Mapping[int, Fraction]) -> Element:
        out: Element = {}
        for i, x in v.items():
            _add_into(out, self.images.get(i, {}), x)
        return out

    def check(self, order_preserving: bool = True) -> None:
        s, t = self.source, self.target
        for i in range(s.dim):
            img = self.images.get(i, {})
            p = t.parity_of(img)
            if p is not None and p != s.parities[i]:
                raise ValueError(f"image of {s.names[i]} has the wrong parity")
            if order_preserving and img and t.order_of(img) < s.orders[i]:
                raise ValueError(f"image of {s.names[i]} has lower order")
        for i in range(s.dim):
            for j in range(s.dim):
                lhs = self(s.mul_basis(i, j))
                rhs = t.mul(self.images.get(i, {}), self.images.get(j, {}))
                if lhs != rhs:
                    raise ValueError(f"not multiplicative on {s.names[i]}, {s.names[j]}")

    def compose(self, other: "AlgebraMorphism") -> "AlgebraMorphism":
        """self after other."""
        return AlgebraMorphism(other.source, self.target,
                               {i: self(v) for i, v in other.images.items()})

    @property
    def is_surjective(self) -> bool:
        ech = EchelonBasis(self.target.dim)
        for v in self.images.values():
            ech.add(v)
        return len(ech) == self.target.dim

    @property
    def is_injective(self) -> bool:
        ech = EchelonBasis(self.target.dim)
        return all(ech.add(self.images.get(i, {})) for i in range(self.source.dim))


def identity(a: BaseAlgebra) -> AlgebraMorphism:
    return AlgebraMorphism(a, a, {i: {i: Fraction(1)} for i in range(a.dim)})


def augmentation(a: BaseAlgebra) -> AlgebraMorphism:
    return AlgebraMorphism(a, ground_field(), {})


def morphism_from_partial(source: BaseAlgebra, target: BaseAlgebra,
                          images: Mapping[int, Mapping[int, Fraction]]) -> AlgebraMorphism:
    """Extend images of some elements of m to a morphism, by multiplicativity.

    ``images`` maps basis indices of ``source`` to target elements; the given
    elements must generate m as an algebra.  Raises ValueError otherwise, or
    when the result is not multiplicative.
    """
    known = EchelonBasis(source.dim)
    vals: List[Element] = []
    pending = [({i: Fraction(1)}, dict(v)) for i, v in images.items()]
    while pending:
        v, img = pending.pop(0)
        coords = known.coordinates(v)
        if coords is not None:
            expect: Element = {}
            for k, x in coords.items():
                _add_into(expect, vals[k], x)
            if expect != img:
                raise ValueError("generator images are not compatible with the relations")
            continue
        known.add(v)
        vals.append(img)
        for k in range(len(vals)):
            u = known.added[k]
            for a_, b_, ia, ib in ((u, v, vals[k], img), (v, u, img, vals[k])):
                p = source.mul(a_, b_)
                if p:
                    pending.append((p, target.mul(ia, ib)))
    if len(known) != source.dim:
        raise ValueError("the given elements do not generate m")
    out: Dict[int, Element] = {}
    for i in range(source.dim):
        coords = known.coordinates({i: Fraction(1)})
        img: Element = {}
        for k, x in coords.items():
            _add_into(img, vals[k], x)
        out[i] = img
    f = AlgebraMorphism(source, target, out)
    f.check(order_preserving=False)
    return f


def morphism_from_generators(source: BaseAlgebra, target: BaseAlgebra,
                             images: Mapping[str, Mapping[int, Fraction]]) -> AlgebraMorphism:
    """Morphism out of a presented algebra, from the images of its generators."""
    if not source.generators:
        raise ValueError("source algebra has no generator presentation")
    partial = {}
    for g in source.generators:
        el = source.generator_element(g.name)
        img = dict(images.get(g.name, {}))
        if not el:
            if img:
                raise ValueError(f"generator {g.name} vanishes in the source but not its image")
            continue
        (i, c), = el.items()
        partial[i] = scale(img, 1 / c)
    return morphism_from_partial(source, target, partial)


def quotient(a: BaseAlgebra, ideal_generators: Sequence[Mapping[int, Fraction]],
             miniversal: bool = True, closed: bool = False) -> Tuple[BaseAlgebra, AlgebraMorphism]:
    """Quotient of ``a`` by the ideal generated by the given elements of m.

    Surviving basis elements are the non-pivots of the ideal's echelon form,
    with pivots taken at the lowest-order monomial of each relation, so that
    reduction never lowers orders.  In miniversal mode every generator must
    lie in m^2.  ``closed`` declares that the given elements already span
    an ideal, which skips the closure under multiplication.
    """
    if miniversal and ideal_generators:
        m2 = EchelonBasis(a.dim)
        for v in a.power_basis(2):
            m2.add(v)
        for g in ideal_generators:
            if not m2.contains(dict(g)):
                raise ValueError("ideal generator does not lie in m^2")
    # order columns so low-order monomials come first (they become pivots)
    perm = sorted(range(a.dim), key=lambda i: (a.orders[i], i))
    pos = {i: k for k, i in enumerate(perm)}
    if closed:
        rows_in = [dict(g) for g in ideal_generators]
    else:
        rows_in = ideal_span(a, ideal_generators).rows()
    ech = EchelonBasis(a.dim, track=False)
    for v in rows_in:
        ech.add({pos[i]: x for i, x in v.items()})
    rows = ech.rows()
    pivots = set(ech.pivots)
    keep = [i for i in range(a.dim) if pos[i] not in pivots]
    new_index = {i: k for k, i in enumerate(keep)}
    # normal form of every old basis element
    reduce: Dict[int, Element] = {}
    for i in keep:
        reduce[i] = {new_index[i]: Fraction(1)}
    for r, p in zip(rows, ech.pivots):
        old = perm[p]
        reduce[old] = {new_index[perm[c]]: -x for c, x in r.items() if c != p}

    def red(v: Mapping[int, Fraction]) -> Element:
        out: Element = {}
        for i, x in v.items():
            _add_into(out, reduce[i], x)
        return out

    table = {}
    for i in keep:
        for j in keep:
            p = red(a.mul_basis(i, j))
            if p:
                table[(new_index[i], new_index[j])] = p
    q = BaseAlgebra(
        names=tuple(a.names[i] for i in keep),
        parities=tuple(a.parities[i] for i in keep),
        orders=tuple(a.orders[i] for i in keep),
        table=table,
        generators=a.generators,
        exponents=tuple(a.exponents[i] for i in keep) if a.exponents else (),
        truncation=a.truncation,
    )
    proj = AlgebraMorphism(a, q, {i: red({i: Fraction(1)}) for i in range(a.dim)})
    return q, proj


def infinitesimal_extension(a: BaseAlgebra, module_dim: int,
                            cocycle: Mapping[Tuple[int, int], Mapping[int, object]],
                            names: Optional[Sequence[str]] = None,
                            parities: Optional[Sequence[int]] = None,
                            order: Optional[int] = None) -> BaseAlgebra:
    """The algebra A ⊕ N with (0,a)(0,a') = (φ(a,a'), aa') and N·m = 0.

    ``cocycle`` maps pairs of basis indices of m to elements of N (indices
    0..module_dim-1).  Raises ValueError unless φ is a graded-symmetric even
    Harrison 2-cocycle, which is exactly when the product is associative.
    """
    if names is None:
        names = tuple(f"n{i + 1}" for i in range(module_dim))
    if parities is None:
        parities = (0,) * module_dim
    if len(names) != module_dim or len(parities) != module_dim:
        raise ValueError("module names or parities do not match module_dim")
    if order is None:
        order = (a.truncation if a.truncation else max(a.orders, default=0) + 1)
    off = a.dim
    table = {k: dict(v) for k, v in a.table.items()}
    for (i, j), val in cocycle.items():
        if not (0 <= i < a.dim and 0 <= j < a.dim):
            raise IndexError(f"cocycle entry ({i}, {j}) outside the basis of m")
        for n, c in val.items():
            c = as_fraction(c)
            if not c:
                continue
            if not 0 <= n < module_dim:
                raise IndexError(f"module index {n} out of range")
            if parities[n] != (a.parities[i] + a.parities[j]) % 2:
                raise ValueError("extension cocycle must be even")
            entry = table.setdefault((i, j), {})
            entry[off + n] = entry.get(off + n, 0) + c
    ext = BaseAlgebra(
        names=tuple(a.names) + tuple(names),
        parities=tuple(a.parities) + tuple(parities),
        orders=tuple(a.orders) + (order,) * module_dim,
        table=table,
        generators=a.generators,
        exponents=(tuple(a.exponents) + (None,) * module_dim) if a.exponents else (),
        truncation=None,
    )
    try:
        ext.check(orders=False)
    except ValueError as exc:
        raise ValueError(f"not a Harrison 2-cocycle: {exc}") from None
    return ext


def is_isomorphism(f: AlgebraMorphism) -> bool:
    return f.source.dim == f.target.dim and f.is_injective
