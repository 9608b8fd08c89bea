"""Cohomology of the coderivation algebra under D = [d, -].

The complex is the truncation of L at the weight cap N (all coderivations
with arities 1..N), which is a dg Lie algebra in its own right because the
arities above N form an ideal.  For a quadratic d it splits by weight; in
general only the weight filtration survives, and classes are reported with
their filtration degree.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Dict, List, Optional, Tuple

from .coderiv import Coderivation, CoderivationAlgebra, big_d, is_codifferential
from .linalg import EchelonBasis, Matrix

Sparse = Dict[int, Fraction]


@dataclass
class CochainBasis:
    weight: int
    parity: int
    basis: List[Coderivation]

    @property
    def dim(self) -> int:
        return len(self.basis)


def cochain_basis(algebra: CoderivationAlgebra, n: int, p: int) -> CochainBasis:
    if not 1 <= n <= algebra.cap:
        raise ValueError(f"weight {n} outside 1..{algebra.cap}")
    return CochainBasis(n, p, [algebra.basis_element(i) for i in algebra.indices([n], p)])


def is_quadratic(d: Coderivation) -> bool:
    return all(len(w) == 2 for w, _ in d.table)


@dataclass
class CohomologyClass:
    index: int
    weight: int
    parity: int
    vector: Sparse

    @property
    def parameter_parity(self) -> int:
        """Parity of the dual coordinate t^i, which is flipped by Π."""
        return 1 - self.parity


@dataclass
class CohomologyReport:
    d: Coderivation
    algebra: CoderivationAlgebra
    max_weight: int
    classes: List[CohomologyClass]
    dims: Dict[Tuple[int, int], Tuple[int, int, int]]
    cocycles: Dict[int, List[Sparse]]
    coboundaries: Dict[int, List[Sparse]]
    _dcols: Dict[int, Sparse] = field(repr=False, default_factory=dict)
    _all_classes: List[CohomologyClass] = field(repr=False, default_factory=list)
    _bspan: Dict[int, EchelonBasis] = field(repr=False, default_factory=dict)
    _cspan: Dict[int, Tuple[EchelonBasis, List[int]]] = field(repr=False, default_factory=dict)
    _hspan: Dict[int, Tuple[EchelonBasis, List[int]]] = field(repr=False, default_factory=dict)

    @property
    def labels(self) -> List[str]:
        return [f"t{c.index + 1}" for c in self.classes]

    def dim_h(self, n: int, p: int) -> int:
        return self.dims[(n, p)][2]

    def D(self, v: Sparse) -> Sparse:
        out: Sparse = {}
        for i, x in v.items():
            for k, y in self._dcols[i].items():
                nv = out.get(k, 0) + x * y
                if nv:
                    out[k] = nv
                else:
                    out.pop(k, None)
        return out

    def is_cocycle(self, v: Sparse) -> bool:
        return not self.D(v)

    def _parity_of(self, v: Sparse) -> Optional[int]:
        ps = {self.algebra.parity[i] for i, x in v.items() if x}
        if len(ps) > 1:
            raise ValueError("vector is not parity-homogeneous")
        return ps.pop() if ps else None

    def coboundary_preimage(self, v: Sparse) -> Optional[Sparse]:
        """Some lambda with D(lambda) = v, or None when v is not a coboundary."""
        p = self._parity_of(v)
        if p is None:
            return {}
        ech, cols = self._cspan[p]
        coords = ech.coordinates(v)
        if coords is None:
            return None
        return {cols[k]: x for k, x in coords.items() if x}

    def is_coboundary(self, v: Sparse) -> bool:
        p = self._parity_of(v)
        return p is None or self._bspan[p].contains(v)

    def class_coordinates(self, v: Sparse) -> Dict[int, Fraction]:
        """Coordinates of the class of a cocycle on the representatives."""
        if not self.is_cocycle(v):
            raise ValueError("vector is not a cocycle")
        p = self._parity_of(v)
        if p is None:
            return {}
        ech, labels = self._hspan[p]
        coords = ech.coordinates(v)
        if coords is None:
            raise AssertionError("cocycle outside span of coboundaries and representatives")
        return {labels[k]: x for k, x in coords.items() if labels[k] is not None and x}

    def lift_mu(self, class_index: int) -> Coderivation:
        if not 0 <= class_index < len(self.classes):
            raise IndexError(f"no cohomology class with index {class_index}")
        c = self.classes[class_index]
        return self.algebra.coderivation(c.vector, c.parity)


def d_columns(algebra: CoderivationAlgebra, d: Coderivation) -> Dict[int, Sparse]:
    cols = {}
    for i in range(algebra.dim):
        cols[i] = algebra.vector(big_d(d, algebra.basis_element(i)))
    return cols


def cochain_matrix_of_D(d: Coderivation, n: int, p: int,
                        algebra: Optional[CoderivationAlgebra] = None) -> Matrix:
    """Matrix of D on the weight-n, parity-p cochains.

    Rows run over the parity 1-p cochains of weights n..cap in basis order.
    """
    if algebra is None:
        algebra = CoderivationAlgebra(d.space, d.kind, d.cap)
    if not 1 <= n <= algebra.cap:
        raise ValueError(f"weight {n} outside 1..{algebra.cap}")
    cols = algebra.indices([n], p)
    rows = algebra.indices(range(n, algebra.cap + 1), 1 - p)
    pos = {r: k for k, r in enumerate(rows)}
    columns = []
    for i in cols:
        v = algebra.vector(big_d(d, algebra.basis_element(i)))
        columns.append({pos[k]: x for k, x in v.items()})
    return Matrix.from_sparse_columns(columns, len(rows))


def _weight_of(algebra: CoderivationAlgebra, v: Sparse) -> int:
    return min(algebra.weight[i] for i in v)


def _echelon_rows(vectors: List[Sparse], dim: int) -> List[Sparse]:
    ech = EchelonBasis(dim)
    for v in vectors:
        ech.add(v)
    return ech.rows()


def cohomology(d: Coderivation, max_weight: Optional[int] = None,
               algebra: Optional[CoderivationAlgebra] = None) -> CohomologyReport:
    """Cocycles, coboundaries and class representatives of the truncated complex."""
    if not is_codifferential(d):
        raise ValueError("d is not a codifferential")
    if max_weight is None:
        max_weight = d.cap
    if not 1 <= max_weight <= d.cap:
        raise ValueError(f"max_weight must lie in 1..{d.cap}")
    if algebra is None:
        algebra = CoderivationAlgebra(d.space, d.kind, d.cap)
    N = algebra.dim
    dcols = d_columns(algebra, d)

    cocycles: Dict[int, List[Sparse]] = {}
    coboundaries: Dict[int, List[Sparse]] = {}
    bspan: Dict[int, EchelonBasis] = {}
    cspan: Dict[int, Tuple[EchelonBasis, List[int]]] = {}
    hspan: Dict[int, Tuple[EchelonBasis, List[Optional[int]]]] = {}
    dims: Dict[Tuple[int, int], Tuple[int, int, int]] = {}
    found: List[Tuple[int, int, Sparse]] = []

    for p in (0, 1):
        # image of D from the other parity; columns kept to recover preimages
        ech = EchelonBasis(N)
        cols: List[int] = []
        for i in algebra.indices(parity=1 - p):
            if dcols[i] and ech.add(dcols[i]):
                cols.append(i)
        cspan[p] = (ech, cols)
        bspan[p] = ech
        coboundaries[p] = _echelon_rows([dcols[i] for i in cols], N)

        # kernel of D on parity p from linear relations among the columns
        img = EchelonBasis(N)
        img_src: List[int] = []
        zvecs: List[Sparse] = []
        for i in algebra.indices(parity=p):
            col = dcols[i]
            coords = img.coordinates(col) if col else {}
            if coords is None:
                img.add(col)
                img_src.append(i)
                continue
            v = {i: Fraction(1)}
            for k, x in coords.items():
                v[img_src[k]] = -x
            zvecs.append(v)
        zrows = _echelon_rows(zvecs, N)
        cocycles[p] = zrows

        for n in range(1, algebra.cap + 1):
            z = sum(1 for r in zrows if _weight_of(algebra, r) == n)
            b = sum(1 for r in coboundaries[p] if _weight_of(algebra, r) == n)
            dims[(n, p)] = (z, b, z - b)

        # filtration-compatible representatives, highest degree first
        hs = EchelonBasis(N)
        labels: List[Optional[int]] = []
        for r in coboundaries[p]:
            hs.add(r)
            labels.append(None)
        for n in range(algebra.cap, 0, -1):
            for r in zrows:
                if _weight_of(algebra, r) == n and hs.add(r):
                    labels.append(len(found))
                    found.append((n, p, r))
        hspan[p] = (hs, labels)

    # global order: by weight, then parity, then discovery order
    order = sorted(range(len(found)), key=lambda k: (found[k][0], found[k][1], k))
    renum = {k: gi for gi, k in enumerate(order)}
    classes = [CohomologyClass(gi, found[k][0], found[k][1], found[k][2]) for gi, k in enumerate(order)]
    for p in (0, 1):
        hs, labels = hspan[p]
        hspan[p] = (hs, [None if l is None else renum[l] for l in labels])
    for (n, p), (z, b, h) in dims.items():
        got = sum(1 for c in classes if c.weight == n and c.parity == p)
        if got != h:
            raise AssertionError(f"class count {got} differs from dim Z - dim B = {h} at weight {n}")

    reported = [c for c in classes if c.weight <= max_weight]
    rep = CohomologyReport(d, algebra, max_weight, reported,
                           {k: v for k, v in dims.items() if k[0] <= max_weight},
                           cocycles, coboundaries)
    rep._dcols = dcols
    rep._all_classes = classes
    rep._bspan = bspan
    rep._cspan = cspan
    rep._hspan = hspan
    return rep
