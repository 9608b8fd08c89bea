"""Harrison cochains of a base algebra with infinitesimal coefficients.

Coefficients are an infinitesimal module N = K^r (m acts by zero), so
only the multiplication of m enters the differentials:

    d1 λ(a, b)    = -λ(ab)
    d2 φ(a, b, c) = -φ(ab, c) + φ(a, bc)

Cohomology is computed with coefficients in K; for N = K^r it is r copies.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Dict, List, Mapping, Optional, Sequence, Tuple

from .basealg import (AlgebraMorphism, BaseAlgebra, Element, _add_into, free_truncated, ideal_span,
                      infinitesimal_extension, quotient)
from .linalg import EchelonBasis, Matrix, kernel_basis, solve, to_sparse

Pair = Tuple[int, int]


@dataclass
class HarrisonCochain1:
    base: BaseAlgebra
    module_dim: int
    values: Dict[int, Element]
    parity: int = 0

    def __call__(self, v: Mapping[int, Fraction]) -> Element:
        out: Element = {}
        for i, x in v.items():
            _add_into(out, self.values.get(i, {}), x)
        return out


@dataclass
class HarrisonCochain2:
    """A graded-symmetric map m ⊗ m -> N, stored on all ordered basis pairs."""

    base: BaseAlgebra
    module_dim: int
    values: Dict[Pair, Element]
    parity: int = 0

    def __post_init__(self):
        self.values = {k: v for k, v in self.values.items() if v}

    def __call__(self, u: Mapping[int, Fraction], v: Mapping[int, Fraction]) -> Element:
        out: Element = {}
        for i, x in u.items():
            for j, y in v.items():
                val = self.values.get((i, j))
                if val:
                    _add_into(out, val, x * y)
        return out

    def is_symmetric(self) -> bool:
        P = self.base.parities
        for (i, j), v in self.values.items():
            s = -1 if (P[i] and P[j]) else 1
            if {k: s * x for k, x in v.items()} != self.values.get((j, i), {}):
                return False
        return True

    @classmethod
    def symmetrized(cls, base: BaseAlgebra, module_dim: int, values: Mapping[Pair, Mapping[int, object]],
                    parity: int = 0) -> "HarrisonCochain2":
        """Cochain with the given values on pairs, extended by graded symmetry."""
        P = base.parities
        out: Dict[Pair, Element] = {}
        for (i, j), v in values.items():
            v = {k: Fraction(x) for k, x in v.items() if Fraction(x)}
            s = -1 if (P[i] and P[j]) else 1
            for key, val in (((i, j), v), ((j, i), {k: s * x for k, x in v.items()})):
                if key in out and out[key] != val:
                    raise ValueError(f"values on {key} contradict graded symmetry")
                out[key] = val
        return cls(base, module_dim, out, parity)


def d1(lam: HarrisonCochain1) -> HarrisonCochain2:
    a = lam.base
    vals = {}
    for i in range(a.dim):
        for j in range(a.dim):
            v = lam(a.mul_basis(i, j))
            if v:
                vals[(i, j)] = {k: -x for k, x in v.items()}
    return HarrisonCochain2(a, lam.module_dim, vals, lam.parity)


def d2(phi: HarrisonCochain2) -> Dict[Tuple[int, int, int], Element]:
    a = phi.base
    out = {}
    for i in range(a.dim):
        for j in range(a.dim):
            ij = a.mul_basis(i, j)
            for k in range(a.dim):
                val: Element = {}
                _add_into(val, phi(ij, {k: 1}), -1)
                _add_into(val, phi({i: 1}, a.mul_basis(j, k)))
                if val:
                    out[(i, j, k)] = val
    return out


def cochain2_basis(a: BaseAlgebra) -> List[Pair]:
    """Pairs i <= j indexing the K-valued symmetric 2-cochains."""
    return [(i, j) for i in range(a.dim) for j in range(i, a.dim) if not (i == j and a.parities[i])]


def basis_cochain2(a: BaseAlgebra, pair: Pair) -> HarrisonCochain2:
    i, j = pair
    return HarrisonCochain2.symmetrized(a, 1, {(i, j): {0: 1}}, (a.parities[i] + a.parities[j]) % 2)


def _coords2(a: BaseAlgebra, phi: HarrisonCochain2, pairs: List[Pair]) -> List[Fraction]:
    return [phi.values.get(p, {}).get(0, Fraction(0)) for p in pairs]


def d1_matrix(a: BaseAlgebra) -> Matrix:
    pairs = cochain2_basis(a)
    cols = []
    for k in range(a.dim):
        lam = HarrisonCochain1(a, 1, {k: {0: Fraction(1)}}, a.parities[k])
        cols.append(_coords2(a, d1(lam), pairs))
    return Matrix.from_columns(cols, len(pairs))


def d2_matrix(a: BaseAlgebra) -> Matrix:
    pairs = cochain2_basis(a)
    n = a.dim
    triples = {(i, j, k): r for r, (i, j, k) in enumerate(
        (i, j, k) for i in range(n) for j in range(n) for k in range(n))}
    cols = []
    for p in pairs:
        col = {}
        for t, v in d2(basis_cochain2(a, p)).items():
            if v.get(0):
                col[triples[t]] = v[0]
        cols.append(col)
    return Matrix.from_sparse_columns(cols, len(triples))


@dataclass
class HarrisonReport:
    base: BaseAlgebra
    degree: int
    cochains: List[Pair]
    cocycles: List[List[Fraction]]
    coboundaries: List[List[Fraction]]
    representatives: List[List[Fraction]]
    parities: List[int] = field(default_factory=list)

    @property
    def dim(self) -> int:
        return len(self.representatives)

    def dims_by_parity(self) -> Tuple[int, int]:
        odd = sum(self.parities)
        return (len(self.parities) - odd, odd)

    def cochain(self, r: int) -> HarrisonCochain2:
        """Representative ``r`` as a 2-cochain (degree 2 only)."""
        if self.degree != 2:
            raise ValueError("only degree-2 representatives are 2-cochains")
        vals = {p: {0: x} for p, x in zip(self.cochains, self.representatives[r]) if x}
        return HarrisonCochain2.symmetrized(self.base, 1, vals, self.parities[r])


def ha(a: BaseAlgebra, degree: int) -> HarrisonReport:
    """Ha^degree(A, K) for degree 1 or 2."""
    if degree == 1:
        m = d1_matrix(a)
        z = kernel_basis(m)
        pars = []
        for v in z:
            ps = {a.parities[i] for i, x in enumerate(v) if x}
            pars.append(ps.pop() if len(ps) == 1 else 0)
        return HarrisonReport(a, 1, [], z, [], z, pars)
    if degree != 2:
        raise ValueError("only Harrison degrees 1 and 2 are implemented")
    pairs = cochain2_basis(a)
    z = kernel_basis(d2_matrix(a))
    b = [v for v in (d1_matrix(a).column(k) for k in range(a.dim)) if any(v)]
    ech = EchelonBasis(len(pairs))
    for v in b:
        ech.add(to_sparse(v))
    coboundaries = [_dense(r, len(pairs)) for r in ech.rows()]
    # split cocycles by parity so that representatives are homogeneous
    reps: List[List[Fraction]] = []
    pars: List[int] = []
    zech = EchelonBasis(len(pairs))
    for v in z:
        zech.add(to_sparse(v))
    for p in (0, 1):
        for row in zech.rows():
            ps = {(a.parities[pairs[k][0]] + a.parities[pairs[k][1]]) % 2 for k in row}
            if ps != {p}:
                continue
            if ech.add(row):
                reps.append(_dense(row, len(pairs)))
                pars.append(p)
    return HarrisonReport(a, 2, pairs, [_dense(r, len(pairs)) for r in zech.rows()], coboundaries, reps, pars)


def _dense(v: Mapping[int, Fraction], n: int) -> List[Fraction]:
    out = [Fraction(0)] * n
    for k, x in v.items():
        out[k] = x
    return out


def theorem_dimension(ambient: BaseAlgebra, ideal_generators: Sequence[Mapping[int, Fraction]]) -> int:
    """dim I/(m·I) for A = F/I, computed inside the truncated free algebra F.

    ``ambient`` is free truncated at order K and I is taken to contain
    m^(K-1); since m·I then contains m^K, nothing is lost by truncating.
    """
    if ambient.truncation is None:
        raise ValueError("ambient algebra must be a truncated free algebra")
    top = [v for v in ambient.power_basis(ambient.truncation - 1)]
    ideal = ideal_span(ambient, list(ideal_generators) + top)
    mi = EchelonBasis(ambient.dim)
    for v in ideal.rows():
        for j in range(ambient.dim):
            p = ambient.mul(v, {j: Fraction(1)})
            if p:
                mi.add(p)
    return len(ideal) - len(mi)


@dataclass
class UniversalExtension:
    base: BaseAlgebra
    algebra: BaseAlgebra
    cocycle: Dict[Pair, Element]
    report: HarrisonReport

    @property
    def module_dim(self) -> int:
        return self.report.dim

    @property
    def module_indices(self) -> List[int]:
        return list(range(self.base.dim, self.algebra.dim))


def mu_star(report: HarrisonReport) -> Dict[Pair, Element]:
    """μ*(a, b) = Σ_j (-1)^{(|a|+|b|)|φ^j|} φ^j(a, b) n_j."""
    a = report.base
    out: Dict[Pair, Element] = {}
    for j in range(report.dim):
        phi = report.cochain(j)
        for (x, y), v in phi.values.items():
            c = v.get(0)
            if not c:
                continue
            if (a.parities[x] + a.parities[y]) * report.parities[j] % 2:
                c = -c
            out.setdefault((x, y), {})[j] = c
    return out


def universal_infinitesimal_extension(a: BaseAlgebra, names: Optional[Sequence[str]] = None) -> UniversalExtension:
    rep = ha(a, 2)
    cocycle = mu_star(rep)
    if names is None:
        names = tuple(f"M{j + 1}" for j in range(rep.dim))
    ext = infinitesimal_extension(a, rep.dim, cocycle, names=names, parities=tuple(rep.parities))
    return UniversalExtension(a, ext, cocycle, rep)


def extend_morphism(univ: UniversalExtension, target: BaseAlgebra, target_base_dim: int,
                    f: AlgebraMorphism) -> AlgebraMorphism:
    """Lift f : A -> A' to the universal extension B of A.

    ``target`` is an infinitesimal extension B' = A' ⊕ N built by
    :func:`infinitesimal_extension`, whose first ``target_base_dim`` basis
    elements are those of A'.  Solves g(μ*(a,a')) + λ(aa') = φ'(fa, fa') for
    the even maps g : M -> N and λ : m_A -> N.
    """
    A, B = univ.base, univ.algebra
    nb = target_base_dim
    ndim = target.dim - nb
    Ppar = target.parities
    # unknowns: g[n][j] for module elements, lam[n][i] for base elements
    unknowns: List[Tuple[str, int, int]] = []
    for n in range(ndim):
        for j in range(univ.module_dim):
            if Ppar[nb + n] == univ.report.parities[j]:
                unknowns.append(("g", n, j))
        for i in range(A.dim):
            if Ppar[nb + n] == A.parities[i]:
                unknowns.append(("l", n, i))
    upos = {u: k for k, u in enumerate(unknowns)}
    rows: List[Dict[int, Fraction]] = []
    rhs: List[Fraction] = []
    for x in range(A.dim):
        for y in range(A.dim):
            fa, fb = f.images.get(x, {}), f.images.get(y, {})
            target_prod = target.mul(fa, fb)
            want = {k - nb: c for k, c in target_prod.items() if k >= nb}
            mstar = univ.cocycle.get((x, y), {})
            prod = A.mul_basis(x, y)
            for n in range(ndim):
                row: Dict[int, Fraction] = {}
                for j, c in mstar.items():
                    k = upos.get(("g", n, j))
                    if k is not None:
                        row[k] = row.get(k, 0) + c
                for i, c in prod.items():
                    k = upos.get(("l", n, i))
                    if k is not None:
                        row[k] = row.get(k, 0) + c
                rows.append(row)
                rhs.append(want.get(n, Fraction(0)))
    m = Matrix(len(rows), len(unknowns), {(r, c): v for r, row in enumerate(rows) for c, v in row.items()})
    sol = solve(m, rhs)
    if sol is None:
        raise RuntimeError("no lift of the morphism to the universal extension exists")
    images: Dict[int, Element] = {}
    for x in range(A.dim):
        img = {k: c for k, c in f.images.get(x, {}).items()}
        for n in range(ndim):
            k = upos.get(("l", n, x))
            if k is not None and sol[k]:
                img[nb + n] = sol[k]
        images[x] = img
    for j in range(univ.module_dim):
        img = {}
        for n in range(ndim):
            k = upos.get(("g", n, j))
            if k is not None and sol[k]:
                img[nb + n] = sol[k]
        images[A.dim + j] = img
    lift = AlgebraMorphism(B, target, images)
    lift.check(order_preserving=False)
    return lift


def extension_equivalence(a: BaseAlgebra, ext_from: BaseAlgebra, ext_to: BaseAlgebra,
                          lam: HarrisonCochain1) -> AlgebraMorphism:
    """The map (n, a) -> (n + λ(a), a) between two extensions of A by N.

    It is an algebra isomorphism from the extension with cocycle φ to the one
    with cocycle φ - d1 λ.
    """
    nb = a.dim
    images: Dict[int, Element] = {}
    for i in range(a.dim):
        img = {i: Fraction(1)}
        for n, c in lam.values.get(i, {}).items():
            img[nb + n] = c
        images[i] = img
    for n in range(ext_from.dim - nb):
        images[nb + n] = {nb + n: Fraction(1)}
    f = AlgebraMorphism(ext_from, ext_to, images)
    f.check(order_preserving=False)
    return f


def polynomial_quotient_dims(gens: Sequence, n: int) -> Tuple[int, int]:
    """Ha^2 of K[gens]/(order n) both ways: cochain complex and theorem formula."""
    F = free_truncated(gens, n + 1)
    A, _ = quotient(F, F.power_basis(n))
    return ha(A, 2).dim, theorem_dimension(F, F.power_basis(n))
