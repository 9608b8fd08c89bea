"""Deformations d + δ with δ in L ⊗ m, obstructions and the miniversal step.

Elements of L ⊗ A are dicts ``{key: sparse vector}``, where the key is a
basis index of m and the vector lives in the coordinates of a
:class:`~codiff.coderiv.CoderivationAlgebra`.  The key ``None`` stands for
the unit of A and is used only for d ⊗ 1.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Dict, List, Mapping, Optional, Sequence, Tuple

from .basealg import (AlgebraMorphism, BaseAlgebra, Element, Generator, _add_into, free_truncated,
                      morphism_from_generators, quotient)
from .coderiv import Coderivation, CoderivationAlgebra
from .cohomology import CohomologyReport, cohomology, is_quadratic
from .linalg import EchelonBasis

Sparse = Dict[int, Fraction]
Key = Optional[int]
Tensor = Dict[Key, Sparse]

HALF = Fraction(1, 2)

_reports: Dict[tuple, CohomologyReport] = {}


def report_for(d: Coderivation) -> CohomologyReport:
    """Cohomology of d over its full weight cap, cached per codifferential."""
    key = (d.space, d.kind, d.cap, d.parity, tuple(sorted(d.table.items())))
    rep = _reports.get(key)
    if rep is None:
        rep = cohomology(d)
        _reports[key] = rep
    return rep


# ---------------------------------------------------------------------------
# arithmetic in L ⊗ A


def _tadd(acc: Tensor, key: Key, v: Mapping[int, Fraction], c=1) -> None:
    if not v or not c:
        return
    cur = acc.setdefault(key, {})
    _add_into(cur, v, c)
    if not cur:
        del acc[key]


def tensor_add(x: Tensor, y: Tensor, c=1) -> Tensor:
    out = {k: dict(v) for k, v in x.items()}
    for k, v in y.items():
        _tadd(out, k, v, c)
    return out


def _split_parity(alg: CoderivationAlgebra, v: Sparse) -> List[Tuple[int, Sparse]]:
    parts: Dict[int, Sparse] = {}
    for i, x in v.items():
        parts.setdefault(alg.parity[i], {})[i] = x
    return sorted(parts.items())


def tensor_bracket(alg: CoderivationAlgebra, base: BaseAlgebra, x: Tensor, y: Tensor) -> Tensor:
    """[φ⊗a, ψ⊗b] = (-1)^{|a||ψ|} [φ,ψ] ⊗ ab, extended bilinearly."""
    out: Tensor = {}
    ysplit = {kb: _split_parity(alg, v) for kb, v in y.items()}
    for ka, u in x.items():
        pa = 0 if ka is None else base.parities[ka]
        for kb, parts in ysplit.items():
            if ka is None:
                prod: Element = {kb: Fraction(1)} if kb is not None else None
            elif kb is None:
                prod = {ka: Fraction(1)}
            else:
                prod = base.mul_basis(ka, kb)
                if not prod:
                    continue
            for p, v in parts:
                br = alg.bracket(u, v)
                if not br:
                    continue
                s = -1 if (pa and p) else 1
                if prod is None:
                    _tadd(out, None, br, s)
                else:
                    for kc, c in prod.items():
                        _tadd(out, kc, br, s * c)
    return out


def tensor_D(rep: CohomologyReport, x: Tensor) -> Tensor:
    return {k: dv for k, v in x.items() if (dv := rep.D(v))}


def mc_tensor(rep: CohomologyReport, base: BaseAlgebra, delta: Tensor) -> Tensor:
    """D(δ) + ½[δ, δ]."""
    out = tensor_D(rep, delta)
    return tensor_add(out, tensor_bracket(rep.algebra, base, delta, delta), HALF)


# ---------------------------------------------------------------------------
# deformations


@dataclass
class Deformation:
    """d + Σ δ_b ⊗ b over a base algebra, b running over the basis of m."""

    d: Coderivation
    base: BaseAlgebra
    delta: Dict[int, Coderivation]

    def __post_init__(self):
        for b, c in self.delta.items():
            if not 0 <= b < self.base.dim:
                raise IndexError(f"monomial index {b} outside the base")
            if not c.is_zero and (c.parity + self.base.parities[b]) % 2 != 1:
                raise ValueError(f"term on {self.base.names[b]} is not odd in total")
        self.delta = {b: c for b, c in self.delta.items() if not c.is_zero}

    @property
    def report(self) -> CohomologyReport:
        return report_for(self.d)

    def tensor(self) -> Tensor:
        alg = self.report.algebra
        return {b: alg.vector(c) for b, c in self.delta.items()}

    @classmethod
    def from_tensor(cls, d: Coderivation, base: BaseAlgebra, t: Tensor) -> "Deformation":
        alg = report_for(d).algebra
        return cls(d, base, {b: alg.coderivation(v, (1 + base.parities[b]) % 2)
                             for b, v in t.items() if b is not None and v})

    def named(self) -> Dict[str, Coderivation]:
        return {self.base.names[b]: c for b, c in self.delta.items()}


def trivial(d: Coderivation, base: BaseAlgebra) -> Deformation:
    return Deformation(d, base, {})


def mc_defect(defo: Deformation) -> Dict[int, Coderivation]:
    """Nonzero components of D(δ) + ½[δ,δ], one per basis element of m."""
    rep = defo.report
    g = mc_tensor(rep, defo.base, defo.tensor())
    return {b: rep.algebra.coderivation(v, defo.base.parities[b]) for b, v in g.items()}


def is_deformation(defo: Deformation) -> bool:
    return not mc_defect(defo)


def infinitesimal_equivalent(a: Deformation, b: Deformation) -> Tuple[bool, Optional[Dict[int, Coderivation]]]:
    """Whether δ - δ' is a coboundary; the witness λ has D(λ) = δ - δ'."""
    if a.base is not b.base and a.base != b.base:
        raise ValueError("deformations live over different bases")
    if not a.base.is_infinitesimal:
        raise ValueError("equivalence by coboundaries needs an infinitesimal base")
    rep = a.report
    ta, tb = a.tensor(), b.tensor()
    diff = tensor_add(ta, tb, -1)
    witness: Dict[int, Coderivation] = {}
    for k, v in diff.items():
        lam = rep.coboundary_preimage(v)
        if lam is None:
            return False, None
        witness[k] = rep.algebra.coderivation(lam, a.base.parities[k])
    return True, witness


def push_tensor(t: Tensor, f: AlgebraMorphism) -> Tensor:
    out: Tensor = {}
    for k, v in t.items():
        if k is None:
            _tadd(out, None, v)
            continue
        for kc, c in f.images.get(k, {}).items():
            _tadd(out, kc, v, c)
    return out


def push_out(defo: Deformation, f: AlgebraMorphism, check: bool = True) -> Deformation:
    if f.source is not defo.base and f.source != defo.base:
        raise ValueError("morphism does not start at the deformation's base")
    out = Deformation.from_tensor(defo.d, f.target, push_tensor(defo.tensor(), f))
    if check and mc_defect(out):
        raise ValueError("push-out fails Maurer-Cartan; the map is not an algebra morphism")
    return out


# ---------------------------------------------------------------------------
# parameters and the universal infinitesimal deformation


@dataclass
class Parameter:
    name: str
    parity: int
    order: int
    class_index: int


def parameter_classes(rep: CohomologyReport, strict: bool = False, even_only: bool = False) -> List[int]:
    """Indices of the cohomology classes that receive a base coordinate.

    Strict mode keeps weight 2 only (classical Lie or associative
    deformations); ``even_only`` drops classes whose coordinate would be odd.
    """
    if strict:
        if not is_quadratic(rep.d):
            raise ValueError("strict mode needs a quadratic codifferential")
        if rep.algebra.cap < 3:
            raise ValueError("strict mode needs weight cap at least 3")
    out = []
    for c in rep.classes:
        if strict and c.weight != 2:
            continue
        if even_only and c.parameter_parity:
            continue
        out.append(c.index)
    return out


def parameters(rep: CohomologyReport, strict: bool = False, even_only: bool = False) -> List[Parameter]:
    return [Parameter(f"t{k + 1}", rep.classes[i].parameter_parity, rep.classes[i].weight, i)
            for k, i in enumerate(parameter_classes(rep, strict, even_only))]


def universal_infinitesimal(d: Coderivation, rep: Optional[CohomologyReport] = None,
                            strict: bool = False, even_only: bool = False) -> Deformation:
    """d + Σ μ_i ⊗ t^i over K ⊕ (ΠH)^*, with m^2 = 0."""
    rep = rep or report_for(d)
    params = parameters(rep, strict, even_only)
    n = len(params)
    gens = tuple(Generator(p.name, p.parity, p.order) for p in params)
    base = BaseAlgebra(
        names=tuple(p.name for p in params),
        parities=tuple(p.parity for p in params),
        orders=tuple(p.order for p in params),
        table={},
        generators=gens,
        exponents=tuple(tuple(1 if j == i else 0 for j in range(n)) for i in range(n)),
        truncation=None,
    )
    delta = {k: rep.lift_mu(p.class_index) for k, p in enumerate(params)}
    return Deformation(d, base, delta)


def _m2_echelon(base: BaseAlgebra) -> EchelonBasis:
    ech = EchelonBasis(base.dim, track=False)
    for v in base.power_basis(2) if base.dim else []:
        ech.add(v)
    return ech


def differential_of(defo: Deformation) -> Dict[Tuple[int, int], Fraction]:
    """Class of the order-one part of δ in H(L) ⊗ m/m^2.

    Keys are (class index, basis index of m spanning m/m^2).
    """
    rep = defo.report
    m2 = _m2_echelon(defo.base)
    lin: Tensor = {}
    for b, v in defo.tensor().items():
        for c, x in m2.residual({b: Fraction(1)}).items():
            _tadd(lin, c, v, x)
    out = {}
    for c, v in lin.items():
        for i, x in rep.class_coordinates(v).items():
            out[(i, c)] = x
    return out


# ---------------------------------------------------------------------------
# obstructions


@dataclass
class ObstructionClass:
    """γ̄ = Σ_n [γ_n] ⊗ n; components keyed by the module basis index."""

    components: Dict[int, Dict[int, Fraction]]
    cocycles: Dict[int, Coderivation] = field(default_factory=dict)

    @property
    def is_zero(self) -> bool:
        return not any(self.components.values())

    def pushed(self, g: Mapping[int, Mapping[int, object]]) -> "ObstructionClass":
        """Image under a linear map g of modules, given as n -> {n': coef}."""
        out: Dict[int, Dict[int, Fraction]] = {}
        for n, comp in self.components.items():
            for n2, c in g.get(n, {}).items():
                acc = out.setdefault(n2, {})
                for i, x in comp.items():
                    acc[i] = acc.get(i, 0) + Fraction(c) * x
        return ObstructionClass({n: {i: x for i, x in v.items() if x} for n, v in out.items()
                                 if any(v.values())})


def obstruction(defo: Deformation, extension: BaseAlgebra) -> ObstructionClass:
    """Obstruction to lifting ``defo`` across an infinitesimal extension.

    ``extension`` is A ⊕ N as built by ``infinitesimal_extension``: its first
    basis elements are those of A, the remaining ones span N.
    """
    a = defo.base
    nb = a.dim
    if extension.names[:nb] != a.names:
        raise ValueError("extension does not start with the basis of the deformation's base")
    rep = defo.report
    gamma = mc_tensor(rep, extension, defo.tensor())
    comps: Dict[int, Dict[int, Fraction]] = {}
    cocycles = {}
    for k, v in gamma.items():
        if k is None or k < nb:
            raise AssertionError("Maurer-Cartan fails over the base itself")
        if not rep.is_cocycle(v):
            raise AssertionError(f"obstruction component on {extension.names[k]} is not a cocycle")
        cocycles[k - nb] = rep.algebra.coderivation(v, extension.parities[k])
        coords = rep.class_coordinates(v)
        if coords:
            comps[k - nb] = coords
    return ObstructionClass(comps, cocycles)


# ---------------------------------------------------------------------------
# the miniversal deformation
#
# Everything happens inside F = K[t]/m^(k_max+1), the free graded-commutative
# algebra on the parameters.  A_k = F/J_k with J_2 = m^2.  By Harrison's
# theorem the universal infinitesimal extension of A_k is F/(m·J_k), with
# module M = J_k/(m·J_k), so δ can be lifted verbatim and the obstruction is
# read off the components of D(δ) + ½[δ,δ] along J_k.


@dataclass
class StepDiagnostics:
    order: int
    module_dim: int
    obstruction_rank: int
    relations: List[Element]
    beta_support: int


@dataclass
class MiniversalState:
    d: Coderivation
    rep: CohomologyReport
    params: List[Parameter]
    ambient: BaseAlgebra
    ideal: List[Element]
    k: int
    delta: Tensor


def _echelon(dim: int, vectors, track: bool = False) -> EchelonBasis:
    ech = EchelonBasis(dim, track=track)
    for v in vectors:
        ech.add(v)
    return ech


def _times_m(F: BaseAlgebra, rows: Sequence[Element]) -> EchelonBasis:
    """Echelon basis of m·J, using that m is generated by the order-one monomials."""
    gens = [i for i, e in enumerate(F.exponents) if e is not None and sum(e) == 1]
    ech = EchelonBasis(F.dim, track=False)
    for j in rows:
        for g in gens:
            p = F.mul({g: Fraction(1)}, j)
            if p:
                ech.add(p)
    return ech


def _by_coordinate(t: Tensor) -> Dict[int, Element]:
    """Transpose an element of L ⊗ F into L-coordinate -> element of F."""
    out: Dict[int, Element] = {}
    for key, v in t.items():
        if key is None:
            raise AssertionError("unit component in a Maurer-Cartan defect")
        for l, x in v.items():
            out.setdefault(l, {})[key] = x
    return out


def initial_state(d: Coderivation, k_max: int, strict: bool = False, even_only: bool = False,
                  rep: Optional[CohomologyReport] = None) -> MiniversalState:
    if k_max < 1:
        raise ValueError("order must be at least 1")
    rep = rep or report_for(d)
    params = parameters(rep, strict, even_only)
    F = free_truncated([(p.name, p.parity, 1) for p in params], k_max + 1)
    delta: Tensor = {}
    for p in params:
        g = F.generator_element(p.name)
        (gi, _), = g.items()
        delta[gi] = dict(rep.classes[p.class_index].vector)
    ideal = F.power_basis(2) if F.dim else []
    return MiniversalState(d, rep, params, F, ideal, 2, delta)


def extend_deformation(state: MiniversalState) -> Tuple[MiniversalState, StepDiagnostics]:
    """One inductive step A_k -> A_{k+1}."""
    F, rep = state.ambient, state.rep
    J = state.ideal
    mJ = _times_m(F, J)
    mj_rows = mJ.rows()
    # M = J / mJ with basis u_s
    E = _echelon(F.dim, mj_rows, track=True)
    base_count = len(E)
    us: List[Element] = []
    for r in J:
        if E.add(r):
            us.append(r)
    gamma = mc_tensor(rep, F, state.delta)
    comps: Dict[int, Sparse] = {}
    for l, g in _by_coordinate(gamma).items():
        coords = E.coordinates(g)
        if coords is None:
            raise AssertionError(f"Maurer-Cartan fails below order {state.k}")
        for idx, c in coords.items():
            if idx >= base_count:
                comps.setdefault(idx - base_count, {})[l] = c
    # obstruction classes and their module components n^i
    n_vec: Dict[int, Element] = {}
    for s, v in comps.items():
        if not rep.is_cocycle(v):
            raise AssertionError("obstruction component is not a cocycle")
        for i, c in rep.class_coordinates(v).items():
            _add_into(n_vec.setdefault(i, {}), us[s], c)
    relations = [n_vec[i] for i in sorted(n_vec) if n_vec[i]]
    new_ideal_e = _echelon(F.dim, mj_rows + relations)
    new_ideal = new_ideal_e.rows()
    # complement of J_{k+1} inside J_k, and γ along it
    E2 = _echelon(F.dim, new_ideal, track=True)
    base2 = len(E2)
    ws: List[Element] = []
    for r in J:
        if E2.add(r):
            ws.append(r)
    residue: Dict[int, Sparse] = {}
    for l, g in _by_coordinate(gamma).items():
        coords = E2.coordinates(g)
        for idx, c in coords.items():
            if idx >= base2:
                residue.setdefault(idx - base2, {})[l] = c
    delta = {k: dict(v) for k, v in state.delta.items()}
    support = 0
    for r, v in residue.items():
        lam = rep.coboundary_preimage(v)
        if lam is None:
            raise RuntimeError("obstruction survives the quotient; D(β) = -γ has no solution")
        beta = {i: -x for i, x in lam.items()}
        support += len(beta)
        for x, c in ws[r].items():
            _tadd(delta, x, beta, c)
    # the new δ must satisfy Maurer-Cartan modulo J_{k+1}
    check = mc_tensor(rep, F, delta)
    for l, g in _by_coordinate(check).items():
        if not new_ideal_e.contains(g):
            raise AssertionError(f"Maurer-Cartan fails at order {state.k + 1} after the correction")
    diag = StepDiagnostics(state.k + 1, len(us), len(relations), relations, support)
    return MiniversalState(state.d, rep, state.params, F, new_ideal, state.k + 1, delta), diag


@dataclass
class MiniversalResult:
    d: Coderivation
    report: CohomologyReport
    params: List[Parameter]
    strict: bool
    order: int
    ambient: BaseAlgebra
    ideal: List[Element]
    relations: List[Element]
    base: BaseAlgebra
    projection: AlgebraMorphism
    deformation: Deformation
    ambient_delta: Tensor
    steps: List[StepDiagnostics]

    def relation_names(self) -> List[Dict[str, Fraction]]:
        return [{self.ambient.names[i]: c for i, c in r.items()} for r in self.relations]


def minimal_generators(F: BaseAlgebra, ideal: Sequence[Element]) -> List[Element]:
    """Elements of the ideal whose classes form a basis of J / m·J."""
    mJ = _times_m(F, ideal)
    ech = _echelon(F.dim, mJ.rows())
    ordered = sorted(ideal, key=lambda r: (min(F.orders[i] for i in r), sorted(r)))
    return [r for r in ordered if ech.add(r)]


def miniversal(d: Coderivation, k_max: int, strict: bool = False, even_only: bool = False,
               rep: Optional[CohomologyReport] = None) -> MiniversalResult:
    """Truncated miniversal deformation of d to order k_max."""
    state = initial_state(d, k_max, strict, even_only, rep)
    steps = []
    while state.k <= k_max and state.ambient.dim:
        state, diag = extend_deformation(state)
        steps.append(diag)
    F = state.ambient
    relations = minimal_generators(F, state.ideal) if F.dim else []
    base, proj = quotient(F, state.ideal, miniversal=False, closed=True)
    defo = Deformation.from_tensor(d, base, push_tensor(state.delta, proj))
    if mc_defect(defo):
        raise AssertionError("miniversal deformation fails Maurer-Cartan over its base")
    return MiniversalResult(d, state.rep, state.params, strict, k_max, F, state.ideal, relations,
                            base, proj, defo, state.delta, steps)


# ---------------------------------------------------------------------------
# versality: factoring a given deformation through the miniversal one


def gauge_action(alg: CoderivationAlgebra, base: BaseAlgebra, lam: Tensor, x: Tensor) -> Tensor:
    """e^{ad λ}(x); the series stops because λ has coefficients in m."""
    out = {k: dict(v) for k, v in x.items()}
    term = x
    j = 1
    while True:
        term = tensor_bracket(alg, base, lam, term)
        if not term:
            return out
        term = {k: {i: c / j for i, c in v.items()} for k, v in term.items()}
        out = tensor_add(out, term)
        j += 1


@dataclass
class VersalityResult:
    success: bool
    images: Dict[str, Element]
    gauge: Tensor
    message: str = ""
    morphism: Optional[AlgebraMorphism] = None


def _evaluate_free(F: BaseAlgebra, target: BaseAlgebra, images: Mapping[str, Element]) -> AlgebraMorphism:
    """Morphism out of a free truncated algebra: monomials map to ordered products."""
    gens = [images.get(g.name, {}) for g in F.generators]
    out: Dict[int, Element] = {}
    for i, exps in enumerate(F.exponents):
        val: Optional[Element] = None
        for g, e in zip(gens, exps):
            for _ in range(e):
                val = dict(g) if val is None else target.mul(val, g)
        out[i] = val or {}
    return AlgebraMorphism(F, target, out)


def factor_through(result: MiniversalResult, target: Deformation) -> VersalityResult:
    """Find τ and a gauge λ with e^{ad λ}(d + τ_*δ) = d + δ' order by order.

    At order n the unknowns are the order-n coefficients of τ(t^i) and of λ;
    they solve Σ_i c^i μ_i - D(λ) = R, where R is the current residual.
    """
    rep = result.report
    alg = rep.algebra
    A2 = target.base
    if target.d != result.d:
        raise ValueError("target deformation has a different codifferential")
    top = max(A2.orders, default=0)
    if top > result.order:
        return VersalityResult(False, {}, {}, f"target has order {top} beyond the computed order {result.order}")
    F = result.ambient
    images: Dict[str, Element] = {p.name: {} for p in result.params}
    lam: Tensor = {}
    goal = {k: dict(v) for k, v in target.tensor().items()}
    d_t: Tensor = {None: alg.vector(result.d)}
    param_of_class = {p.class_index: p for p in result.params}
    for n in range(1, top + 1):
        tau = _evaluate_free(F, A2, images)
        current = gauge_action(alg, A2, lam, tensor_add(d_t, push_tensor(result.ambient_delta, tau)))
        current.pop(None, None)
        resid = tensor_add(goal, current, -1)
        for k, v in resid.items():
            if A2.orders[k] < n:
                return VersalityResult(False, images, lam, f"residual survives at order {A2.orders[k]}")
        for k, v in sorted(resid.items()):
            if A2.orders[k] != n:
                continue
            if not rep.is_cocycle(v):
                return VersalityResult(False, images, lam, f"order-{n} residual on {A2.names[k]} is not a cocycle")
            coords = rep.class_coordinates(v)
            rest = dict(v)
            for i, c in coords.items():
                p = param_of_class.get(i)
                if p is None:
                    return VersalityResult(False, images, lam, f"class {i} at {A2.names[k]} has no parameter")
                _add_into(images[p.name], {k: Fraction(1)}, c)
                _add_into(rest, rep.classes[i].vector, -c)
            pre = rep.coboundary_preimage(rest)
            if pre is None:
                return VersalityResult(False, images, lam, "residual is not a coboundary after class removal")
            _tadd(lam, k, pre, -1)
    tau = _evaluate_free(F, A2, images)
    final = gauge_action(alg, A2, lam, tensor_add(d_t, push_tensor(result.ambient_delta, tau)))
    final.pop(None, None)
    if tensor_add(goal, final, -1):
        return VersalityResult(False, images, lam, "gauge-transformed push-out differs from the target")
    for r in result.ideal:
        if tau(r):
            return VersalityResult(False, images, lam, "generator images do not satisfy the relations")
    try:
        morph = morphism_from_generators(result.base, A2, images)
    except ValueError as exc:
        return VersalityResult(False, images, lam, str(exc))
    return VersalityResult(True, images, lam, "ok", morph)
