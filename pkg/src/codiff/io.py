"""Text input, deterministic reports, and the pipeline behind the command line.

Algebra files are UTF-8 and line oriented::

    # the 2-dim nonabelian Lie algebra
    kind lie
    basis e1 even
    basis e2 even
    part 2: e1 e2 -> 1 e2
    weight_cap 3
    order 3
    strict yes

``part K: IN_1 .. IN_K -> OUT`` gives one value of the arity-K operation on
V.  OUT is ``0`` or a sum of terms ``COEF NAME`` (``+`` between terms is
optional, a bare NAME means coefficient 1, COEF is an integer or ``p/q``).
Lie and associative kinds take arity 2 only; the L∞ and A∞ kinds take
arities 1..weight_cap.  An arity-k operation has parity k mod 2, so Lie
brackets and products preserve parity.  Values not listed are zero.  For
the Lie and L∞ kinds a value fixes the values on every reordering of its
inputs by graded antisymmetry.

Deformation files, read by :func:`parse_deformation`, describe a formal
deformation of an algebra file's structure over a local base::

    generator s even 1
    relation 1 s^2
    delta s: e1 e2 -> 1 e1

The base is the free graded-commutative algebra on the generators, truncated
above the algebra file's order, modulo the relations.  ``delta MONOMIAL:``
lines add MONOMIAL times the given operation value to the structure.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Dict, List, Optional, Sequence, Tuple

from .basealg import Generator, free_truncated, quotient
from .coderiv import Coderivation, bracket, structure_coderivation, structure_operations
from .cohomology import CohomologyReport, cohomology
from .deform import (Deformation, MiniversalResult, VersalityResult, factor_through,
                     miniversal, push_tensor, report_for)
from .graded import SYMMETRIC, TENSOR, GradedSpace

KINDS = {"lie": SYMMETRIC, "linf": SYMMETRIC, "assoc": TENSOR, "ainf": TENSOR}
BINARY_KINDS = ("lie", "assoc")
PARITY_WORDS = {"even": 0, "odd": 1}
_NAME = re.compile(r"[A-Za-z_][A-Za-z0-9_']*\Z")
_RATIONAL = re.compile(r"[+-]?\d+(/\d+)?\Z")
_MONOMIAL = re.compile(r"[A-Za-z_][A-Za-z0-9_']*(\^\d+)?(\*[A-Za-z_][A-Za-z0-9_']*(\^\d+)?)*\Z")


class ParseError(ValueError):
    def __init__(self, line: int, message: str):
        super().__init__(f"line {line}: {message}")
        self.line = line
        self.message = message


class NotCodifferentialError(ValueError):
    """The input operations violate Jacobi (or associativity) and their higher analogues."""

    def __init__(self, weight: int, message: str):
        super().__init__(message)
        self.weight = weight


Combination = Tuple[Tuple[str, Fraction], ...]


@dataclass(frozen=True)
class Part:
    inputs: Tuple[str, ...]
    output: Combination

    @property
    def arity(self) -> int:
        return len(self.inputs)


@dataclass
class AlgebraInput:
    kind: str
    basis: List[Tuple[str, int]]
    parts: List[Part]
    weight_cap: int = 3
    order: int = 3
    strict: bool = False

    @property
    def names(self) -> Tuple[str, ...]:
        return tuple(n for n, _ in self.basis)

    @property
    def space(self) -> GradedSpace:
        return GradedSpace(self.names, tuple(p for _, p in self.basis))

    @property
    def coalgebra(self) -> str:
        return KINDS[self.kind]

    def structure(self) -> Coderivation:
        """The odd coderivation on ΠV carrying the operations."""
        return _transport(self, self.parts, 1)


def _transport(inp: AlgebraInput, parts: Sequence[Part], parity: int) -> Coderivation:
    index = {n: i for i, n in enumerate(inp.names)}
    ops = [(tuple(index[n] for n in p.inputs), {index[n]: c for n, c in p.output}) for p in parts]
    return structure_coderivation(inp.space, inp.coalgebra, inp.weight_cap, ops, parity=parity)


# ---------------------------------------------------------------------------
# parsing


def parse_rational(token: str) -> Fraction:
    if not _RATIONAL.match(token):
        raise ValueError(f"malformed coefficient {token!r}")
    num, _, den = token.partition("/")
    if den and int(den) == 0:
        raise ValueError(f"zero denominator in coefficient {token!r}")
    return Fraction(int(num), int(den) if den else 1)


def format_rational(x: Fraction) -> str:
    x = Fraction(x)
    return str(x.numerator) if x.denominator == 1 else f"{x.numerator}/{x.denominator}"


def _logical_lines(text: str):
    for no, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if line:
            yield no, line


def _parse_combination(tokens: Sequence[str], names: Sequence[str], no: int,
                       pattern=_NAME) -> Combination:
    terms: Dict[str, Fraction] = {}
    toks = [t for t in tokens if t != "+"]
    if toks == ["0"]:
        return ()
    k = 0
    if not toks:
        raise ParseError(no, "empty right-hand side (write 0 for zero)")
    while k < len(toks):
        tok = toks[k]
        if pattern.match(tok):
            coef, name = Fraction(1), tok
            k += 1
        else:
            try:
                coef = parse_rational(tok)
            except ValueError as exc:
                raise ParseError(no, str(exc)) from None
            if k + 1 >= len(toks):
                raise ParseError(no, f"coefficient {tok} is not followed by a name")
            name = toks[k + 1]
            k += 2
        if name not in names:
            raise ParseError(no, f"unknown name {name!r}")
        terms[name] = terms.get(name, Fraction(0)) + coef
    order = {n: i for i, n in enumerate(names)}
    return tuple((n, c) for n, c in sorted(terms.items(), key=lambda t: order[t[0]]) if c)


def _parse_int(tok: str, no: int, what: str, low: int) -> int:
    if not tok.isdigit() or int(tok) < low:
        raise ParseError(no, f"{what} must be an integer >= {low}, got {tok!r}")
    return int(tok)


def _parse_part_head(rest: str, no: int) -> Tuple[int, List[str], List[str]]:
    head, sep, body = rest.partition(":")
    if not sep:
        raise ParseError(no, "expected 'part K: inputs -> output'")
    lhs, arrow, rhs = body.partition("->")
    if not arrow:
        raise ParseError(no, "missing '->'")
    k = _parse_int(head.strip(), no, "arity", 1)
    inputs = lhs.split()
    if len(inputs) != k:
        raise ParseError(no, f"arity {k} but {len(inputs)} inputs")
    return k, inputs, rhs.split()


def parse_input(text: str) -> AlgebraInput:
    kind: Optional[str] = None
    basis: List[Tuple[str, int]] = []
    raw_parts: List[Tuple[int, int, List[str], List[str]]] = []
    settings: Dict[str, Tuple[int, str]] = {}
    for no, line in _logical_lines(text):
        key, _, rest = line.partition(" ")
        rest = rest.strip()
        if key == "kind":
            if kind is not None:
                raise ParseError(no, "kind given twice")
            if rest not in KINDS:
                raise ParseError(no, f"unknown kind {rest!r} (expected one of {', '.join(KINDS)})")
            kind = rest
        elif key == "basis":
            toks = rest.split()
            if len(toks) < 2 or toks[-1] not in PARITY_WORDS:
                raise ParseError(no, "expected 'basis NAME... even|odd'")
            for name in toks[:-1]:
                if not _NAME.match(name):
                    raise ParseError(no, f"invalid basis name {name!r}")
                if any(name == n for n, _ in basis):
                    raise ParseError(no, f"basis name {name!r} declared twice")
                basis.append((name, PARITY_WORDS[toks[-1]]))
        elif key == "part":
            k, inputs, rhs = _parse_part_head(rest, no)
            raw_parts.append((no, k, inputs, rhs))
        elif key in ("weight_cap", "order", "strict"):
            if key in settings:
                raise ParseError(no, f"{key} given twice")
            settings[key] = (no, rest)
        else:
            raise ParseError(no, f"unknown directive {key!r}")
    if kind is None:
        raise ParseError(0, "missing 'kind' line")
    if not basis:
        raise ParseError(0, "no basis declared")

    inp = AlgebraInput(kind, basis, [])
    if "weight_cap" in settings:
        no, v = settings["weight_cap"]
        inp.weight_cap = _parse_int(v, no, "weight_cap", 1)
    if "order" in settings:
        no, v = settings["order"]
        inp.order = _parse_int(v, no, "order", 1)
    if "strict" in settings:
        no, v = settings["strict"]
        if v not in ("yes", "no"):
            raise ParseError(no, "strict must be yes or no")
        inp.strict = v == "yes"

    names = inp.names
    parity = dict(basis)
    seen = set()
    for no, k, inputs, rhs in raw_parts:
        if kind in BINARY_KINDS and k != 2:
            raise ParseError(no, f"kind {kind} allows arity 2 only, got {k}")
        if k > inp.weight_cap:
            raise ParseError(no, f"arity {k} exceeds weight_cap {inp.weight_cap}")
        for n in inputs:
            if n not in parity:
                raise ParseError(no, f"unknown name {n!r}")
        if tuple(inputs) in seen:
            raise ParseError(no, f"value on {' '.join(inputs)} given twice")
        seen.add(tuple(inputs))
        output = _parse_combination(rhs, names, no)
        want = (sum(parity[n] for n in inputs) + k) % 2
        for n, _ in output:
            if parity[n] != want:
                raise ParseError(no, f"parity mismatch: {n} is {'odd' if parity[n] else 'even'} but an "
                                     f"arity-{k} operation on these inputs lands in "
                                     f"{'odd' if want else 'even'} elements")
        inp.parts.append(Part(tuple(inputs), output))
    # graded symmetry consistency is checked by the transport itself
    try:
        inp.structure()
    except ValueError as exc:
        raise ParseError(0, str(exc)) from None
    return inp


def serialize(inp: AlgebraInput) -> str:
    lines = [f"kind {inp.kind}"]
    for name, p in inp.basis:
        lines.append(f"basis {name} {'odd' if p else 'even'}")
    for part in inp.parts:
        lines.append(f"part {part.arity}: {' '.join(part.inputs)} -> {render_combination(part.output)}")
    lines.append(f"weight_cap {inp.weight_cap}")
    lines.append(f"order {inp.order}")
    lines.append(f"strict {'yes' if inp.strict else 'no'}")
    return "\n".join(lines) + "\n"


def render_combination(terms: Sequence[Tuple[str, Fraction]]) -> str:
    if not terms:
        return "0"
    return " + ".join(f"{format_rational(c)} {n}" for n, c in terms)


# ---------------------------------------------------------------------------
# codifferential check


def codifferential_defect(d: Coderivation) -> Optional[Tuple[int, Tuple[int, ...], int, Fraction]]:
    """Lowest-weight nonzero entry of [d, d] as (weight, word, out, coefficient)."""
    sq = bracket(d, d)
    if sq.is_zero:
        return None
    (word, out), c = min(sq.table.items(), key=lambda e: (len(e[0][0]), e[0]))
    return len(word), tuple(word), out, c


def check_codifferential(inp: AlgebraInput) -> Coderivation:
    d = inp.structure()
    bad = codifferential_defect(d)
    if bad is not None:
        w, word, out, c = bad
        names = inp.names
        law = "Jacobi" if inp.coalgebra == SYMMETRIC else "associativity"
        raise NotCodifferentialError(
            w, f"not a codifferential: [d,d] has a nonzero weight-{w} component "
               f"({law} defect) on {' '.join(names[i] for i in word)} -> {names[out]} "
               f"with coefficient {format_rational(c)}")
    return d


# ---------------------------------------------------------------------------
# reports


def _parity_word(p: int) -> str:
    return "odd" if p else "even"


@dataclass
class MiniversalReport:
    kind: str
    basis: List[Tuple[str, int]]
    weight_cap: int
    order: int
    strict: bool
    dims: Dict[Tuple[int, int], Tuple[int, int, int]]
    generators: List[Tuple[str, int, int, int]]  # name, parity, order in the base, class weight
    relations: List[List[Tuple[str, Fraction]]]
    base_basis: List[Tuple[str, int, int]]
    delta: Dict[str, List[Tuple[Tuple[str, ...], str, Fraction]]]
    steps: List[Tuple[int, int, int, int, int]]
    result: Optional[MiniversalResult] = field(default=None, repr=False, compare=False)

    def render(self, fmt: str = "text") -> str:
        if fmt == "machine":
            return render_machine(self)
        if fmt == "text":
            return render_text(self)
        raise ValueError(f"unknown format {fmt!r}")


def _monomial_key(name: str, order: int) -> Tuple[int, str]:
    return order, name


def _cohomology_lines(dims, prefix: str = "cohomology") -> List[str]:
    out = []
    for (n, p) in sorted(dims):
        z, b, h = dims[(n, p)]
        out.append(f"{prefix}.weight{n}.{_parity_word(p)} = Z {z} B {b} H {h}")
    return out


def render_machine(r: MiniversalReport) -> str:
    lines = ["format = codiff-miniversal 1", f"input.kind = {r.kind}"]
    for name, p in r.basis:
        lines.append(f"input.basis.{name} = {_parity_word(p)}")
    lines += [f"input.order = {r.order}", f"input.strict = {'yes' if r.strict else 'no'}",
              f"input.weight_cap = {r.weight_cap}"]
    lines += _cohomology_lines(r.dims)
    lines.append(f"base.generators = {len(r.generators)}")
    for name, p, o, w in r.generators:
        lines.append(f"base.generator.{name} = {_parity_word(p)} order {o} weight {w}")
    lines.append(f"base.dim = {len(r.base_basis) + 1}")
    for name, p, o in sorted(r.base_basis, key=lambda m: _monomial_key(m[0], m[2])):
        lines.append(f"base.monomial.{name} = {_parity_word(p)} order {o}")
    lines.append(f"relations = {len(r.relations)}")
    for k, rel in enumerate(r.relations, 1):
        lines.append(f"relation.{k} = {render_combination(rel)}")
    orders = {name: o for name, _, o in r.base_basis}
    for mono in sorted(r.delta, key=lambda m: _monomial_key(m, orders[m])):
        for inputs, out, c in r.delta[mono]:
            lines.append(f"delta.{mono}: {' '.join(inputs)} -> {out} = {format_rational(c)}")
    for order, mdim, rank, nrel, beta in r.steps:
        lines.append(f"step.{order} = module {mdim} obstruction_rank {rank} relations {nrel} beta {beta}")
    return "\n".join(lines) + "\n"


def render_text(r: MiniversalReport) -> str:
    mode = "strict" if r.strict else "homotopy (all classes)"
    lines = [f"{r.kind} structure on {len(r.basis)} basis elements, weight cap {r.weight_cap}, "
             f"order {r.order}, {mode} mode", "", "cohomology (weight, parity: dim Z, dim B, dim H)"]
    for (n, p) in sorted(r.dims):
        z, b, h = r.dims[(n, p)]
        lines.append(f"  {n} {_parity_word(p):4}: {z:4} {b:4} {h:4}")
    lines.append("")
    if not r.generators:
        lines.append("base: the ground field (rigid up to this order)")
    else:
        lines.append("base generators:")
        for name, p, o, w in r.generators:
            lines.append(f"  {name}  {_parity_word(p)}  order {o}  (class of weight {w})")
        lines.append("relations:" if r.relations else "relations: none")
        for rel in r.relations:
            lines.append(f"  {render_combination(rel)} = 0")
        lines.append(f"base dimension: {len(r.base_basis) + 1}")
    if r.delta:
        lines += ["", "deformed structure (terms added to the input operations):"]
        orders = {name: o for name, _, o in r.base_basis}
        for mono in sorted(r.delta, key=lambda m: _monomial_key(m, orders[m])):
            for inputs, out, c in r.delta[mono]:
                lines.append(f"  {mono} * ({' '.join(inputs)} -> {format_rational(c)} {out})")
    if r.steps:
        lines += ["", "steps (order: module dim, obstruction rank, new relations, beta support)"]
        for order, mdim, rank, nrel, beta in r.steps:
            lines.append(f"  {order}: {mdim} {rank} {nrel} {beta}")
    return "\n".join(lines) + "\n"


def _operations(names: Sequence[str], phi: Coderivation) -> List[Tuple[Tuple[str, ...], str, Fraction]]:
    return [(tuple(names[i] for i in ins), names[j], c) for ins, j, c in structure_operations(phi)]


def build_report(inp: AlgebraInput, result: MiniversalResult) -> MiniversalReport:
    F, base = result.ambient, result.base
    names = inp.names
    gens = [(p.name, p.parity, F.orders[F.index(p.name)], p.order) for p in result.params]
    rels = []
    for rel in result.relations:
        terms = sorted(rel.items(), key=lambda t: (F.orders[t[0]], F.names[t[0]]))
        rels.append([(F.names[i], c) for i, c in terms])
    base_basis = [(base.names[i], base.parities[i], base.orders[i]) for i in range(base.dim)]
    delta = {base.names[b]: _operations(names, c) for b, c in result.deformation.delta.items()}
    steps = [(s.order, s.module_dim, s.obstruction_rank, len(s.relations), s.beta_support)
             for s in result.steps]
    return MiniversalReport(inp.kind, list(inp.basis), inp.weight_cap, inp.order, inp.strict,
                            dict(result.report.dims), gens, rels, base_basis, delta, steps, result)


def run_cohomology(inp: AlgebraInput) -> CohomologyReport:
    d = check_codifferential(inp)
    return cohomology(d)


def render_cohomology(inp: AlgebraInput, rep: CohomologyReport, fmt: str = "text") -> str:
    if fmt == "machine":
        lines = ["format = codiff-cohomology 1", f"input.kind = {inp.kind}",
                 f"input.weight_cap = {inp.weight_cap}"]
        lines += _cohomology_lines(rep.dims)
        for c in rep.classes:
            phi = rep.lift_mu(c.index)
            for ins, out, x in _operations(inp.names, phi):
                lines.append(f"class.t{c.index + 1}.weight{c.weight}.{_parity_word(c.parity)}: "
                             f"{' '.join(ins)} -> {out} = {format_rational(x)}")
        return "\n".join(lines) + "\n"
    if fmt != "text":
        raise ValueError(f"unknown format {fmt!r}")
    lines = [f"cohomology of the {inp.kind} structure up to weight {inp.weight_cap}",
             "weight parity   dim Z  dim B  dim H"]
    for (n, p) in sorted(rep.dims):
        z, b, h = rep.dims[(n, p)]
        lines.append(f"{n:6} {_parity_word(p):6} {z:6} {b:6} {h:6}")
    for c in rep.classes:
        terms = ", ".join(f"{' '.join(ins)} -> {format_rational(x)} {out}"
                          for ins, out, x in _operations(inp.names, rep.lift_mu(c.index)))
        lines.append(f"class t{c.index + 1} (weight {c.weight}, {_parity_word(c.parity)}): {terms}")
    return "\n".join(lines) + "\n"


def run(inp: AlgebraInput) -> MiniversalReport:
    d = check_codifferential(inp)
    rep = report_for(d)
    result = miniversal(d, inp.order, strict=inp.strict, rep=rep)
    return build_report(inp, result)


# ---------------------------------------------------------------------------
# deformation files and relative versality


def parse_deformation(text: str, inp: AlgebraInput) -> Deformation:
    d = check_codifferential(inp)
    gens: List[Generator] = []
    rel_lines: List[Tuple[int, List[str]]] = []
    delta_lines: List[Tuple[int, str, Part]] = []
    for no, line in _logical_lines(text):
        key, _, rest = line.partition(" ")
        rest = rest.strip()
        if key == "generator":
            toks = rest.split()
            if len(toks) not in (2, 3) or toks[1] not in PARITY_WORDS or not _NAME.match(toks[0]):
                raise ParseError(no, "expected 'generator NAME even|odd [ORDER]'")
            if any(g.name == toks[0] for g in gens):
                raise ParseError(no, f"generator {toks[0]!r} declared twice")
            order = _parse_int(toks[2], no, "order", 1) if len(toks) == 3 else 1
            gens.append(Generator(toks[0], PARITY_WORDS[toks[1]], order))
        elif key == "relation":
            rel_lines.append((no, rest.split()))
        elif key == "delta":
            mono, sep, body = rest.partition(":")
            if not sep or not _MONOMIAL.match(mono.strip()):
                raise ParseError(no, "expected 'delta MONOMIAL: inputs -> output'")
            lhs, arrow, rhs = body.partition("->")
            if not arrow:
                raise ParseError(no, "missing '->'")
            inputs = lhs.split()
            for n in inputs:
                if n not in inp.names:
                    raise ParseError(no, f"unknown name {n!r}")
            if not 1 <= len(inputs) <= inp.weight_cap:
                raise ParseError(no, f"arity {len(inputs)} outside 1..{inp.weight_cap}")
            out = _parse_combination(rhs.split(), inp.names, no)
            delta_lines.append((no, mono.strip(), Part(tuple(inputs), out)))
        else:
            raise ParseError(no, f"unknown directive {key!r}")
    F = free_truncated(gens, inp.order + 1)
    relations = []
    for no, toks in rel_lines:
        comb = _parse_combination(toks, F.names, no, pattern=_MONOMIAL)
        relations.append({F.index(n): c for n, c in comb})
    base, proj = quotient(F, relations, miniversal=False)
    grouped: Dict[str, List[Tuple[int, Part]]] = {}
    for no, mono, part in delta_lines:
        if mono not in F.names:
            raise ParseError(no, f"{mono!r} is not a monomial of positive order below the truncation")
        grouped.setdefault(mono, []).append((no, part))
    alg = report_for(d).algebra
    tensor = {}
    for mono, items in grouped.items():
        i = F.index(mono)
        try:
            phi = _transport(inp, [p for _, p in items], (1 + F.parities[i]) % 2)
        except ValueError as exc:
            raise ParseError(items[0][0], str(exc)) from None
        tensor[i] = alg.vector(phi)
    return Deformation.from_tensor(d, base, push_tensor(tensor, proj))


def verify(inp: AlgebraInput, target: Deformation) -> Tuple[MiniversalReport, VersalityResult]:
    d = target.d
    result = miniversal(d, inp.order, strict=inp.strict, rep=report_for(d))
    return build_report(inp, result), factor_through(result, target)
