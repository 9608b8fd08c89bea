from collections import defaultdict
from fractions import Fraction

import pytest
from hypothesis import given
from hypothesis import strategies as st

from codiff.coderiv import (Coderivation, CoderivationAlgebra, ResourceLimitError, big_d, bracket,
                            coproduct, evaluate, is_codifferential, structure_coderivation,
                            structure_operations, transport_sign)
from codiff.graded import SYMMETRIC, TENSOR, GradedSpace, words
from helpers import (HEISENBERG, NONABELIAN2, SL2, UPPER_TRIANGULAR, graded_jacobi_holds, lie_d,
                     assoc_d, random_coderivation, random_lie_candidate, random_space, rng_for)

seeds = st.integers(0, 10 ** 6)
kinds = st.sampled_from([SYMMETRIC, TENSOR])


def algebra_for(seed, kind, cap=3, max_even=2, max_odd=2):
    rng = rng_for(seed)
    space = random_space(rng, max_even, max_odd)
    return rng, CoderivationAlgebra(space, kind, cap)


def test_entries_are_validated():
    v = GradedSpace(("a", "b"), (0, 1))
    with pytest.raises(ValueError):
        Coderivation(v, SYMMETRIC, 1, 2, {((1, 0), 0): 1})   # unsorted symmetric word
    with pytest.raises(ValueError):
        Coderivation(v, SYMMETRIC, 0, 2, {((0,), 1): 1})     # even -> odd is an odd map
    with pytest.raises(ValueError):
        Coderivation(v, TENSOR, 1, 2, {((0, 0, 0), 1): 1})   # beyond the cap
    with pytest.raises(ValueError):
        Coderivation(v, "lie", 1, 2)
    c = Coderivation.from_values(v, SYMMETRIC, 0, 2, [((1, 0), 1, 3)])
    assert c.table == {((0, 1), 1): 3}


def test_arithmetic_and_equality():
    v = GradedSpace(("a",), (0,))
    x = Coderivation(v, TENSOR, 0, 3, {((0,), 0): 1, ((0, 0), 0): 2})
    assert (x - x).is_zero
    assert x + x == x.scale(2)
    assert -x == x.scale(-1)
    assert x.arities == [1, 2]
    assert x.truncate([2]).table == {((0, 0), 0): 2}


@given(seeds, kinds)
def test_coderivation_law(seed, kind):
    rng, alg = algebra_for(seed, kind, cap=4, max_even=2, max_odd=1)
    parity = rng.randint(0, 1)
    phi = random_coderivation(rng, alg, parity, density=0.15)
    P = alg.space.parities
    for n in range(1, 5):
        for w in list(words(alg.space, kind, n))[:12]:
            # Δ(φ(w))
            lhs = defaultdict(Fraction)
            for w2, c in evaluate(phi, w).items():
                for key, c2 in coproduct(alg.space, kind, w2).items():
                    lhs[key] += c * c2
            # (φ ⊗ id + id ⊗ φ)(Δ w)
            rhs = defaultdict(Fraction)
            for (left, right), c in coproduct(alg.space, kind, w).items():
                for l2, c2 in evaluate(phi, left).items():
                    rhs[(l2, right)] += c * c2
                s = -1 if parity and sum(P[x] for x in left) % 2 else 1
                for r2, c2 in evaluate(phi, right).items():
                    rhs[(left, r2)] += s * c * c2
            assert {k: v for k, v in lhs.items() if v} == {k: v for k, v in rhs.items() if v}


@given(seeds, kinds)
def test_bracket_antisymmetry(seed, kind):
    rng, alg = algebra_for(seed, kind)
    a = random_coderivation(rng, alg, rng.randint(0, 1))
    b = random_coderivation(rng, alg, rng.randint(0, 1))
    s = -1 if a.parity and b.parity else 1
    assert bracket(a, b) == bracket(b, a).scale(-s)


@given(seeds, kinds)
def test_bracket_jacobi(seed, kind):
    rng, alg = algebra_for(seed, kind, max_even=1, max_odd=1)
    a, b, c = (random_coderivation(rng, alg, rng.randint(0, 1)) for _ in range(3))
    s = -1 if a.parity and b.parity else 1
    lhs = bracket(a, bracket(b, c))
    rhs = bracket(bracket(a, b), c) + bracket(b, bracket(a, c)).scale(s)
    assert lhs == rhs


@given(seeds, kinds)
def test_algebra_coordinates_match_bracket(seed, kind):
    rng, alg = algebra_for(seed, kind, max_even=1, max_odd=1)
    a = random_coderivation(rng, alg, rng.randint(0, 1))
    b = random_coderivation(rng, alg, rng.randint(0, 1))
    assert alg.coderivation(alg.vector(a), a.parity) == a
    assert alg.bracket(alg.vector(a), alg.vector(b)) == alg.vector(bracket(a, b))


def test_known_codifferentials():
    assert is_codifferential(lie_d(SL2))
    assert is_codifferential(lie_d(HEISENBERG))
    assert is_codifferential(assoc_d(UPPER_TRIANGULAR, 3))
    broken = dict(SL2)
    broken[(0, 1)] = {1: 3}
    broken[(1, 0)] = {1: -3}
    assert not graded_jacobi_holds(broken, (0, 0, 0))
    assert not is_codifferential(lie_d(broken))
    with pytest.raises(ValueError):
        is_codifferential(Coderivation(GradedSpace(("a",), (0,)), TENSOR, 0, 2))


@given(seeds)
def test_d_squares_to_zero(seed):
    rng = rng_for(seed)
    d = lie_d(HEISENBERG) if seed % 2 else lie_d(NONABELIAN2)
    alg = CoderivationAlgebra(d.space, d.kind, d.cap)
    phi = random_coderivation(rng, alg, rng.randint(0, 1))
    assert big_d(d, big_d(d, phi)).is_zero


def test_transport_sign_values():
    assert transport_sign([0, 0]) == 1
    assert transport_sign([1, 0]) == -1
    assert transport_sign([0, 1]) == 1
    assert transport_sign([1, 1, 1]) == -1


@given(seeds)
def test_structure_round_trip(seed):
    rng = rng_for(seed)
    parities = tuple(rng.randint(0, 1) for _ in range(rng.randint(1, 3)))
    c = random_lie_candidate(rng, parities)
    space = GradedSpace(tuple(f"v{i}" for i in range(len(parities))), parities)
    d = structure_coderivation(space, SYMMETRIC, 3, [((i, j), v) for (i, j), v in c.items()])
    back = {}
    for ins, out, coef in structure_operations(d):
        back.setdefault(ins, {})[out] = coef
    for (i, j), v in c.items():
        if i <= j:
            assert back.get((i, j), {}) == v


def test_structure_consistency_checks():
    v = GradedSpace(("a", "b"), (0, 0))
    with pytest.raises(ValueError, match="inconsistent"):
        structure_coderivation(v, SYMMETRIC, 2, [((0, 1), {1: 1}), ((1, 0), {1: 1})])
    with pytest.raises(ValueError, match="graded symmetry"):
        structure_coderivation(v, SYMMETRIC, 2, [((0, 0), {1: 1})])
    with pytest.raises(ValueError, match="wrong parity"):
        structure_coderivation(GradedSpace(("a", "b"), (0, 1)), SYMMETRIC, 2, [((0, 0), {1: 1})])
    d = structure_coderivation(GradedSpace(("a", "b"), (0, 1)), SYMMETRIC, 2, [((0,), {1: 1})])
    assert d.parity == 1 and is_codifferential(d)


def test_word_budget(monkeypatch):
    monkeypatch.setenv("CODIFF_MAX_WORDS", "10")
    with pytest.raises(ResourceLimitError):
        CoderivationAlgebra(GradedSpace(("a", "b"), (0, 0)), TENSOR, 4)
