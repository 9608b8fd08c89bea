from fractions import Fraction
from itertools import product
from math import comb

import pytest
import sympy
from hypothesis import given
from hypothesis import strategies as st

from codiff.basealg import (AlgebraMorphism, Generator, augmentation, free_truncated,
                            ground_field, ideal_span, identity, infinitesimal_extension,
                            is_isomorphism, monomial_name, morphism_from_generators,
                            morphism_from_partial, quotient)

seeds = st.integers(0, 10 ** 6)


def test_dual_numbers():
    a = free_truncated([("t", 0)], 2)
    assert a.names == ("t",) and a.is_infinitesimal and a.nilpotency() == 2


def test_truncated_polynomial_products_match_sympy():
    s, t = sympy.symbols("s t")
    a = free_truncated([("s", 0), ("t", 0)], 4)
    def poly(v):
        out = 0
        for i, x in v.items():
            e = a.exponents[i]
            out += sympy.Rational(x.numerator, x.denominator) * s ** e[0] * t ** e[1]
        return out
    for i, j in product(range(a.dim), repeat=2):
        expected = sympy.expand(poly({i: Fraction(1)}) * poly({j: Fraction(1)}))
        trunc = sum(term for term in sympy.Add.make_args(expected)
                    if term != 0 and sympy.Poly(term, s, t).total_degree() < 4)
        assert sympy.expand(poly(a.mul_basis(i, j)) - trunc) == 0


@pytest.mark.parametrize("even,odd,k", [(1, 0, 4), (2, 0, 3), (0, 3, 4), (2, 2, 3), (1, 1, 5)])
def test_free_truncated_dimension(even, odd, k):
    gens = [(f"x{i}", 0) for i in range(even)] + [(f"y{i}", 1) for i in range(odd)]
    a = free_truncated(gens, k)
    # monomials of positive total degree below k
    expected = sum(comb(odd, j) * comb(even + n - j - 1, n - j) if even else (comb(odd, j) if j == n else 0)
                   for n in range(1, k) for j in range(0, min(odd, n) + 1))
    assert a.dim == expected
    a.check()


def test_grassmann_signs():
    a = free_truncated([("x", 1), ("y", 1)], 3)
    x, y = a.generator_element("x"), a.generator_element("y")
    xy = a.mul(x, y)
    assert a.mul(y, x) == {k: -v for k, v in xy.items()}
    assert a.mul(x, x) == {}
    assert a.parity_of(xy) == 0


def test_generator_orders_weight_the_truncation():
    a = free_truncated([Generator("s", 0, 1), Generator("u", 0, 2)], 4)
    assert set(a.names) == {"s", "u", "s^2", "s*u", "s^3"}
    assert a.orders[a.index("s*u")] == 3
    a.check()


def test_monomial_names():
    gens = (Generator("t1", 0), Generator("t2", 0))
    assert monomial_name(gens, (2, 1)) == "t1^2*t2"
    assert monomial_name(gens, (0, 1)) == "t2"


def test_quotient_by_st():
    a = free_truncated([("s", 0), ("t", 0)], 3)
    st_ = a.element({"s*t": 1})
    b, proj = quotient(a, [st_])
    assert set(b.names) == {"s", "t", "s^2", "t^2"}
    proj.check()
    assert proj(st_) == {}
    b.check()


def test_quotient_keeps_low_orders_as_pivots():
    a = free_truncated([("s", 0), ("t", 0)], 4)
    rel = a.element({"s^2": 1, "t^3": 1})
    b, proj = quotient(a, [rel])
    assert "t^3" in b.names and "s^2" not in b.names
    assert proj(a.element({"s^2": 1})) == {b.index("t^3"): -1}
    with pytest.raises(ValueError):
        quotient(a, [a.element({"s": 1})])          # not in m^2 in miniversal mode
    c, _ = quotient(a, [a.element({"s": 1})], miniversal=False)
    assert c.names == ("t", "t^2", "t^3")


def test_ideal_span_closure():
    a = free_truncated([("t", 0)], 5)
    ideal = ideal_span(a, [a.element({"t^2": 1})])
    assert len(ideal) == 3


@given(seeds)
def test_random_quotients_are_algebras(seed):
    import random
    rng = random.Random(seed)
    gens = [("a", rng.randint(0, 1)), ("b", rng.randint(0, 1)), ("c", 0)]
    F = free_truncated(gens, 4)
    m2 = F.power_basis(2)
    rels = []
    for _ in range(rng.randint(0, 3)):
        v = {}
        for r in m2:
            if rng.random() < 0.3:
                for k, x in r.items():
                    v[k] = v.get(k, 0) + x * rng.choice((-1, 1, 2))
        # keep relations parity-homogeneous
        par = {F.parities[k] for k, x in v.items() if x}
        if len(par) == 1:
            rels.append({k: x for k, x in v.items() if x})
    b, proj = quotient(F, rels)
    b.check()
    proj.check()
    assert proj.is_surjective
    for r in rels:
        assert proj(r) == {}


def test_morphisms():
    a = free_truncated([("t", 0)], 4)
    b = free_truncated([("s", 0), ("u", 0)], 4)
    f = morphism_from_generators(a, b, {"t": b.element({"s": 1, "u": 2})})
    f.check()
    assert f(a.element({"t^2": 1})) == b.mul(b.element({"s": 1, "u": 2}), b.element({"s": 1, "u": 2}))
    g = morphism_from_generators(b, a, {"s": a.element({"t": 1}), "u": {}})
    h = g.compose(f)
    assert h(a.element({"t": 1})) == a.element({"t": 1})
    assert is_isomorphism(identity(a)) and not is_isomorphism(f)
    assert augmentation(a)(a.element({"t": 1})) == {}
    with pytest.raises(ValueError):
        morphism_from_partial(a, b, {})      # does not generate m
    bad = AlgebraMorphism(a, b, {0: b.element({"s": 1}), 1: {}, 2: {}})
    with pytest.raises(ValueError):
        bad.check()


def test_infinitesimal_extension_of_dual_numbers():
    a = free_truncated([("t", 0)], 2)
    ext = infinitesimal_extension(a, 1, {(0, 0): {0: 1}})
    assert ext.mul({0: 1}, {0: 1}) == {1: 1}
    with pytest.raises(ValueError, match="Harrison"):
        b = free_truncated([("t", 0)], 3)
        infinitesimal_extension(b, 1, {(0, 1): {0: 1}})   # not symmetric


def test_ground_field():
    k = ground_field()
    assert k.dim == 0 and k.nilpotency() == 1
