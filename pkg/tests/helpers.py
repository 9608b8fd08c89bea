"""Independent oracles and random generators shared by the test modules.

The oracles work on V with plain structure constants and never touch the
coalgebra machinery, so agreement with the package is a genuine cross-check.
"""

from __future__ import annotations

import random
from fractions import Fraction
from itertools import combinations, product

import sympy

from codiff.coderiv import CoderivationAlgebra, structure_coderivation
from codiff.graded import SYMMETRIC, TENSOR, GradedSpace


# ---------------------------------------------------------------------------
# signs


def koszul_by_transpositions(perm, parities):
    """Sign of rearranging letters into ``perm`` by adjacent swaps."""
    current = list(range(len(perm)))
    sign = 1
    for target_pos, letter in enumerate(perm):
        pos = current.index(letter)
        while pos > target_pos:
            a, b = current[pos - 1], current[pos]
            if parities[a] and parities[b]:
                sign = -sign
            current[pos - 1], current[pos] = b, a
            pos -= 1
    return sign


# ---------------------------------------------------------------------------
# structure constants on V


def lie_bracket(c, parities, x, y):
    """Bilinear extension of structure constants c[(i, j)] = {k: coef}."""
    out = {}
    for i, a in x.items():
        for j, b in y.items():
            for k, v in c.get((i, j), {}).items():
                out[k] = out.get(k, 0) + a * b * v
    return {k: v for k, v in out.items() if v}


def is_graded_antisymmetric(c, parities):
    n = len(parities)
    for i in range(n):
        for j in range(n):
            s = -1 if parities[i] * parities[j] else 1
            lhs = c.get((i, j), {})
            rhs = {k: -s * v for k, v in c.get((j, i), {}).items()}
            if {k: v for k, v in lhs.items() if v} != {k: v for k, v in rhs.items() if v}:
                return False
    return True


def graded_jacobi_holds(c, parities):
    """(-1)^{|x||z|}[x,[y,z]] + cyclic = 0 on every basis triple."""
    n = len(parities)
    e = [{i: 1} for i in range(n)]
    for i, j, k in product(range(n), repeat=3):
        total = {}
        for (x, y, z) in ((i, j, k), (j, k, i), (k, i, j)):
            s = -1 if parities[x] * parities[z] else 1
            inner = lie_bracket(c, parities, e[y], e[z])
            for key, v in lie_bracket(c, parities, e[x], inner).items():
                total[key] = total.get(key, 0) + s * v
        if any(total.values()):
            return False
    return True


def associativity_holds(m, n):
    e = [{i: 1} for i in range(n)]
    for i, j, k in product(range(n), repeat=3):
        left = lie_bracket(m, None, lie_bracket(m, None, e[i], e[j]), e[k])
        right = lie_bracket(m, None, e[i], lie_bracket(m, None, e[j], e[k]))
        if left != right:
            return False
    return True


def random_lie_candidate(rng, parities, density=0.5, coeffs=(-2, -1, 1, 2)):
    """Random graded-antisymmetric, parity-preserving bracket constants."""
    n = len(parities)
    c = {}
    for i in range(n):
        for j in range(i, n):
            if i == j and not parities[i]:
                continue
            vals = {}
            for k in range(n):
                if parities[k] == (parities[i] + parities[j]) % 2 and rng.random() < density:
                    vals[k] = Fraction(rng.choice(coeffs))
            if vals:
                c[(i, j)] = vals
                s = -1 if parities[i] * parities[j] else 1
                c[(j, i)] = {k: -s * v for k, v in vals.items()}
    return c


def random_assoc_candidate(rng, parities, density=0.4, coeffs=(-1, 1, 2)):
    n = len(parities)
    m = {}
    for i, j in product(range(n), repeat=2):
        vals = {}
        for k in range(n):
            if parities[k] == (parities[i] + parities[j]) % 2 and rng.random() < density:
                vals[k] = Fraction(rng.choice(coeffs))
        if vals:
            m[(i, j)] = vals
    return m


def change_basis(c, p, pinv):
    """Structure constants after the even basis change e'_i = Σ_k p[k][i] e_k."""
    n = len(p)
    cols = [{k: p[k][i] for k in range(n) if p[k][i]} for i in range(n)]
    out = {}
    for i, j in product(range(n), repeat=2):
        v = lie_bracket(c, None, cols[i], cols[j])
        w = {}
        for k, x in v.items():
            for r in range(n):
                if pinv[r][k]:
                    w[r] = w.get(r, 0) + pinv[r][k] * x
        w = {k: x for k, x in w.items() if x}
        if w:
            out[(i, j)] = w
    return out


def random_even_basis_change(rng, parities):
    """Invertible matrix preserving the parity decomposition, with inverse."""
    n = len(parities)
    while True:
        p = [[Fraction(rng.choice((-1, 0, 1, 2))) if parities[i] == parities[k] else Fraction(0)
              for i in range(n)] for k in range(n)]
        m = sympy.Matrix(p)
        if m.det() != 0:
            inv = m.inv()
            return p, [[Fraction(int(inv[r, k].p), int(inv[r, k].q)) for k in range(n)] for r in range(n)]


def coderivation_of(c, parities, kind, cap=3):
    names = tuple(f"v{i}" for i in range(len(parities)))
    space = GradedSpace(names, tuple(parities))
    ops = [((i, j), dict(v)) for (i, j), v in c.items()]
    return structure_coderivation(space, kind, cap, ops)


# ---------------------------------------------------------------------------
# Chevalley-Eilenberg and Hochschild complexes of ordinary (even) algebras


def _rank(rows):
    if not rows or not rows[0]:
        return 0
    return sympy.Matrix(rows).rank()


def ce_dims(c, n_dim, cap):
    """Dimensions (Z, B) of the CE complex Λ^n V* ⊗ V, n = 1..cap.

    Cochains of degree 0 are left out and Z at degree cap is everything, which
    is what truncating the coderivation algebra at the cap does.
    """
    e = [{i: 1} for i in range(n_dim)]

    def basis(n):
        return [(s, k) for s in combinations(range(n_dim), n) for k in range(n_dim)]

    def evaluate(phi, args):
        # phi: dict (sorted tuple, k) -> coef, alternating
        idx = list(args)
        if len(set(idx)) < len(idx):
            return {}
        order = sorted(range(len(idx)), key=lambda t: idx[t])
        inv = sum(1 for a, b in combinations(order, 2) if a > b)
        sgn = -1 if inv % 2 else 1
        key = tuple(sorted(idx))
        return {k: sgn * v for (s, k), v in phi.items() if s == key}

    def apply_vec(phi, args_vecs):
        out = {}
        for combo in product(*[list(v.items()) for v in args_vecs]):
            coef = 1
            for _, x in combo:
                coef *= x
            for k, v in evaluate(phi, [i for i, _ in combo]).items():
                out[k] = out.get(k, 0) + coef * v
        return out

    def d(phi, n):
        # (dφ)(x0..xn) = Σ (-1)^i [x_i, φ(..^i..)] + Σ_{i<j} (-1)^{i+j} φ([x_i,x_j], ..^i..^j..)
        col = []
        for s, k in basis(n + 1):
            total = Fraction(0)
            xs = list(s)
            for i in range(n + 1):
                rest = xs[:i] + xs[i + 1:]
                inner = apply_vec(phi, [e[r] for r in rest])
                total += (-1) ** i * lie_bracket(c, None, e[xs[i]], inner).get(k, 0)
            for i, j in combinations(range(n + 1), 2):
                br = lie_bracket(c, None, e[xs[i]], e[xs[j]])
                if not br:
                    continue
                rest = [e[r] for t, r in enumerate(xs) if t not in (i, j)]
                total += (-1) ** (i + j) * apply_vec(phi, [br] + rest).get(k, 0)
            col.append(total)
        return col

    mats = {}
    for n in range(1, cap):
        mats[n] = [d({b: 1}, n) for b in basis(n)]
    out = {}
    for n in range(1, cap + 1):
        dim_c = len(basis(n))
        rk_out = _rank(mats[n]) if n < cap else 0
        rk_in = _rank(mats[n - 1]) if n > 1 else 0
        out[n] = (dim_c - rk_out, rk_in)
    return out


def hochschild_dims(m, n_dim, cap):
    """Dimensions (Z, B) of Hom(V^{⊗n}, V), n = 1..cap, under Hochschild's b."""
    e = [{i: 1} for i in range(n_dim)]

    def basis(n):
        return [(w, k) for w in product(range(n_dim), repeat=n) for k in range(n_dim)]

    def apply_vec(phi, args_vecs):
        out = {}
        for combo in product(*[list(v.items()) for v in args_vecs]):
            coef = 1
            for _, x in combo:
                coef *= x
            key = tuple(i for i, _ in combo)
            for (w, k), v in phi.items():
                if w == key:
                    out[k] = out.get(k, 0) + coef * v
        return out

    def b(phi, n):
        col = []
        for w, k in basis(n + 1):
            xs = [e[i] for i in w]
            total = lie_bracket(m, None, xs[0], apply_vec(phi, xs[1:])).get(k, 0)
            for i in range(n):
                merged = xs[:i] + [lie_bracket(m, None, xs[i], xs[i + 1])] + xs[i + 2:]
                total += (-1) ** (i + 1) * apply_vec(phi, merged).get(k, 0)
            total += (-1) ** (n + 1) * lie_bracket(m, None, apply_vec(phi, xs[:n]), xs[n]).get(k, 0)
            col.append(total)
        return col

    mats = {n: [b({bb: 1}, n) for bb in basis(n)] for n in range(1, cap)}
    out = {}
    for n in range(1, cap + 1):
        dim_c = len(basis(n))
        rk_out = _rank(mats[n]) if n < cap else 0
        rk_in = _rank(mats[n - 1]) if n > 1 else 0
        out[n] = (dim_c - rk_out, rk_in)
    return out


# ---------------------------------------------------------------------------
# classical algebras as structure constants (0-indexed)

SL2 = {(0, 1): {1: 2}, (1, 0): {1: -2}, (0, 2): {2: -2}, (2, 0): {2: 2},
       (1, 2): {0: 1}, (2, 1): {0: -1}}
HEISENBERG = {(0, 1): {2: 1}, (1, 0): {2: -1}}
NONABELIAN2 = {(0, 1): {1: 1}, (1, 0): {1: -1}}
# upper triangular 2x2 matrices: E11, E12, E22
UPPER_TRIANGULAR = {(0, 0): {0: 1}, (0, 1): {1: 1}, (1, 2): {1: 1}, (2, 2): {2: 1}}
TRUNCATED_POLY3 = {(0, 0): {0: 1}, (0, 1): {1: 1}, (1, 0): {1: 1}, (0, 2): {2: 1}, (2, 0): {2: 1},
                   (1, 1): {2: 1}}
DUAL_NUMBERS_UNITAL = {(0, 0): {0: 1}, (0, 1): {1: 1}, (1, 0): {1: 1}}


def lie_d(c, parities=None, cap=3):
    if parities is None:
        top = max(max(i, j, *v) for (i, j), v in c.items())
        parities = (0,) * (top + 1)
    return coderivation_of(c, parities, SYMMETRIC, cap)


def assoc_d(m, n, cap=3):
    return coderivation_of(m, (0,) * n, TENSOR, cap)


# ---------------------------------------------------------------------------
# random coderivations


def random_coderivation(rng, alg: CoderivationAlgebra, parity, density=0.3, coeffs=(-2, -1, 1, 3)):
    v = {}
    for i in alg.indices(parity=parity):
        if rng.random() < density:
            v[i] = Fraction(rng.choice(coeffs))
    return alg.coderivation(v, parity)


def random_space(rng, max_even=2, max_odd=2):
    while True:
        ne, no = rng.randint(0, max_even), rng.randint(0, max_odd)
        if ne + no:
            break
    parities = tuple([0] * ne + [1] * no)
    return GradedSpace(tuple(f"w{i}" for i in range(ne + no)), parities)


def rng_for(seed):
    return random.Random(seed)
