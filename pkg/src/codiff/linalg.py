"""Exact linear algebra over the rationals.

Every routine here works on :class:`fractions.Fraction` entries and is
deterministic: pivoting always takes the leftmost nonzero column and the
first row with a nonzero entry in it.  Vectors are plain lists.
"""

from __future__ import annotations

from fractions import Fraction
from typing import Dict, Iterable, List, Optional, Sequence, Tuple

Vector = List[Fraction]

#: fraction of nonzero entries at or below which a matrix reports itself sparse
SPARSE_FILL = Fraction(1, 4)


def as_fraction(x) -> Fraction:
    if isinstance(x, Fraction):
        return x
    if isinstance(x, float):
        raise TypeError("floats are not exact; pass an int, a Fraction or a 'p/q' string")
    return Fraction(x)


class Matrix:
    """A rows x cols matrix with rational entries.

    Storage is a dict ``(row, col) -> Fraction`` holding only nonzero
    entries; absent entries are zero.
    """

    __slots__ = ("rows", "cols", "_entries")

    def __init__(self, rows: int, cols: int, entries=None):
        if rows < 0 or cols < 0:
            raise ValueError("matrix dimensions must be nonnegative")
        self.rows = rows
        self.cols = cols
        self._entries: Dict[Tuple[int, int], Fraction] = {}
        if entries:
            for (r, c), v in dict(entries).items():
                if not (0 <= r < rows and 0 <= c < cols):
                    raise IndexError(f"entry ({r}, {c}) outside {rows}x{cols}")
                v = as_fraction(v)
                if v:
                    self._entries[(r, c)] = v

    @classmethod
    def from_rows(cls, rows: Sequence[Sequence], cols: Optional[int] = None) -> "Matrix":
        nrows = len(rows)
        ncols = cols if cols is not None else (len(rows[0]) if rows else 0)
        entries = {}
        for i, row in enumerate(rows):
            if len(row) != ncols:
                raise ValueError("ragged rows")
            for j, v in enumerate(row):
                if v:
                    entries[(i, j)] = v
        return cls(nrows, ncols, entries)

    @classmethod
    def from_columns(cls, columns: Sequence[Sequence], rows: int) -> "Matrix":
        entries = {}
        for j, col in enumerate(columns):
            if len(col) != rows:
                raise ValueError("column length does not match row count")
            for i, v in enumerate(col):
                if v:
                    entries[(i, j)] = v
        return cls(rows, len(columns), entries)

    @classmethod
    def from_sparse_columns(cls, columns: Sequence[Dict[int, Fraction]], rows: int) -> "Matrix":
        entries = {}
        for j, col in enumerate(columns):
            for i, v in col.items():
                if v:
                    entries[(i, j)] = v
        return cls(rows, len(columns), entries)

    @classmethod
    def identity(cls, n: int) -> "Matrix":
        return cls(n, n, {(i, i): 1 for i in range(n)})

    @classmethod
    def zero(cls, rows: int, cols: int) -> "Matrix":
        return cls(rows, cols)

    def __getitem__(self, key: Tuple[int, int]) -> Fraction:
        return self._entries.get(key, Fraction(0))

    def items(self):
        return self._entries.items()

    @property
    def nnz(self) -> int:
        return len(self._entries)

    @property
    def is_sparse(self) -> bool:
        size = self.rows * self.cols
        return size == 0 or Fraction(self.nnz, size) <= SPARSE_FILL

    def dense(self) -> List[Vector]:
        out = [[Fraction(0)] * self.cols for _ in range(self.rows)]
        for (r, c), v in self._entries.items():
            out[r][c] = v
        return out

    def row_dicts(self) -> List[Dict[int, Fraction]]:
        out: List[Dict[int, Fraction]] = [{} for _ in range(self.rows)]
        for (r, c), v in self._entries.items():
            out[r][c] = v
        return out

    def column(self, j: int) -> Vector:
        col = [Fraction(0)] * self.rows
        for (r, c), v in self._entries.items():
            if c == j:
                col[r] = v
        return col

    def transpose(self) -> "Matrix":
        return Matrix(self.cols, self.rows, {(c, r): v for (r, c), v in self._entries.items()})

    def __neg__(self) -> "Matrix":
        return Matrix(self.rows, self.cols, {k: -v for k, v in self._entries.items()})

    def __eq__(self, other) -> bool:
        if not isinstance(other, Matrix):
            return NotImplemented
        return (self.rows, self.cols, self._entries) == (other.rows, other.cols, other._entries)

    def __repr__(self) -> str:
        return f"Matrix({self.rows}x{self.cols}, nnz={self.nnz})"

    def mul_vec(self, v: Sequence) -> Vector:
        if len(v) != self.cols:
            raise ValueError(f"vector of length {len(v)} cannot multiply {self.rows}x{self.cols} matrix")
        out = [Fraction(0)] * self.rows
        for (r, c), x in self._entries.items():
            if v[c]:
                out[r] += x * v[c]
        return out


def _rref_rows(rows: List[Dict[int, Fraction]], ncols: int):
    """Gauss-Jordan elimination on sparse rows; returns (rows, pivot columns)."""
    rows = [dict(r) for r in rows]
    pivots: List[int] = []
    r = 0
    for c in range(ncols):
        pr = None
        for i in range(r, len(rows)):
            if rows[i].get(c):
                pr = i
                break
        if pr is None:
            continue
        rows[r], rows[pr] = rows[pr], rows[r]
        piv = rows[r]
        inv = 1 / piv[c]
        if inv != 1:
            for k in piv:
                piv[k] *= inv
        for i in range(len(rows)):
            if i == r:
                continue
            f = rows[i].get(c)
            if not f:
                continue
            row = rows[i]
            for k, v in piv.items():
                nv = row.get(k, 0) - f * v
                if nv:
                    row[k] = nv
                else:
                    row.pop(k, None)
        pivots.append(c)
        r += 1
        if r == len(rows):
            break
    return rows[:r], pivots


def rref(m: Matrix) -> Tuple[Matrix, List[int]]:
    """Reduced row echelon form of ``m`` and its pivot columns."""
    rows, pivots = _rref_rows(m.row_dicts(), m.cols)
    entries = {(i, c): v for i, row in enumerate(rows) for c, v in row.items()}
    return Matrix(len(rows), m.cols, entries), pivots


def rank(m: Matrix) -> int:
    return len(_rref_rows(m.row_dicts(), m.cols)[1])


def kernel_basis(m: Matrix) -> List[Vector]:
    """Basis of the null space; one vector per free column, with a 1 there."""
    rows, pivots = _rref_rows(m.row_dicts(), m.cols)
    pivset = set(pivots)
    basis = []
    for free in range(m.cols):
        if free in pivset:
            continue
        v = [Fraction(0)] * m.cols
        v[free] = Fraction(1)
        for row, p in zip(rows, pivots):
            x = row.get(free)
            if x:
                v[p] = -x
        basis.append(v)
    return basis


def image_basis(m: Matrix) -> List[Vector]:
    """The pivot columns of ``m``: a basis of its column space."""
    _, pivots = _rref_rows(m.row_dicts(), m.cols)
    return [m.column(c) for c in pivots]


def solve(m: Matrix, b: Sequence) -> Optional[Vector]:
    """Some ``x`` with ``m x = b``, or ``None`` when the system is inconsistent.

    Free variables are set to zero, so the answer is reproducible.
    """
    if len(b) != m.rows:
        raise ValueError(f"right-hand side has length {len(b)}, matrix has {m.rows} rows")
    rows = m.row_dicts()
    for i, x in enumerate(b):
        x = as_fraction(x)
        if x:
            rows[i][m.cols] = x
    red, pivots = _rref_rows(rows, m.cols + 1)
    if pivots and pivots[-1] == m.cols:
        return None
    x = [Fraction(0)] * m.cols
    for row, p in zip(red, pivots):
        x[p] = row.get(m.cols, Fraction(0))
    return x


def quotient_representatives(space_dim: int, subspace: Iterable[Sequence]) -> List[Vector]:
    """Standard basis vectors whose classes form a basis of ``K^n / span(subspace)``.

    These are the non-pivot coordinates of the subspace's echelon form.
    """
    rows = []
    for v in subspace:
        if len(v) != space_dim:
            raise ValueError("subspace vector has the wrong length")
        rows.append({i: as_fraction(x) for i, x in enumerate(v) if x})
    _, pivots = _rref_rows(rows, space_dim)
    pivset = set(pivots)
    reps = []
    for i in range(space_dim):
        if i not in pivset:
            e = [Fraction(0)] * space_dim
            e[i] = Fraction(1)
            reps.append(e)
    return reps


class EchelonBasis:
    """Incrementally maintained reduced echelon basis of a subspace of K^n.

    Vectors are sparse dicts.  Supports membership tests and, unless
    ``track=False``, expressing a vector of the span in terms of the vectors
    that were added.
    """

    def __init__(self, dim: int, track: bool = True):
        self.dim = dim
        self.track = track
        self._rows: List[Dict[int, Fraction]] = []
        self._pivots: List[int] = []
        self._where: Dict[int, int] = {}
        # each row is also tracked as a combination of added vectors
        self._combos: List[Dict[int, Fraction]] = []
        self.added: List[Dict[int, Fraction]] = []

    def __len__(self) -> int:
        return len(self._rows)

    def _reduce(self, v: Dict[int, Fraction]):
        v = {k: x for k, x in v.items() if x}
        combo: Dict[int, Fraction] = {}
        # rows vanish on each other's pivots, so only pivots present in v matter
        hits = [(k, v[k]) for k in v if k in self._where]
        for p, f in hits:
            r = self._where[p]
            for k, x in self._rows[r].items():
                nv = v.get(k, 0) - f * x
                if nv:
                    v[k] = nv
                else:
                    v.pop(k, None)
            if self.track:
                for k, x in self._combos[r].items():
                    nc = combo.get(k, 0) + f * x
                    if nc:
                        combo[k] = nc
                    else:
                        combo.pop(k, None)
        return v, combo

    def contains(self, v: Dict[int, Fraction]) -> bool:
        return not self._reduce(v)[0]

    def residual(self, v: Dict[int, Fraction]) -> Dict[int, Fraction]:
        return self._reduce(v)[0]

    def coordinates(self, v: Dict[int, Fraction]) -> Optional[Dict[int, Fraction]]:
        """Coefficients on the added vectors summing to ``v``, or None."""
        if not self.track:
            raise ValueError("coordinates need an EchelonBasis with track=True")
        res, combo = self._reduce(v)
        if res:
            return None
        return combo

    def add(self, v: Dict[int, Fraction]) -> bool:
        """Add ``v``; returns False (and stores nothing) if already in the span."""
        res, combo = self._reduce(v)
        if not res:
            return False
        idx = len(self.added)
        self.added.append(dict(v))
        p = min(res)
        inv = 1 / res[p]
        res = {k: x * inv for k, x in res.items()}
        if self.track:
            combo = {k: -x for k, x in combo.items()}
            combo[idx] = combo.get(idx, 0) + 1
            combo = {k: x * inv for k, x in combo.items() if x}
        # keep rows fully reduced
        for i, row in enumerate(self._rows):
            f = row.get(p)
            if not f:
                continue
            for k, x in res.items():
                nv = row.get(k, 0) - f * x
                if nv:
                    row[k] = nv
                else:
                    row.pop(k, None)
            if self.track:
                cb = self._combos[i]
                for k, x in combo.items():
                    nc = cb.get(k, 0) - f * x
                    if nc:
                        cb[k] = nc
                    else:
                        cb.pop(k, None)
        self._where[p] = len(self._rows)
        self._rows.append(res)
        self._pivots.append(p)
        self._combos.append(combo if self.track else {})
        return True

    @property
    def pivots(self) -> List[int]:
        return list(self._pivots)

    def rows(self) -> List[Dict[int, Fraction]]:
        return [dict(r) for r in self._rows]


def to_dense(v: Dict[int, Fraction], dim: int) -> Vector:
    out = [Fraction(0)] * dim
    for k, x in v.items():
        out[k] = x
    return out


def to_sparse(v: Sequence) -> Dict[int, Fraction]:
    return {i: as_fraction(x) for i, x in enumerate(v) if x}
