"""Exact rational linear algebra.

Scalars are :class:`fractions.Fraction`. Dense matrices are immutable
:class:`RatMatrix` values; the elimination engine underneath works on sparse
integer rows (fraction-free, each row kept primitive by dividing out the gcd of
its entries), which keeps the large, very sparse systems coming from induced
tensor actions cheap.
"""
from __future__ import annotations

from fractions import Fraction
from functools import reduce
from math import gcd, lcm
from typing import Iterable, Mapping, Sequence

Q = Fraction
SparseRow = Mapping[int, Fraction]


class DimensionError(ValueError):
    pass


def _q(x) -> Fraction:
    return x if isinstance(x, Fraction) else Fraction(x)


class RatMatrix:
    """Dense immutable matrix of rationals stored row-major."""

    __slots__ = ("rows", "cols", "entries")

    def __init__(self, rows: int, cols: int, entries: Iterable):
        entries = tuple(_q(e) for e in entries)
        if len(entries) != rows * cols:
            raise DimensionError(f"expected {rows * cols} entries, got {len(entries)}")
        object.__setattr__(self, "rows", rows)
        object.__setattr__(self, "cols", cols)
        object.__setattr__(self, "entries", entries)

    def __setattr__(self, name, value):
        raise AttributeError("RatMatrix is immutable")

    # construction
    @classmethod
    def from_rows(cls, rows: Sequence[Sequence]) -> "RatMatrix":
        rows = [list(r) for r in rows]
        ncols = len(rows[0]) if rows else 0
        if any(len(r) != ncols for r in rows):
            raise DimensionError("ragged rows")
        return cls(len(rows), ncols, [e for r in rows for e in r])

    @classmethod
    def zeros(cls, rows: int, cols: int | None = None) -> "RatMatrix":
        cols = rows if cols is None else cols
        return cls(rows, cols, [0] * (rows * cols))

    @classmethod
    def identity(cls, n: int) -> "RatMatrix":
        return cls(n, n, [1 if i == j else 0 for i in range(n) for j in range(n)])

    @classmethod
    def diag(cls, values: Sequence) -> "RatMatrix":
        n = len(values)
        return cls(n, n, [values[i] if i == j else 0 for i in range(n) for j in range(n)])

    @classmethod
    def column(cls, values: Sequence) -> "RatMatrix":
        return cls(len(values), 1, values)

    @classmethod
    def from_sparse(cls, rows: int, cols: int, data: Mapping[tuple[int, int], Fraction]) -> "RatMatrix":
        entries = [Fraction(0)] * (rows * cols)
        for (i, j), v in data.items():
            entries[i * cols + j] = v
        return cls(rows, cols, entries)

    # access
    @property
    def shape(self) -> tuple[int, int]:
        return self.rows, self.cols

    def __getitem__(self, ij: tuple[int, int]) -> Fraction:
        i, j = ij
        return self.entries[i * self.cols + j]

    def row(self, i: int) -> tuple[Fraction, ...]:
        return self.entries[i * self.cols:(i + 1) * self.cols]

    def col(self, j: int) -> tuple[Fraction, ...]:
        return self.entries[j::self.cols]

    def tolist(self) -> list[list[Fraction]]:
        return [list(self.row(i)) for i in range(self.rows)]

    def sparse_rows(self) -> list[dict[int, Fraction]]:
        return [{j: v for j, v in enumerate(self.row(i)) if v} for i in range(self.rows)]

    # algebra
    def __matmul__(self, other: "RatMatrix") -> "RatMatrix":
        if self.cols != other.rows:
            raise DimensionError(f"cannot multiply {self.shape} by {other.shape}")
        orows = other.sparse_rows()
        zero = Fraction(0)
        out = [zero] * (self.rows * other.cols)
        for i in range(self.rows):
            acc: dict[int, Fraction] = {}
            for k, a in enumerate(self.row(i)):
                if a:
                    for j, b in orows[k].items():
                        acc[j] = acc.get(j, zero) + a * b
            base = i * other.cols
            for j, v in acc.items():
                out[base + j] = v
        return RatMatrix(self.rows, other.cols, out)

    def apply(self, vec: Sequence) -> tuple[Fraction, ...]:
        if len(vec) != self.cols:
            raise DimensionError("vector length mismatch")
        return tuple(
            sum((a * _q(vec[k]) for k, a in enumerate(self.row(i)) if a), Fraction(0))
            for i in range(self.rows)
        )

    def _check_same(self, other: "RatMatrix"):
        if self.shape != other.shape:
            raise DimensionError(f"shape mismatch {self.shape} vs {other.shape}")

    def __add__(self, other: "RatMatrix") -> "RatMatrix":
        self._check_same(other)
        return RatMatrix(self.rows, self.cols, [a + b for a, b in zip(self.entries, other.entries)])

    def __sub__(self, other: "RatMatrix") -> "RatMatrix":
        self._check_same(other)
        return RatMatrix(self.rows, self.cols, [a - b for a, b in zip(self.entries, other.entries)])

    def __neg__(self) -> "RatMatrix":
        return RatMatrix(self.rows, self.cols, [-a for a in self.entries])

    def __mul__(self, scalar) -> "RatMatrix":
        s = _q(scalar)
        return RatMatrix(self.rows, self.cols, [s * a for a in self.entries])

    __rmul__ = __mul__

    @property
    def T(self) -> "RatMatrix":
        return RatMatrix(self.cols, self.rows, [self[i, j] for j in range(self.cols) for i in range(self.rows)])

    def trace(self) -> Fraction:
        return sum((self[i, i] for i in range(min(self.rows, self.cols))), Fraction(0))

    def is_zero(self) -> bool:
        return not any(self.entries)

    def is_square(self) -> bool:
        return self.rows == self.cols

    def is_symmetric(self) -> bool:
        return self.is_square() and all(
            self[i, j] == self[j, i] for i in range(self.rows) for j in range(i + 1, self.cols)
        )

    def kron(self, other: "RatMatrix") -> "RatMatrix":
        r, c = self.rows * other.rows, self.cols * other.cols
        out = [Fraction(0)] * (r * c)
        for i in range(self.rows):
            for j in range(self.cols):
                a = self[i, j]
                if not a:
                    continue
                for k in range(other.rows):
                    for l in range(other.cols):
                        b = other[k, l]
                        if b:
                            out[(i * other.rows + k) * c + j * other.cols + l] = a * b
        return RatMatrix(r, c, out)

    def __eq__(self, other) -> bool:
        return isinstance(other, RatMatrix) and self.shape == other.shape and self.entries == other.entries

    def __hash__(self) -> int:
        return hash((self.rows, self.cols, self.entries))

    def __repr__(self) -> str:
        body = "; ".join(" ".join(str(v) for v in self.row(i)) for i in range(self.rows))
        return f"RatMatrix({self.rows}x{self.cols}: [{body}])"


def commutator(a: RatMatrix, b: RatMatrix) -> RatMatrix:
    return a @ b - b @ a


def vstack(mats: Sequence[RatMatrix]) -> RatMatrix:
    if not mats:
        raise DimensionError("nothing to stack")
    cols = mats[0].cols
    if any(m.cols != cols for m in mats):
        raise DimensionError("column counts differ")
    return RatMatrix(sum(m.rows for m in mats), cols, [e for m in mats for e in m.entries])


# --- fraction-free sparse elimination -----------------------------------------


def _primitive(row: dict[int, int]) -> dict[int, int]:
    g = reduce(gcd, row.values(), 0)
    if g > 1:
        for k in row:
            row[k] //= g
    return row


def _integer_row(row: SparseRow) -> dict[int, int]:
    items = [(k, _q(v)) for k, v in row.items() if v]
    if not items:
        return {}
    den = reduce(lcm, (v.denominator for _, v in items), 1)
    return _primitive({k: v.numerator * (den // v.denominator) for k, v in items})


class Echelon:
    """Incrementally maintained reduced row echelon form over the rationals.

    Rows are integer and primitive; pivots are positive. Because the reduced
    echelon form is unique, the final state does not depend on the order in
    which rows were added.
    """

    def __init__(self, ncols: int):
        self.ncols = ncols
        self.pivots: dict[int, dict[int, int]] = {}

    @property
    def rank(self) -> int:
        return len(self.pivots)

    def reduce(self, row: SparseRow) -> dict[int, int]:
        """Residual of ``row`` modulo the current row space (scaled, primitive)."""
        r = _integer_row(row)
        if any(k < 0 or k >= self.ncols for k in r):
            raise DimensionError("column index out of range")
        for p in [c for c in r if c in self.pivots]:
            rp = r.get(p)
            if not rp:
                continue
            prow = self.pivots[p]
            a = prow[p]
            g = gcd(a, rp)
            ma, mr = a // g, rp // g
            out = {k: ma * v for k, v in r.items()}
            for k, v in prow.items():
                nv = out.get(k, 0) - mr * v
                if nv:
                    out[k] = nv
                else:
                    out.pop(k, None)
            r = _primitive(out)
        return r

    def add(self, row: SparseRow) -> bool:
        """Add a row; return True when it enlarged the row space."""
        r = self.reduce(row)
        if not r:
            return False
        c = min(r)
        if r[c] < 0:
            r = {k: -v for k, v in r.items()}
        rc = r[c]
        for p, prow in self.pivots.items():
            pc = prow.get(c)
            if not pc:
                continue
            g = gcd(rc, pc)
            mr, mp = rc // g, pc // g
            out = {k: mr * v for k, v in prow.items()}
            for k, v in r.items():
                nv = out.get(k, 0) - mp * v
                if nv:
                    out[k] = nv
                else:
                    out.pop(k, None)
            if out[p] < 0:
                out = {k: -v for k, v in out.items()}
            self.pivots[p] = _primitive(out)
        self.pivots[c] = r
        return True

    def contains(self, row: SparseRow) -> bool:
        return not self.reduce(row)

    def kernel(self) -> list[tuple[Fraction, ...]]:
        """Null space basis, one vector per free column in increasing order."""
        free = [c for c in range(self.ncols) if c not in self.pivots]
        out = []
        for f in free:
            v = [Fraction(0)] * self.ncols
            v[f] = Fraction(1)
            for p, prow in self.pivots.items():
                x = prow.get(f)
                if x:
                    v[p] = Fraction(-x, prow[p])
            out.append(tuple(v))
        return out

    def basis(self) -> list[tuple[Fraction, ...]]:
        """Reduced row basis with leading entries 1, sorted by pivot column."""
        out = []
        for p in sorted(self.pivots):
            prow = self.pivots[p]
            v = [Fraction(0)] * self.ncols
            for k, x in prow.items():
                v[k] = Fraction(x, prow[p])
            out.append(tuple(v))
        return out


def sparse_kernel(rows: Iterable[SparseRow], ncols: int) -> list[tuple[Fraction, ...]]:
    ech = Echelon(ncols)
    for r in rows:
        ech.add(r)
    return ech.kernel()


def _as_column(v: Sequence[Fraction]) -> RatMatrix:
    return RatMatrix.column(v)


def kernel_basis(m: RatMatrix) -> list[RatMatrix]:
    """Basis of the null space of ``m`` as column vectors (deterministic)."""
    return [_as_column(v) for v in sparse_kernel(m.sparse_rows(), m.cols)]


def intersect_kernels(ops: Sequence[RatMatrix], strategy: str = "stacked") -> list[RatMatrix]:
    """Basis of the common null space of ``ops``.

    ``strategy="iterative"`` restricts each operator to the kernel found so far;
    the result is rewritten into the canonical reduced form so that both
    strategies return identical bases.
    """
    if not ops:
        raise DimensionError("need at least one operator")
    n = ops[0].cols
    if any(o.cols != n for o in ops):
        raise DimensionError("operators have different column counts")
    if strategy == "stacked":
        ech = Echelon(n)
        for o in ops:
            for r in o.sparse_rows():
                ech.add(r)
        return [_as_column(v) for v in ech.kernel()]
    if strategy != "iterative":
        raise ValueError(f"unknown strategy {strategy!r}")
    basis = [tuple(Fraction(int(i == j)) for j in range(n)) for i in range(n)]
    for o in ops:
        if not basis:
            break
        images = [o.apply(b) for b in basis]
        # coefficients c with sum c_i images_i = 0
        coeff_rows = [{i: img[r] for i, img in enumerate(images) if img[r]} for r in range(o.rows)]
        combos = sparse_kernel(coeff_rows, len(basis))
        basis = [tuple(sum((c[i] * basis[i][k] for i in range(len(basis)) if c[i]), Fraction(0)) for k in range(n))
                 for c in combos]
    return [_as_column(v) for v in canonical_span(basis, n)]


def canonical_span(vectors: Iterable[Sequence], n: int) -> list[tuple[Fraction, ...]]:
    """Canonical basis of a kernel-type subspace: the unique basis that is the
    identity on the free coordinates of its reduced column-echelon form."""
    ech = Echelon(n)
    for v in vectors:
        ech.add({k: x for k, x in enumerate(v) if x})
    # the subspace is the kernel of its annihilator
    ann = ech.kernel()
    return sparse_kernel(({k: x for k, x in enumerate(a) if x} for a in ann), n)


def rank(m: RatMatrix) -> int:
    ech = Echelon(m.cols)
    for r in m.sparse_rows():
        ech.add(r)
    return ech.rank


def span_rank(vectors: Iterable[Sequence], n: int) -> int:
    ech = Echelon(n)
    for v in vectors:
        ech.add({k: x for k, x in enumerate(v) if x})
    return ech.rank


def solve(m: RatMatrix, b: Sequence) -> tuple[Fraction, ...] | None:
    """One solution of ``m x = b`` (free variables set to zero) or None."""
    if len(b) != m.rows:
        raise DimensionError("right-hand side length mismatch")
    n = m.cols
    ech = Echelon(n + 1)
    for i, r in enumerate(m.sparse_rows()):
        row = dict(r)
        if b[i]:
            row[n] = _q(b[i])
        ech.add(row)
    if n in ech.pivots:
        return None
    x = [Fraction(0)] * n
    for p, prow in ech.pivots.items():
        rhs = prow.get(n, 0)
        x[p] = Fraction(rhs, prow[p])
    return tuple(x)


def signature(s: RatMatrix) -> tuple[int, int, int]:
    """(positive, negative, null) inertia of a symmetric rational matrix."""
    if not s.is_symmetric():
        raise ValueError("signature requires a symmetric matrix")
    n = s.rows
    a = s.tolist()
    pos = neg = 0
    for i in range(n):
        if a[i][i] == 0:
            j = next((j for j in range(i + 1, n) if a[j][j] != 0), None)
            if j is not None:
                a[i], a[j] = a[j], a[i]
                for r in a:
                    r[i], r[j] = r[j], r[i]
            else:
                j = next((j for j in range(i + 1, n) if a[i][j] != 0), None)
                if j is None:
                    continue
                for k in range(n):
                    a[i][k] += a[j][k]
                for k in range(n):
                    a[k][i] += a[k][j]
        p = a[i][i]
        for j in range(i + 1, n):
            f = a[j][i] / p
            if not f:
                continue
            for k in range(i, n):
                a[j][k] -= f * a[i][k]
            for k in range(i, n):
                a[k][j] -= f * a[k][i]
        if p > 0:
            pos += 1
        else:
            neg += 1
    return pos, neg, n - pos - neg
