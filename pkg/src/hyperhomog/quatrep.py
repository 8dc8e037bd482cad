"""Quaternions, realification of quaternionic matrices, the flat model
H^{1,n} with its hypercomplex triple, and a catalog of subalgebras of sp(1,n).

Conventions
-----------
* Column vectors in H^N carry the scalar action on the RIGHT; matrices act on
  the LEFT, so left multiplication by quaternionic matrices is H-linear.
* Realification is coordinate-major: quaternion coordinate ``r`` occupies
  real coordinates ``4r .. 4r+3`` in the order (1, i, j, k).
* ``J_alpha`` is right multiplication by the conjugate unit ``-e_alpha``.
  Right multiplication by ``e_alpha`` itself gives an anti-homomorphism
  (``R_i R_j = -R_k``); conjugating restores ``J1 J2 = J3``.
* Index 0 is the timelike coordinate: ``<x, y> = Re(-conj(x0) y0 + sum conj(xi) yi)``.
"""
from __future__ import annotations

import re
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Sequence

import sympy

from .exactlin import Echelon, RatMatrix, commutator, sparse_kernel


@dataclass(frozen=True)
class Quaternion:
    a: Fraction = Fraction(0)
    b: Fraction = Fraction(0)
    c: Fraction = Fraction(0)
    d: Fraction = Fraction(0)

    def __post_init__(self):
        for name in "abcd":
            v = getattr(self, name)
            if not isinstance(v, Fraction):
                object.__setattr__(self, name, Fraction(v))

    @classmethod
    def coerce(cls, x) -> "Quaternion":
        return x if isinstance(x, Quaternion) else cls(Fraction(x))

    @property
    def components(self) -> tuple[Fraction, Fraction, Fraction, Fraction]:
        return self.a, self.b, self.c, self.d

    def __add__(self, o) -> "Quaternion":
        o = Quaternion.coerce(o)
        return Quaternion(self.a + o.a, self.b + o.b, self.c + o.c, self.d + o.d)

    __radd__ = __add__

    def __neg__(self) -> "Quaternion":
        return Quaternion(-self.a, -self.b, -self.c, -self.d)

    def __sub__(self, o) -> "Quaternion":
        return self + (-Quaternion.coerce(o))

    def __rsub__(self, o) -> "Quaternion":
        return Quaternion.coerce(o) - self

    def __mul__(self, o) -> "Quaternion":
        if not isinstance(o, Quaternion):
            s = Fraction(o)
            return Quaternion(self.a * s, self.b * s, self.c * s, self.d * s)
        a1, b1, c1, d1 = self.components
        a2, b2, c2, d2 = o.components
        return Quaternion(
            a1 * a2 - b1 * b2 - c1 * c2 - d1 * d2,
            a1 * b2 + b1 * a2 + c1 * d2 - d1 * c2,
            a1 * c2 - b1 * d2 + c1 * a2 + d1 * b2,
            a1 * d2 + b1 * c2 - c1 * b2 + d1 * a2,
        )

    def __rmul__(self, s) -> "Quaternion":
        return self * s  # real scalars are central

    def __truediv__(self, s) -> "Quaternion":
        return self * (1 / Fraction(s))

    def conj(self) -> "Quaternion":
        return Quaternion(self.a, -self.b, -self.c, -self.d)

    def norm2(self) -> Fraction:
        return self.a ** 2 + self.b ** 2 + self.c ** 2 + self.d ** 2

    def inverse(self) -> "Quaternion":
        n = self.norm2()
        if not n:
            raise ZeroDivisionError("zero quaternion")
        return self.conj() * (1 / n)

    def __bool__(self) -> bool:
        return bool(self.a or self.b or self.c or self.d)

    def __str__(self) -> str:
        parts = []
        for v, u in zip(self.components, ("", "i", "j", "k")):
            if v:
                coef = "" if (u and abs(v) == 1) else str(abs(v))
                parts.append(("-" if v < 0 else "+") + coef + u)
        if not parts:
            return "0"
        s = "".join(parts)
        return s[1:] if s[0] == "+" else s


ONE = Quaternion(1)
I = Quaternion(0, 1)
J = Quaternion(0, 0, 1)
K = Quaternion(0, 0, 0, 1)
UNITS = (ONE, I, J, K)
IMAGINARY_UNITS = (I, J, K)


def left_mult(q: Quaternion) -> RatMatrix:
    """4x4 real matrix of x -> q x."""
    cols = [(q * e).components for e in UNITS]
    return RatMatrix.from_rows([[cols[j][i] for j in range(4)] for i in range(4)])


def right_mult(p: Quaternion) -> RatMatrix:
    """4x4 real matrix of x -> x p."""
    cols = [(e * p).components for e in UNITS]
    return RatMatrix.from_rows([[cols[j][i] for j in range(4)] for i in range(4)])


class QuatMatrix:
    """Matrix over H acting by left multiplication on column vectors."""

    __slots__ = ("rows", "cols", "entries")

    def __init__(self, rows: Sequence[Sequence]):
        rows = [[Quaternion.coerce(x) for x in r] for r in rows]
        self.rows = len(rows)
        self.cols = len(rows[0]) if rows else 0
        if any(len(r) != self.cols for r in rows):
            raise ValueError("ragged quaternionic matrix")
        self.entries = tuple(tuple(r) for r in rows)

    @classmethod
    def identity(cls, n: int) -> "QuatMatrix":
        return cls([[ONE if i == j else Quaternion() for j in range(n)] for i in range(n)])

    @classmethod
    def scalar(cls, q: Quaternion, n: int) -> "QuatMatrix":
        return cls([[q if i == j else Quaternion() for j in range(n)] for i in range(n)])

    @classmethod
    def unit(cls, n: int, i: int, j: int, q: Quaternion) -> "QuatMatrix":
        return cls([[q if (r, c) == (i, j) else Quaternion() for c in range(n)] for r in range(n)])

    def __getitem__(self, ij) -> Quaternion:
        i, j = ij
        return self.entries[i][j]

    def __matmul__(self, o: "QuatMatrix") -> "QuatMatrix":
        if self.cols != o.rows:
            raise ValueError("shape mismatch")
        return QuatMatrix([
            [sum((self[i, k] * o[k, j] for k in range(self.cols)), Quaternion()) for j in range(o.cols)]
            for i in range(self.rows)
        ])

    def __add__(self, o: "QuatMatrix") -> "QuatMatrix":
        return QuatMatrix([[self[i, j] + o[i, j] for j in range(self.cols)] for i in range(self.rows)])

    def __sub__(self, o: "QuatMatrix") -> "QuatMatrix":
        return QuatMatrix([[self[i, j] - o[i, j] for j in range(self.cols)] for i in range(self.rows)])

    def lmul(self, q) -> "QuatMatrix":
        """Entrywise q * A (a left quaternionic scalar)."""
        q = Quaternion.coerce(q)
        return QuatMatrix([[q * x for x in r] for r in self.entries])

    def conj_transpose(self) -> "QuatMatrix":
        return QuatMatrix([[self[j, i].conj() for j in range(self.rows)] for i in range(self.cols)])

    def apply(self, v: Sequence[Quaternion]) -> tuple[Quaternion, ...]:
        return tuple(sum((self[i, k] * v[k] for k in range(self.cols)), Quaternion()) for i in range(self.rows))

    def is_diagonal(self) -> bool:
        return all(not self[i, j] for i in range(self.rows) for j in range(self.cols) if i != j)

    def __eq__(self, o) -> bool:
        return isinstance(o, QuatMatrix) and self.entries == o.entries

    def __repr__(self) -> str:
        return "QuatMatrix([" + "; ".join(", ".join(str(x) for x in r) for r in self.entries) + "])"


def realify(q: QuatMatrix) -> RatMatrix:
    """Real 4N x 4M matrix of left multiplication by ``q``."""
    data = {}
    for r in range(q.rows):
        for c in range(q.cols):
            x = q[r, c]
            if not x:
                continue
            block = left_mult(x)
            for i in range(4):
                for j in range(4):
                    v = block[i, j]
                    if v:
                        data[(4 * r + i, 4 * c + j)] = v
    return RatMatrix.from_sparse(4 * q.rows, 4 * q.cols, data)


def vec_to_real(v: Sequence[Quaternion]) -> tuple[Fraction, ...]:
    return tuple(x for q in v for x in Quaternion.coerce(q).components)


def real_to_vec(v: Sequence) -> tuple[Quaternion, ...]:
    if len(v) % 4:
        raise ValueError("real dimension must be a multiple of 4")
    return tuple(Quaternion(*v[4 * r:4 * r + 4]) for r in range(len(v) // 4))


def line_span(v: Sequence[Quaternion]) -> list[tuple[Fraction, ...]]:
    """Real spanning set (4 vectors) of the quaternionic line v*H."""
    return [vec_to_real([x * e for x in v]) for e in UNITS]


def hypercomplex_triple(N: int) -> tuple[RatMatrix, RatMatrix, RatMatrix]:
    blocks = [right_mult(-u) for u in IMAGINARY_UNITS]
    eye = RatMatrix.identity(N)
    return tuple(eye.kron(b) for b in blocks)


@dataclass(frozen=True)
class HypercomplexSpace:
    n: int
    metric: RatMatrix
    J: tuple[RatMatrix, RatMatrix, RatMatrix]

    @property
    def dim(self) -> int:
        return self.metric.rows

    @property
    def quat_dim(self) -> int:
        return self.n + 1

    def is_metric_skew(self, X: RatMatrix) -> bool:
        G = self.metric
        return (X.T @ G + G @ X).is_zero()

    def commutes_with_J(self, X: RatMatrix) -> bool:
        return all(commutator(X, Ja).is_zero() for Ja in self.J)

    def check(self) -> None:
        from .exactlin import signature

        eye = RatMatrix.identity(self.dim)
        J1, J2, J3 = self.J
        for Ja in self.J:
            if Ja @ Ja != -eye:
                raise AssertionError("J_alpha^2 != -Id")
            if Ja.T @ self.metric @ Ja != self.metric:
                raise AssertionError("metric not J-invariant")
        if J1 @ J2 != J3 or J2 @ J1 != -J3:
            raise AssertionError("quaternion relations fail")
        if signature(self.metric)[1] != 4:
            raise AssertionError("metric index is not 4")


def standard_space(n: int) -> HypercomplexSpace:
    """H^{1,n} realified: metric diag(-1,-1,-1,-1, 1, ..., 1) and the triple J."""
    if n < 1:
        raise ValueError("n must be at least 1")
    N = n + 1
    metric = RatMatrix.diag([-1] * 4 + [1] * (4 * n))
    return HypercomplexSpace(n, metric, hypercomplex_triple(N))


# --- catalog ------------------------------------------------------------------

PHI = QuatMatrix([[0, -1], [1, 0]])


@dataclass(frozen=True)
class GeneratorCatalogEntry:
    name: str
    generators: tuple[RatMatrix, ...]
    ambient: HypercomplexSpace
    params: dict = field(default_factory=dict)
    quat_generators: tuple[QuatMatrix, ...] = ()
    labels: tuple[str, ...] = ()

    @property
    def n(self) -> int:
        return self.ambient.n

    @property
    def dim(self) -> int:
        return self.ambient.dim

    def restrict(self, labels: Sequence[str]) -> "GeneratorCatalogEntry":
        """The entry generated by a subset of the generators, selected by label."""
        idx = [self.labels.index(lbl) for lbl in labels]
        return GeneratorCatalogEntry(
            name=f"{self.name}[{','.join(labels)}]",
            generators=tuple(self.generators[i] for i in idx),
            ambient=self.ambient,
            params=dict(self.params),
            quat_generators=tuple(self.quat_generators[i] for i in idx) if self.quat_generators else (),
            labels=tuple(labels),
        )

    def check(self) -> None:
        for idx, X in enumerate(self.generators):
            if not self.ambient.is_metric_skew(X):
                raise AssertionError(f"{self.name}: generator {idx} is not metric-skew")
            if not self.ambient.commutes_with_J(X):
                raise AssertionError(f"{self.name}: generator {idx} does not commute with J")


def _indefinite_unitary(n: int, units_off: Sequence[Quaternion], units_diag: Sequence[Quaternion],
                        traceless: bool = False) -> list[tuple[str, QuatMatrix]]:
    N = n + 1
    out = []
    for i in range(N):
        for j in range(i + 1, N):
            for q in units_off:
                if i == 0:
                    # timelike row flips the hermitian sign: q E_0j + conj(q) E_j0
                    m = QuatMatrix.unit(N, i, j, q) + QuatMatrix.unit(N, j, i, q.conj())
                else:
                    m = QuatMatrix.unit(N, i, j, q) - QuatMatrix.unit(N, j, i, q.conj())
                out.append((f"E{i}{j}*{q}", m))
    if traceless:
        for k in range(N - 1):
            for q in units_diag:
                out.append((f"D{k}{k + 1}*{q}", QuatMatrix.unit(N, k, k, q) - QuatMatrix.unit(N, k + 1, k + 1, q)))
    else:
        for k in range(N):
            for q in units_diag:
                out.append((f"D{k}*{q}", QuatMatrix.unit(N, k, k, q)))
    return out


def _so(n):
    return _indefinite_unitary(n, [ONE], [])


def _su(n):
    return _indefinite_unitary(n, [ONE, I], [I], traceless=True)


def _u(n):
    return _su(n) + [("i*Id", QuatMatrix.scalar(I, n + 1))]


def _sp(n):
    return _indefinite_unitary(n, UNITS, IMAGINARY_UNITS)


BOOST = QuatMatrix([[0, 1], [1, 0]])

CANONICAL_NAMES = (
    "so(1,n)", "su(1,n)", "u(1,n)", "sp(1,n)", "u(1)·1", "sp(1)·1",
    "so(1,1)", "so(1,1)+u(1)", "so(1,1)+sp(1)", "S(a,b)", "u_phi", "zero",
)

_ALIASES = {
    "so": "so(1,n)", "so(1,n)": "so(1,n)", "so1n": "so(1,n)",
    "su": "su(1,n)", "su(1,n)": "su(1,n)", "su1n": "su(1,n)",
    "u": "u(1,n)", "u(1,n)": "u(1,n)", "u1n": "u(1,n)",
    "sp": "sp(1,n)", "sp(1,n)": "sp(1,n)", "sp1n": "sp(1,n)",
    "u(1)·1": "u(1)·1", "u(1)": "u(1)·1", "u1": "u(1)·1", "u1*1": "u(1)·1",
    "sp(1)·1": "sp(1)·1", "sp(1)": "sp(1)·1", "sp1": "sp(1)·1", "sp1*1": "sp(1)·1",
    "so(1,1)": "so(1,1)", "so11": "so(1,1)",
    "so(1,1)+u(1)": "so(1,1)+u(1)", "so11+u1": "so(1,1)+u(1)",
    "so(1,1)+sp(1)": "so(1,1)+sp(1)", "so11+sp1": "so(1,1)+sp(1)",
    "s": "S(a,b)", "S": "S(a,b)", "S(a,b)": "S(a,b)",
    "u_phi": "u_phi", "uphi": "u_phi", "u0": "u_phi",
    "zero": "zero", "0": "zero",
}

_FAMILY_RE = re.compile(r"^(so|su|sp|u)(?:\(1,(\d+)\)|1(\d+))$")


class CatalogError(ValueError):
    pass


def resolve_name(name: str, n: int | None = None) -> tuple[str, int | None]:
    """Canonical catalog name and the quaternionic parameter n it implies."""
    key = name.strip()
    m = _FAMILY_RE.match(key)
    if m and key not in ("so11",):
        fam = m.group(1)
        embedded = int(m.group(2) or m.group(3))
        if n is not None and n != embedded:
            raise CatalogError(f"{name!r} fixes n={embedded} but n={n} was requested")
        return _ALIASES[fam], embedded
    canon = _ALIASES.get(key) or _ALIASES.get(key.lower())
    if canon is None:
        raise CatalogError(f"unknown algebra {name!r}; known: {', '.join(CANONICAL_NAMES)}")
    return canon, n


def catalog(name: str, n: int | None = None, a=None, b=None) -> GeneratorCatalogEntry:
    """Realified generators of a named subalgebra of sp(1,n)."""
    canon, n = resolve_name(name, n)
    if canon in ("so(1,1)", "so(1,1)+u(1)", "so(1,1)+sp(1)", "S(a,b)", "u_phi"):
        if n not in (None, 1):
            raise CatalogError(f"{canon} lives in sp(1,1); got n={n}")
        n = 1
    n = 1 if n is None else n
    N = n + 1
    params = {}
    if canon == "so(1,n)":
        gens = _so(n)
    elif canon == "su(1,n)":
        gens = _su(n)
    elif canon == "u(1,n)":
        gens = _u(n)
    elif canon == "sp(1,n)":
        gens = _sp(n)
    elif canon == "u(1)·1":
        gens = [("i*Id", QuatMatrix.scalar(I, N))]
    elif canon == "sp(1)·1":
        gens = [(f"{q}*Id", QuatMatrix.scalar(q, N)) for q in IMAGINARY_UNITS]
    elif canon == "so(1,1)":
        gens = [("boost", BOOST)]
    elif canon == "so(1,1)+u(1)":
        gens = [("boost", BOOST), ("i*Id", QuatMatrix.scalar(I, 2))]
    elif canon == "so(1,1)+sp(1)":
        gens = [("boost", BOOST)] + [(f"{q}*Id", QuatMatrix.scalar(q, 2)) for q in IMAGINARY_UNITS]
    elif canon == "S(a,b)":
        if a is None or b is None:
            raise CatalogError("S(a,b) needs parameters a and b")
        a, b = Fraction(a), Fraction(b)
        if a == 0 or b == 0:
            raise CatalogError("S(a,b) requires non-zero a and b")
        params = {"a": a, "b": b}
        gens = [("v", QuatMatrix([[I * b, a], [a, I * b]]))]
    elif canon == "u_phi":
        half = Fraction(1, 2)
        gens = [(lbl, PHI.lmul(q * half)) for lbl, q in zip("xyz", IMAGINARY_UNITS)]
        gens += [(lbl, QuatMatrix.scalar(q * half, 2)) for lbl, q in zip("uvw", IMAGINARY_UNITS)]
    else:  # zero
        gens = []
    entry = GeneratorCatalogEntry(
        name=canon,
        generators=tuple(realify(m) for _, m in gens),
        ambient=standard_space(n),
        params=params,
        quat_generators=tuple(m for _, m in gens),
        labels=tuple(lbl for lbl, _ in gens),
    )
    entry.check()
    return entry


# --- quaternionic eigenlines ------------------------------------------------------


class NotSplitError(ValueError):
    """The operator has no decomposition of H^2 into two invariant H-lines
    detectable over the rationals."""


@dataclass(frozen=True)
class EigenLine:
    generator: tuple[Quaternion, ...]
    eigenvalue: Quaternion

    def real_span(self) -> list[tuple[Fraction, ...]]:
        return line_span(self.generator)

    def contains(self, w: Sequence[Quaternion]) -> bool:
        k = next(i for i, x in enumerate(self.generator) if x)
        mu = self.generator[k].inverse() * w[k]
        return all(g * mu == x for g, x in zip(self.generator, w))


def _normalize_line(v: Sequence[Quaternion]) -> tuple[Quaternion, ...]:
    k = next(i for i, x in enumerate(v) if x)
    inv = v[k].inverse()
    return tuple(x * inv for x in v)


def minimal_polynomial(A: RatMatrix) -> list[Fraction]:
    """Monic minimal polynomial coefficients, highest degree first."""
    n = A.rows
    ech = Echelon(n * n)
    powers = [RatMatrix.identity(n)]
    while True:
        flat = {k: x for k, x in enumerate(powers[-1].entries) if x}
        if not ech.add(flat):
            break
        powers.append(powers[-1] @ A)
    d = len(powers) - 1
    cols = [p.entries for p in powers]
    rows = [{j: cols[j][k] for j in range(d + 1) if cols[j][k]} for k in range(n * n)]
    (rel,) = sparse_kernel(rows, d + 1)
    lead = rel[d]
    return [c / lead for c in reversed(rel)]


def _poly_eval(coeffs: Sequence, A: RatMatrix) -> RatMatrix:
    out = RatMatrix.zeros(A.rows)
    eye = RatMatrix.identity(A.rows)
    for c in coeffs:
        out = out @ A + eye * c
    return out


def rational_factors(coeffs: Sequence[Fraction]) -> list[tuple[list[Fraction], int]]:
    """Irreducible factors over Q of a polynomial (monic), with multiplicities."""
    x = sympy.Symbol("x")
    poly = sympy.Poly([sympy.Rational(c.numerator, c.denominator) for c in coeffs], x, domain="QQ")
    _, facs = poly.factor_list()
    out = []
    for f, mult in facs:
        f = f.monic()
        out.append(([Fraction(int(c.p), int(c.q)) for c in f.all_coeffs()], mult))
    return out


def split_eigenlines(op: QuatMatrix) -> list[EigenLine]:
    """The two invariant H-lines of a 2x2 operator whose realification is
    semisimple with minimal polynomial splitting over Q into two coprime
    factors with 4-dimensional kernels. In that situation they are the only
    invariant H-lines. Ordered by decreasing real part of the eigenvalue."""
    if (op.rows, op.cols) != (2, 2):
        raise ValueError("expected a 2x2 quaternionic matrix")
    A = realify(op)
    facs = rational_factors(minimal_polynomial(A))
    if len(facs) != 2 or any(m != 1 for _, m in facs):
        raise NotSplitError(f"minimal polynomial factors as {facs}")
    lines = []
    for f, _ in facs:
        ker = sparse_kernel(_poly_eval(f, A).sparse_rows(), 8)
        if len(ker) != 4:
            raise NotSplitError(f"primary component of dimension {len(ker)}")
        v = _normalize_line(real_to_vec(ker[0]))
        k = next(i for i, x in enumerate(v) if x)
        image = op.apply(v)
        lam = image[k]
        if image != tuple(x * lam for x in v):
            raise NotSplitError("primary component is not an eigenline")
        lines.append(EigenLine(v, lam))
    lines.sort(key=lambda L: (-L.eigenvalue.a, L.eigenvalue.norm2()))
    return lines


def quat_eigenlines(op: QuatMatrix) -> list[EigenLine]:
    """Invariant quaternionic lines decomposing H^2 under a 2x2 operator.

    Uses :func:`split_eigenlines`; a diagonal operator that does not split
    that way (e.g. diag(i, j), whose entries are similar) falls back to the
    coordinate lines.
    """
    try:
        return split_eigenlines(op)
    except NotSplitError:
        if op.is_diagonal():
            return [EigenLine((ONE, Quaternion()), op[0, 0]), EigenLine((Quaternion(), ONE), op[1, 1])]
        raise
