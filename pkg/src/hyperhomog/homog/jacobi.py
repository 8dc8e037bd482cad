"""The Jacobi identity for beta as a system of quadratic polynomials.

Variables are the 50 coefficients of beta in :meth:`BetaTensor.vector` order.
Only triples of m-vectors produce equations: triples meeting h hold for every
beta because K is so(1,2)-equivariant and h acts trivially on the R^5 factor.
That fact is checked separately by :func:`h_jacobi_check`.
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from itertools import combinations
from typing import Sequence

from ..exactlin import commutator, RatMatrix
from .model import (
    BetaTensor,
    FIBER_DIM,
    G_DIM,
    H_BASIS,
    H_DIM,
    MINK_DIM,
    M_DIM,
    PAIRS,
    ReductiveModel,
    TARGET_DIM,
    _unit,
    mink_cross,
)

_PAIR_INDEX = {p: k for k, p in enumerate(PAIRS)}


def beta_variable(i: int, j: int, t: int) -> int:
    return _PAIR_INDEX[(min(i, j), max(i, j))] * TARGET_DIM + t


class Poly:
    """Sparse polynomial over Q; monomials are sorted tuples of variable indices."""

    __slots__ = ("terms",)

    def __init__(self, terms=None):
        self.terms: dict[tuple[int, ...], Fraction] = {}
        for mono, c in (terms or {}).items():
            if c:
                self.terms[tuple(sorted(mono))] = Fraction(c)

    @classmethod
    def var(cls, k: int) -> "Poly":
        return cls({(k,): 1})

    def __bool__(self) -> bool:
        return bool(self.terms)

    def __add__(self, other: "Poly") -> "Poly":
        out = dict(self.terms)
        for m, c in other.terms.items():
            v = out.get(m, 0) + c
            if v:
                out[m] = v
            else:
                out.pop(m, None)
        p = Poly()
        p.terms = out
        return p

    def scale(self, s) -> "Poly":
        s = Fraction(s)
        p = Poly()
        if s:
            p.terms = {m: c * s for m, c in self.terms.items()}
        return p

    def __mul__(self, other: "Poly") -> "Poly":
        out: dict[tuple[int, ...], Fraction] = {}
        for m1, c1 in self.terms.items():
            for m2, c2 in other.terms.items():
                m = tuple(sorted(m1 + m2))
                out[m] = out.get(m, 0) + c1 * c2
        return Poly(out)

    @property
    def degree(self) -> int:
        return max((len(m) for m in self.terms), default=-1)

    def evaluate(self, values: Sequence[Fraction]) -> Fraction:
        total = Fraction(0)
        for mono, c in self.terms.items():
            v = c
            for k in mono:
                v *= values[k]
                if not v:
                    break
            total += v
        return total

    def __eq__(self, other) -> bool:
        return isinstance(other, Poly) and self.terms == other.terms

    def __repr__(self) -> str:
        if not self.terms:
            return "0"
        parts = []
        for mono, c in sorted(self.terms.items()):
            parts.append(f"{c}" + "".join(f"*B{k}" for k in mono))
        return " + ".join(parts)


def _zero_vec(n: int) -> list[Poly]:
    return [Poly() for _ in range(n)]


def _symbolic_mm(i: int, j: int) -> list[Poly]:
    """[m_i, m_j] as a g-vector of polynomials linear in beta."""
    a, p = divmod(i, FIBER_DIM)
    b, q = divmod(j, FIBER_DIM)
    out = _zero_vec(G_DIM)
    if a == b:
        return out
    k = mink_cross(_unit(3, a), _unit(3, b))
    for c in range(MINK_DIM):
        if not k[c]:
            continue
        out[c] = out[c] + Poly.var(beta_variable(p, q, 0)).scale(k[c])
        for t in range(1, TARGET_DIM):
            idx = H_DIM + c * FIBER_DIM + (t - 1)
            out[idx] = out[idx] + Poly.var(beta_variable(p, q, t)).scale(k[c])
    return out


def _bracket_with_m(u: Sequence[Poly], j: int, mm) -> list[Poly]:
    """[u, m_j] for a symbolic g-vector u."""
    out = _zero_vec(G_DIM)
    b, q = divmod(j, FIBER_DIM)
    for d in range(H_DIM):
        if u[d]:
            # h_d acting on e_b (x) b_q
            col = mink_cross(_unit(3, d), _unit(3, b))
            for c in range(MINK_DIM):
                if col[c]:
                    idx = H_DIM + c * FIBER_DIM + q
                    out[idx] = out[idx] + u[d].scale(col[c])
    for i in range(M_DIM):
        coef = u[H_DIM + i]
        if not coef:
            continue
        for k, poly in enumerate(mm[i][j]):
            if poly:
                out[k] = out[k] + coef * poly
    return out


@dataclass(frozen=True)
class JacobiEquation:
    triple: tuple[int, int, int]
    component: int
    poly: Poly


@dataclass(frozen=True)
class JacobiSystem:
    equations: tuple[JacobiEquation, ...]

    def __len__(self) -> int:
        return len(self.equations)


@lru_cache(maxsize=1)
def jacobi_system() -> JacobiSystem:
    """Jacobiator components over all m-basis triples i < j < k, nonzero ones only."""
    mm = [[_symbolic_mm(i, j) for j in range(M_DIM)] for i in range(M_DIM)]
    eqs = []
    for i, j, k in combinations(range(M_DIM), 3):
        total = _zero_vec(G_DIM)
        for x, y, z in ((i, j, k), (j, k, i), (k, i, j)):
            part = _bracket_with_m(mm[x][y], z, mm)
            total = [s + t for s, t in zip(total, part)]
        for comp, poly in enumerate(total):
            if poly:
                eqs.append(JacobiEquation((i, j, k), comp, poly))
    return JacobiSystem(tuple(eqs))


@dataclass(frozen=True)
class JacobiResidual:
    values: tuple[Fraction, ...]
    failures: tuple[tuple[tuple[int, int, int], int, Fraction], ...]

    @property
    def ok(self) -> bool:
        return not self.failures


def jacobi_residual(beta: BetaTensor) -> JacobiResidual:
    vals = beta.vector()
    system = jacobi_system()
    values, failures = [], []
    for eq in system.equations:
        v = eq.poly.evaluate(vals)
        values.append(v)
        if v:
            failures.append((eq.triple, eq.component, v))
    return JacobiResidual(tuple(values), tuple(failures))


def jacobi_bruteforce(model: ReductiveModel, include_h: bool = True) -> list[tuple[tuple[int, int, int], tuple]]:
    """Direct check over g-basis triples from the structure constants; returns failures."""
    failures = []
    basis = [_unit(G_DIM, p) for p in range(G_DIM)]
    start = 0 if include_h else H_DIM
    for p, q, r in combinations(range(start, G_DIM), 3):
        X, Y, Z = basis[p], basis[q], basis[r]
        total = [Fraction(0)] * G_DIM
        for u, v, w in ((X, Y, Z), (Y, Z, X), (Z, X, Y)):
            for k, c in enumerate(model.lie_bracket(model.lie_bracket(u, v), w)):
                total[k] += c
        if any(total):
            failures.append(((p, q, r), tuple(total)))
    return failures


def h_jacobi_check() -> dict[str, Fraction]:
    """Residuals of the identities that make h-involving Jacobi triples hold for every beta:
    x -> K(x, .) is a Lie algebra map and K is equivariant under h."""
    hom = Fraction(0)
    for a in range(H_DIM):
        for b in range(H_DIM):
            lhs = commutator(H_BASIS[a], H_BASIS[b])
            z = mink_cross(_unit(3, a), _unit(3, b))
            rhs = sum((H_BASIS[c] * z[c] for c in range(3)), RatMatrix.zeros(3))
            hom += sum(abs(v) for v in (lhs - rhs).entries)
    equi = Fraction(0)
    for a in range(H_DIM):
        X = H_BASIS[a]
        for c in range(3):
            for d in range(3):
                x, y = _unit(3, c), _unit(3, d)
                lhs = X.apply(mink_cross(x, y))
                r1 = mink_cross(X.apply(x), y)
                r2 = mink_cross(x, X.apply(y))
                equi += sum(abs(l - s - t) for l, s, t in zip(lhs, r1, r2))
    return {"homomorphism": hom, "equivariance": equi}
