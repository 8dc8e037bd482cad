"""Lie algebras g = so(1,2) + R^{1,2} (x) R^4 defined by a symmetric tensor beta.

Basis conventions
-----------------
* ``h`` has basis ``h_a = K(e_a, .)`` (a = 0, 1, 2), the 3x3 matrices of the
  Lorentzian cross product. This fixes so(1,2) = R^{1,2} as Lie algebras.
* ``m`` has basis ``e_a (x) b_q`` at index ``4a + q`` (q = 0..3 for b_1..b_4),
  the same ordering as the realification of H^{1,2}.
* On ``g`` the h-basis comes first: g-index ``a`` for ``h_a``, ``3 + i`` for
  the m-basis vector ``i``.
* The bracket of m-vectors is ``[x (x) v, y (x) w] = K(x, y) (x) beta(v, w)``;
  the component along ``b_0`` lands in h through ``z -> sum_a z^a h_a``.
"""
from __future__ import annotations

import json
import random
from dataclasses import dataclass
from fractions import Fraction
from itertools import combinations_with_replacement
from pathlib import Path
from typing import Mapping, Sequence

from ..exactlin import RatMatrix, commutator, signature
from ..quatrep import hypercomplex_triple

ETA = (-1, 1, 1)
MINK_DIM = 3
FIBER_DIM = 4
TARGET_DIM = 5
M_DIM = MINK_DIM * FIBER_DIM
H_DIM = 3
G_DIM = H_DIM + M_DIM
PAIRS = tuple(combinations_with_replacement(range(FIBER_DIM), 2))
BETA_SIZE = len(PAIRS) * TARGET_DIM


class ModelError(ValueError):
    pass


def levi_civita(a: int, b: int, c: int) -> int:
    return (a - b) * (b - c) * (c - a) // 2


def mink_cross(x: Sequence, y: Sequence) -> tuple[Fraction, ...]:
    """K(x, y)^a = eta^{ab} eps_{bcd} x^c y^d with eta = diag(-1, 1, 1), eps_012 = 1."""
    x = [Fraction(v) for v in x]
    y = [Fraction(v) for v in y]
    return (
        ETA[0] * (x[1] * y[2] - x[2] * y[1]),
        ETA[1] * (x[2] * y[0] - x[0] * y[2]),
        ETA[2] * (x[0] * y[1] - x[1] * y[0]),
    )


def _unit(n: int, i: int) -> tuple[Fraction, ...]:
    return tuple(Fraction(int(k == i)) for k in range(n))


def cross_matrix(x: Sequence) -> RatMatrix:
    """Matrix of K(x, .) on R^{1,2}."""
    cols = [mink_cross(x, _unit(3, d)) for d in range(3)]
    return RatMatrix.from_rows([[cols[d][a] for d in range(3)] for a in range(3)])


H_BASIS = tuple(cross_matrix(_unit(3, a)) for a in range(3))


def m_index(a: int, q: int) -> int:
    return FIBER_DIM * a + q


# --- beta ------------------------------------------------------------------------------


class BetaTensor:
    """Symmetric beta in S^2(R^4)* (x) R^5, stored on sorted pairs."""

    __slots__ = ("_c",)

    def __init__(self, coefficients: Mapping[tuple[tuple[int, int], int], Fraction] | None = None):
        c: dict[tuple[tuple[int, int], int], Fraction] = {}
        for (pair, t), v in (coefficients or {}).items():
            i, j = pair
            if not (0 <= i < FIBER_DIM and 0 <= j < FIBER_DIM and 0 <= t < TARGET_DIM):
                raise ModelError(f"beta index out of range: {(pair, t)}")
            key = (tuple(sorted((i, j))), t)
            if key in c and c[key] != Fraction(v):
                raise ModelError(f"conflicting values for symmetric entry {key}")
            if Fraction(v):
                c[key] = Fraction(v)
        object.__setattr__(self, "_c", c)

    def __setattr__(self, name, value):
        raise AttributeError("BetaTensor is immutable")

    def __call__(self, i: int, j: int, t: int) -> Fraction:
        return self._c.get(((min(i, j), max(i, j)), t), Fraction(0))

    def vector(self) -> tuple[Fraction, ...]:
        """The 50 coefficients in the order (pair, target), pairs sorted."""
        return tuple(self(i, j, t) for (i, j) in PAIRS for t in range(TARGET_DIM))

    @classmethod
    def from_vector(cls, values: Sequence) -> "BetaTensor":
        if len(values) != BETA_SIZE:
            raise ModelError(f"expected {BETA_SIZE} coefficients, got {len(values)}")
        it = iter(values)
        return cls({(p, t): Fraction(next(it)) for p in PAIRS for t in range(TARGET_DIM)})

    def is_zero(self) -> bool:
        return not self._c

    def scaled(self, s) -> "BetaTensor":
        s = Fraction(s)
        return BetaTensor({k: v * s for k, v in self._c.items()})

    def nonzero(self) -> dict[tuple[tuple[int, int], int], Fraction]:
        return dict(self._c)

    def to_json(self) -> list[str]:
        return [str(v) for v in self.vector()]

    def __eq__(self, other) -> bool:
        return isinstance(other, BetaTensor) and self._c == other._c

    def __hash__(self) -> int:
        return hash(frozenset(self._c.items()))

    def __repr__(self) -> str:
        body = ", ".join(f"b{i + 1}*b{j + 1}->b{t}: {v}" for ((i, j), t), v in sorted(self._c.items()))
        return f"BetaTensor({body})"


def build_beta(ell: int, lambdas: Sequence) -> BetaTensor:
    """beta_0 = 0 and beta_i = lambda_i (b_i^*)^2 for i <= ell."""
    if not 1 <= ell <= 4:
        raise ModelError(f"ell must be in 1..4, got {ell}")
    lambdas = [Fraction(x) for x in lambdas]
    if len(lambdas) != ell:
        raise ModelError(f"expected {ell} values of lambda, got {len(lambdas)}")
    return BetaTensor({((i, i), i + 1): lam for i, lam in enumerate(lambdas)})


def random_beta(rng: random.Random, bound: int = 5) -> BetaTensor:
    """Dense symmetric beta with random nonzero rational coefficients."""
    vals = []
    for _ in range(BETA_SIZE):
        num = rng.choice([k for k in range(-bound, bound + 1) if k])
        vals.append(Fraction(num, rng.randint(1, bound)))
    return BetaTensor.from_vector(vals)


def load_beta(path: str | Path) -> BetaTensor:
    """Read a JSON list of 50 rational strings (pair-major, target-minor)."""
    data = json.loads(Path(path).read_text())
    if not isinstance(data, list):
        raise ModelError("beta file must contain a JSON list of 50 rational strings")
    try:
        vals = [Fraction(str(x)) for x in data]
    except (ValueError, ZeroDivisionError) as exc:
        raise ModelError(f"bad rational in beta file: {exc}") from None
    return BetaTensor.from_vector(vals)


# --- the model -------------------------------------------------------------------------


def _zero(n: int) -> tuple[Fraction, ...]:
    return tuple(Fraction(0) for _ in range(n))


@dataclass(frozen=True)
class ReductiveModel:
    beta: BetaTensor
    hh: tuple            # hh[a][b]: h-vector of [h_a, h_b]
    ad_h: tuple          # ad_h[a]: 12x12 matrix of h_a acting on m
    mm_h: tuple          # mm_h[i][j]: h-part of [m_i, m_j]
    mm_m: tuple          # mm_m[i][j]: m-part of [m_i, m_j]
    metric: RatMatrix
    J: tuple

    @property
    def dim(self) -> int:
        return M_DIM

    def bracket_m(self, X: Sequence, Y: Sequence) -> tuple[Fraction, ...]:
        out = [Fraction(0)] * M_DIM
        for i, x in enumerate(X):
            if not x:
                continue
            row = self.mm_m[i]
            for j, y in enumerate(Y):
                if y:
                    for k, v in enumerate(row[j]):
                        if v:
                            out[k] += x * y * v
        return tuple(out)

    def bracket_h(self, X: Sequence, Y: Sequence) -> tuple[Fraction, ...]:
        out = [Fraction(0)] * H_DIM
        for i, x in enumerate(X):
            if not x:
                continue
            for j, y in enumerate(Y):
                if y:
                    for k, v in enumerate(self.mm_h[i][j]):
                        if v:
                            out[k] += x * y * v
        return tuple(out)

    def ad_m_of_h(self, z: Sequence) -> RatMatrix:
        out = RatMatrix.zeros(M_DIM)
        for a, c in enumerate(z):
            if c:
                out = out + self.ad_h[a] * c
        return out

    def structure_constants(self) -> list[list[tuple[Fraction, ...]]]:
        """c[p][q] = coordinates of [g_p, g_q] in the g-basis (h first)."""
        c = [[None] * G_DIM for _ in range(G_DIM)]
        for p in range(G_DIM):
            for q in range(G_DIM):
                if p < H_DIM and q < H_DIM:
                    c[p][q] = tuple(self.hh[p][q]) + _zero(M_DIM)
                elif p < H_DIM:
                    c[p][q] = _zero(H_DIM) + self.ad_h[p].col(q - H_DIM)
                elif q < H_DIM:
                    c[p][q] = _zero(H_DIM) + tuple(-x for x in self.ad_h[q].col(p - H_DIM))
                else:
                    i, j = p - H_DIM, q - H_DIM
                    c[p][q] = tuple(self.mm_h[i][j]) + tuple(self.mm_m[i][j])
        return c

    def lie_bracket(self, u: Sequence, v: Sequence) -> tuple[Fraction, ...]:
        """Bracket of two g-vectors (h-coordinates first)."""
        sc = self._sc()
        out = [Fraction(0)] * G_DIM
        for p, x in enumerate(u):
            if not x:
                continue
            for q, y in enumerate(v):
                if y:
                    for k, w in enumerate(sc[p][q]):
                        if w:
                            out[k] += x * y * w
        return tuple(out)

    def _sc(self):
        cache = self.__dict__.get("_sc_cache")
        if cache is None:
            cache = self.structure_constants()
            object.__setattr__(self, "_sc_cache", cache)
        return cache

    def is_symmetric(self) -> bool:
        """[m, m] lies in h."""
        return not any(v for row in self.mm_m for vec in row for v in vec)


def _metric() -> RatMatrix:
    return RatMatrix.diag([ETA[a] for a in range(MINK_DIM) for _ in range(FIBER_DIM)])


def _ad_h(a: int) -> RatMatrix:
    return H_BASIS[a].kron(RatMatrix.identity(FIBER_DIM))


def _mm_tables(beta: BetaTensor):
    mm_h = [[_zero(H_DIM)] * M_DIM for _ in range(M_DIM)]
    mm_m = [[_zero(M_DIM)] * M_DIM for _ in range(M_DIM)]
    for a in range(MINK_DIM):
        for b in range(MINK_DIM):
            if a == b:
                continue
            k = mink_cross(_unit(3, a), _unit(3, b))
            for p in range(FIBER_DIM):
                for q in range(FIBER_DIM):
                    i, j = m_index(a, p), m_index(b, q)
                    b0 = beta(p, q, 0)
                    mm_h[i][j] = tuple(b0 * kc for kc in k)
                    out = [Fraction(0)] * M_DIM
                    for t in range(1, TARGET_DIM):
                        bt = beta(p, q, t)
                        if bt:
                            for c in range(MINK_DIM):
                                out[m_index(c, t - 1)] += bt * k[c]
                    mm_m[i][j] = tuple(out)
    return tuple(map(tuple, mm_h)), tuple(map(tuple, mm_m))


def check_model(model: ReductiveModel) -> list[str]:
    """Return descriptions of violated model invariants (empty when valid)."""
    problems = []
    for a in range(H_DIM):
        for b in range(H_DIM):
            lhs = commutator(H_BASIS[a], H_BASIS[b])
            rhs = sum((H_BASIS[c] * model.hh[a][b][c] for c in range(H_DIM)), RatMatrix.zeros(3))
            if lhs != rhs:
                problems.append(f"[h{a}, h{b}] does not match so(1,2) structure constants")
            lhs = commutator(model.ad_h[a], model.ad_h[b])
            rhs = model.ad_m_of_h(model.hh[a][b])
            if lhs != rhs:
                problems.append(f"ad[h{a}, h{b}] on m is not a representation")
    if signature(model.metric) != (8, 4, 0):
        problems.append(f"metric signature {signature(model.metric)} is not (8, 4, 0)")
    J1, J2, J3 = model.J
    eye = RatMatrix.identity(M_DIM)
    for k, Jm in enumerate(model.J, 1):
        if Jm @ Jm != -eye:
            problems.append(f"J{k}^2 != -1")
        if Jm.T @ model.metric @ Jm != model.metric:
            problems.append(f"J{k} is not metric-orthogonal")
    if J1 @ J2 != J3:
        problems.append("J1 J2 != J3")
    for a, A in enumerate(model.ad_h):
        if A.T @ model.metric + model.metric @ A != RatMatrix.zeros(M_DIM):
            problems.append(f"ad(h{a}) is not metric-skew on m")
        for k, Jm in enumerate(model.J, 1):
            if A @ Jm != Jm @ A:
                problems.append(f"ad(h{a}) does not commute with J{k}")
    return problems


def assemble_model(beta: BetaTensor, check_jacobi: bool = True) -> ReductiveModel:
    """Structure constants, metric and hypercomplex triple for ``beta``."""
    hh = tuple(
        tuple(mink_cross(_unit(3, a), _unit(3, b)) for b in range(H_DIM)) for a in range(H_DIM)
    )
    mm_h, mm_m = _mm_tables(beta)
    model = ReductiveModel(
        beta=beta,
        hh=hh,
        ad_h=tuple(_ad_h(a) for a in range(H_DIM)),
        mm_h=mm_h,
        mm_m=mm_m,
        metric=_metric(),
        J=tuple(RatMatrix.identity(MINK_DIM).kron(Jq) for Jq in hypercomplex_triple(1)),
    )
    problems = check_model(model)
    if problems:
        raise ModelError("; ".join(problems))
    if check_jacobi:
        from .jacobi import jacobi_residual

        res = jacobi_residual(beta)
        if not res.ok:
            raise ModelError(f"beta violates the Jacobi identity, first failure at {res.failures[0]}")
    return model


def _h_coords(Z: RatMatrix) -> tuple[Fraction, ...]:
    from ..exactlin import solve

    B = RatMatrix(9, 3, [H_BASIS[a].entries[r] for r in range(9) for a in range(3)])
    c = solve(B, Z.entries)
    if c is None:
        raise ModelError("matrix is not in so(1,2)")
    return c


def direct_structure_constants(ell: int) -> list[list[tuple[Fraction, ...]]]:
    """Structure constants of so(1,2) + (ell copies of so(1,2) + R^{1,2} (x) R^{4-ell})
    built from 3x3 matrix commutators, in the g-basis of :class:`ReductiveModel`.

    The m-basis vector ``e_a (x) b_q`` with ``q < ell`` stands for the matrix
    ``K(e_a, .)`` in copy ``q``; h acts on copies by the adjoint action and on
    the remaining vectors by the standard action.
    """
    if not 1 <= ell <= 4:
        raise ModelError(f"ell must be in 1..4, got {ell}")

    def as_g(part: str, q: int, vec: Sequence[Fraction]) -> tuple[Fraction, ...]:
        out = [Fraction(0)] * G_DIM
        for a, v in enumerate(vec):
            out[a if part == "h" else H_DIM + m_index(a, q)] = v
        return tuple(out)

    zero = tuple(Fraction(0) for _ in range(G_DIM))
    c = [[zero] * G_DIM for _ in range(G_DIM)]
    for p in range(G_DIM):
        for r in range(G_DIM):
            if p < H_DIM and r < H_DIM:
                c[p][r] = as_g("h", 0, _h_coords(commutator(H_BASIS[p], H_BASIS[r])))
            elif p < H_DIM or r < H_DIM:
                sign = 1 if p < H_DIM else -1
                a_h, (b, qq) = (p, divmod(r - H_DIM, FIBER_DIM)) if p < H_DIM else (r, divmod(p - H_DIM, FIBER_DIM))
                if qq < ell:
                    vec = _h_coords(commutator(H_BASIS[a_h], H_BASIS[b]))
                else:
                    vec = H_BASIS[a_h].col(b)
                c[p][r] = as_g("m", qq, [sign * v for v in vec])
            else:
                a, q1 = divmod(p - H_DIM, FIBER_DIM)
                b, q2 = divmod(r - H_DIM, FIBER_DIM)
                if q1 == q2 < ell:
                    c[p][r] = as_g("m", q1, _h_coords(commutator(H_BASIS[a], H_BASIS[b])))
    return c
