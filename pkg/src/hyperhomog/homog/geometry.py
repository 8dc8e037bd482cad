"""Base-point geometry of a reductive model: Kaehler forms, Nijenhuis tensors,
the Levi-Civita Nomizu map, curvature and intrinsic torsion.

Tensors on m are returned as nested tuples indexed by m-basis indices:
3-forms as ``T[i][j][k]``, vector-valued 2-forms as ``T[i][j] -> vector``,
endomorphism-valued maps as lists of :class:`RatMatrix` (``L[i]`` for the
basis vector ``i``).
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from functools import cached_property
from typing import Sequence

from ..exactlin import RatMatrix, commutator
from ..invariants import AlgebraAction, TensorSpaceSpec, apply_induced, parse_spec
from .model import M_DIM, ReductiveModel, _unit

ZERO = Fraction(0)
BASIS = tuple(_unit(M_DIM, i) for i in range(M_DIM))


def _dot(u: Sequence, v: Sequence) -> Fraction:
    return sum((a * b for a, b in zip(u, v) if a and b), ZERO)


def _col_matrix(columns: Sequence[Sequence[Fraction]]) -> RatMatrix:
    n = len(columns)
    return RatMatrix(n, n, [columns[j][i] for i in range(n) for j in range(n)])


class Geometry:
    """Lazily computed geometric tensors of one model."""

    def __init__(self, model: ReductiveModel):
        self.model = model
        self.g = model.metric
        self.eta = tuple(model.metric[i, i] for i in range(M_DIM))  # the metric is diagonal

    # brackets on basis vectors
    def br_m(self, i: int, j: int) -> tuple[Fraction, ...]:
        return self.model.mm_m[i][j]

    def br_h(self, i: int, j: int) -> tuple[Fraction, ...]:
        return self.model.mm_h[i][j]

    def gdot(self, u: Sequence, v: Sequence) -> Fraction:
        return sum((e * a * b for e, a, b in zip(self.eta, u, v) if a and b), ZERO)

    # --- Kaehler forms -----------------------------------------------------------------

    def omega(self, alpha: int) -> RatMatrix:
        """omega_alpha(X, Y) = g(J_alpha X, Y) as a matrix."""
        J = self.model.J[alpha - 1]
        return J.T @ self.g

    def d_omega(self, alpha: int) -> tuple:
        om = self.omega(alpha)
        n = M_DIM

        def w(u, k):  # omega(u, e_k)
            return sum((u[p] * om[p, k] for p in range(n) if u[p]), ZERO)

        out = [[[ZERO] * n for _ in range(n)] for _ in range(n)]
        for i in range(n):
            for j in range(n):
                for k in range(n):
                    if len({i, j, k}) < 3:
                        continue
                    # -w([X,Y],Z) - w([Y,Z],X) - w([Z,X],Y)
                    out[i][j][k] = -(w(self.br_m(i, j), k) + w(self.br_m(j, k), i) + w(self.br_m(k, i), j))
        return tuple(tuple(tuple(r) for r in plane) for plane in out)

    # --- Nijenhuis -----------------------------------------------------------------------

    def nijenhuis(self, alpha: int) -> tuple:
        J = self.model.J[alpha - 1]
        Jb = [J.col(i) for i in range(M_DIM)]
        bm = self.model.bracket_m
        out = [[None] * M_DIM for _ in range(M_DIM)]
        for i in range(M_DIM):
            for j in range(M_DIM):
                a = bm(Jb[i], Jb[j])
                b = J.apply(bm(Jb[i], BASIS[j]))
                c = J.apply(bm(BASIS[i], Jb[j]))
                d = self.br_m(i, j)
                out[i][j] = tuple(p - q - r - s for p, q, r, s in zip(a, b, c, d))
        return tuple(tuple(r) for r in out)

    # --- Levi-Civita ---------------------------------------------------------------------

    @cached_property
    def nomizu(self) -> tuple[RatMatrix, ...]:
        """Lambda(e_i) as matrices; Lambda(X)Y = [X,Y]_m / 2 + U(X,Y)."""
        n = M_DIM
        half = Fraction(1, 2)
        mats = []
        for i in range(n):
            cols = []
            for j in range(n):
                col = []
                for k in range(n):
                    # 2 g(U(X,Y), Z) = g([Z,X]_m, Y) + g(X, [Z,Y]_m), with g diagonal
                    gu = half * (self.gdot(self.br_m(k, i), BASIS[j]) + self.gdot(BASIS[i], self.br_m(k, j)))
                    col.append(half * self.br_m(i, j)[k] + gu / self.eta[k])
                cols.append(col)
            mats.append(_col_matrix(cols))
        return tuple(mats)

    def lam(self, X: Sequence) -> RatMatrix:
        out = RatMatrix.zeros(M_DIM)
        for i, x in enumerate(X):
            if x:
                out = out + self.nomizu[i] * x
        return out

    @cached_property
    def nabla_J(self) -> tuple[tuple[RatMatrix, ...], ...]:
        """nabla_J[alpha-1][i] = matrix of (nabla_{e_i} J_alpha)."""
        return tuple(tuple(commutator(L, J) for L in self.nomizu) for J in self.model.J)

    @cached_property
    def curvature(self) -> tuple[tuple[RatMatrix, ...], ...]:
        """R[i][j] = [Lambda_i, Lambda_j] - Lambda([e_i,e_j]_m) - ad_m([e_i,e_j]_h)."""
        n = M_DIM
        R = [[None] * n for _ in range(n)]
        for i in range(n):
            for j in range(n):
                if j < i:
                    R[i][j] = -R[j][i]
                    continue
                R[i][j] = (commutator(self.nomizu[i], self.nomizu[j])
                           - self.lam(self.br_m(i, j)) - self.model.ad_m_of_h(self.br_h(i, j)))
        return tuple(tuple(r) for r in R)

    @cached_property
    def intrinsic_torsion(self) -> tuple[RatMatrix, ...]:
        """S_X = -1/4 sum_alpha J_alpha (nabla_X J_alpha)."""
        out = []
        for i in range(M_DIM):
            acc = RatMatrix.zeros(M_DIM)
            for a, J in enumerate(self.model.J):
                acc = acc + J @ self.nabla_J[a][i]
            out.append(acc * Fraction(-1, 4))
        return tuple(out)

    # --- predicates ----------------------------------------------------------------------

    def is_symmetric(self) -> bool:
        return self.model.is_symmetric()

    def is_flat(self) -> bool:
        return all(R.is_zero() for row in self.curvature for R in row)

    def is_hyperkaehler(self) -> bool:
        return all(M.is_zero() for per_alpha in self.nabla_J for M in per_alpha)


# --- module-level API ------------------------------------------------------------------------


def d_omega(model: ReductiveModel, alpha: int) -> tuple:
    _check_alpha(alpha)
    return Geometry(model).d_omega(alpha)


def nijenhuis(model: ReductiveModel, alpha: int) -> tuple:
    _check_alpha(alpha)
    return Geometry(model).nijenhuis(alpha)


def _check_alpha(alpha: int):
    if alpha not in (1, 2, 3):
        raise ValueError(f"alpha must be 1, 2 or 3, got {alpha}")


@dataclass(frozen=True)
class NomizuResult:
    nomizu: tuple[RatMatrix, ...]
    nabla_J: tuple[tuple[RatMatrix, ...], ...]
    curvature: tuple[tuple[RatMatrix, ...], ...]
    is_symmetric: bool
    is_flat: bool
    is_hyperkaehler: bool


def nomizu(model: ReductiveModel) -> NomizuResult:
    geo = Geometry(model)
    return NomizuResult(geo.nomizu, geo.nabla_J, geo.curvature,
                        geo.is_symmetric(), geo.is_flat(), geo.is_hyperkaehler())


@dataclass(frozen=True)
class TorsionReport:
    S: tuple[RatMatrix, ...]
    metric_skew: bool
    preserves_J: tuple[bool, bool, bool]

    @property
    def compatible(self) -> bool:
        return self.metric_skew and all(self.preserves_J)


def intrinsic_torsion(model: ReductiveModel) -> TorsionReport:
    geo = Geometry(model)
    S = geo.intrinsic_torsion
    g = model.metric
    skew = all((Sx.T @ g + g @ Sx).is_zero() for Sx in S)
    pres = tuple(
        all((geo.nabla_J[a][i] + commutator(S[i], J)).is_zero() for i in range(M_DIM))
        for a, J in enumerate(model.J)
    )
    return TorsionReport(S, skew, pres)


@dataclass(frozen=True)
class KNResult:
    """Outcome of fitting 4 g((nabla_X J)Y, Z) = c (dw(X,JY,JZ) - dw(X,Y,Z)) + g(N(Y,Z), JX)."""

    status: str                    # "determined", "indeterminate" or "inconsistent"
    c: Fraction | None
    nonzero_residuals: int
    triples_checked: int
    first_failure: tuple | None = None


def _kn_terms(geo: Geometry, alpha: int):
    J = geo.model.J[alpha - 1]
    dw = geo.d_omega(alpha)
    N = geo.nijenhuis(alpha)
    nJ = geo.nabla_J[alpha - 1]
    n = M_DIM
    Jcols = [J.col(i) for i in range(n)]

    def dw_eval(i, u, v):  # dw(e_i, u, v), u, v vectors
        plane = dw[i]
        return sum((u[j] * v[k] * plane[j][k] for j in range(n) if u[j] for k in range(n) if v[k]), ZERO)

    for i in range(n):
        for j in range(n):
            for k in range(n):
                lhs = 4 * geo.gdot(nJ[i].col(j), BASIS[k])
                a = dw_eval(i, Jcols[j], Jcols[k]) - dw[i][j][k]
                b = geo.gdot(N[j][k], Jcols[i])
                yield (i, j, k), lhs, a, b


def kn_consistency(model: ReductiveModel) -> KNResult:
    """Find the constant c relating nabla J to d(omega) and N, then verify it
    on every basis triple and every alpha."""
    geo = Geometry(model)
    data = [(alpha, t, lhs, a, b) for alpha in (1, 2, 3) for t, lhs, a, b in _kn_terms(geo, alpha)]
    c = None
    for alpha, t, lhs, a, b in data:
        if a:
            c = (lhs - b) / a
            break
    bad = []
    for alpha, t, lhs, a, b in data:
        r = lhs - b - (c or 0) * a
        if r:
            bad.append((alpha, t, r))
    if c is None:
        status = "indeterminate" if not bad else "inconsistent"
    else:
        status = "determined" if not bad else "inconsistent"
    return KNResult(status, c, len(bad), len(data), bad[0] if bad else None)


def kn_fit(model: ReductiveModel) -> tuple[Fraction, Fraction] | None:
    """Best two-constant fit 4 g((nabla_X J)Y, Z) = c (dw terms) + e g(N(Y,Z), JX):
    the pair (c, e) if one exists exactly, else None."""
    from ..exactlin import solve

    geo = Geometry(model)
    rows, rhs = [], []
    for alpha in (1, 2, 3):
        for _, lhs, a, b in _kn_terms(geo, alpha):
            if a or b or lhs:
                rows.append((a, b))
                rhs.append(lhs)
    if not rows:
        return None
    M = RatMatrix(len(rows), 2, [x for r in rows for x in r])
    sol = solve(M, rhs)
    return None if sol is None else (sol[0], sol[1])


# --- export into tensor spaces ---------------------------------------------------------------

SPECS = {
    "d_omega": "L3:dualV",
    "nijenhuis": "L2:dualV*V",
    "curvature": "L2:dualV*T1:dualV*V",
    "torsion": "T1:dualV*T1:dualV*V",
}


def tensor_spec(kind: str) -> TensorSpaceSpec:
    return parse_spec(SPECS[kind], {"V": "R12xR4"})


def tensor_coords(kind: str, tensor) -> tuple[Fraction, ...]:
    """Coordinates of a geometric tensor in its tensor space (see ``SPECS``)."""
    spec = tensor_spec(kind)
    if kind == "d_omega":
        return spec.coords_from_components(lambda f: tensor[f[0]][f[1]][f[2]])
    if kind == "nijenhuis":
        return spec.coords_from_components(lambda f: tensor[f[0]][f[1]][f[2]])
    if kind == "curvature":
        return spec.coords_from_components(lambda f: tensor[f[0]][f[1]][f[3], f[2]])
    if kind == "torsion":
        return spec.coords_from_components(lambda f: tensor[f[0]][f[2], f[1]])
    raise ValueError(f"unknown tensor kind {kind!r}")


def isotropy_action(model: ReductiveModel) -> AlgebraAction:
    """so(1,2) = h acting on V = m through ad."""
    return AlgebraAction("h", len(model.ad_h), {"V": tuple(model.ad_h)})


def invariance_residual(model: ReductiveModel, kind: str, tensor) -> int:
    """Number of nonzero coordinates of h . tensor over the three h-generators."""
    spec = tensor_spec(kind)
    coords = tensor_coords(kind, tensor)
    action = isotropy_action(model)
    return sum(sum(1 for v in apply_induced(action.generator(a), spec, coords) if v)
               for a in range(action.ngens))
