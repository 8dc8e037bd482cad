"""Quaternionic irreducibility of matrix Lie algebras on realified H^{1,n}.

A real subspace invariant under the generators and under J1, J2, J3 is an
H-subspace, so H-irreducibility is ordinary irreducibility of the associative
algebra generated by the generators together with the hypercomplex triple.

Two deciding routes, both producing checkable certificates:

* ``eigenline``: for n = 1, a generator whose realification splits over Q into
  two primary components has exactly two invariant H-lines; every invariant
  H-line of the algebra is one of them, so testing both is exhaustive.
* ``norton``: build a singular algebra element theta = 1 - e, with e an
  idempotent obtained by repeatedly splitting along rational primary
  decompositions, whose kernel N has the dimension of the commutant C (checked to be a division algebra over R, so
  N = C v0 and every non-zero vector of N spins to the same module). If v0
  spins to everything and some w0 in ker(theta^T) spins to the whole dual
  module, no proper submodule exists.
"""
from __future__ import annotations

import random

import sympy
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

from .exactlin import (
    Echelon,
    RatMatrix,
    commutator,
    signature,
    solve,
    span_rank,
    sparse_kernel,
)
from .quatrep import (
    GeneratorCatalogEntry,
    NotSplitError,
    _poly_eval,
    minimal_polynomial,
    rational_factors,
    split_eigenlines,
)

MAX_QUAT_DIM_PARAM = 3


class ScopeError(ValueError):
    pass


class UndecidedError(RuntimeError):
    pass


def _sparse(v: Sequence[Fraction]) -> dict[int, Fraction]:
    return {k: x for k, x in enumerate(v) if x}


def spin_ops(v: Sequence[Fraction], ops: Sequence[RatMatrix]) -> list[tuple[Fraction, ...]]:
    """Smallest subspace containing v and closed under ``ops`` (reduced basis)."""
    n = len(v)
    if not any(v):
        raise ValueError("cannot spin the zero vector")
    ech = Echelon(n)
    ech.add(_sparse(v))
    queue = [tuple(Fraction(x) for x in v)]
    while queue:
        w = queue.pop()
        for X in ops:
            img = X.apply(w)
            if any(img) and ech.add(_sparse(img)):
                queue.append(img)
    return ech.basis()


def algebra_ops(algebra: GeneratorCatalogEntry) -> list[RatMatrix]:
    return list(algebra.generators) + list(algebra.ambient.J)


def spin(v: Sequence[Fraction], algebra: GeneratorCatalogEntry) -> list[tuple[Fraction, ...]]:
    """Smallest H-subspace containing v that is invariant under the algebra."""
    if len(v) != algebra.dim:
        raise ValueError(f"vector has length {len(v)}, space has dim {algebra.dim}")
    return spin_ops(v, algebra_ops(algebra))


def is_invariant(basis: Sequence[Sequence[Fraction]], ops: Sequence[RatMatrix]) -> bool:
    if not basis:
        return True
    ech = Echelon(len(basis[0]))
    for b in basis:
        ech.add(_sparse(b))
    return all(ech.contains(_sparse(X.apply(b))) for X in ops for b in basis)


@dataclass
class ModuleCertificate:
    verdict: str
    method: str
    algebra: str
    dim: int
    witness: list[tuple[Fraction, ...]] = field(default_factory=list)
    trace: list[dict] = field(default_factory=list)
    seed: int | None = None

    @property
    def irreducible(self) -> bool:
        return self.verdict == "irreducible"

    def to_json(self) -> dict:
        return {
            "verdict": self.verdict,
            "method": self.method,
            "algebra": self.algebra,
            "dim": self.dim,
            "seed": self.seed,
            "witness": [[str(x) for x in w] for w in self.witness],
            "trace": _jsonable(self.trace),
        }


def _jsonable(obj):
    if isinstance(obj, Fraction):
        return str(obj)
    if isinstance(obj, RatMatrix):
        return [[str(x) for x in r] for r in obj.tolist()]
    if isinstance(obj, dict):
        return {k: _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    return obj


def _reducible(algebra, method, witness, trace, seed=None) -> ModuleCertificate:
    return ModuleCertificate("reducible", method, algebra.name, algebra.dim, list(witness), trace, seed)


# --- commutant --------------------------------------------------------------------------


def commutant(ops: Sequence[RatMatrix], d: int) -> list[RatMatrix]:
    """Basis of {C : C X = X C for all X in ops}."""
    rows = []
    for X in ops:
        for i in range(d):
            for j in range(d):
                # (C X - X C)_{ij} = sum_k C_ik X_kj - X_ik C_kj
                r: dict[int, Fraction] = {}
                for k in range(d):
                    if X[k, j]:
                        r[i * d + k] = r.get(i * d + k, 0) + X[k, j]
                    if X[i, k]:
                        r[k * d + j] = r.get(k * d + j, 0) - X[i, k]
                r = {k: v for k, v in r.items() if v}
                if r:
                    rows.append(r)
    return [RatMatrix(d, d, v) for v in sparse_kernel(rows, d * d)]


def _coords_in(basis: Sequence[RatMatrix], M: RatMatrix) -> tuple[Fraction, ...] | None:
    B = RatMatrix(len(M.entries), len(basis), [b.entries[k] for k in range(len(M.entries)) for b in basis])
    return solve(B, M.entries)


def division_check(C: Sequence[RatMatrix]) -> dict:
    """Decide whether the real span of the commutant is a division algebra
    (R, C or H) from exact data."""
    d = C[0].rows
    eye = RatMatrix.identity(d)
    dim = len(C)
    if dim == 1:
        return {"dim": 1, "type": "R", "division": True}
    if dim == 2:
        c = next(b for b in C if span_rank([b.entries, eye.entries], d * d) == 2)
        coeffs = _coords_in([eye, c], c @ c)
        p, q = coeffs
        disc = q * q + 4 * p
        return {"dim": 2, "type": "C" if disc < 0 else "split", "division": disc < 0,
                "square_relation": [str(p), str(q)], "discriminant": str(disc)}
    if dim == 4:
        # pure part: trace-free elements
        rows = [{k: b.trace() for k, b in enumerate(C) if b.trace()}]
        pure = [sum((b * x for b, x in zip(C, v) if x), RatMatrix.zeros(d)) for v in sparse_kernel(rows, 4)]
        gram = [[None] * len(pure) for _ in pure]
        for i, a in enumerate(pure):
            for j, b in enumerate(pure):
                s = a @ b + b @ a
                lam = s[0, 0]
                if s != eye * lam:
                    return {"dim": 4, "type": "non-quaternion", "division": False}
                gram[i][j] = -lam / 2
        sig = signature(RatMatrix.from_rows(gram))
        return {"dim": 4, "type": "H" if sig == (3, 0, 0) else "split", "division": sig == (3, 0, 0),
                "pure_signature": list(sig)}
    return {"dim": dim, "type": "none", "division": False}


# --- eigenline route ------------------------------------------------------------------


def _eigenline_route(algebra: GeneratorCatalogEntry) -> ModuleCertificate | None:
    gens = algebra.generators
    for idx, q in enumerate(algebra.quat_generators):
        try:
            lines = split_eigenlines(q)
        except NotSplitError:
            continue
        label = algebra.labels[idx]
        trace = [{"step": "split", "generator": label,
                  "lines": [[str(x) for x in L.generator] for L in lines],
                  "eigenvalues": [str(L.eigenvalue) for L in lines]}]
        for L in lines:
            span = L.real_span()
            breaker = next((algebra.labels[g] for g, X in enumerate(gens) if not is_invariant(span, [X])), None)
            trace.append({"step": "line", "line": [str(x) for x in L.generator], "broken_by": breaker})
            if breaker is None:
                return _reducible(algebra, "eigenline", span, trace)
        return ModuleCertificate("irreducible", "eigenline", algebra.name, algebra.dim, [], trace)
    return None


# --- Norton route ----------------------------------------------------------------------


def _candidate_specs(nops: int, seed: int, max_tries: int):
    """Deterministic stream of algebra elements, each a list of (coefficient, word)
    where a word is a tuple of operator indices."""
    for i in range(nops):
        yield [(1, (i,))]
    for i in range(nops):
        for j in range(nops):
            yield [(1, (i, j))]
    rng = random.Random(seed)
    for _ in range(max_tries):
        terms = []
        for _ in range(rng.randint(2, 3)):
            word = tuple(rng.randrange(nops) for _ in range(rng.randint(1, 3)))
            terms.append((rng.choice([-2, -1, 1, 2]), word))
        yield terms


def _build(spec, ops: Sequence[RatMatrix]) -> RatMatrix:
    d = ops[0].rows
    out = RatMatrix.zeros(d)
    for coef, word in spec:
        w = ops[word[0]]
        for k in word[1:]:
            w = w @ ops[k]
        out = out + w * Fraction(coef)
    return out


def _primary_idempotent(x: RatMatrix, factor: Sequence[Fraction], mult: int,
                        minpoly: Sequence[Fraction]) -> RatMatrix:
    """Projection onto ker f(x)^mult along the other primary components, as a
    polynomial in x."""
    t = sympy.Symbol("t")
    m = sympy.Poly([sympy.Rational(c.numerator, c.denominator) for c in minpoly], t, domain="QQ")
    g = sympy.Poly([sympy.Rational(c.numerator, c.denominator) for c in factor], t, domain="QQ") ** mult
    h = sympy.exquo(m, g)
    s_, u_, one = sympy.gcdex(g, h)
    assert one == 1
    e = (u_ * h).rem(m)
    coeffs = [Fraction(int(c.p), int(c.q)) for c in e.all_coeffs()]
    return _poly_eval(coeffs, x)


def _refine_step(e: RatMatrix, b: RatMatrix, rank_e: int):
    """Try to split the idempotent e using the element e b e; return the
    smallest proper primary piece as (idempotent, rank, factor, mult)."""
    d = e.rows
    x = e @ b @ e
    mp = minimal_polynomial(x)
    facs = rational_factors(mp)
    if len(facs) < 2:
        return None
    best = None
    for f, mult in facs:
        pi = _primary_idempotent(x, f, mult, mp)
        r = d - len(sparse_kernel(pi.sparse_rows(), d))
        if 0 < r < rank_e and (best is None or r < best[1]):
            best = (pi, r, f, mult)
    return best


def _replay(recipe: Sequence[dict], ops: Sequence[RatMatrix]) -> RatMatrix:
    d = ops[0].rows
    e = RatMatrix.identity(d)
    for step in recipe:
        x = e @ _build(step["element"], ops) @ e
        mp = minimal_polynomial(x)
        f = [Fraction(c) for c in step["factor"]]
        e = _primary_idempotent(x, f, step["mult"], mp)
    return RatMatrix.identity(d) - e


def _find_theta(ops: Sequence[RatMatrix], target: int, seed: int, max_tries: int):
    """Build theta = 1 - e with e an idempotent of the algebra of rank ``target``
    by successive refinement along primary decompositions of e b e."""
    d = ops[0].rows
    e = RatMatrix.identity(d)
    rank_e = d
    recipe: list[dict] = []
    for spec in _candidate_specs(len(ops), seed, max_tries):
        if rank_e <= target:
            break
        got = _refine_step(e, _build(spec, ops), rank_e)
        if got is None:
            continue
        e, rank_e, f, mult = got
        recipe.append({"element": [[c, list(w)] for c, w in spec],
                       "factor": [str(c) for c in f], "mult": mult, "rank": rank_e})
    if rank_e != target:
        return None, recipe
    return RatMatrix.identity(d) - e, recipe


def _norton_route(algebra: GeneratorCatalogEntry, seed: int, max_tries: int) -> ModuleCertificate:
    d = algebra.dim
    ops = algebra_ops(algebra)
    trace: list[dict] = []
    # cheap witness search: spins of the standard basis
    for k in range(d):
        e = [Fraction(int(i == k)) for i in range(d)]
        s = spin_ops(e, ops)
        if len(s) < d:
            trace.append({"step": "spin-basis-vector", "index": k, "dim": len(s)})
            return _reducible(algebra, "norton", s, trace, seed)
    trace.append({"step": "spin-basis-vectors", "all_full": True})

    C = commutant(ops, d)
    div = division_check(C)
    trace.append({"step": "commutant", **div})
    if not div["division"]:
        for c in C:
            ker = sparse_kernel(c.sparse_rows(), d)
            if 0 < len(ker) < d:
                witness = spin_ops(ker[0], ops)
                trace.append({"step": "singular-commutant-element", "kernel_dim": len(ker)})
                return _reducible(algebra, "norton", witness, trace, seed)
        raise UndecidedError(f"commutant of {algebra.name} is not a division algebra and no rational witness found")

    theta, recipe = _find_theta(ops, div["dim"], seed, max_tries)
    if theta is None:
        raise UndecidedError(f"no singular element of nullity {div['dim']} found in {max_tries} tries")
    N = sparse_kernel(theta.sparse_rows(), d)
    v0 = N[0]
    s = spin_ops(v0, ops)
    trace.append({"step": "theta", "recipe": recipe, "nullity": len(N),
                  "v0": [str(x) for x in v0], "spin_dim": len(s)})
    if len(s) < d:
        return _reducible(algebra, "norton", s, trace, seed)
    w0 = sparse_kernel(theta.T.sparse_rows(), d)[0]
    sd = spin_ops(w0, [X.T for X in ops])
    trace.append({"step": "dual", "w0": [str(x) for x in w0], "spin_dim": len(sd)})
    if len(sd) < d:
        ann = sparse_kernel([_sparse(u) for u in sd], d)
        return _reducible(algebra, "norton", ann, trace, seed)
    return ModuleCertificate("irreducible", "norton", algebra.name, d, [], trace, seed)


def is_H_irreducible(algebra: GeneratorCatalogEntry, seed: int = 0, max_tries: int = 200) -> ModuleCertificate:
    """Decide H-irreducibility, returning a certificate."""
    if algebra.n > MAX_QUAT_DIM_PARAM:
        raise ScopeError(f"n={algebra.n} exceeds the supported bound n <= {MAX_QUAT_DIM_PARAM}")
    if algebra.n == 1:
        cert = _eigenline_route(algebra)
        if cert is not None:
            return cert
    return _norton_route(algebra, seed, max_tries)


def verify_certificate(cert: ModuleCertificate, algebra: GeneratorCatalogEntry) -> bool:
    """Re-check a certificate by exact computation independent of its search."""
    d = algebra.dim
    ops = algebra_ops(algebra)
    if cert.verdict == "reducible":
        w = cert.witness
        return 0 < span_rank(w, d) < d and is_invariant(w, ops)
    if cert.method == "eigenline":
        split = cert.trace[0]
        idx = algebra.labels.index(split["generator"])
        lines = split_eigenlines(algebra.quat_generators[idx])
        for L in lines:
            span = L.real_span()
            if all(is_invariant(span, [X]) for X in algebra.generators):
                return False
        return True
    steps = {s["step"]: s for s in cert.trace}
    div = division_check(commutant(ops, d))
    if not div["division"]:
        return False
    # rebuilding theta from its recipe shows it lies in the algebra
    theta = _replay(steps["theta"]["recipe"], ops)
    v0 = [Fraction(x) for x in steps["theta"]["v0"]]
    w0 = [Fraction(x) for x in steps["dual"]["w0"]]
    N = sparse_kernel(theta.sparse_rows(), d)
    return (
        len(N) == div["dim"]
        and not any(theta.apply(v0))
        and not any(theta.T.apply(w0))
        and len(spin_ops(v0, ops)) == d
        and len(spin_ops(w0, [X.T for X in ops])) == d
    )


# --- Killing form -----------------------------------------------------------------------


class DependentGeneratorsError(ValueError):
    pass


@dataclass(frozen=True)
class KillingResult:
    dim: int
    signature: tuple[int, int, int]
    form: RatMatrix
    structure_constants: tuple

    @property
    def nondegenerate(self) -> bool:
        return self.signature[2] == 0


def structure_constants(gens: Sequence[RatMatrix]) -> list[list[tuple[Fraction, ...]]]:
    """c[i][j] = coordinates of [X_i, X_j] in the generator basis."""
    k = len(gens)
    if not k:
        return []
    size = len(gens[0].entries)
    if span_rank([g.entries for g in gens], size) != k:
        raise DependentGeneratorsError("generators are linearly dependent")
    B = RatMatrix(size, k, [g.entries[r] for r in range(size) for g in gens])
    out = [[None] * k for _ in range(k)]
    for i in range(k):
        for j in range(k):
            if j < i:
                out[i][j] = tuple(-x for x in out[j][i])
                continue
            c = solve(B, commutator(gens[i], gens[j]).entries)
            if c is None:
                raise ValueError(f"[X{i}, X{j}] leaves the span: not a Lie algebra")
            out[i][j] = c
    return out


def killing_form_from_constants(c) -> RatMatrix:
    k = len(c)
    # ad_i[l][m] = c[i][m][l]
    return RatMatrix.from_rows([
        [sum((c[i][m][l] * c[j][l][m] for l in range(k) for m in range(k) if c[i][m][l] and c[j][l][m]),
             Fraction(0)) for j in range(k)]
        for i in range(k)
    ])


def killing_signature(algebra) -> KillingResult:
    """Killing form trace(ad X ad Y) on the span of the generators."""
    gens = algebra.generators if isinstance(algebra, GeneratorCatalogEntry) else list(algebra)
    c = structure_constants(gens)
    form = killing_form_from_constants(c)
    return KillingResult(len(gens), signature(form), form, tuple(tuple(r) for r in c))
