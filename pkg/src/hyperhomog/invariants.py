"""Induced Lie algebra actions on tensor spaces and exact invariant subspaces.

A tensor space is a product of *blocks*; each block is a tensor, alternating
or symmetric power of one base space (or of its dual). Alternating and
symmetric blocks use monomial bases indexed by sorted index tuples: the
coordinate of a tensor at a sorted tuple is its component at that tuple.

Spec strings (CLI grammar)::

    spec    := factor ('*' factor)*
    factor  := [kind degree ':'] ['dual'] space
    kind    := 'T' (tensor power) | 'L' (alternating) | 'S' (symmetric)
    space   := a bound name such as V or W, or an inline descriptor

Space descriptors::

    descriptor := atom ('x' atom)*
    atom       := 'R(1,' n ')' | 'R1' digit      Minkowski space, so(1,n) acts
                | 'R(' k ')' | 'R' k             trivial R^k
                | 'H(1,' n ')' | 'H1' digit      realified H^{1,n}

For example ``L2:dualV*W`` with ``V=R12xR4`` and ``W=R12xR5``.
"""
from __future__ import annotations

import re
from dataclasses import dataclass
from fractions import Fraction
from itertools import combinations, combinations_with_replacement, product
from math import comb, factorial, prod
from typing import Mapping, Sequence

from .exactlin import DimensionError, Echelon, RatMatrix, solve
from .quatrep import GeneratorCatalogEntry

KINDS = ("tensor", "alt", "sym")


@dataclass(frozen=True)
class Space:
    name: str
    dim: int


@dataclass(frozen=True)
class Block:
    space: Space
    degree: int
    kind: str = "tensor"
    dual: bool = False

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ValueError(f"unknown block kind {self.kind!r}")
        if self.degree < 1:
            raise ValueError("block degree must be positive")

    @property
    def dim(self) -> int:
        n, k = self.space.dim, self.degree
        if self.kind == "tensor":
            return n ** k
        if self.kind == "alt":
            return comb(n, k)
        return comb(n + k - 1, k)

    def basis(self) -> list[tuple[int, ...]]:
        r = range(self.space.dim)
        if self.kind == "tensor":
            return list(product(r, repeat=self.degree))
        if self.kind == "alt":
            return list(combinations(r, self.degree))
        return list(combinations_with_replacement(r, self.degree))

    def __str__(self) -> str:
        head = {"tensor": "T", "alt": "L", "sym": "S"}[self.kind]
        return f"{head}{self.degree}:{'dual' if self.dual else ''}{self.space.name}"


class TensorSpaceSpec:
    """Ordered product of blocks with an explicit coordinate basis."""

    def __init__(self, blocks: Sequence[Block]):
        if not blocks:
            raise ValueError("empty tensor space")
        self.blocks = tuple(blocks)
        self._block_bases = [b.basis() for b in self.blocks]
        self._block_index = [{t: i for i, t in enumerate(bb)} for bb in self._block_bases]

    @property
    def dim(self) -> int:
        return prod(b.dim for b in self.blocks)

    @property
    def spaces(self) -> dict[str, Space]:
        return {b.space.name: b.space for b in self.blocks}

    def basis(self) -> list[tuple[tuple[int, ...], ...]]:
        return list(product(*self._block_bases))

    def index(self, key: Sequence[Sequence[int]]) -> int:
        idx = 0
        for bi, part in zip(self._block_index, key):
            idx = idx * len(bi) + bi[tuple(part)]
        return idx

    def key(self, index: int) -> tuple[tuple[int, ...], ...]:
        parts = []
        for bb in reversed(self._block_bases):
            index, r = divmod(index, len(bb))
            parts.append(bb[r])
        return tuple(reversed(parts))

    def coords_from_components(self, component) -> tuple[Fraction, ...]:
        """Coordinates of a tensor given as a function of its flat index tuple."""
        out = []
        for key in self.basis():
            flat = tuple(i for part in key for i in part)
            out.append(Fraction(component(flat)))
        return tuple(out)

    def component(self, coords: Sequence[Fraction], flat: Sequence[int]):
        """Full component of the tensor with given coordinates at a flat index."""
        sign = Fraction(1)
        parts, pos = [], 0
        for b in self.blocks:
            part = tuple(flat[pos:pos + b.degree])
            pos += b.degree
            if b.kind == "alt":
                if len(set(part)) < b.degree:
                    return Fraction(0)
                sign *= _perm_sign(part)
                part = tuple(sorted(part))
            elif b.kind == "sym":
                part = tuple(sorted(part))
            parts.append(part)
        return sign * coords[self.index(parts)]

    def __eq__(self, other) -> bool:
        return isinstance(other, TensorSpaceSpec) and self.blocks == other.blocks

    def __hash__(self) -> int:
        return hash(self.blocks)

    def __str__(self) -> str:
        return "*".join(str(b) for b in self.blocks)


def _perm_sign(seq: Sequence[int]) -> int:
    s = 1
    seq = list(seq)
    for i in range(len(seq)):
        for j in range(i + 1, len(seq)):
            if seq[i] > seq[j]:
                s = -s
    return s


def _multiplicity(t: Sequence[int]) -> int:
    out = 1
    for v in set(t):
        out *= factorial(t.count(v))
    return out


def _block_action(block: Block, X: RatMatrix) -> dict[int, dict[int, Fraction]]:
    """Sparse columns {input basis index: {output basis index: value}}."""
    n = block.space.dim
    if X.shape != (n, n):
        raise DimensionError(f"operator {X.shape} does not act on {block.space.name} (dim {n})")
    # A[j][i]: coefficient of basis vector j in the image of basis vector i
    if block.dual:
        A = [{j: -X[i, j] for j in range(n) if X[i, j]} for i in range(n)]
    else:
        A = [{j: X[j, i] for j in range(n) if X[j, i]} for i in range(n)]
    index = {t: k for k, t in enumerate(block.basis())}
    cols = {}
    for t, k in index.items():
        col: dict[int, Fraction] = {}
        mult_t = _multiplicity(t) if block.kind == "sym" else 1
        for m, i in enumerate(t):
            for j, a in A[i].items():
                new = t[:m] + (j,) + t[m + 1:]
                coef = a
                if block.kind == "alt":
                    if len(set(new)) < len(new):
                        continue
                    coef = a * _perm_sign(new)
                    new = tuple(sorted(new))
                elif block.kind == "sym":
                    coef = a * Fraction(_multiplicity(new), mult_t)
                    new = tuple(sorted(new))
                r = index[new]
                v = col.get(r, 0) + coef
                if v:
                    col[r] = v
                else:
                    col.pop(r, None)
        cols[k] = col
    return cols


def _as_mapping(X, spec: TensorSpaceSpec) -> dict[str, RatMatrix]:
    if isinstance(X, RatMatrix):
        return {name: X for name in spec.spaces}
    missing = set(spec.spaces) - set(X)
    if missing:
        raise DimensionError(f"no action given for spaces {sorted(missing)}")
    return dict(X)


def induced_rows(X, spec: TensorSpaceSpec) -> list[dict[int, Fraction]]:
    """Sparse rows of the induced operator (a derivation of the tensor algebra)."""
    ops = _as_mapping(X, spec)
    block_cols = [_block_action(b, ops[b.space.name]) for b in spec.blocks]
    sizes = [b.dim for b in spec.blocks]
    strides = [prod(sizes[i + 1:]) for i in range(len(sizes))]
    rows: list[dict[int, Fraction]] = [dict() for _ in range(spec.dim)]
    for col in range(spec.dim):
        rem, parts = col, []
        for s in strides:
            q, rem = divmod(rem, s)
            parts.append(q)
        for bi, bcols in enumerate(block_cols):
            base = col - parts[bi] * strides[bi]
            for r, v in bcols[parts[bi]].items():
                out = base + r * strides[bi]
                row = rows[out]
                nv = row.get(col, 0) + v
                if nv:
                    row[col] = nv
                else:
                    row.pop(col, None)
    return rows


def induced_operator(X, spec: TensorSpaceSpec) -> RatMatrix:
    """Matrix of the induced action of X on the tensor space.

    ``X`` is one matrix (used on every base space) or a mapping from base
    space names to matrices. Covariant slots act by ``-X^T``, contravariant
    slots by ``X``.
    """
    rows = induced_rows(X, spec)
    data = {(i, j): v for i, r in enumerate(rows) for j, v in r.items()}
    return RatMatrix.from_sparse(spec.dim, spec.dim, data)


def apply_induced(X, spec: TensorSpaceSpec, coords: Sequence[Fraction]) -> tuple[Fraction, ...]:
    if len(coords) != spec.dim:
        raise DimensionError("coordinate vector does not match the tensor space")
    rows = induced_rows(X, spec)
    return tuple(sum((v * coords[j] for j, v in r.items() if coords[j]), Fraction(0)) for r in rows)


# --- algebra actions -----------------------------------------------------------------


@dataclass(frozen=True)
class AlgebraAction:
    """A Lie algebra given by generators, acting on named base spaces."""

    label: str
    ngens: int
    ops: Mapping[str, tuple[RatMatrix, ...]]

    def generator(self, g: int) -> dict[str, RatMatrix]:
        return {name: mats[g] for name, mats in self.ops.items()}

    def space(self, name: str) -> Space:
        return Space(name, self.ops[name][0].rows if self.ngens else 0)


def kron_sum(ops_a: Sequence[RatMatrix], ops_b: Sequence[RatMatrix]) -> tuple[RatMatrix, ...]:
    out = []
    for A, B in zip(ops_a, ops_b):
        ia, ib = RatMatrix.identity(A.rows), RatMatrix.identity(B.rows)
        out.append(A.kron(ib) + ia.kron(B))
    return tuple(out)


class SpecParseError(ValueError):
    def __init__(self, message: str, text: str, position: int):
        self.text, self.position = text, position
        super().__init__(f"{message} at position {position}\n  {text}\n  {' ' * position}^")


_ATOM_RES = [
    ("mink", re.compile(r"R\(1,(\d+)\)")),
    ("quat", re.compile(r"H\(1,(\d+)\)")),
    ("triv", re.compile(r"R\((\d+)\)")),
    ("mink", re.compile(r"R1(\d)(?![0-9])")),
    ("quat", re.compile(r"H1(\d)(?![0-9])")),
    ("triv", re.compile(r"R(\d+)")),
]


def parse_descriptor(text: str) -> list[tuple[str, int]]:
    """Parse a space descriptor into atoms ``(kind, parameter)``."""
    atoms, pos = [], 0
    text = text.strip()
    if not text:
        raise SpecParseError("empty space descriptor", text, 0)
    while True:
        for kind, rx in _ATOM_RES:
            m = rx.match(text, pos)
            if m:
                atoms.append((kind, int(m.group(1))))
                pos = m.end()
                break
        else:
            raise SpecParseError("expected R(1,n), R1n, R(k), Rk, H(1,n) or H1n", text, pos)
        if pos == len(text):
            return atoms
        if text[pos] != "x":
            raise SpecParseError("expected 'x' between factors", text, pos)
        pos += 1


def descriptor_dim(atoms: Sequence[tuple[str, int]]) -> int:
    sizes = {"mink": lambda n: n + 1, "triv": lambda k: k, "quat": lambda n: 4 * n + 4}
    return prod(sizes[k](p) for k, p in atoms)


def action_on_descriptor(entry: GeneratorCatalogEntry, atoms: Sequence[tuple[str, int]]) -> tuple[RatMatrix, ...]:
    """Generator matrices of ``entry`` on the space described by ``atoms``."""
    ng = len(entry.generators)
    result: tuple[RatMatrix, ...] | None = None
    for kind, p in atoms:
        if kind == "triv":
            mats = tuple(RatMatrix.zeros(p) for _ in range(ng))
        elif kind == "quat":
            if p != entry.n:
                raise DimensionError(f"{entry.name} acts on H(1,{entry.n}), not H(1,{p})")
            mats = entry.generators
        else:
            if p != entry.n:
                raise DimensionError(f"{entry.name} acts on R(1,{entry.n}), not R(1,{p})")
            mats = []
            for q in entry.quat_generators:
                if any(x.b or x.c or x.d for row in q.entries for x in row):
                    raise DimensionError(f"{entry.name} is not real; it does not act on R(1,{p})")
                mats.append(RatMatrix.from_rows([[x.a for x in row] for row in q.entries]))
            mats = tuple(mats)
        result = mats if result is None else kron_sum(result, mats)
    return result


def make_action(entry: GeneratorCatalogEntry, spaces: Mapping[str, str]) -> AlgebraAction:
    ops = {name: action_on_descriptor(entry, parse_descriptor(desc)) for name, desc in spaces.items()}
    return AlgebraAction(entry.name, len(entry.generators), ops)


_FACTOR_RE = re.compile(r"(?:(?P<kind>[TLS])(?P<deg>\d+):)?(?P<dual>dual)?(?P<space>[A-Za-z0-9(),]+)")


def parse_spec(text: str, spaces: Mapping[str, str | int] | None = None) -> TensorSpaceSpec:
    """Parse a spec string. ``spaces`` binds names to descriptors or dimensions;
    unbound names are read as inline descriptors."""
    spaces = dict(spaces or {})
    blocks, pos = [], 0
    if not text.strip():
        raise SpecParseError("empty spec", text, 0)
    while True:
        m = _FACTOR_RE.match(text, pos)
        if not m or m.end() == pos:
            raise SpecParseError("expected a factor like L2:dualV", text, pos)
        name = m.group("space")
        if name in spaces:
            bound = spaces[name]
            dim = bound if isinstance(bound, int) else descriptor_dim(parse_descriptor(bound))
        else:
            try:
                dim = descriptor_dim(parse_descriptor(name))
            except SpecParseError as exc:
                raise SpecParseError(f"unknown space {name!r}", text, m.start("space") + exc.position) from None
            spaces[name] = name
        kind = {"T": "tensor", "L": "alt", "S": "sym", None: "tensor"}[m.group("kind")]
        deg = int(m.group("deg") or 1)
        if deg == 0:
            raise SpecParseError("degree must be positive", text, m.start("deg"))
        if kind == "alt" and deg > dim:
            raise SpecParseError(f"alternating degree {deg} exceeds dimension {dim}", text, m.start("deg"))
        blocks.append(Block(Space(name, dim), deg, kind, bool(m.group("dual"))))
        pos = m.end()
        if pos == len(text):
            return TensorSpaceSpec(blocks)
        if text[pos] != "*":
            raise SpecParseError("expected '*' between factors", text, pos)
        pos += 1


# --- invariant subspaces -------------------------------------------------------------


@dataclass(frozen=True)
class InvariantBasis:
    spec: TensorSpaceSpec
    algebra: str
    vectors: tuple[tuple[Fraction, ...], ...]

    @property
    def dim(self) -> int:
        return len(self.vectors)


def invariant_basis(action: AlgebraAction, spec: TensorSpaceSpec, strategy: str = "stacked",
                    order: Sequence[int] | None = None) -> InvariantBasis:
    """Exact basis of the tensors annihilated by every generator.

    Annihilation by the Lie algebra certifies invariance under the connected
    group it generates.
    """
    for name, space in spec.spaces.items():
        if name not in action.ops:
            raise DimensionError(f"algebra does not act on space {name!r}")
        if action.ngens and action.ops[name][0].rows != space.dim:
            raise DimensionError(f"space {name!r} has dim {space.dim}, action has {action.ops[name][0].rows}")
    order = list(range(action.ngens)) if order is None else list(order)
    n = spec.dim
    if strategy == "stacked":
        ech = Echelon(n)
        for g in order:
            for r in induced_rows(action.generator(g), spec):
                if r:
                    ech.add(r)
        vectors = ech.kernel()
    elif strategy == "iterative":
        basis = None  # None means the whole space
        for g in order:
            rows = induced_rows(action.generator(g), spec)
            if basis is None:
                ech = Echelon(n)
                for r in rows:
                    if r:
                        ech.add(r)
                basis = ech.kernel()
            else:
                images = [[sum((v * b[j] for j, v in r.items() if b[j]), Fraction(0)) for r in rows] for b in basis]
                ech = Echelon(len(basis))
                for k in range(n):
                    row = {i: img[k] for i, img in enumerate(images) if img[k]}
                    if row:
                        ech.add(row)
                basis = [tuple(sum((c[i] * basis[i][k] for i in range(len(basis)) if c[i]), Fraction(0))
                               for k in range(n)) for c in ech.kernel()]
            if not basis:
                break
        if basis is None:
            basis = [tuple(Fraction(int(i == j)) for j in range(n)) for i in range(n)]
        from .exactlin import canonical_span

        vectors = canonical_span(basis, n)
    else:
        raise ValueError(f"unknown strategy {strategy!r}")
    return InvariantBasis(spec, action.label, tuple(vectors))


@dataclass(frozen=True)
class Membership:
    member: bool
    coefficients: tuple[Fraction, ...] | None
    residual: tuple[Fraction, ...]


def membership(t: Sequence[Fraction], basis: InvariantBasis, spec: TensorSpaceSpec | None = None) -> Membership:
    """Decompose ``t`` in the invariant basis, or certify that it lies outside."""
    if spec is not None and spec != basis.spec:
        raise DimensionError("tensor lives in a different space than the basis")
    n = basis.spec.dim
    if len(t) != n:
        raise DimensionError(f"tensor has {len(t)} coordinates, space has {n}")
    t = tuple(Fraction(x) for x in t)
    r = basis.dim
    if r == 0:
        return Membership(not any(t), () if not any(t) else None, t)
    B = RatMatrix(n, r, [basis.vectors[j][i] for i in range(n) for j in range(r)])
    c = solve(B, t)
    if c is not None:
        return Membership(True, c, tuple(Fraction(0) for _ in range(n)))
    gram = B.T @ B
    y = solve(gram, B.T.apply(t))
    proj = B.apply(y)
    return Membership(False, None, tuple(a - b for a, b in zip(t, proj)))
