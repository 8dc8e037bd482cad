from fractions import Fraction
from itertools import permutations, product

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from hyperhomog.exactlin import DimensionError, RatMatrix, commutator, kernel_basis, rank
from hyperhomog.invariants import (
    SpecParseError,
    apply_induced,
    induced_operator,
    invariant_basis,
    make_action,
    membership,
    parse_descriptor,
    parse_spec,
)
from hyperhomog.quatrep import catalog

from strategies import rat_matrices


def _eigenspace_dim(A: RatMatrix, lam) -> int:
    return len(kernel_basis(A - RatMatrix.diag([lam] * A.rows)))


# --- spec parsing ---------------------------------------------------------------

def test_parse_dimensions():
    assert parse_spec("T3:dualV", {"V": 4}).dim == 64
    assert parse_spec("L3:dualV", {"V": "R12xR4"}).dim == 220
    assert parse_spec("S2:dualV*W", {"V": 4, "W": 5}).dim == 50
    assert parse_spec("L2:dualV*V", {"V": "R(1,2)xR(4)"}).dim == 66 * 12
    assert parse_spec("L2:dualH11").dim == 28


def test_parse_descriptor():
    assert parse_descriptor("R12xR4") == [("mink", 2), ("triv", 4)]
    assert parse_descriptor("H(1,3)") == [("quat", 3)]


@pytest.mark.parametrize("text,position", [
    ("L2:dualV#V", 8),
    ("L2:dualV*", 9),
    ("", 0),
    ("L0:dualV", 1),
    ("L5:dualV", 1),
])
def test_parse_errors_carry_position(text, position):
    with pytest.raises(SpecParseError) as err:
        parse_spec(text, {"V": 4})
    assert err.value.position == position
    assert "^" in str(err.value)


def test_unknown_space_is_rejected():
    with pytest.raises(SpecParseError) as err:
        parse_spec("T2:dualQ", {"V": 4})
    assert err.value.position == 7


def test_bad_descriptor():
    with pytest.raises(SpecParseError) as err:
        parse_descriptor("R12xZ4")
    assert err.value.position == 4


# --- induced operators ----------------------------------------------------------

def test_zero_operator_induces_zero():
    spec = parse_spec("L2:dualV*S2:V", {"V": 3})
    assert induced_operator(RatMatrix.zeros(3), spec).is_zero()


@settings(max_examples=30, deadline=None)
@given(rat_matrices(rows=3, cols=3))
def test_trace_on_covariant_2_tensors(X):
    spec = parse_spec("T2:dualV", {"V": 3})
    A = induced_operator(X, spec)
    # Each of the two slots contributes -tr(X) once per value of the other index.
    assert A.trace() == -2 * 3 * X.trace()


def test_boost_on_covariant_3_tensors():
    boost = catalog("so(1,1)").quat_generators[0]
    X = RatMatrix.from_rows([[x.a for x in row] for row in boost.entries])
    A = induced_operator(X, parse_spec("T3:dualV", {"V": 2}))
    dims = {lam: _eigenspace_dim(A, lam) for lam in (3, 1, -1, -3)}
    assert dims == {3: 1, 1: 3, -1: 3, -3: 1}


@settings(max_examples=20, deadline=None)
@given(rat_matrices(rows=3, cols=3), rat_matrices(rows=3, cols=3),
       st.sampled_from(["T2:dualV*V", "T3:dualV", "L2:dualV*V", "S3:dualV", "L2:V*S2:dualV"]))
def test_induced_is_a_homomorphism(X, Y, text):
    spec = parse_spec(text, {"V": 3})
    lhs = induced_operator(commutator(X, Y), spec)
    assert lhs == commutator(induced_operator(X, spec), induced_operator(Y, spec))


def _embedding(kind: str, degree: int, dim: int) -> RatMatrix:
    """Monomial coordinates of the alternating or symmetric power into the full tensor power."""
    small = parse_spec(f"{kind}{degree}:dualV", {"V": dim})
    full = parse_spec(f"T{degree}:dualV", {"V": dim})
    data = {}
    for c in range(small.dim):
        (idx,) = small.key(c)
        for perm in set(permutations(range(degree))):
            target = tuple(idx[p] for p in perm)
            if kind == "L":
                inv = sum(1 for a in range(degree) for b in range(a + 1, degree) if perm[a] > perm[b])
                value = (-1) ** inv
            else:
                value = 1
            data[(full.index((target,)), c)] = Fraction(value)
    return RatMatrix.from_sparse(full.dim, small.dim, data)


@settings(max_examples=15, deadline=None)
@given(rat_matrices(rows=3, cols=3), st.sampled_from([("L", 2), ("L", 3), ("S", 2), ("S", 3)]))
def test_monomial_blocks_match_full_tensor_action(X, kd):
    kind, degree = kd
    E = _embedding(kind, degree, 3)
    full = induced_operator(X, parse_spec(f"T{degree}:dualV", {"V": 3}))
    small = induced_operator(X, parse_spec(f"{kind}{degree}:dualV", {"V": 3}))
    assert full @ E == E @ small


def test_apply_matches_matrix():
    spec = parse_spec("L2:dualV*V", {"V": 3})
    X = RatMatrix.from_rows([[1, 2, 0], [0, -1, 3], [Fraction(1, 2), 0, 0]])
    coords = tuple(Fraction(i % 5 - 2, 3) for i in range(spec.dim))
    assert apply_induced(X, spec, coords) == induced_operator(X, spec).apply(coords)


def test_dimension_mismatch():
    spec = parse_spec("T2:dualV", {"V": 3})
    with pytest.raises(DimensionError):
        apply_induced(RatMatrix.zeros(3), spec, (0,) * 8)
    with pytest.raises(DimensionError):
        induced_operator({"W": RatMatrix.zeros(3)}, spec)


# --- invariant bases ------------------------------------------------------------

@pytest.mark.parametrize("n", [3, 4])
def test_reduced_so1n_vanishing(n):
    action = make_action(catalog(f"so(1,{n})"), {"V": f"R(1,{n})"})
    assert invariant_basis(action, parse_spec("T3:dualV", {"V": f"R(1,{n})"})).dim == 0


@pytest.mark.parametrize("name,params", [
    ("so11", {}), ("so11+u1", {}), ("so11+sp1", {}),
    ("S", {"a": 1, "b": 1}), ("S", {"a": 1, "b": 2}), ("S", {"a": 3, "b": 5}),
])
def test_sp11_subalgebras_have_no_invariant_3_tensors(name, params):
    action = make_action(catalog(name, **params), {"V": "H11"})
    assert invariant_basis(action, parse_spec("T3:dualV", {"V": "H11"})).dim == 0


def test_metric_is_invariant_for_so12():
    spaces = {"V": "R12"}
    action = make_action(catalog("so12"), spaces)
    basis = invariant_basis(action, parse_spec("S2:dualV", spaces))
    assert basis.dim == 1
    # monomial order (00),(01),(02),(11),(12),(22): the form diag(-1,1,1) up to scale
    v = basis.vectors[0]
    assert [x / v[3] for x in v] == [-1, 0, 0, 1, 0, 1]


def test_volume_form_is_invariant_for_so12():
    spaces = {"V": "R12"}
    action = make_action(catalog("so12"), spaces)
    assert invariant_basis(action, parse_spec("L3:dualV", spaces)).dim == 1
    assert invariant_basis(action, parse_spec("L2:dualV", spaces)).dim == 0


@pytest.mark.parametrize("text,expected", [("L3:dualV", 20), ("L2:dualV*V", 40)])
def test_so12_invariant_dimensions(text, expected):
    spaces = {"V": "R12xR4"}
    action = make_action(catalog("so12"), spaces)
    assert invariant_basis(action, parse_spec(text, spaces)).dim == expected


@pytest.mark.slow
def test_so12_invariant_dimension_with_target_g():
    spaces = {"V": "R12xR4", "W": "R12xR5"}
    action = make_action(catalog("so12"), spaces)
    assert invariant_basis(action, parse_spec("L2:dualV*W", spaces)).dim == 50


@pytest.mark.parametrize("text,spaces,algebra", [
    ("L3:dualV", {"V": "R12xR2"}, "so12"),
    ("T2:dualV*V", {"V": "R12"}, "so12"),
    ("T3:dualV", {"V": "H11"}, "u_phi"),
    ("L2:dualV", {"V": "H11"}, "sp11"),
])
def test_strategy_and_order_independence(text, spaces, algebra):
    action = make_action(catalog(algebra), spaces)
    spec = parse_spec(text, spaces)
    reference = invariant_basis(action, spec)
    gens = list(range(action.ngens))
    for strategy, order in product(["stacked", "iterative"], [gens, gens[::-1]]):
        other = invariant_basis(action, spec, strategy=strategy, order=order)
        assert other.dim == reference.dim
        stacked = RatMatrix.from_rows(list(reference.vectors) + list(other.vectors)) if reference.dim else None
        if stacked is not None:
            assert rank(stacked) == reference.dim


def test_invariant_vectors_are_annihilated():
    spaces = {"V": "R12xR2"}
    action = make_action(catalog("so12"), spaces)
    spec = parse_spec("L3:dualV", spaces)
    basis = invariant_basis(action, spec)
    assert basis.dim > 0
    for g in range(action.ngens):
        for v in basis.vectors:
            assert not any(apply_induced(action.generator(g), spec, v))


def test_unknown_strategy():
    action = make_action(catalog("so12"), {"V": "R12"})
    with pytest.raises(ValueError):
        invariant_basis(action, parse_spec("T2:dualV", {"V": "R12"}), strategy="magic")


def test_real_action_requires_real_algebra():
    with pytest.raises(DimensionError):
        make_action(catalog("su12"), {"V": "R12"})


# --- membership -----------------------------------------------------------------

@pytest.fixture(scope="module")
def small_basis():
    spaces = {"V": "R12xR2"}
    action = make_action(catalog("so12"), spaces)
    return invariant_basis(action, parse_spec("L3:dualV", spaces))


def test_zero_tensor_membership(small_basis):
    m = membership((0,) * small_basis.spec.dim, small_basis)
    assert m.member and m.coefficients == (0,) * small_basis.dim


def test_basis_vector_membership(small_basis):
    for k, v in enumerate(small_basis.vectors):
        m = membership(v, small_basis)
        assert m.member
        assert m.coefficients == tuple(int(i == k) for i in range(small_basis.dim))


def test_rejection_has_nonzero_residual(small_basis):
    t = [Fraction(0)] * small_basis.spec.dim
    t[0] = Fraction(1)
    m = membership(t, small_basis)
    assert not m.member
    assert any(m.residual)
    assert m.coefficients is None


def test_membership_spec_mismatch(small_basis):
    with pytest.raises(DimensionError):
        membership((0,) * 3, small_basis)
    other = parse_spec("L3:dualV", {"V": 5})
    with pytest.raises(DimensionError):
        membership((0,) * other.dim, small_basis, spec=other)
