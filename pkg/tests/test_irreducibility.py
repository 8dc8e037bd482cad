import json
from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from hyperhomog.exactlin import RatMatrix, span_rank
from hyperhomog.irreducibility import (
    DependentGeneratorsError,
    ScopeError,
    algebra_ops,
    commutant,
    division_check,
    is_H_irreducible,
    is_invariant,
    killing_signature,
    spin,
    verify_certificate,
)
from hyperhomog.quatrep import I, ONE, catalog, line_span, vec_to_real


def e(k, d=8):
    return tuple(Fraction(int(i == k)) for i in range(d))


# --- spin ------------------------------------------------------------------------

def test_spin_under_sp11_fills_the_space():
    assert len(spin(e(0), catalog("sp11"))) == 8
    assert len(spin(e(5), catalog("sp11"))) == 8


def test_spin_of_null_vector_under_S():
    W = spin(vec_to_real((ONE, ONE)), catalog("S", a=1, b=2))
    assert len(W) == 4
    assert span_rank(list(W) + line_span((ONE, ONE)), 8) == 4


def test_spin_under_zero_algebra_is_a_line():
    W = spin(e(4), catalog("zero", n=1))
    assert len(W) == 4
    assert span_rank(list(W) + line_span((0, ONE)), 8) == 4


def test_spin_is_a_fixed_point():
    alg = catalog("so(1,1)+u(1)")
    W = spin(e(0), alg)
    assert is_invariant(W, algebra_ops(alg))


def test_spin_rejects_zero_and_wrong_length():
    with pytest.raises(ValueError):
        spin((0,) * 8, catalog("u_phi"))
    with pytest.raises(ValueError):
        spin((1, 0, 0), catalog("u_phi"))


# --- verdicts -------------------------------------------------------------------------

def test_u_phi_is_irreducible():
    alg = catalog("u_phi")
    cert = is_H_irreducible(alg)
    assert cert.irreducible
    assert verify_certificate(cert, alg)


def test_S_is_reducible_along_a_null_line():
    alg = catalog("S", a=1, b=2)
    cert = is_H_irreducible(alg)
    assert cert.verdict == "reducible"
    assert verify_certificate(cert, alg)
    W = cert.witness
    assert len(W) == 4
    candidates = [line_span((ONE, ONE)), line_span((ONE, -ONE))]
    assert any(span_rank(list(W) + c, 8) == 4 for c in candidates)


def test_x_alone_leaves_its_eigenlines_invariant():
    alg = catalog("u_phi").restrict(["x"])
    cert = is_H_irreducible(alg)
    assert cert.verdict == "reducible"
    assert span_rank(list(cert.witness) + line_span((I, -ONE)), 8) == 4
    assert verify_certificate(cert, alg)


def test_y_breaks_the_eigenlines_of_x():
    alg = catalog("u_phi").restrict(["x", "y"])
    cert = is_H_irreducible(alg)
    assert cert.irreducible
    broken = [s["broken_by"] for s in cert.trace if s["step"] == "line"]
    assert broken == ["y", "y"]
    y = alg.generators[1]
    for line in [(I, -ONE), (I, ONE)]:
        assert not is_invariant(line_span(line), [y])


@pytest.mark.parametrize("name,n,expected", [
    ("so", 2, "irreducible"),
    ("su", 2, "irreducible"),
    ("u", 2, "irreducible"),
    ("sp", 2, "irreducible"),
    ("so11", 1, "reducible"),
    ("sp(1)", 1, "reducible"),
    ("u(1)", 2, "reducible"),
    ("sp", 1, "irreducible"),
])
def test_catalog_verdicts(name, n, expected):
    alg = catalog(name, n=n)
    cert = is_H_irreducible(alg)
    assert cert.verdict == expected
    assert verify_certificate(cert, alg)


@pytest.mark.slow
def test_sp13_is_irreducible():
    alg = catalog("sp", n=3)
    cert = is_H_irreducible(alg)
    assert cert.irreducible and verify_certificate(cert, alg)


def test_scope_bound():
    with pytest.raises(ScopeError):
        is_H_irreducible(catalog("so", n=4))


def test_tampered_certificates_are_rejected():
    alg = catalog("so12")
    cert = is_H_irreducible(alg)
    bad = cert.trace[:]
    for k, step in enumerate(bad):
        if step["step"] == "theta":
            bad[k] = dict(step, v0=["1"] + ["0"] * 11)
    from dataclasses import replace

    assert not verify_certificate(replace(cert, trace=bad), alg)
    reducible = replace(cert, verdict="reducible", witness=[e(0, 12)])
    assert not verify_certificate(reducible, alg)


def test_certificate_json_roundtrip():
    cert = is_H_irreducible(catalog("S", a=1, b=2))
    data = json.loads(json.dumps(cert.to_json()))
    assert data["verdict"] == "reducible"
    assert all(isinstance(x, str) for w in data["witness"] for x in w)


def test_commutant_of_irreducible_is_division():
    alg = catalog("so12")
    div = division_check(commutant(algebra_ops(alg), alg.dim))
    assert div["division"]


_SP11_LABELS = catalog("sp11").labels


@settings(max_examples=15, deadline=None)
@given(st.lists(st.sampled_from(_SP11_LABELS), min_size=1, max_size=4, unique=True),
       st.lists(st.sampled_from(_SP11_LABELS), min_size=1, max_size=3, unique=True))
def test_enlarging_generators_keeps_irreducibility(base, extra):
    full = catalog("sp11")
    small = full.restrict(base)
    large = full.restrict(base + [x for x in extra if x not in base])
    if is_H_irreducible(small).irreducible:
        assert is_H_irreducible(large).irreducible


# --- Killing form ---------------------------------------------------------------------

def test_killing_u_phi():
    k = killing_signature(catalog("u_phi"))
    assert k.dim == 6
    assert k.signature == (3, 3, 0)
    assert k.nondegenerate


def _ad(c, i):
    n = len(c)
    return RatMatrix.from_rows([[c[i][m][l] for m in range(n)] for l in range(n)])


def test_killing_so12_against_trace_oracle():
    k = killing_signature(catalog("so12"))
    assert k.signature == (2, 1, 0)
    c = k.structure_constants
    for i in range(3):
        for j in range(3):
            assert k.form[i, j] == (_ad(c, i) @ _ad(c, j)).trace()


def test_killing_abelian():
    assert killing_signature(catalog("so11+u1")).signature == (0, 0, 2)


def test_killing_rejects_dependent_generators():
    X = catalog("so12").generators[0]
    with pytest.raises(DependentGeneratorsError):
        killing_signature([X, X + X])
