"""Acceptance criteria 1-10. A per-criterion PASS/FAIL summary is printed at the
end of the pytest run (see ``conftest.py``)."""
import random
import time
from contextlib import contextmanager
from fractions import Fraction

import pytest

from hyperhomog.checks import random_lambdas
from hyperhomog.exactlin import span_rank
from hyperhomog.homog import (
    Geometry,
    assemble_model,
    build_beta,
    intrinsic_torsion,
    invariance_residual,
    jacobi_residual,
    kn_consistency,
    random_beta,
    tensor_coords,
    tensor_spec,
)
from hyperhomog.invariants import invariant_basis, make_action, membership, parse_spec
from hyperhomog.irreducibility import algebra_ops, is_H_irreducible, is_invariant, killing_signature, verify_certificate
from hyperhomog.quatrep import I, ONE, Quaternion, catalog, line_span, quat_eigenlines

from conftest import strip_timing

criterion = pytest.mark.criterion


@contextmanager
def budget(seconds):
    start = time.perf_counter()
    yield
    elapsed = time.perf_counter() - start
    assert elapsed <= seconds, f"took {elapsed:.1f} s, budget {seconds} s"


def _invariant_dim(algebra, spaces, text, **params):
    action = make_action(catalog(algebra, **params), spaces)
    return invariant_basis(action, parse_spec(text, spaces)).dim


# --- 1 -------------------------------------------------------------------------------

@criterion(1, "so(1,n) has no invariant 3-tensors on R^{1,n} for n = 3, 4")
@pytest.mark.parametrize("n", [3, 4])
def test_criterion_1(n):
    with budget(10):
        assert _invariant_dim(f"so(1,{n})", {"V": f"R(1,{n})"}, "T3:dualV") == 0


# --- 2 -------------------------------------------------------------------------------

@criterion(2, "the sp(1,1) subalgebras have no invariant 3-tensors on R^8")
def test_criterion_2():
    cases = [("so11", {}), ("so11+u1", {}), ("so11+sp1", {}),
             ("S", {"a": 1, "b": 1}), ("S", {"a": 1, "b": 2}), ("S", {"a": 3, "b": 5})]
    with budget(60):
        dims = {f"{name}{params}": _invariant_dim(name, {"V": "H11"}, "T3:dualV", **params)
                for name, params in cases}
    assert dims == {k: 0 for k in dims}


# --- 3 -------------------------------------------------------------------------------

@criterion(3, "so(1,2)-invariant dimensions 20 / 50 / 40")
def test_criterion_3():
    with budget(120):
        v = {"V": "R12xR4"}
        vw = {"V": "R12xR4", "W": "R12xR5"}
        dims = (_invariant_dim("so12", v, "L3:dualV"),
                _invariant_dim("so12", vw, "L2:dualV*W"),
                _invariant_dim("so12", v, "L2:dualV*V"))
    assert dims == (20, 50, 40)


# --- 4 -------------------------------------------------------------------------------

@criterion(4, "u_phi irreducible, Killing (3,3,0), S(1,2) reducible, eigenlines of x")
def test_criterion_4():
    with budget(10):
        u = catalog("u_phi")
        cert = is_H_irreducible(u)
        assert cert.irreducible and verify_certificate(cert, u)

        k = killing_signature(u)
        assert (k.dim, k.signature, k.nondegenerate) == (6, (3, 3, 0), True)

        s = catalog("S", a=1, b=2)
        cert = is_H_irreducible(s)
        assert cert.verdict == "reducible" and verify_certificate(cert, s)
        W = cert.witness
        assert span_rank(W, 8) == 4 and is_invariant(W, algebra_ops(s))

        plus, minus = quat_eigenlines(u.quat_generators[u.labels.index("x")])
        assert plus.contains((I, -ONE)) and minus.contains((I, ONE))
        assert span_rank(line_span((I, -ONE)) + plus.real_span(), 8) == 4
        assert (plus.eigenvalue, minus.eigenvalue) == (Quaternion(Fraction(1, 2)), Quaternion(Fraction(-1, 2)))


# --- 5 -------------------------------------------------------------------------------

@criterion(5, "Jacobi holds on the family and fails for random dense beta")
def test_criterion_5():
    rng = random.Random(2024)
    with budget(120):
        for ell in (1, 2, 3, 4):
            for _ in range(100):
                lam = random_lambdas(rng, ell)
                assert jacobi_residual(build_beta(ell, lam)).ok, (ell, lam)
        failing = sum(1 for _ in range(100) if not jacobi_residual(random_beta(rng)).ok)
    assert failing >= 99


# --- 6 -------------------------------------------------------------------------------

@criterion(6, "flat case: all geometric tensors vanish")
def test_criterion_6():
    with budget(5):
        model = assemble_model(build_beta(4, [0, 0, 0, 0]))
        geo = Geometry(model)
        assert all(L.is_zero() for L in geo.nomizu)
        assert all(R.is_zero() for row in geo.curvature for R in row)
        assert all(M.is_zero() for row in geo.nabla_J for M in row)
        assert all(S.is_zero() for S in geo.intrinsic_torsion)
        for alpha in (1, 2, 3):
            assert not any(x for p in geo.d_omega(alpha) for r in p for x in r)
            assert not any(x for r in geo.nijenhuis(alpha) for v in r for x in v)


# --- 7 -------------------------------------------------------------------------------

@criterion(7, "non-symmetric example: predicates and invariant-space membership")
def test_criterion_7():
    with budget(60):
        model = assemble_model(build_beta(1, [1]))
        geo = Geometry(model)
        assert (geo.is_symmetric(), geo.is_flat(), geo.is_hyperkaehler()) == (False, False, False)
        action = make_action(catalog("so12"), {"V": "R12xR4"})
        for kind, method in (("d_omega", geo.d_omega), ("nijenhuis", geo.nijenhuis)):
            basis = invariant_basis(action, tensor_spec(kind))
            for alpha in (1, 2, 3):
                m = membership(tensor_coords(kind, method(alpha)), basis)
                assert m.member and not any(m.residual), (kind, alpha)


# --- 8 -------------------------------------------------------------------------------

def _family_models(count, seed=11):
    rng = random.Random(seed)
    betas = [build_beta(ell, [1] * ell) for ell in (1, 2, 3, 4)]
    for _ in range(count):
        ell = rng.randint(1, 4)
        betas.append(build_beta(ell, random_lambdas(rng, ell)))
    return [assemble_model(b) for b in betas]


@criterion(8, "one constant c relates nabla J, d omega and N; nabla + S is compatible")
def test_criterion_8_constant():
    with budget(120):
        results = [kn_consistency(m) for m in _family_models(10)]
    statuses = {r.status for r in results}
    constants = {r.c for r in results if r.status == "determined"}
    assert statuses == {"determined"} and len(constants) == 1, (
        f"statuses {sorted(statuses)}; first failure {results[0].first_failure}")


@criterion(8, "one constant c relates nabla J, d omega and N; nabla + S is compatible")
def test_criterion_8_torsion():
    with budget(120):
        for model in _family_models(10):
            rep = intrinsic_torsion(model)
            assert rep.metric_skew and all(rep.preserves_J)


# --- 9 -------------------------------------------------------------------------------

@criterion(9, "geometric tensors are so(1,2)-invariant")
def test_criterion_9():
    with budget(60):
        for beta in (build_beta(1, [1]), build_beta(3, [Fraction(2, 3), -1, 5])):
            model = assemble_model(beta)
            geo = Geometry(model)
            tensors = [("d_omega", geo.d_omega(a)) for a in (1, 2, 3)]
            tensors += [("nijenhuis", geo.nijenhuis(a)) for a in (1, 2, 3)]
            tensors += [("curvature", geo.curvature), ("torsion", geo.intrinsic_torsion)]
            for kind, T in tensors:
                assert invariance_residual(model, kind, T) == 0, kind


# --- 10 ------------------------------------------------------------------------------

@criterion(10, "verify --suite all exits 0 and matches the golden report")
def test_criterion_10_golden(verify_all, golden):
    assert verify_all.seconds <= 600
    assert strip_timing(verify_all.report) == strip_timing(golden)


@criterion(10, "verify --suite all exits 0 and matches the golden report")
def test_criterion_10_exit_code(verify_all):
    failed = [r["id"] for r in verify_all.report["results"] if r["status"] != "pass"]
    assert verify_all.returncode == 0, f"failing checks: {failed}"
