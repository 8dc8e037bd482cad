"""Named verification checks grouped into suites.

Every check is a function of an options mapping returning ``(passed, computed)``
where ``computed`` holds exact values only (integers, booleans, strings,
rational strings). Check ids are frozen; add an entry to ``ALIASES`` when an id
must change.
"""
from __future__ import annotations

import random
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable

from .homog import (
    Geometry,
    assemble_model,
    build_beta,
    h_jacobi_check,
    intrinsic_torsion,
    invariance_residual,
    jacobi_residual,
    kn_consistency,
    kn_fit,
    random_beta,
    tensor_coords,
    tensor_spec,
)
from .homog.model import BetaTensor, M_DIM
from .invariants import invariant_basis, make_action, membership, parse_spec
from .irreducibility import is_H_irreducible, killing_signature, verify_certificate
from .quatrep import catalog, quat_eigenlines, Quaternion, I as QI, ONE

SUITES = ("lemmas", "irreducibility", "examples", "geometry")
ALIASES: dict[str, str] = {}

CheckFn = Callable[[dict], "tuple[bool, dict]"]


@dataclass(frozen=True)
class Check:
    id: str
    suite: str
    fn: CheckFn


REGISTRY: dict[str, Check] = {}


def check(check_id: str, suite: str):
    def deco(fn):
        REGISTRY[check_id] = Check(check_id, suite, fn)
        return fn
    return deco


def checks_for(suite: str) -> list[Check]:
    if suite == "all":
        return [REGISTRY[k] for k in sorted(REGISTRY)]
    if suite not in SUITES:
        raise KeyError(suite)
    return [REGISTRY[k] for k in sorted(REGISTRY) if REGISTRY[k].suite == suite]


def q(x) -> str:
    return str(Fraction(x))


# --- shared helpers -------------------------------------------------------------------


def random_lambdas(rng: random.Random, ell: int) -> list[Fraction]:
    return [Fraction(rng.choice([k for k in range(-9, 10) if k]), rng.randint(1, 9)) for _ in range(ell)]


def model_beta(opts: dict) -> BetaTensor:
    """The beta selected on the command line (default: ell = 1, lambda = 1)."""
    if opts.get("beta") is not None:
        return opts["beta"]
    ell = opts.get("ell") or 1
    lam = opts.get("lambda") or [Fraction(1)] * ell
    return build_beta(ell, lam)


def _tensor_space_dim(algebra: str, spec: str, spaces: dict) -> int:
    action = make_action(catalog(algebra), spaces)
    return invariant_basis(action, parse_spec(spec, spaces)).dim


def _so12_basis(kind: str):
    action = make_action(catalog("so12"), {"V": "R12xR4"})
    return invariant_basis(action, tensor_spec(kind))


# --- lemmas ---------------------------------------------------------------------------


def _vanishing(algebra: str, spaces: dict, spec: str, **params) -> tuple[bool, dict]:
    entry = catalog(algebra, **params)
    action = make_action(entry, spaces)
    basis = invariant_basis(action, parse_spec(spec, spaces))
    return basis.dim == 0, {"algebra": entry.name, "space": spec, "space_dim": basis.spec.dim,
                            "invariant_dim": basis.dim}


for _n in (3, 4):
    check(f"lemma-invariant-3forms.n{_n}", "lemmas")(
        lambda opts, _n=_n: _vanishing(f"so(1,{_n})", {"V": f"R(1,{_n})"}, "T3:dualV"))

check("lemma-invariant-3forms.n3-full", "lemmas")(
    lambda opts: _vanishing("so(1,3)", {"V": "H13"}, "T3:dualV"))

for _name, _alg, _params in [
    ("so11", "so11", {}), ("so11-u1", "so11+u1", {}), ("so11-sp1", "so11+sp1", {}),
    ("S-1-1", "S", {"a": 1, "b": 1}), ("S-1-2", "S", {"a": 1, "b": 2}), ("S-3-5", "S", {"a": 3, "b": 5}),
]:
    check(f"lemma-invariant-3forms.{_name}", "lemmas")(
        lambda opts, _alg=_alg, _params=_params: _vanishing(_alg, {"V": "H11"}, "T3:dualV", **_params))


def _dims(spec: str, spaces: dict, expected: int) -> tuple[bool, dict]:
    d = _tensor_space_dim("so12", spec, spaces)
    return d == expected, {"space": spec, "invariant_dim": d, "expected": expected}


check("invariant-dims.alt3", "lemmas")(lambda opts: _dims("L3:dualV", {"V": "R12xR4"}, 20))
check("invariant-dims.alt2-g", "lemmas")(
    lambda opts: _dims("L2:dualV*W", {"V": "R12xR4", "W": "R12xR5"}, 50))
check("invariant-dims.alt2-m", "lemmas")(lambda opts: _dims("L2:dualV*V", {"V": "R12xR4"}, 40))


# --- irreducibility ---------------------------------------------------------------------


def _irreducibility(name: str, expected: str, seed: int, **params) -> tuple[bool, dict]:
    entry = catalog(name, **params)
    cert = is_H_irreducible(entry, seed=seed)
    verified = verify_certificate(cert, entry)
    return (cert.verdict == expected and verified,
            {"algebra": entry.name, "n": entry.n, "verdict": cert.verdict, "method": cert.method,
             "certificate_verified": verified, "witness_dim": len(cert.witness)})


check("irreducibility.u_phi", "irreducibility")(
    lambda opts: _irreducibility("u_phi", "irreducible", opts.get("seed", 0)))
check("irreducibility.S-1-2", "irreducibility")(
    lambda opts: _irreducibility("S", "reducible", opts.get("seed", 0), a=1, b=2))
for _fam in ("so", "su", "u", "sp"):
    check(f"irreducibility.{_fam}12", "irreducibility")(
        lambda opts, _fam=_fam: _irreducibility(_fam, "irreducible", opts.get("seed", 0), n=2))


@check("killing.u_phi", "irreducibility")
def _killing_uphi(opts):
    res = killing_signature(catalog("u_phi"))
    ok = res.dim == 6 and res.signature == (3, 3, 0) and res.nondegenerate
    return ok, {"dim": res.dim, "signature": list(res.signature), "nondegenerate": res.nondegenerate}


@check("eigenlines.x_phi", "irreducibility")
def _eigenlines_x(opts):
    entry = catalog("u_phi")
    lines = quat_eigenlines(entry.quat_generators[entry.labels.index("x")])
    expected = [((QI, -ONE), Fraction(1, 2)), ((QI, ONE), Fraction(-1, 2))]
    ok = len(lines) == 2
    for line, (vec, lam) in zip(lines, expected):
        ok = ok and line.contains(vec) and line.eigenvalue == Quaternion(lam)
    return ok, {"lines": [[str(x) for x in line.generator] for line in lines],
                "eigenvalues": [str(line.eigenvalue) for line in lines]}


# --- examples ---------------------------------------------------------------------------


@check("examples.jacobi-h-triples", "examples")
def _h_triples(opts):
    res = h_jacobi_check()
    return not any(res.values()), {k: q(v) for k, v in res.items()}


@check("examples.jacobi-family", "examples")
def _jacobi_family(opts):
    rng = random.Random(opts.get("seed", 0))
    samples = opts.get("samples", 100)
    failures = 0
    for ell in (1, 2, 3, 4):
        for _ in range(samples):
            if not jacobi_residual(build_beta(ell, random_lambdas(rng, ell))).ok:
                failures += 1
    return failures == 0, {"models": 4 * samples, "nonzero_residual_models": failures}


@check("examples.jacobi-random-dense", "examples")
def _jacobi_random(opts):
    rng = random.Random(opts.get("seed", 0) + 1)
    samples = opts.get("samples", 100)
    failing = sum(1 for _ in range(samples) if not jacobi_residual(random_beta(rng)).ok)
    return failing >= samples - samples // 100, {"samples": samples, "nonzero_residual": failing}


@check("examples.model.jacobi", "examples")
def _model_jacobi(opts):
    res = jacobi_residual(model_beta(opts))
    return res.ok, {"equations": len(res.values), "nonzero": len(res.failures)}


def _membership_check(opts, kind: str, expected_dim: int):
    beta = model_beta(opts)
    model = assemble_model(beta)
    geo = Geometry(model)
    basis = _so12_basis(kind)
    members, residual_nonzero = [], 0
    for alpha in (1, 2, 3):
        t = geo.d_omega(alpha) if kind == "d_omega" else geo.nijenhuis(alpha)
        m = membership(tensor_coords(kind, t), basis)
        members.append(m.member)
        residual_nonzero += sum(1 for v in m.residual if v)
    ok = basis.dim == expected_dim and all(members)
    return ok, {"invariant_dim": basis.dim, "members": members, "residual_nonzero": residual_nonzero}


check("examples.model.d_omega-membership", "examples")(lambda opts: _membership_check(opts, "d_omega", 20))
check("examples.model.nijenhuis-membership", "examples")(lambda opts: _membership_check(opts, "nijenhuis", 40))


@check("examples.l1.predicates", "examples")
def _l1_predicates(opts):
    geo = Geometry(assemble_model(build_beta(1, [1])))
    sym, flat, hk = geo.is_symmetric(), geo.is_flat(), geo.is_hyperkaehler()
    return not (sym or flat or hk), {"is_symmetric": sym, "is_flat": flat, "is_hyperkaehler": hk}


@check("examples.l2.direct-construction", "examples")
def _l2_direct(opts):
    from .homog.model import direct_structure_constants

    model = assemble_model(build_beta(2, [1, 1]))
    diff = sum(1 for r1, r2 in zip(model.structure_constants(), direct_structure_constants(2))
               for a, b in zip(r1, r2) if a != b)
    return diff == 0, {"differing_constants": diff}


# --- geometry ---------------------------------------------------------------------------


@check("geometry.flat-case", "geometry")
def _flat_case(opts):
    model = assemble_model(build_beta(4, [0, 0, 0, 0]))
    geo = Geometry(model)
    vals = {
        "nomizu_zero": all(L.is_zero() for L in geo.nomizu),
        "curvature_zero": geo.is_flat(),
        "nijenhuis_zero": all(not any(v) for a in (1, 2, 3) for row in geo.nijenhuis(a) for v in row),
        "d_omega_zero": all(not any(r) for a in (1, 2, 3) for p in geo.d_omega(a) for r in p),
        "nabla_J_zero": geo.is_hyperkaehler(),
        "torsion_zero": all(S.is_zero() for S in geo.intrinsic_torsion),
    }
    return all(vals.values()), vals


@check("geometry.model.levi-civita", "geometry")
def _levi_civita(opts):
    model = assemble_model(model_beta(opts))
    geo = Geometry(model)
    g = model.metric
    skew = all((L.T @ g + g @ L).is_zero() for L in geo.nomizu)
    torsion_free = all(
        tuple(a - b for a, b in zip(geo.nomizu[i].col(j), geo.nomizu[j].col(i))) == model.mm_m[i][j]
        for i in range(M_DIM) for j in range(M_DIM))
    R = geo.curvature
    bianchi = all(
        not (R[i][j][l, k] + R[j][k][l, i] + R[k][i][l, j])
        for i in range(M_DIM) for j in range(M_DIM) for k in range(M_DIM) for l in range(M_DIM))
    return skew and torsion_free and bianchi, {"metric_skew": skew, "torsion_free": torsion_free,
                                               "first_bianchi": bianchi}


@check("geometry.model.invariance", "geometry")
def _invariance(opts):
    model = assemble_model(model_beta(opts))
    geo = Geometry(model)
    res = {}
    for alpha in (1, 2, 3):
        res[f"d_omega_{alpha}"] = invariance_residual(model, "d_omega", geo.d_omega(alpha))
        res[f"nijenhuis_{alpha}"] = invariance_residual(model, "nijenhuis", geo.nijenhuis(alpha))
    res["curvature"] = invariance_residual(model, "curvature", geo.curvature)
    res["torsion"] = invariance_residual(model, "torsion", geo.intrinsic_torsion)
    return not any(res.values()), res


@check("geometry.model.intrinsic-torsion", "geometry")
def _torsion(opts):
    rep = intrinsic_torsion(assemble_model(model_beta(opts)))
    return rep.compatible, {"metric_skew": rep.metric_skew, "preserves_J": list(rep.preserves_J),
                            "nonzero": any(not S.is_zero() for S in rep.S)}


def _family(opts, count: int):
    rng = random.Random(opts.get("seed", 0) + 2)
    betas = [build_beta(ell, [1] * ell) for ell in (1, 2, 3, 4)]
    betas += [build_beta(ell, random_lambdas(rng, ell)) for ell in [rng.randint(1, 4) for _ in range(count)]]
    return betas


@check("geometry.kn-consistency", "geometry")
def _kn(opts):
    statuses, constants, fits = [], set(), set()
    for beta in _family(opts, opts.get("kn_samples", 10)):
        model = assemble_model(beta)
        res = kn_consistency(model)
        statuses.append(res.status)
        if res.c is not None and res.status == "determined":
            constants.add(res.c)
        fit = kn_fit(model)
        if fit is not None:
            fits.add(fit)
    ok = all(s == "determined" for s in statuses) and len(constants) == 1
    return ok, {"models": len(statuses),
                "statuses": sorted(set(statuses)),
                "c": [q(c) for c in sorted(constants)],
                "two_constant_fit": [[q(c), q(e)] for c, e in sorted(fits)]}


@check("geometry.hyperkaehler-iff-closed", "geometry")
def _hk_closed(opts):
    mismatches, flat_sym = 0, 0
    betas = [build_beta(4, [0, 0, 0, 0])] + _family(opts, 4)
    for beta in betas:
        geo = Geometry(assemble_model(beta))
        closed = all(not any(r) for a in (1, 2, 3) for p in geo.d_omega(a) for r in p)
        hk = geo.is_hyperkaehler()
        mismatches += hk != closed
        zero = beta.is_zero()
        flat_sym += not (zero == geo.is_flat() == geo.is_symmetric() == hk)
    return mismatches == 0 and flat_sym == 0, {"models": len(betas), "hk_vs_closed_mismatch": mismatches,
                                               "predicate_chain_mismatch": flat_sym}
