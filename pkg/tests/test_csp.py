"""Constraint-emission tests.

The oracles: explicit transpose inspection for emitted systems, raw
Gaussian-free recounts for satisfiability, and double enumeration for the
3-XOR reduction corpus.
"""

import json
import time
from itertools import product

import numpy as np
import pytest

from ptanner.errors import (
    BetaNotAdmissible,
    BudgetExceeded,
    DomainError,
    UnsupportedField,
)
from ptanner.csp import (
    LinConstraint,
    LinInstance,
    TannerConstraintStream,
    XorClause,
    XorInstance,
    certify_unsat,
    emit_lin_instance,
    max_sat,
    reduce_to_3xor,
    sos_level_bound,
)
from ptanner.expander import default_generators
from ptanner.gf import LinearCode
from ptanner.inner import InnerCodePair
from ptanner.tanner import build_code, build_complex, steane_code, verify_planted


def eval_satisfied(p, constraints, assignment):
    """Independent constraint recount, plain Python."""
    count = 0
    for vars_, coeffs, rhs in constraints:
        lhs = sum(c * assignment[v] for v, c in zip(vars_, coeffs)) % p
        count += lhs == rhs % p
    return count


def brute_best(p, num_vars, constraints):
    best = -1
    for assignment in product(range(p), repeat=num_vars):
        best = max(best, eval_satisfied(p, constraints, assignment))
    return best


@pytest.fixture(scope="module")
def steane():
    return steane_code()


@pytest.fixture(scope="module")
def planted_build():
    gens = default_generators(3, 1, 3, require_generation=False)
    cx = build_complex(gens, gens, "paired")
    pair = InnerCodePair(
        2, 3, LinearCode(2, 3, [[1, 1, 1], [1, 0, 0]]), LinearCode(2, 3, [[1, 1, 0]])
    )
    return cx, pair, build_code(cx, pair)


# ------------------------------------------------------------- emission


def test_emit_matches_transpose(steane):
    beta = np.array([1, 1, 1, 0, 0, 0, 0])
    inst = emit_lin_instance(steane, beta)
    assert inst.p == 2
    assert inst.num_vars == steane.m_z == 3
    assert inst.num_constraints == 7
    hz = steane.h_z.toarray()
    for i, con in enumerate(inst.constraints):
        col = hz[:, i]
        nz = tuple(int(v) for v in np.nonzero(col)[0])
        assert con.vars == nz
        assert con.coeffs == tuple(int(col[v]) for v in nz)
        assert con.rhs == int(beta[i])
        assert len(con.vars) <= steane.locality


def test_emit_rejects_bad_beta(steane):
    with pytest.raises(BetaNotAdmissible):
        emit_lin_instance(steane, np.zeros(7, dtype=int))
    e0 = np.zeros(7, dtype=int)
    e0[0] = 1
    with pytest.raises(BetaNotAdmissible):
        emit_lin_instance(steane, e0)
    # a Z-check row: annihilated by H_X but inside the Z rowspace
    with pytest.raises(BetaNotAdmissible):
        emit_lin_instance(steane, np.array([1, 0, 1, 0, 1, 0, 1]))
    with pytest.raises(BetaNotAdmissible):
        emit_lin_instance(steane, np.ones(6, dtype=int))


def test_emit_planted_instance_shape(planted_build):
    cx, pair, code = planted_build
    assert verify_planted(code).planted
    inst = emit_lin_instance(code, np.ones(code.n, dtype=int))
    assert inst.num_constraints == cx.num_faces == 243
    assert inst.num_vars == code.m_z == 108
    assert all(1 <= len(c.vars) <= code.locality for c in inst.constraints)
    assert all(c.rhs == 1 for c in inst.constraints)
    assert inst.provenance["beta"] == "ones"


def test_lin_instance_json_round_trip(steane):
    inst = emit_lin_instance(steane, np.ones(7, dtype=int))
    again = LinInstance.from_json(inst.to_json())
    assert again.p == inst.p
    assert again.num_vars == inst.num_vars
    assert again.constraints == inst.constraints
    assert again.arity_bound == inst.arity_bound


def test_lin_instance_validation():
    with pytest.raises(DomainError):
        LinInstance(2, 2, [LinConstraint((0, 1), (1,), 0)], 3)
    with pytest.raises(DomainError):
        LinInstance(2, 2, [LinConstraint((0, 1), (1, 1), 0)], 1)
    with pytest.raises(DomainError):
        LinInstance(2, 2, [LinConstraint((0, 0), (1, 1), 0)], 3)
    with pytest.raises(DomainError):
        LinInstance(2, 2, [LinConstraint((0, 5), (1, 1), 0)], 3)
    with pytest.raises(DomainError):
        LinInstance(2, 2, [LinConstraint((0, 1), (1, 2), 0)], 3)


# ------------------------------------------------- streaming accessor


def test_stream_matches_emitted_instance(planted_build):
    cx, pair, code = planted_build
    beta = np.ones(code.n, dtype=int)
    inst = emit_lin_instance(code, beta)
    stream = TannerConstraintStream(cx, pair, beta)
    assert stream.num_constraints == inst.num_constraints
    assert stream.num_vars == inst.num_vars
    for f in range(stream.num_constraints):
        assert stream.constraint(f) == inst.constraints[f]


def test_stream_matches_for_direct_convention():
    gens = default_generators(3, 1, 3, require_generation=False)
    cx = build_complex(gens, gens, "direct")
    pair = InnerCodePair(
        2, 3, LinearCode(2, 3, [[1, 1, 1], [1, 0, 0]]), LinearCode(2, 3, [[1, 1, 0]])
    )
    code = build_code(cx, pair)
    beta = np.ones(code.n, dtype=int)
    inst = emit_lin_instance(code, beta)
    stream = TannerConstraintStream(cx, pair, beta)
    for f in range(stream.num_constraints):
        assert stream.constraint(f) == inst.constraints[f]


def test_stream_is_fast_per_constraint(planted_build):
    cx, pair, code = planted_build
    stream = TannerConstraintStream(cx, pair, np.ones(code.n, dtype=int))
    stream.constraint(0)  # warm any lazy caches
    rng = np.random.default_rng(0)
    faces = rng.integers(0, stream.num_constraints, size=200)
    t0 = time.perf_counter()
    for f in faces:
        stream.constraint(int(f))
    per_call = (time.perf_counter() - t0) / len(faces)
    assert per_call < 5e-3


def test_stream_input_validation(planted_build):
    cx, pair, code = planted_build
    with pytest.raises(BetaNotAdmissible):
        TannerConstraintStream(cx, pair, np.ones(7, dtype=int))


# ------------------------------------------------------------ certify


def test_planted_instance_certified_inconsistent(planted_build):
    _, _, code = planted_build
    inst = emit_lin_instance(code, np.ones(code.n, dtype=int))
    report = certify_unsat(inst)
    assert not report.consistent
    assert report.certificate
    # oracle: the combination annihilates every variable but not the rhs
    a = inst.coefficient_matrix()
    b = inst.rhs_vector()
    u = np.zeros(inst.num_constraints, dtype=np.int64)
    for i, c in report.certificate:
        u[i] = c
    assert not ((u @ a) % inst.p).any()
    assert (u @ b) % inst.p != 0


def test_consistent_system_yields_witness():
    rng = np.random.default_rng(11)
    a = rng.integers(0, 2, size=(6, 4))
    y0 = rng.integers(0, 2, size=4)
    b = (a @ y0) % 2
    inst = LinInstance.from_dense(2, a, b)
    report = certify_unsat(inst)
    assert report.consistent
    y = report.assignment
    assert eval_satisfied(2, inst.constraints, y) == inst.num_constraints


def test_trivial_contradiction():
    inst = LinInstance.from_dense(2, np.zeros((1, 2), dtype=int), [1])
    assert inst.constraints[0].vars == ()
    report = certify_unsat(inst)
    assert not report.consistent
    assert report.certificate == [(0, 1)]


# ------------------------------------------------------------- max-sat


def test_max_sat_exact_matches_brute_force(steane):
    inst = emit_lin_instance(steane, np.array([1, 1, 1, 0, 0, 0, 0]))
    report = max_sat(inst, mode="exact")
    assert report.exact
    best = brute_best(2, inst.num_vars, inst.constraints)
    assert report.best_satisfied == best
    assert report.best_fraction < 1.0
    assert eval_satisfied(2, inst.constraints, report.assignment) == best
    assert report.certificate is not None


def test_max_sat_consistent_system_is_fully_satisfiable():
    rng = np.random.default_rng(3)
    a = rng.integers(0, 2, size=(5, 4))
    y0 = rng.integers(0, 2, size=4)
    inst = LinInstance.from_dense(2, a, (a @ y0) % 2)
    report = max_sat(inst, mode="exact")
    assert report.best_fraction == 1.0
    assert report.certificate is None
    assert eval_satisfied(2, inst.constraints, report.assignment) == 5


def test_max_sat_contradictory_pair_is_half():
    inst = LinInstance.from_dense(2, np.array([[1], [1]]), [0, 1])
    report = max_sat(inst, mode="exact")
    assert report.best_fraction == 0.5


def test_max_sat_ternary_field():
    rng = np.random.default_rng(7)
    a = rng.integers(0, 3, size=(6, 3))
    b = rng.integers(0, 3, size=6)
    inst = LinInstance.from_dense(3, a, b)
    report = max_sat(inst, mode="exact")
    assert report.best_satisfied == brute_best(3, 3, inst.constraints)


def test_max_sat_budget():
    inst = LinInstance.from_dense(2, np.eye(25, dtype=int), np.zeros(25, dtype=int))
    with pytest.raises(BudgetExceeded):
        max_sat(inst, mode="exact", budget=2**20)


def test_max_sat_local_search_is_sound_and_seeded(steane):
    inst = emit_lin_instance(steane, np.array([1, 1, 1, 0, 0, 0, 0]))
    exact = max_sat(inst, mode="exact")
    ls1 = max_sat(inst, mode="local-search", seed=42)
    ls2 = max_sat(inst, mode="local-search", seed=42)
    assert not ls1.exact
    assert ls1.best_satisfied <= exact.best_satisfied
    assert ls1.assignment == ls2.assignment
    assert (
        eval_satisfied(2, inst.constraints, ls1.assignment) == ls1.best_satisfied
    )


def test_max_sat_bad_mode(steane):
    inst = emit_lin_instance(steane, np.ones(7, dtype=int))
    with pytest.raises(DomainError):
        max_sat(inst, mode="annealing")


# ---------------------------------------------------------- level bound


def test_sos_level_bound_values():
    assert sos_level_bound(1.0, 1.0, 4, 1) == 1.0
    assert sos_level_bound(0.01, 0.1, 10**4, 25) == pytest.approx(0.1)
    assert sos_level_bound(0.5, 0.5, 2000, 10) == pytest.approx(
        2 * sos_level_bound(0.5, 0.5, 1000, 10)
    )
    for bad in ((0, 1, 1, 1), (1, -1, 1, 1), (1, 1, 0, 1), (1, 1, 1, 0)):
        with pytest.raises(DomainError):
            sos_level_bound(*bad)


# ------------------------------------------------------- 3xor reduction


def test_reduce_short_constraints_pass_through():
    inst = LinInstance.from_dense(
        2, np.array([[1, 1, 1, 0], [0, 1, 0, 0]]), [1, 0]
    )
    xor = reduce_to_3xor(inst)
    assert xor.num_vars == 4
    assert xor.clauses == [XorClause((0, 1, 2), 1), XorClause((1,), 0)]


def test_reduce_arity_five_chain():
    inst = LinInstance.from_dense(2, np.ones((1, 5), dtype=int), [1])
    xor = reduce_to_3xor(inst)
    assert xor.num_vars == 8  # 5 originals + 3 dummies
    assert xor.num_clauses == 4
    assert all(len(cl.vars) <= 3 for cl in xor.clauses)
    # satisfiable both before and after; equivalence by double enumeration
    assert brute_best(2, 5, inst.constraints) == 1
    xor_cons = [(cl.vars, (1,) * len(cl.vars), cl.parity) for cl in xor.clauses]
    assert brute_best(2, 8, xor_cons) == 4


def test_reduce_corpus_preserves_perfect_satisfiability():
    rng = np.random.default_rng(2718)
    for _ in range(40):
        m = int(rng.integers(1, 7))
        n_cons = int(rng.integers(1, 6))
        constraints = []
        dummies = 0
        for _ in range(n_cons):
            w = int(rng.integers(0, m + 1))
            vs = tuple(sorted(rng.choice(m, size=w, replace=False).tolist()))
            constraints.append(LinConstraint(vs, (1,) * w, int(rng.integers(0, 2))))
            dummies += max(0, w - 2)
        if m + dummies > 16:
            continue
        inst = LinInstance(2, m, constraints, arity_bound=max(m, 1))
        xor = reduce_to_3xor(inst)
        assert xor.num_clauses >= inst.num_constraints
        assert all(len(cl.vars) <= 3 for cl in xor.clauses)
        orig_perfect = brute_best(2, m, inst.constraints) == inst.num_constraints
        xor_cons = [(cl.vars, (1,) * len(cl.vars), cl.parity) for cl in xor.clauses]
        red_perfect = brute_best(2, xor.num_vars, xor_cons) == xor.num_clauses
        assert orig_perfect == red_perfect


def test_reduce_rejects_other_fields():
    inst = LinInstance.from_dense(3, np.array([[1, 2]]), [1])
    with pytest.raises(UnsupportedField):
        reduce_to_3xor(inst)


def test_xor_text_round_trip(steane):
    inst = emit_lin_instance(steane, np.ones(7, dtype=int))
    xor = reduce_to_3xor(inst)
    text = xor.to_text()
    assert text.splitlines()[0] == f"p xor {xor.num_vars} {xor.num_clauses}"
    again = XorInstance.from_text(text)
    assert again.num_vars == xor.num_vars
    assert again.clauses == xor.clauses
    with pytest.raises(DomainError):
        XorInstance.from_text("c not a header\n")


def test_xor_to_lin_instance_round_trip():
    xor = XorInstance(4, [XorClause((0, 1, 3), 1), XorClause((2,), 0)])
    lin = xor.to_lin_instance()
    assert lin.p == 2
    assert lin.num_vars == 4
    report = max_sat(lin, mode="exact")
    assert report.best_fraction == 1.0
    assert json.loads(xor.to_json())["num_vars"] == 4


def test_xor_validation():
    with pytest.raises(DomainError):
        XorInstance(5, [XorClause((0, 1, 2, 3), 0)])
    with pytest.raises(DomainError):
        XorInstance(5, [XorClause((0, 0), 1)])
    with pytest.raises(DomainError):
        XorInstance(2, [XorClause((4,), 1)])
    with pytest.raises(DomainError):
        XorInstance(2, [XorClause((0,), 2)])
