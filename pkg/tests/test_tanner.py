"""Square complex and CSS builder tests.

Distance and expansion estimates are cross-checked against brute-force
oracles written independently in this file.
"""

import json
import math
from itertools import combinations, product

import numpy as np
import pytest

from ptanner.errors import DimensionMismatch, DomainError, GroupMismatch
from ptanner.expander import default_generators, element_from_index
from ptanner.gf import FMatrix, LinearCode, kernel_basis, row_reduce
from ptanner.inner import InnerCodePair
from ptanner.tanner import (
    CssCode,
    SquareCayleyComplex,
    _tensor_rows,
    build_code,
    build_complex,
    check_counting_bound,
    code_dimension,
    estimate_distance,
    estimate_ssexp,
    shor_code,
    steane_code,
    verify_planted,
)


def ternary_complex(delta=3, convention="paired"):
    gens = default_generators(3, 1, delta, require_generation=False)
    return build_complex(gens, gens, convention)


def binary_complex(delta=4, convention="paired"):
    gens = default_generators(2, 1, delta)
    return build_complex(gens, gens, convention)


def planted_pair_gf2():
    # length 3, dims (2, 1), all-ones planted on both sides
    code_a = LinearCode(2, 3, [[1, 1, 1], [1, 0, 0]])
    code_b = LinearCode(2, 3, [[1, 1, 0]])
    return InnerCodePair(2, 3, code_a, code_b)


def planted_pair_gf3_len4():
    code_a = LinearCode(3, 4, [[1, 1, 1, 1], [1, 0, 0, 0]])
    code_b = LinearCode(3, 4, [[1, 2, 0, 0], [0, 0, 1, 2]])
    return InnerCodePair(3, 4, code_a, code_b)


def test_complex_counts_and_grid():
    cx = ternary_complex()
    assert cx.group_size == 27
    assert cx.num_faces == 243
    view = cx.local_view("00", element_from_index(3, 1, 5))
    assert view.shape == (3, 3)
    # every face sits in exactly four local views, one per corner
    hits = np.zeros(cx.num_faces, dtype=np.int64)
    for layer in ("00", "01", "10", "11"):
        for gi in range(cx.group_size):
            v = element_from_index(3, 1, gi)
            grid = cx.local_view(layer, v)
            assert len(set(grid.reshape(-1).tolist())) == 9
            np.add.at(hits, grid.reshape(-1), 1)
    assert (hits == 4).all()


def test_face_index_round_trip():
    cx = ternary_complex()
    for idx in [0, 1, 42, 242]:
        g, i, j = cx.face_from_index(idx)
        assert cx.face_index(g, i, j) == idx
    with pytest.raises(DomainError):
        cx.face_from_index(243)


@pytest.mark.parametrize("convention", ["paired", "direct"])
def test_corner_coordinates(convention):
    cx = ternary_complex(convention=convention)
    sig_a, sig_b = cx.gens_a.pairing, cx.gens_b.pairing
    for g, i, j in cx.iter_faces():
        idx = cx.face_index(g, i, j)
        corners = cx.corners(g, i, j)
        if convention == "paired":
            expect = {
                "00": (i, j),
                "01": (sig_a[i], j),
                "10": (i, sig_b[j]),
                "11": (sig_a[i], sig_b[j]),
            }
        else:
            expect = {layer: (i, j) for layer in corners}
        for layer, vert in corners.items():
            grid = cx.local_view(layer, vert)
            r, c = expect[layer]
            assert grid[r, c] == idx


def test_gamma_graphs_regular_bipartite():
    cx = ternary_complex()
    deg = np.zeros(cx.num_vertices, dtype=np.int64)
    for g, i, j in cx.iter_faces():
        u0, u1 = cx.gamma0_edge(g, i, j)
        w0, w1 = cx.gamma1_edge(g, i, j)
        assert 0 <= u0 < cx.group_size
        assert 3 * cx.group_size <= u1 < 4 * cx.group_size
        assert cx.group_size <= w0 < 2 * cx.group_size
        assert 2 * cx.group_size <= w1 < 3 * cx.group_size
        deg[[u0, u1, w0, w1]] += 1
    assert (deg == cx.delta**2).all()


def test_complex_construction_errors():
    g2 = default_generators(2, 1, 3)
    g3 = default_generators(3, 1, 3, require_generation=False)
    g3big = default_generators(3, 1, 4, require_generation=False)
    with pytest.raises(GroupMismatch):
        build_complex(g2, g3)
    with pytest.raises(DimensionMismatch):
        build_complex(g3, g3big)
    with pytest.raises(DomainError):
        build_complex(g3, g3, convention="sideways")


def test_complex_json_round_trip():
    cx = ternary_complex(convention="direct")
    back = SquareCayleyComplex.from_json(cx.to_json())
    assert back.convention == "direct"
    assert back.num_faces == cx.num_faces
    assert back.local_view("11", element_from_index(3, 1, 7)).tolist() == cx.local_view(
        "11", element_from_index(3, 1, 7)
    ).tolist()


@pytest.mark.parametrize("convention", ["paired", "direct"])
def test_build_code_orthogonal(convention):
    cx = ternary_complex(convention=convention)
    pair = planted_pair_gf2()
    code = build_code(cx, pair)
    assert code.n == 243
    assert code.m_x == 2 * 27 * 2 * 1
    assert code.m_z == 2 * 27 * 1 * 2
    assert code.css_orthogonal()
    assert code.locality <= cx.delta**2
    assert code.h_x.max_row_weight() <= 9 and code.h_z.max_col_weight() <= 9


def test_mixed_conventions_break_orthogonality():
    pair = planted_pair_gf2()
    paired = ternary_complex(convention="paired")
    direct = ternary_complex(convention="direct")
    h_x = _tensor_rows(paired, ("00", "11"), pair.code_a.basis, pair.code_b.basis, 2)
    h_z = _tensor_rows(
        direct, ("01", "10"), pair.code_a.dual().basis, pair.code_b.dual().basis, 2
    )
    prod = (h_x.toarray() @ h_z.toarray().T) % 2
    assert prod.any()


def test_build_code_rejects_length_mismatch():
    cx = ternary_complex()
    with pytest.raises(DimensionMismatch):
        build_code(cx, planted_pair_gf3_len4())


def test_dimension_toys():
    assert code_dimension(steane_code()) == 1
    assert code_dimension(shor_code()) == 1
    zero = CssCode(
        p=2,
        n=5,
        h_x=FMatrix.from_entries(2, 0, 5, []),
        h_z=FMatrix.from_entries(2, 0, 5, []),
    )
    assert code_dimension(zero) == 5
    assert check_counting_bound(zero) == 5


def test_dimension_and_bound_tanner_build():
    code = build_code(ternary_complex(), planted_pair_gf2())
    k = code_dimension(code)
    assert k >= 1
    assert check_counting_bound(code) == 243 - 108 - 108 == 27
    # unreduced-count bound agrees with the rate formula
    r_a, r_b = 2 / 3, 1 / 3
    assert check_counting_bound(code) == round(-(1 - 2 * r_a) * (1 - 2 * r_b) * 243)


def test_rate_half_build_defeats_counting():
    # rate-1/2 inner pair: counting gives 0, planting still forces k >= 1
    code = build_code(binary_complex(delta=4), planted_pair_gf3_len4())
    assert code.n == 8 * 16 == 128
    assert check_counting_bound(code) == 0
    assert code_dimension(code) >= 1
    assert verify_planted(code).planted


def test_verify_planted_positive():
    code = build_code(ternary_complex(), planted_pair_gf2())
    report = verify_planted(code)
    assert report.ones_in_ker_x
    assert report.ones_in_ker_z
    assert report.ones_outside_x_rowspace
    assert report.ones_outside_z_rowspace
    assert report.row_sums_zero
    assert report.n_mod_p == 1
    assert report.planted
    obj = json.loads(report.to_json())
    assert obj["planted"] is True


def test_verify_planted_negative_without_planting():
    # build check matrices from a deliberately unplanted pair of codes
    cx = ternary_complex()
    code_a = LinearCode(2, 3, [[1, 0, 0], [0, 1, 0]])
    code_b = LinearCode(2, 3, [[1, 1, 1]])
    h_x = _tensor_rows(cx, ("00", "11"), code_a.basis, code_b.basis, 2)
    h_z = _tensor_rows(cx, ("01", "10"), code_a.dual().basis, code_b.dual().basis, 2)
    code = CssCode(p=2, n=243, h_x=h_x, h_z=h_z)
    code.validate()
    report = verify_planted(code)
    assert not report.ones_in_ker_x
    assert not report.planted


def test_verify_planted_flags_field_dividing_n():
    gens = default_generators(3, 1, 3, require_generation=False)
    cx = build_complex(gens, gens)
    code_a = LinearCode(3, 3, [[1, 1, 1]])
    code_b = LinearCode(3, 3, [[1, 2, 0]])
    code = build_code(cx, InnerCodePair(3, 3, code_a, code_b))
    assert verify_planted(code).n_mod_p == 0


def distance_oracle(code):
    """Brute force over both logical sides via full kernel enumeration."""
    best = math.inf
    for ker_m, row_m in [(code.h_z, code.h_x), (code.h_x, code.h_z)]:
        kb = kernel_basis(ker_m.toarray(), code.p)
        rref, pivots = row_reduce(row_m.toarray(), code.p)
        rref = rref[: len(pivots)]
        for coeffs in product(range(code.p), repeat=kb.shape[0]):
            v = (np.array(coeffs, dtype=np.int64) @ kb) % code.p
            if not v.any():
                continue
            res = v.copy()
            for r, c in enumerate(pivots):
                if res[c]:
                    res = (res - res[c] * rref[r]) % code.p
            if res.any():
                best = min(best, int(np.count_nonzero(v)))
    return best


def test_distance_steane_exact():
    report = estimate_distance(steane_code())
    assert report.exact and report.method == "exhaustive"
    assert report.upper_bound == 3
    assert np.count_nonzero(report.witness) == 3


def test_distance_shor_matches_oracle():
    code = shor_code()
    report = estimate_distance(code)
    assert report.exact
    assert report.upper_bound == distance_oracle(code) == 3


def test_distance_randomized_path():
    code = steane_code()
    report = estimate_distance(code, budget=2, seed=1, trials=12)
    assert not report.exact and report.method == "information-set"
    assert report.upper_bound >= 3
    w = report.witness
    assert w is not None
    h = code.h_z.toarray() if report.side == "z-logical" else code.h_x.toarray()
    other = code.h_x.toarray() if report.side == "z-logical" else code.h_z.toarray()
    assert not ((h @ w) % 2).any()
    rref, pivots = row_reduce(other, 2)
    res = w.copy()
    for r, c in enumerate(pivots):
        if res[c]:
            res = (res - res[c] * rref[r]) % 2
    assert res.any()


def ssexp_oracle(code, max_w):
    """Exhaustive minimal ratio on the boundary side, exact coset weights."""
    p, n = code.p, code.n
    az = code.h_z.toarray()
    ax = code.h_x.toarray()
    stab = [
        (np.array(c, dtype=np.int64) @ ax) % p
        for c in product(range(p), repeat=ax.shape[0])
    ]
    best = None
    for w in range(1, max_w + 1):
        for support in combinations(range(n), w):
            for vals in product(range(1, p), repeat=w):
                v = np.zeros(n, dtype=np.int64)
                v[list(support)] = vals
                cw = min(int(np.count_nonzero((v + s) % p)) for s in stab)
                if cw == 0:
                    continue
                ratio = (int(np.count_nonzero((az @ v) % p)) / az.shape[0]) / (cw / n)
                if best is None or ratio < best:
                    best = ratio
    return best


def test_ssexp_steane_matches_oracle():
    code = steane_code()
    curve = estimate_ssexp(code, [1 / 7, 2 / 7, 4 / 7], seed=0)
    assert curve.exact_cosets
    for pt in curve.points:
        assert pt.exhaustive
        assert pt.boundary_min == pytest.approx(ssexp_oracle(code, pt.max_weight))
    # lightest violating pattern at weight 2: syndromes of two columns
    # differing in one check
    assert curve.points[1].boundary_min == pytest.approx(7 / 6)
    # self-dual code: both sides agree
    assert curve.points[1].coboundary_min == pytest.approx(7 / 6)
    # weight-4 stabilizer rows are excluded as 0/0 at the last grid point
    total = sum(math.comb(7, w) for w in (1, 2, 3, 4))
    assert curve.points[2].boundary_samples == total - 7
    assert curve.boundary_constant == pytest.approx(
        min(pt.boundary_min for pt in curve.points)
    )


def test_ssexp_sampled_path_deterministic():
    code = steane_code()
    kw = dict(trials=40, seed=11, exhaustive_limit=4)
    a = estimate_ssexp(code, [2 / 7, 3 / 7], **kw)
    b = estimate_ssexp(code, [2 / 7, 3 / 7], **kw)
    assert not a.points[0].exhaustive
    assert a.to_json() == b.to_json()
    assert a.points[0].boundary_samples <= 40


def test_ssexp_rejects_bad_epsilon():
    with pytest.raises(DomainError):
        estimate_ssexp(steane_code(), [0.0])


def test_css_code_json_round_trip():
    code = build_code(ternary_complex(), planted_pair_gf2())
    back = CssCode.from_json(code.to_json())
    assert back.p == code.p and back.n == code.n
    assert back.h_x == code.h_x and back.h_z == code.h_z
    assert back.provenance["kind"] == "tanner"
    back.validate()
