"""Square Cayley complexes and the CSS codes built on them.

A complex is assembled from two symmetric generator multisets over the same
congruence group: left multiplication drives one axis, right multiplication
the other.  Each face (g, i, j) is a square with corners

    layer 00: g        layer 01: a_i * g
    layer 10: g * b_j  layer 11: a_i * g * b_j

X-type checks live on the 00/11 layers and carry tensor codewords of the
inner pair; Z-type checks live on 01/10 and carry tensor codewords of the
dual pair.  The grid convention used to place a face inside a vertex's
local view is configurable ("paired" or "direct"); both satisfy the CSS
orthogonality condition, and mixing them does not, which the test suite
exercises.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from itertools import combinations, product
from typing import Iterator

import numpy as np

from .errors import (
    BudgetExceeded,
    DimensionMismatch,
    DomainError,
    GroupMismatch,
)
from .expander import (
    GeneratorMultiset,
    GroupElement,
    element_from_index,
    group_order,
)
from .gf import (
    FMatrix,
    LinearCode,
    in_rowspace,
    iter_codewords,
    kernel_basis,
    rank,
    row_reduce,
)
from .inner import InnerCodePair

LAYERS = ("00", "01", "10", "11")
CONVENTIONS = ("paired", "direct")
DEFAULT_RANK_BUDGET = 2**40
DEFAULT_DISTANCE_BUDGET = 2**16
DEFAULT_SSEXP_EXHAUSTIVE = 2**16


class SquareCayleyComplex:
    """Faces G x [delta] x [delta] with four-corner incidence.

    The local view of a vertex is a delta x delta integer grid of face
    indices.  Under the "paired" convention the grid coordinate of face
    (g, i, j) at a corner replaces each generator index actually used to
    reach that corner by the index of its inverse; under "direct" the raw
    (i, j) is used at all four corners.
    """

    def __init__(
        self,
        gens_a: GeneratorMultiset,
        gens_b: GeneratorMultiset,
        convention: str = "paired",
    ):
        if (gens_a.p, gens_a.m) != (gens_b.p, gens_b.m):
            raise GroupMismatch(
                f"axis groups differ: ({gens_a.p},{gens_a.m}) vs ({gens_b.p},{gens_b.m})"
            )
        if gens_a.degree != gens_b.degree:
            raise DimensionMismatch(
                f"axis degrees differ: {gens_a.degree} vs {gens_b.degree}"
            )
        if convention not in CONVENTIONS:
            raise DomainError(f"unknown grid convention {convention!r}")
        self.gens_a = gens_a
        self.gens_b = gens_b
        self.convention = convention
        self.p = gens_a.p
        self.m = gens_a.m
        self.delta = gens_a.degree
        self.group_size = group_order(self.p, self.m)
        self.num_faces = self.group_size * self.delta * self.delta
        # precomputed inverse lists: inv_a[i] = a_i^{-1} = a_{pairing[i]}
        self._inv_a = [gens_a.elements[j] for j in gens_a.pairing]
        self._inv_b = [gens_b.elements[j] for j in gens_b.pairing]

    @property
    def num_vertices(self) -> int:
        return 4 * self.group_size

    def face_index(self, g: GroupElement, i: int, j: int) -> int:
        return (g.index * self.delta + i) * self.delta + j

    def face_from_index(self, idx: int) -> tuple[GroupElement, int, int]:
        idx = int(idx)
        if not 0 <= idx < self.num_faces:
            raise DomainError(f"face index {idx} out of range")
        j = idx % self.delta
        i = (idx // self.delta) % self.delta
        g = element_from_index(self.p, self.m, idx // (self.delta * self.delta))
        return g, i, j

    def corners(self, g: GroupElement, i: int, j: int) -> dict[str, GroupElement]:
        a, b = self.gens_a.elements[i], self.gens_b.elements[j]
        return {"00": g, "01": a * g, "10": g * b, "11": a * g * b}

    def vertex_index(self, layer: str, g: GroupElement) -> int:
        return LAYERS.index(layer) * self.group_size + g.index

    def local_view(self, layer: str, v: GroupElement) -> np.ndarray:
        """Grid of the delta^2 face indices incident to vertex (v, layer)."""
        if layer not in LAYERS:
            raise DomainError(f"unknown layer {layer!r}")
        d = self.delta
        grid = np.empty((d, d), dtype=np.int64)
        paired = self.convention == "paired"
        sig_a, sig_b = self.gens_a.pairing, self.gens_b.pairing
        for r in range(d):
            for c in range(d):
                if layer == "00":
                    g, i, j = v, r, c
                elif layer == "01":
                    i = sig_a[r] if paired else r
                    g, j = self._inv_a[i] * v, c
                elif layer == "10":
                    j = sig_b[c] if paired else c
                    g, i = v * self._inv_b[j], r
                else:
                    i = sig_a[r] if paired else r
                    j = sig_b[c] if paired else c
                    g = self._inv_a[i] * (v * self._inv_b[j])
                grid[r, c] = self.face_index(g, i, j)
        return grid

    def iter_faces(self) -> Iterator[tuple[GroupElement, int, int]]:
        for gi in range(self.group_size):
            g = element_from_index(self.p, self.m, gi)
            for i in range(self.delta):
                for j in range(self.delta):
                    yield g, i, j

    def gamma0_edge(self, g: GroupElement, i: int, j: int) -> tuple[int, int]:
        """Endpoints (as vertex indices) of the face's 00--11 diagonal."""
        c = self.corners(g, i, j)
        return self.vertex_index("00", c["00"]), self.vertex_index("11", c["11"])

    def gamma1_edge(self, g: GroupElement, i: int, j: int) -> tuple[int, int]:
        """Endpoints of the face's 01--10 anti-diagonal."""
        c = self.corners(g, i, j)
        return self.vertex_index("01", c["01"]), self.vertex_index("10", c["10"])

    def summary(self) -> dict:
        return {
            "group": {"p": self.p, "m": self.m, "order": self.group_size},
            "degree": self.delta,
            "num_faces": self.num_faces,
            "convention": self.convention,
        }

    def to_json(self) -> str:
        return json.dumps(
            {
                "gens_a": json.loads(self.gens_a.to_json()),
                "gens_b": json.loads(self.gens_b.to_json()),
                "convention": self.convention,
            },
            sort_keys=True,
        )

    @classmethod
    def from_json(cls, text: str) -> "SquareCayleyComplex":
        obj = json.loads(text)
        return cls(
            GeneratorMultiset.from_json(json.dumps(obj["gens_a"])),
            GeneratorMultiset.from_json(json.dumps(obj["gens_b"])),
            obj.get("convention", "paired"),
        )


def build_complex(
    gens_a: GeneratorMultiset,
    gens_b: GeneratorMultiset,
    convention: str = "paired",
) -> SquareCayleyComplex:
    return SquareCayleyComplex(gens_a, gens_b, convention)


@dataclass
class CssCode:
    """A CSS pair of parity-check matrices over GF(p), kept unreduced."""

    p: int
    n: int
    h_x: FMatrix
    h_z: FMatrix
    provenance: dict = field(default_factory=dict)
    _rank_x: int | None = None
    _rank_z: int | None = None

    def __post_init__(self):
        if self.h_x.p != self.p or self.h_z.p != self.p:
            raise DomainError("check matrices over the wrong field")
        if self.h_x.shape[1] != self.n or self.h_z.shape[1] != self.n:
            raise DimensionMismatch("check matrix width differs from n")

    @property
    def m_x(self) -> int:
        return self.h_x.shape[0]

    @property
    def m_z(self) -> int:
        return self.h_z.shape[0]

    @property
    def rank_x(self) -> int:
        if self._rank_x is None:
            self._rank_x = rank(self.h_x)
        return self._rank_x

    @property
    def rank_z(self) -> int:
        if self._rank_z is None:
            self._rank_z = rank(self.h_z)
        return self._rank_z

    @property
    def locality(self) -> int:
        return max(
            self.h_x.max_row_weight(),
            self.h_x.max_col_weight(),
            self.h_z.max_row_weight(),
            self.h_z.max_col_weight(),
        )

    def css_orthogonal(self) -> bool:
        prod = (self.h_x.toarray() @ self.h_z.toarray().T) % self.p
        return not prod.any()

    def validate(self) -> None:
        """Raise DomainError unless the X/Z checks commute."""
        if not self.css_orthogonal():
            raise DomainError("X and Z checks do not commute")

    def to_json(self) -> str:
        return json.dumps(
            {
                "p": self.p,
                "n": self.n,
                "h_x": json.loads(self.h_x.to_json()),
                "h_z": json.loads(self.h_z.to_json()),
                "provenance": self.provenance,
            },
            sort_keys=True,
        )

    @classmethod
    def from_json(cls, text: str) -> "CssCode":
        obj = json.loads(text)
        return cls(
            p=obj["p"],
            n=obj["n"],
            h_x=FMatrix.from_json(json.dumps(obj["h_x"])),
            h_z=FMatrix.from_json(json.dumps(obj["h_z"])),
            provenance=obj.get("provenance", {}),
        )


def _tensor_rows(
    complex_: SquareCayleyComplex,
    layers: tuple[str, str],
    rows_a: np.ndarray,
    rows_b: np.ndarray,
    p: int,
) -> FMatrix:
    """One check row per (vertex, basis_a row, basis_b row) triple."""
    n = complex_.num_faces
    entries = []
    row_no = 0
    for layer in layers:
        for gi in range(complex_.group_size):
            view = complex_.local_view(layer, element_from_index(complex_.p, complex_.m, gi))
            flat = view.reshape(-1)
            for ua in rows_a:
                for wb in rows_b:
                    vals = np.outer(ua, wb).reshape(-1) % p
                    for pos, val in zip(flat, vals):
                        if val:
                            entries.append((row_no, int(pos), int(val)))
                    row_no += 1
    return FMatrix.from_entries(p, row_no, n, entries)


def build_code(complex_: SquareCayleyComplex, pair: InnerCodePair) -> CssCode:
    """Assemble the unreduced X/Z check matrices for the complex + pair."""
    if pair.n != complex_.delta:
        raise DimensionMismatch(
            f"inner length {pair.n} differs from complex degree {complex_.delta}"
        )
    p = pair.p
    dual_a, dual_b = pair.code_a.dual(), pair.code_b.dual()
    h_x = _tensor_rows(complex_, ("00", "11"), pair.code_a.basis, pair.code_b.basis, p)
    h_z = _tensor_rows(complex_, ("01", "10"), dual_a.basis, dual_b.basis, p)
    code = CssCode(
        p=p,
        n=complex_.num_faces,
        h_x=h_x,
        h_z=h_z,
        provenance={
            "kind": "tanner",
            "complex": complex_.summary(),
            "inner": pair.summary(),
            "convention": complex_.convention,
        },
    )
    code.validate()
    if code.locality > complex_.delta**2:
        raise DomainError("check locality exceeds the degree-squared cap")
    return code


def code_dimension(code: CssCode, budget: int = DEFAULT_RANK_BUDGET) -> int:
    """k = (n - rank H_Z) - rank H_X."""
    work = code.n * code.n * (code.m_x + code.m_z)
    if work > budget:
        raise BudgetExceeded(f"rank work {work} exceeds budget {budget}")
    return (code.n - code.rank_z) - code.rank_x


def check_counting_bound(code: CssCode) -> int:
    """n - m_X - m_Z: the dimension bound from counting unreduced checks.

    For a Tanner build this equals -(1 - 2 R_A)(1 - 2 R_B) n, and it is
    vacuous (zero) at rate 1/2.
    """
    return code.n - code.m_x - code.m_z


@dataclass(frozen=True)
class PlantedReport:
    """Evidence that the all-ones vector is a logical on both sides."""

    ones_in_ker_x: bool
    ones_in_ker_z: bool
    ones_outside_x_rowspace: bool
    ones_outside_z_rowspace: bool
    row_sums_zero: bool
    n_mod_p: int

    @property
    def planted(self) -> bool:
        return (
            self.ones_in_ker_x
            and self.ones_in_ker_z
            and self.ones_outside_x_rowspace
            and self.ones_outside_z_rowspace
        )

    def to_json(self) -> str:
        return json.dumps(
            {
                "ones_in_ker_x": self.ones_in_ker_x,
                "ones_in_ker_z": self.ones_in_ker_z,
                "ones_outside_x_rowspace": self.ones_outside_x_rowspace,
                "ones_outside_z_rowspace": self.ones_outside_z_rowspace,
                "row_sums_zero": self.row_sums_zero,
                "n_mod_p": self.n_mod_p,
                "planted": self.planted,
            },
            sort_keys=True,
        )


def verify_planted(code: CssCode) -> PlantedReport:
    p, n = code.p, code.n
    ones = np.ones(n, dtype=np.int64)
    ax, az = code.h_x.toarray(), code.h_z.toarray()
    in_ker_x = not ((ax @ ones) % p).any()
    in_ker_z = not ((az @ ones) % p).any()
    sums_zero = not ((ax.sum(axis=1) % p).any() or (az.sum(axis=1) % p).any())
    outside_x = not in_rowspace(ax, ones, p)
    outside_z = not in_rowspace(az, ones, p)
    return PlantedReport(
        ones_in_ker_x=in_ker_x,
        ones_in_ker_z=in_ker_z,
        ones_outside_x_rowspace=outside_x,
        ones_outside_z_rowspace=outside_z,
        row_sums_zero=sums_zero,
        n_mod_p=n % p,
    )


@dataclass
class DistanceReport:
    upper_bound: int | float
    exact: bool
    method: str
    trials: int
    side: str | None = None
    witness: np.ndarray | None = None

    def to_json(self) -> str:
        return json.dumps(
            {
                "upper_bound": None if math.isinf(self.upper_bound) else self.upper_bound,
                "exact": self.exact,
                "method": self.method,
                "trials": self.trials,
                "side": self.side,
                "witness": None if self.witness is None else self.witness.tolist(),
            },
            sort_keys=True,
        )


def _rowspace_reducer(rows: np.ndarray, p: int):
    """Returns f(v) -> residue of v modulo the rowspace, using one upfront
    echelon pass instead of re-reducing per query."""
    rref, pivots = row_reduce(rows, p) if rows.size else (rows, [])
    basis = rref[: len(pivots)]

    def reduce(v: np.ndarray) -> np.ndarray:
        res = v.copy()
        for r, c in enumerate(pivots):
            if res[c]:
                res = (res - res[c] * basis[r]) % p
        return res

    return reduce


def _exhaustive_side(
    kernel_of: FMatrix, rowspace_of: FMatrix, p: int, budget: int
) -> tuple[int | float, np.ndarray | None] | None:
    """Min weight over ker(A) minus rowspace(B), or None if over budget."""
    ker = LinearCode.from_parity_checks(p, kernel_of.toarray())
    if p**ker.dim > budget:
        return None
    reduce = _rowspace_reducer(rowspace_of.toarray(), p)
    best, best_w = math.inf, None
    for block in iter_codewords(ker, budget=None):
        weights = np.count_nonzero(block, axis=1)
        for order in np.argsort(weights, kind="stable"):
            w = int(weights[order])
            if w == 0:
                continue
            if w >= best:
                break
            v = block[order]
            if reduce(v).any():
                best, best_w = w, v.copy()
                break
    return best, best_w


def _randomized_side(
    kernel_of: FMatrix,
    rowspace_of: FMatrix,
    p: int,
    trials: int,
    rng: np.random.Generator,
) -> tuple[int | float, np.ndarray | None, int]:
    """Information-set style search for light kernel cosets."""
    n = kernel_of.shape[1]
    gen = kernel_basis(kernel_of.toarray(), p)
    if gen.shape[0] == 0:
        return math.inf, None, 0
    reduce = _rowspace_reducer(rowspace_of.toarray(), p)
    best, best_w = math.inf, None
    used = 0
    for _ in range(trials):
        used += 1
        perm = rng.permutation(n)
        rref, pivots = row_reduce(gen[:, perm], p)
        rows = rref[: len(pivots)]
        unperm = np.empty_like(rows)
        unperm[:, perm] = rows
        candidates = [unperm[k] for k in range(unperm.shape[0])]
        # pairwise sums pick up weight the echelon rows miss
        for a, b in combinations(range(min(8, unperm.shape[0])), 2):
            candidates.append((unperm[a] + unperm[b]) % p)
        for v in candidates:
            w = int(np.count_nonzero(v))
            if 0 < w < best and reduce(v).any():
                best, best_w = w, v.copy()
    return best, best_w, used


def estimate_distance(
    code: CssCode,
    budget: int = DEFAULT_DISTANCE_BUDGET,
    seed: int = 0,
    trials: int = 32,
) -> DistanceReport:
    """Exact distance when kernel enumeration fits the budget, else an
    upper bound from randomized information-set search over both sides."""
    p = code.p
    sides = [
        ("z-logical", code.h_z, code.h_x),  # ker H_Z minus rowspace H_X
        ("x-logical", code.h_x, code.h_z),
    ]
    exact_results = []
    for name, ker_m, row_m in sides:
        res = _exhaustive_side(ker_m, row_m, p, budget)
        if res is None:
            exact_results = None
            break
        exact_results.append((name, res))
    if exact_results is not None:
        best = min(exact_results, key=lambda t: t[1][0])
        return DistanceReport(
            upper_bound=best[1][0],
            exact=True,
            method="exhaustive",
            trials=0,
            side=best[0],
            witness=best[1][1],
        )
    rng = np.random.default_rng(seed)
    overall, overall_w, overall_side, used = math.inf, None, None, 0
    for name, ker_m, row_m in sides:
        ub, w, t = _randomized_side(ker_m, row_m, p, trials, rng)
        used += t
        if ub < overall:
            overall, overall_w, overall_side = ub, w, name
    return DistanceReport(
        upper_bound=overall,
        exact=False,
        method="information-set",
        trials=used,
        side=overall_side,
        witness=overall_w,
    )


@dataclass
class CurvePoint:
    epsilon: float
    max_weight: int
    boundary_min: float | None
    coboundary_min: float | None
    boundary_samples: int
    coboundary_samples: int
    exhaustive: bool

    def to_dict(self) -> dict:
        return {
            "epsilon": self.epsilon,
            "max_weight": self.max_weight,
            "boundary_min": self.boundary_min,
            "coboundary_min": self.coboundary_min,
            "boundary_samples": self.boundary_samples,
            "coboundary_samples": self.coboundary_samples,
            "exhaustive": self.exhaustive,
        }


@dataclass
class ExpansionCurve:
    """Empirical small-set boundary/coboundary expansion per epsilon."""

    points: list[CurvePoint]
    exact_cosets: bool

    @property
    def boundary_constant(self) -> float | None:
        vals = [pt.boundary_min for pt in self.points if pt.boundary_min is not None]
        return min(vals) if vals else None

    @property
    def coboundary_constant(self) -> float | None:
        vals = [pt.coboundary_min for pt in self.points if pt.coboundary_min is not None]
        return min(vals) if vals else None

    def to_json(self) -> str:
        return json.dumps(
            {
                "points": [pt.to_dict() for pt in self.points],
                "exact_cosets": self.exact_cosets,
                "boundary_constant": self.boundary_constant,
                "coboundary_constant": self.coboundary_constant,
            },
            sort_keys=True,
        )


def _coset_weight_bound(
    v: np.ndarray, stab_rows: np.ndarray, stab_code: LinearCode | None, p: int
) -> int:
    """|v| modulo the stabilizer rowspace: exact via enumeration when the
    rowspace is small, else a greedy row-reduction upper bound."""
    from .gf import coset_min_weight

    if stab_code is not None:
        return coset_min_weight(v, stab_code)
    if stab_rows.size == 0:
        return int(np.count_nonzero(v))
    cur = v.copy()
    w = int(np.count_nonzero(cur))
    while w > 0:
        best_cand, best_w = None, w
        for scale in range(1, p):
            cands = (cur[None, :] + scale * stab_rows) % p
            weights = np.count_nonzero(cands, axis=1)
            k = int(weights.argmin())
            if int(weights[k]) < best_w:
                best_w, best_cand = int(weights[k]), cands[k]
        if best_cand is None:
            break
        cur, w = best_cand, best_w
    return w


def _enumerate_small(n: int, max_w: int, p: int) -> Iterator[np.ndarray]:
    """All nonzero vectors of weight at most max_w."""
    for w in range(1, max_w + 1):
        for support in combinations(range(n), w):
            for vals in product(range(1, p), repeat=w):
                v = np.zeros(n, dtype=np.int64)
                v[list(support)] = vals
                yield v


def _small_count(n: int, max_w: int, p: int) -> int:
    return sum(math.comb(n, w) * (p - 1) ** w for w in range(1, max_w + 1))


def _sample_small(
    n: int, max_w: int, p: int, rng: np.random.Generator
) -> np.ndarray:
    w = int(rng.integers(1, max_w + 1))
    v = np.zeros(n, dtype=np.int64)
    support = rng.choice(n, size=w, replace=False)
    v[support] = rng.integers(1, p, size=w)
    return v


def estimate_ssexp(
    code: CssCode,
    epsilon_grid: list[float],
    trials: int = 200,
    seed: int = 0,
    exhaustive_limit: int = DEFAULT_SSEXP_EXHAUSTIVE,
    coset_budget: int = 2**12,
) -> ExpansionCurve:
    """Empirical expansion curve: for each epsilon, the minimal observed
    ratio of normalized syndrome weight to normalized coset weight, on both
    the boundary (Z checks, X stabilizers) and coboundary (X checks, Z
    stabilizers) sides.  Elements of the stabilizer rowspace are skipped as
    0/0.  Coset weights are exact only when the rowspace fits the budget."""
    p, n = code.p, code.n
    ax, az = code.h_x.toarray(), code.h_z.toarray()
    sides = {}
    exact_cosets = True
    for name, checks, stab_rows in (
        ("boundary", az, ax),
        ("coboundary", ax, az),
    ):
        stab_dim = rank(stab_rows, p) if stab_rows.size else 0
        stab_code = None
        if p**stab_dim <= coset_budget:
            stab_code = LinearCode(p, n, stab_rows)
        else:
            exact_cosets = False
        sides[name] = (checks, stab_rows, stab_code, checks.shape[0])
    rng = np.random.default_rng(seed)
    points = []
    for eps in epsilon_grid:
        if not 0 < eps <= 1:
            raise DomainError(f"epsilon {eps} outside (0, 1]")
        max_w = int(math.floor(eps * n))
        mins: dict[str, float | None] = {"boundary": None, "coboundary": None}
        counts = {"boundary": 0, "coboundary": 0}
        exhaustive = max_w >= 1 and _small_count(n, max_w, p) <= exhaustive_limit
        if max_w >= 1:
            if exhaustive:
                vectors: Iterator[np.ndarray] = _enumerate_small(n, max_w, p)
            else:
                vectors = (_sample_small(n, max_w, p, rng) for _ in range(trials))
            for v in vectors:
                for name, (checks, stab_rows, stab_code, m_checks) in sides.items():
                    syn = int(np.count_nonzero((checks @ v) % p))
                    cw = _coset_weight_bound(v, stab_rows, stab_code, p)
                    if cw == 0:
                        continue
                    ratio = (syn / m_checks) / (cw / n)
                    counts[name] += 1
                    if mins[name] is None or ratio < mins[name]:
                        mins[name] = ratio
        points.append(
            CurvePoint(
                epsilon=float(eps),
                max_weight=max_w,
                boundary_min=mins["boundary"],
                coboundary_min=mins["coboundary"],
                boundary_samples=counts["boundary"],
                coboundary_samples=counts["coboundary"],
                exhaustive=exhaustive,
            )
        )
    return ExpansionCurve(points=points, exact_cosets=exact_cosets)


def steane_code() -> CssCode:
    """[[7,1,3]] self-dual CSS code on the Hamming checks."""
    h = FMatrix.from_dense(
        2,
        [
            [1, 0, 1, 0, 1, 0, 1],
            [0, 1, 1, 0, 0, 1, 1],
            [0, 0, 0, 1, 1, 1, 1],
        ],
    )
    return CssCode(p=2, n=7, h_x=h, h_z=h, provenance={"kind": "imported", "name": "steane"})


def shor_code() -> CssCode:
    """[[9,1,3]] code: Z checks pair qubits inside blocks, X checks span
    adjacent blocks."""
    pairs = [(0, 1), (1, 2), (3, 4), (4, 5), (6, 7), (7, 8)]
    z_rows = np.zeros((6, 9), dtype=np.int64)
    for r, (a, b) in enumerate(pairs):
        z_rows[r, a] = z_rows[r, b] = 1
    x_rows = np.zeros((2, 9), dtype=np.int64)
    x_rows[0, 0:6] = 1
    x_rows[1, 3:9] = 1
    return CssCode(
        p=2,
        n=9,
        h_x=FMatrix.from_dense(2, x_rows),
        h_z=FMatrix.from_dense(2, z_rows),
        provenance={"kind": "imported", "name": "shor"},
    )
