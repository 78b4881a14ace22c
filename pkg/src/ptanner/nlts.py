"""Low-energy structure lab for small CSS codes.

Everything here is exact and exhaustive by design: syndrome sets are full
enumerations of the hypercube, cluster partitions come from an explicit
pairwise relation, Hamiltonians are dense matrices on at most 12 qubits,
and measurement statistics are computed by literal basis change.  Bit
strings are packed big-endian into Python ints (coordinate 0 is the most
significant bit) so that integer order equals lexicographic order on
vectors; that makes "lexicographically least representative" a plain min().
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import NamedTuple

import numpy as np
from scipy.sparse import coo_matrix
from scipy.sparse.csgraph import connected_components

from .errors import (
    BudgetExceeded,
    DomainError,
    PreconditionViolated,
    StateDimensionMismatch,
    UnsupportedField,
)
from .gf import kernel_basis, rank, row_reduce
from .tanner import CssCode

ENUMERATION_CAP = 2**22
HAMILTONIAN_QUBIT_CAP = 12
SPREAD_MASS_STRICT = 0.25 - 0.25 / math.sqrt(2)  # about 0.0732
SPREAD_MASS_RELAXED = 0.02
UNCERTAINTY_BOUND = 0.5 + 0.5 / math.sqrt(2)


def pack_bits(v) -> int:
    """Big-endian packing: vector order == integer order."""
    out = 0
    for bit in np.asarray(v, dtype=np.int64):
        out = (out << 1) | (int(bit) & 1)
    return out


def unpack_bits(x: int, n: int) -> np.ndarray:
    return np.array([(x >> (n - 1 - i)) & 1 for i in range(n)], dtype=np.int64)


def _require_gf2(code: CssCode) -> None:
    if code.p != 2:
        raise UnsupportedField(f"binary-only operation called over GF({code.p})")


def _packed_rows(mat) -> list[int]:
    return [pack_bits(row) for row in mat.toarray()]


def _all_kernel_words(checks: np.ndarray, n: int) -> list[int]:
    """Every packed word of ker(checks) over GF(2)."""
    kb = kernel_basis(checks, 2) if checks.size else np.eye(n, dtype=np.int64)
    packed = [pack_bits(r) for r in kb]
    words = [0]
    for g in packed:
        words += [w ^ g for w in words]
    return sorted(words)


@dataclass
class SyndromeSet:
    """All length-n words whose syndrome weight is at most epsilon * m.

    The syndrome is taken against the checks of the same basis as the set
    (X checks for the X set, Z checks for the Z set); the threshold is
    normalized by that same check count.
    """

    code: CssCode
    basis: str
    epsilon: float
    members: list[int]
    syndrome_of: dict[int, int]

    @property
    def n(self) -> int:
        return self.code.n

    def __contains__(self, y: int) -> bool:
        return y in self.syndrome_of

    def to_json(self) -> str:
        return json.dumps(
            {
                "basis": self.basis,
                "epsilon": self.epsilon,
                "n": self.n,
                "size": len(self.members),
                "members": self.members,
            },
            sort_keys=True,
        )


def enumerate_syndrome_set(
    code: CssCode, basis: str, epsilon: float, cap: int = ENUMERATION_CAP
) -> SyndromeSet:
    """Exhaustive small-syndrome set over all 2^n words."""
    _require_gf2(code)
    if basis not in ("X", "Z"):
        raise DomainError(f"basis must be X or Z, got {basis!r}")
    if epsilon < 0:
        raise DomainError("epsilon must be nonnegative")
    n = code.n
    total = 1 << n
    if total > cap:
        raise BudgetExceeded(f"2^{n} states exceeds cap {cap}")
    checks = (code.h_x if basis == "X" else code.h_z).toarray()
    m = checks.shape[0]
    thr = epsilon * m + 1e-12
    shifts = np.arange(n - 1, -1, -1, dtype=np.int64)
    syn_weights = np.zeros(m, dtype=np.int64)
    members: list[int] = []
    syndrome_of: dict[int, int] = {}
    syn_pack = 1 << np.arange(m - 1, -1, -1, dtype=object) if m else np.zeros(0)
    chunk = 1 << 16
    for start in range(0, total, chunk):
        ints = np.arange(start, min(start + chunk, total), dtype=np.int64)
        bits = (ints[:, None] >> shifts) & 1
        syn = (bits @ checks.T) % 2 if m else np.zeros((len(ints), 0), dtype=np.int64)
        weights = syn.sum(axis=1)
        for k in np.nonzero(weights <= thr)[0]:
            y = int(ints[k])
            members.append(y)
            syndrome_of[y] = int((syn[k] * syn_pack).sum()) if m else 0
    return SyndromeSet(
        code=code, basis=basis, epsilon=float(epsilon), members=members,
        syndrome_of=syndrome_of,
    )


def _coset_weight_table(stab_rows: np.ndarray, n: int, cap: int) -> np.ndarray:
    """table[v] = min weight of v + (rowspace), for every packed v."""
    total = 1 << n
    if total > cap:
        raise BudgetExceeded(f"2^{n} coset table exceeds cap {cap}")
    r = rank(stab_rows, 2) if stab_rows.size else 0
    if (1 << r) > cap:
        raise BudgetExceeded(f"2^{r} stabilizer words exceed cap {cap}")
    idx = np.arange(total, dtype=np.int64)
    weights = np.bitwise_count(idx).astype(np.int64)
    table = weights.copy()
    rref, pivots = row_reduce(stab_rows, 2) if stab_rows.size else (stab_rows, [])
    basis_words = [pack_bits(rref[i]) for i in range(len(pivots))]
    words = [0]
    for g in basis_words:
        words += [w ^ g for w in words]
    for s in words[1:]:
        np.minimum(table, weights[idx ^ s], out=table)
    return table


@dataclass
class ClusterPartition:
    """Connected components of the near-coset relation on a syndrome set.

    Two members relate when their difference has small weight modulo the
    opposite-basis stabilizer rowspace.  Each syndrome gets one decoder
    representative, chosen inside a single designated cluster per translate
    orbit so that decoding any member of a cluster lands in one stabilizer
    coset.
    """

    basis: str
    epsilon: float
    c1: float
    threshold: float
    n: int
    members: list[int]
    clusters: list[list[int]]
    cluster_of: dict[int, int]
    syndrome_of: dict[int, int]
    representatives: dict[int, int]
    representative_cluster_of: dict[int, int]
    _coset_table: np.ndarray = field(repr=False, default=None)

    def decode(self, y: int) -> int:
        """y plus the representative of its syndrome."""
        return y ^ self.representatives[self.syndrome_of[y]]

    def to_json(self) -> str:
        return json.dumps(
            {
                "basis": self.basis,
                "epsilon": self.epsilon,
                "c1": self.c1,
                "threshold": self.threshold,
                "n": self.n,
                "num_members": len(self.members),
                "clusters": self.clusters,
                "representatives": {
                    str(s): e for s, e in sorted(self.representatives.items())
                },
            },
            sort_keys=True,
        )


def build_clusters(
    sset: SyndromeSet, c1: float, cap: int = ENUMERATION_CAP
) -> ClusterPartition:
    if c1 <= 0:
        raise DomainError("c1 must be positive")
    code, n = sset.code, sset.code.n
    stab = (code.h_x if sset.basis == "Z" else code.h_z).toarray()
    table = _coset_weight_table(stab, n, cap)
    threshold = 2.0 * c1 * sset.epsilon * n + 1e-12
    members = sorted(sset.members)
    mm = np.array(members, dtype=np.int64)
    size = len(members)
    # pairwise relation, then components
    rows, cols = [], []
    for i in range(size):
        close = np.nonzero(table[mm ^ mm[i]] <= threshold)[0]
        rows += [i] * len(close)
        cols += list(close)
    if size:
        adj = coo_matrix(
            (np.ones(len(rows), dtype=np.int8), (rows, cols)), shape=(size, size)
        )
        ncomp, labels = connected_components(adj, directed=False)
    else:
        ncomp, labels = 0, np.zeros(0, dtype=np.int64)
    raw: dict[int, list[int]] = {}
    for pos, lab in enumerate(labels):
        raw.setdefault(int(lab), []).append(members[pos])
    clusters = sorted((sorted(v) for v in raw.values()), key=lambda c: c[0])
    cluster_of = {y: cid for cid, cl in enumerate(clusters) for y in cl}
    # translate orbits: shifting by any zero-syndrome word permutes clusters
    kernel_words = _all_kernel_words(
        (code.h_z if sset.basis == "Z" else code.h_x).toarray(), n
    )
    rep_cluster_of: dict[int, int] = {}
    for cid in range(len(clusters)):
        if cid in rep_cluster_of:
            continue
        y0 = clusters[cid][0]
        orbit = sorted(
            {cluster_of[y0 ^ c] for c in kernel_words if (y0 ^ c) in cluster_of}
        )
        designated = min(orbit, key=lambda k: clusters[k][0])
        for k in orbit:
            rep_cluster_of.setdefault(k, designated)
    # one representative per syndrome, inside the designated cluster
    classes: dict[int, list[int]] = {}
    for y in members:
        classes.setdefault(sset.syndrome_of[y], []).append(y)
    representatives: dict[int, int] = {}
    for s, cls in classes.items():
        y0 = min(cls)
        rep_cid = rep_cluster_of[cluster_of[y0]]
        rep_members = set(clusters[rep_cid])
        inside = [y for y in cls if y in rep_members]
        representatives[s] = min(inside) if inside else y0
    return ClusterPartition(
        basis=sset.basis,
        epsilon=sset.epsilon,
        c1=float(c1),
        threshold=float(threshold),
        n=n,
        members=members,
        clusters=clusters,
        cluster_of=cluster_of,
        syndrome_of=dict(sset.syndrome_of),
        representatives=representatives,
        representative_cluster_of=rep_cluster_of,
        _coset_table=table,
    )


@dataclass
class ClusterLemmaReport:
    partition_ok: bool
    distance_ok: bool
    translate_ok: bool
    decoder_ok: bool
    min_intercluster_distance: int | None
    c2: float
    n: int
    counterexample: dict | None = None

    @property
    def all_ok(self) -> bool:
        return self.partition_ok and self.distance_ok and self.translate_ok and self.decoder_ok

    def to_json(self) -> str:
        return json.dumps(
            {
                "partition_ok": self.partition_ok,
                "distance_ok": self.distance_ok,
                "translate_ok": self.translate_ok,
                "decoder_ok": self.decoder_ok,
                "min_intercluster_distance": self.min_intercluster_distance,
                "c2": self.c2,
                "n": self.n,
                "all_ok": self.all_ok,
                "counterexample": self.counterexample,
            },
            sort_keys=True,
        )


def verify_cluster_lemma(part: ClusterPartition, c2: float) -> ClusterLemmaReport:
    """Exhaustively check the four clustering properties.

    (1) pointwise relation sets coincide with the components;
    (2) distinct clusters are at least c2*n apart in Hamming distance;
    (3) shifting by a zero-syndrome word fixes a cluster exactly when the
        word lies in the stabilizer rowspace, and shifts it setwise
        otherwise;
    (4) decoding members of one cluster lands in a single stabilizer coset.
    """
    table = part._coset_table
    mm = np.array(part.members, dtype=np.int64)
    labels = np.array([part.cluster_of[y] for y in part.members], dtype=np.int64)
    counterexample = None

    partition_ok = True
    for i, y in enumerate(part.members):
        related = table[mm ^ y] <= part.threshold
        if not (related == (labels == labels[i])).all():
            partition_ok = False
            bad = int(mm[np.nonzero(related != (labels == labels[i]))[0][0]])
            counterexample = {"check": 1, "y": y, "y_prime": bad}
            break

    min_dist, witness = None, None
    for i in range(len(part.members)):
        diff = np.bitwise_count(mm ^ mm[i]).astype(np.int64)
        other = labels != labels[i]
        if other.any():
            j = int(np.nonzero(other)[0][np.argmin(diff[other])])
            d = int(diff[j])
            if min_dist is None or d < min_dist:
                min_dist, witness = d, (int(mm[i]), int(mm[j]))
    distance_ok = min_dist is None or min_dist >= c2 * part.n
    if not distance_ok and counterexample is None:
        counterexample = {"check": 2, "pair": witness, "distance": min_dist}

    translate_ok = True
    kernel_words = _kernel_words_from_partition(part)
    for cid, cl in enumerate(part.clusters):
        base = set(cl)
        for c in kernel_words:
            shifted = sorted(y ^ c for y in cl)
            target = part.cluster_of.get(shifted[0])
            same_set = target is not None and part.clusters[target] == shifted
            if not same_set:
                translate_ok = False
            fixes = target == cid
            in_stab = int(table[c]) == 0
            if fixes != in_stab or not same_set:
                translate_ok = False
                if counterexample is None:
                    counterexample = {"check": 3, "cluster": cid, "shift": c}
                break
        if not translate_ok:
            break

    decoder_ok = True
    for cid, cl in enumerate(part.clusters):
        d0 = part.decode(cl[0])
        for y in cl[1:]:
            if int(table[part.decode(y) ^ d0]) != 0:
                decoder_ok = False
                if counterexample is None:
                    counterexample = {"check": 4, "cluster": cid, "pair": (cl[0], y)}
                break
        if not decoder_ok:
            break

    return ClusterLemmaReport(
        partition_ok=partition_ok,
        distance_ok=bool(distance_ok),
        translate_ok=translate_ok,
        decoder_ok=decoder_ok,
        min_intercluster_distance=min_dist,
        c2=float(c2),
        n=part.n,
        counterexample=counterexample,
    )


def _kernel_words_from_partition(part: ClusterPartition) -> list[int]:
    """Zero-syndrome words, recovered as differences within syndrome classes
    of the full member set (the epsilon >= 0 set always contains them)."""
    classes: dict[int, list[int]] = {}
    for y in part.members:
        classes.setdefault(part.syndrome_of[y], []).append(y)
    zero_class = classes.get(0, [])
    if not zero_class:
        return [0]
    base = zero_class[0]
    return sorted(y ^ base for y in zero_class)


def clustering_from_ssexp(c1_prime: float, c2_prime: float) -> tuple[float, float, float]:
    """Map measured expansion constants to clustering constants."""
    if c1_prime <= 0 or c2_prime <= 0:
        raise DomainError("expansion constants must be positive")
    return (1.0 / c2_prime, c1_prime, 1.0)


@dataclass
class CodeHamiltonian:
    code: CssCode
    n: int
    matrix: np.ndarray
    x_terms: list[int]
    z_terms: list[int]

    def eigenvalues(self) -> np.ndarray:
        return np.linalg.eigvalsh(self.matrix)


def build_code_hamiltonian(
    code: CssCode, qubit_cap: int = HAMILTONIAN_QUBIT_CAP
) -> CodeHamiltonian:
    """Dense frustration-free Hamiltonian: half the average X-check
    projector plus half the average Z-check projector."""
    _require_gf2(code)
    n = code.n
    if n > qubit_cap:
        raise BudgetExceeded(f"{n} qubits exceeds cap {qubit_cap}")
    x_terms = _packed_rows(code.h_x)
    z_terms = _packed_rows(code.h_z)
    dim = 1 << n
    idx = np.arange(dim, dtype=np.int64)
    m_x, m_z = len(x_terms), len(z_terms)
    h = np.zeros((dim, dim), dtype=np.float64)
    acc_x = np.zeros((dim, dim), dtype=np.float64)
    for g in x_terms:
        acc_x[idx, idx] += 0.5
        acc_x[idx ^ g, idx] -= 0.5
    if m_x:
        h += acc_x / (2.0 * m_x)
    if m_z:
        diag = np.zeros(dim, dtype=np.float64)
        for zt in z_terms:
            diag += np.bitwise_count(idx & zt) % 2
        h[idx, idx] += diag / (2.0 * m_z)
    return CodeHamiltonian(code=code, n=n, matrix=h, x_terms=x_terms, z_terms=z_terms)


def sector_state(code: CssCode, e_x: int, e_z: int, logical: int = 0) -> dict[int, int]:
    """Integer-amplitude state spanning one syndrome sector.

    Start from the uniform superposition over (logical + stabilizer
    rowspace), apply the diagonal sign pattern of e_x, then shift by e_z.
    Amplitudes are exactly +-1 on the support.
    """
    _require_gf2(code)
    rref, pivots = row_reduce(code.h_x.toarray(), 2)
    words = [0]
    for i in range(len(pivots)):
        g = pack_bits(rref[i])
        words += [w ^ g for w in words]
    state: dict[int, int] = {}
    for u in words:
        w = logical ^ u
        amp = -1 if (int(w & e_x).bit_count() % 2) else 1
        state[w ^ e_z] = amp
    return state


def apply_hamiltonian_exact(code: CssCode, state: dict[int, int]) -> dict[int, Fraction]:
    """Apply the code Hamiltonian with rational arithmetic on a sparse
    integer-amplitude state."""
    _require_gf2(code)
    x_terms = _packed_rows(code.h_x)
    z_terms = _packed_rows(code.h_z)
    m_x, m_z = len(x_terms), len(z_terms)
    out: dict[int, Fraction] = {}
    half = Fraction(1, 2)
    for w, amp in state.items():
        amp = Fraction(amp)
        if m_x:
            for g in x_terms:
                contrib = half * amp / (2 * m_x)
                out[w] = out.get(w, Fraction(0)) + contrib
                out[w ^ g] = out.get(w ^ g, Fraction(0)) - contrib
        if m_z:
            zcount = sum(int(w & zt).bit_count() % 2 for zt in z_terms)
            out[w] = out.get(w, Fraction(0)) + half * amp * Fraction(zcount, m_z)
    return {w: v for w, v in out.items() if v != 0}


def sector_eigenvalue(code: CssCode, e_x: int, e_z: int) -> Fraction:
    """|H_X e_x| / 2 m_X + |H_Z e_z| / 2 m_Z, as an exact rational."""
    _require_gf2(code)
    x_terms = _packed_rows(code.h_x)
    z_terms = _packed_rows(code.h_z)
    syn_x = sum(int(e_x & g).bit_count() % 2 for g in x_terms)
    syn_z = sum(int(e_z & h).bit_count() % 2 for h in z_terms)
    val = Fraction(0)
    if x_terms:
        val += Fraction(syn_x, 2 * len(x_terms))
    if z_terms:
        val += Fraction(syn_z, 2 * len(z_terms))
    return val


def logical_pair(code: CssCode) -> tuple[np.ndarray, np.ndarray]:
    """Lexicographically least anticommuting logical pair (x_word, z_word).

    x_word lies in ker H_X outside rowspace(H_Z); z_word in ker H_Z outside
    rowspace(H_X); their overlap parity is 1.
    """
    _require_gf2(code)
    n = code.n
    x_words = _all_kernel_words(code.h_x.toarray(), n)
    rref_z, piv_z = row_reduce(code.h_z.toarray(), 2)
    stab_z = set()
    words = [0]
    for i in range(len(piv_z)):
        g = pack_bits(rref_z[i])
        words += [w ^ g for w in words]
    stab_z = set(words)
    c_x = next((w for w in x_words if w and w not in stab_z), None)
    if c_x is None:
        raise DomainError("code has no X-side logical (k = 0)")
    z_words = _all_kernel_words(code.h_z.toarray(), n)
    c_z = next((w for w in z_words if (w & c_x).bit_count() % 2 == 1), None)
    if c_z is None:
        raise DomainError("no anticommuting partner found")
    return unpack_bits(c_x, n), unpack_bits(c_z, n)


@dataclass
class SpreadReport:
    basis: str
    s0: list[int]
    s1: list[int]
    mass0: float
    mass1: float
    separation: int | None
    mass_threshold_strict: float
    mass_threshold_relaxed: float

    @property
    def min_mass(self) -> float:
        return min(self.mass0, self.mass1)

    @property
    def meets_strict(self) -> bool:
        return self.min_mass >= self.mass_threshold_strict - 1e-9

    @property
    def meets_relaxed(self) -> bool:
        return self.min_mass >= self.mass_threshold_relaxed - 1e-9

    def to_json(self) -> str:
        return json.dumps(
            {
                "basis": self.basis,
                "sizes": [len(self.s0), len(self.s1)],
                "mass0": self.mass0,
                "mass1": self.mass1,
                "separation": self.separation,
                "meets_strict": self.meets_strict,
                "meets_relaxed": self.meets_relaxed,
            },
            sort_keys=True,
        )


def _fwht(vec: np.ndarray) -> np.ndarray:
    a = vec.copy()
    total = a.shape[0]
    h = 1
    while h < total:
        a = a.reshape(-1, 2, h)
        x = a[:, 0, :].copy()
        y = a[:, 1, :].copy()
        a[:, 0, :] = x + y
        a[:, 1, :] = x - y
        a = a.reshape(total)
        h *= 2
    return a


def _distributions(state: np.ndarray, n: int) -> tuple[np.ndarray, np.ndarray]:
    """(Z-basis, X-basis) outcome distributions for a vector or density
    matrix on n qubits."""
    dim = 1 << n
    state = np.asarray(state)
    if state.ndim == 1:
        if state.shape[0] != dim:
            raise StateDimensionMismatch(f"vector length {state.shape[0]} != 2^{n}")
        vec = state.astype(complex)
        norm = np.linalg.norm(vec)
        if norm == 0:
            raise DomainError("zero state vector")
        vec = vec / norm
        d_z = np.abs(vec) ** 2
        d_x = np.abs(_fwht(vec)) ** 2 / dim
        return d_z, d_x
    if state.ndim == 2:
        if state.shape != (dim, dim):
            raise StateDimensionMismatch(f"density shape {state.shape} != 2^{n} square")
        rho = state.astype(complex)
        tr = np.trace(rho).real
        if abs(tr) < 1e-12:
            raise DomainError("zero-trace density operator")
        rho = rho / tr
        d_z = np.diag(rho).real.copy()
        mixed = np.apply_along_axis(_fwht, 0, rho)
        mixed = np.apply_along_axis(_fwht, 1, mixed)
        d_x = np.diag(mixed).real / dim
        return d_z, d_x
    raise StateDimensionMismatch("state must be a vector or a square matrix")


def _set_separation(s0: list[int], s1: list[int]) -> int | None:
    if not s0 or not s1:
        return None
    a = np.array(s0, dtype=np.int64)
    b = np.array(s1, dtype=np.int64)
    best = None
    for y in a:
        d = int(np.bitwise_count(b ^ y).min())
        best = d if best is None else min(best, d)
    return best


def _spread_sides(part: ClusterPartition, readout: int) -> tuple[list[int], list[int]]:
    s0, s1 = [], []
    for y in part.members:
        b = (part.decode(y) & readout).bit_count() % 2
        (s1 if b else s0).append(y)
    return s0, s1


def measure_spread(
    state,
    code: CssCode,
    partition_x: ClusterPartition,
    partition_z: ClusterPartition,
    logicals: tuple[np.ndarray, np.ndarray],
) -> tuple[SpreadReport, SpreadReport]:
    """Exact X- and Z-basis spread of a state over the decoded halves of
    the two syndrome sets.  logicals = (x_readout, z_readout) with odd
    mutual overlap."""
    _require_gf2(code)
    n = code.n
    c_x, c_z = (pack_bits(logicals[0]), pack_bits(logicals[1]))
    if (c_x & c_z).bit_count() % 2 != 1:
        raise DomainError("readout words must have odd overlap")
    d_z, d_x = _distributions(state, n)
    reports = []
    for basis, part, readout, dist in (
        ("X", partition_x, c_z, d_x),
        ("Z", partition_z, c_x, d_z),
    ):
        s0, s1 = _spread_sides(part, readout)
        mass0 = float(sum(dist[y] for y in s0))
        mass1 = float(sum(dist[y] for y in s1))
        reports.append(
            SpreadReport(
                basis=basis,
                s0=s0,
                s1=s1,
                mass0=mass0,
                mass1=mass1,
                separation=_set_separation(s0, s1),
                mass_threshold_strict=SPREAD_MASS_STRICT,
                mass_threshold_relaxed=SPREAD_MASS_RELAXED,
            )
        )
    return reports[0], reports[1]


def uncertainty_check(
    a: np.ndarray, b: np.ndarray, rho: np.ndarray, tol: float = 1e-12
) -> bool:
    """True iff at least one of |Tr(a rho)|, |Tr(b rho)| is at most
    1/2 + 1/(2 sqrt 2), for anticommuting Hermitian involutions."""
    a = np.asarray(a, dtype=complex)
    b = np.asarray(b, dtype=complex)
    rho = np.asarray(rho, dtype=complex)
    dim = a.shape[0]
    eye = np.eye(dim)
    for name, mat in (("a", a), ("b", b)):
        herm = np.linalg.norm(mat - mat.conj().T)
        if herm > tol:
            raise PreconditionViolated(f"{name} not Hermitian", norm=float(herm))
        invol = np.linalg.norm(mat @ mat - eye)
        if invol > tol:
            raise PreconditionViolated(f"{name} squared is not identity", norm=float(invol))
    anti = np.linalg.norm(a @ b + b @ a)
    if anti > tol:
        raise PreconditionViolated("operators do not anticommute", norm=float(anti))
    herm_rho = np.linalg.norm(rho - rho.conj().T)
    if herm_rho > tol:
        raise PreconditionViolated("state not Hermitian", norm=float(herm_rho))
    tr = np.trace(rho).real
    if abs(tr - 1.0) > 1e-9:
        raise PreconditionViolated("state trace differs from 1", norm=float(tr))
    eig_min = float(np.linalg.eigvalsh(rho).min())
    if eig_min < -1e-9:
        raise PreconditionViolated("state is not positive semidefinite", norm=eig_min)
    val_a = abs(np.trace(a @ rho).real)
    val_b = abs(np.trace(b @ rho).real)
    return min(val_a, val_b) <= UNCERTAINTY_BOUND + 1e-9


def depth_lower_bound(n: int, mu: float, delta: float, corollary: bool = False) -> float:
    """Circuit-depth lower bound (1/3) log2(delta^2 n / (400 log2(1/mu)));
    the corollary form adds one."""
    if not 0 < mu < 1:
        raise DomainError("mu must lie strictly between 0 and 1")
    if delta <= 0 or n <= 0:
        raise DomainError("delta and n must be positive")
    denom = 400.0 * math.log2(1.0 / mu)
    arg = delta * delta * n / denom
    if arg <= 0:
        raise DomainError("degenerate bound argument")
    val = math.log2(arg) / 3.0
    return val + 1.0 if corollary else val


class EpsilonBudget(NamedTuple):
    epsilon: float
    epsilon_prime: float


def epsilon_threshold(
    epsilon0: float, c1: float, c2: float, distance: float, n: int
) -> EpsilonBudget:
    """Energy threshold: a thousandth of the binding constraint, with its
    thousandfold companion used by the clustering machinery."""
    if min(epsilon0, c1, c2, distance) <= 0 or n <= 0:
        raise DomainError("all constants must be positive")
    eps = min(epsilon0 / 2.0, c2 / (4.0 * c1), distance / (2.0 * c1 * n)) / 1000.0
    return EpsilonBudget(epsilon=eps, epsilon_prime=1000.0 * eps)
