"""Linear-equation CSP instances carved out of CSS codes.

A code with check matrices H_X, H_Z and a word beta in ker(H_X) outside
rowspace(H_Z) yields the constraint system H_Z^T y = beta: one constraint
per qubit, one variable per Z check, sparse columns as coefficients.  When
beta is not a combination of Z checks the system is inconsistent, and a
kernel word of H_Z meeting beta oddly certifies that by exhibiting a
vanishing combination of constraints with nonvanishing right-hand side.

The module also carries desk-scale satisfiability probes (exact
enumeration and hill climbing), the level formula for the refutation
bound, and the dummy-variable chain reduction to 3-XOR.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from typing import NamedTuple

import numpy as np

from .errors import (
    BetaNotAdmissible,
    BudgetExceeded,
    DomainError,
    UnsupportedField,
)
from .gf import in_rowspace, kernel_basis, solve
from .inner import InnerCodePair
from .tanner import CssCode, SquareCayleyComplex


class LinConstraint(NamedTuple):
    """One sparse linear equation: sum coeffs[k] * y[vars[k]] = rhs."""

    vars: tuple[int, ...]
    coeffs: tuple[int, ...]
    rhs: int


@dataclass
class LinInstance:
    p: int
    num_vars: int
    constraints: list[LinConstraint]
    arity_bound: int
    provenance: dict = field(default_factory=dict)

    def __post_init__(self):
        for idx, con in enumerate(self.constraints):
            if len(con.vars) != len(con.coeffs):
                raise DomainError(f"constraint {idx}: vars/coeffs length mismatch")
            if len(con.vars) > self.arity_bound:
                raise DomainError(
                    f"constraint {idx}: arity {len(con.vars)} exceeds bound "
                    f"{self.arity_bound}"
                )
            if len(set(con.vars)) != len(con.vars):
                raise DomainError(f"constraint {idx}: repeated variable")
            for v in con.vars:
                if not 0 <= v < self.num_vars:
                    raise DomainError(f"constraint {idx}: variable {v} out of range")
            for c in con.coeffs:
                if c % self.p == 0:
                    raise DomainError(f"constraint {idx}: zero coefficient stored")

    @property
    def num_constraints(self) -> int:
        return len(self.constraints)

    def coefficient_matrix(self) -> np.ndarray:
        a = np.zeros((self.num_constraints, self.num_vars), dtype=np.int64)
        for i, con in enumerate(self.constraints):
            for v, c in zip(con.vars, con.coeffs):
                a[i, v] = c
        return a

    def rhs_vector(self) -> np.ndarray:
        return np.array([con.rhs for con in self.constraints], dtype=np.int64)

    def satisfied_count(self, assignment) -> int:
        y = np.asarray(assignment, dtype=np.int64) % self.p
        if y.shape != (self.num_vars,):
            raise DomainError(f"assignment length {y.shape} != {self.num_vars}")
        count = 0
        for con in self.constraints:
            lhs = sum(c * int(y[v]) for v, c in zip(con.vars, con.coeffs)) % self.p
            count += lhs == con.rhs % self.p
        return count

    def to_json(self) -> str:
        return json.dumps(
            {
                "p": self.p,
                "m": self.num_vars,
                "arity_bound": self.arity_bound,
                "constraints": [
                    {"vars": list(c.vars), "coeffs": list(c.coeffs), "rhs": c.rhs}
                    for c in self.constraints
                ],
                "provenance": self.provenance,
            },
            sort_keys=True,
        )

    @classmethod
    def from_json(cls, text: str) -> "LinInstance":
        obj = json.loads(text)
        cons = [
            LinConstraint(tuple(c["vars"]), tuple(c["coeffs"]), int(c["rhs"]))
            for c in obj["constraints"]
        ]
        return cls(
            p=int(obj["p"]),
            num_vars=int(obj["m"]),
            constraints=cons,
            arity_bound=int(obj["arity_bound"]),
            provenance=obj.get("provenance", {}),
        )

    @classmethod
    def from_dense(cls, p: int, coeffs: np.ndarray, rhs, provenance=None) -> "LinInstance":
        """Build an instance from a dense (constraints x vars) system."""
        a = np.asarray(coeffs, dtype=np.int64) % p
        b = np.asarray(rhs, dtype=np.int64) % p
        if a.ndim != 2 or b.shape != (a.shape[0],):
            raise DomainError("coefficient matrix and rhs shapes disagree")
        cons = []
        for i in range(a.shape[0]):
            nz = np.nonzero(a[i])[0]
            cons.append(
                LinConstraint(
                    tuple(int(v) for v in nz),
                    tuple(int(a[i, v]) for v in nz),
                    int(b[i]),
                )
            )
        bound = max((len(c.vars) for c in cons), default=0)
        return cls(
            p=p,
            num_vars=a.shape[1],
            constraints=cons,
            arity_bound=bound,
            provenance=provenance or {},
        )


def emit_lin_instance(code: CssCode, beta) -> LinInstance:
    """Transpose system: constraint i is column i of H_Z with rhs beta_i.

    beta must be a logical on the X side: annihilated by H_X yet outside
    the rowspace of H_Z, which is exactly what makes the system worth
    emitting (it is then inconsistent while locally innocuous).
    """
    p, n = code.p, code.n
    b = np.asarray(beta, dtype=np.int64) % p
    if b.shape != (n,):
        raise BetaNotAdmissible(f"beta length {b.shape} differs from block length {n}")
    hx = code.h_x.toarray()
    hz = code.h_z.toarray()
    if ((hx @ b) % p).any():
        raise BetaNotAdmissible("beta is not annihilated by the X checks")
    if in_rowspace(hz, b, p):
        raise BetaNotAdmissible("beta lies in the Z-check rowspace")
    cons = []
    for i in range(n):
        col = hz[:, i] % p
        nz = np.nonzero(col)[0]
        cons.append(
            LinConstraint(
                tuple(int(v) for v in nz),
                tuple(int(col[v]) for v in nz),
                int(b[i]),
            )
        )
    beta_kind = "ones" if (b == b[0]).all() and b[0] == 1 else "custom"
    return LinInstance(
        p=p,
        num_vars=code.m_z,
        constraints=cons,
        arity_bound=code.locality,
        provenance={"code": code.provenance, "beta": beta_kind},
    )


class TannerConstraintStream:
    """Constraint-at-a-time emission for Tanner builds.

    Each call reconstructs one column of H_Z by pure group arithmetic:
    locate the two incident 01/10 vertices of the face, read the dual
    basis coefficients at the face's grid cell, and compose the check
    indices from the fixed row layout.  No check matrix is formed, so the
    cost of one constraint does not grow with the block length.
    """

    def __init__(self, complex_: SquareCayleyComplex, pair: InnerCodePair, beta):
        if pair.n != complex_.delta:
            raise DomainError(
                f"inner length {pair.n} differs from complex degree {complex_.delta}"
            )
        self.complex = complex_
        self.p = pair.p
        self.beta = np.asarray(beta, dtype=np.int64) % self.p
        if self.beta.shape != (complex_.num_faces,):
            raise BetaNotAdmissible(
                f"beta length {self.beta.shape} differs from {complex_.num_faces}"
            )
        dual_a = pair.code_a.dual().basis % self.p
        dual_b = pair.code_b.dual().basis % self.p
        self._dual_a = [[int(x) for x in row] for row in dual_a]
        self._dual_b = [[int(x) for x in row] for row in dual_b]
        self._ka = len(self._dual_a)
        self._kb = len(self._dual_b)
        self._gs = complex_.group_size
        self._paired = complex_.convention == "paired"
        self._elems_a = complex_.gens_a.elements
        self._elems_b = complex_.gens_b.elements
        self._sig_a = complex_.gens_a.pairing
        self._sig_b = complex_.gens_b.pairing

    @property
    def num_constraints(self) -> int:
        return self.complex.num_faces

    @property
    def num_vars(self) -> int:
        return 2 * self._gs * self._ka * self._kb

    def constraint(self, f: int) -> LinConstraint:
        g, i, j = self.complex.face_from_index(f)
        v01 = (self._elems_a[i] * g).index
        v10 = (g * self._elems_b[j]).index
        r01 = self._sig_a[i] if self._paired else i
        c10 = self._sig_b[j] if self._paired else j
        ka, kb, p = self._ka, self._kb, self.p
        block = ka * kb
        vars_: list[int] = []
        coeffs: list[int] = []
        base = v01 * block
        for s in range(ka):
            wa = self._dual_a[s][r01]
            if not wa:
                continue
            row_b = self._dual_b
            for t in range(kb):
                val = wa * row_b[t][j] % p
                if val:
                    vars_.append(base + s * kb + t)
                    coeffs.append(val)
        base = (self._gs + v10) * block
        for s in range(ka):
            wa = self._dual_a[s][i]
            if not wa:
                continue
            for t in range(kb):
                val = wa * self._dual_b[t][c10] % p
                if val:
                    vars_.append(base + s * kb + t)
                    coeffs.append(val)
        return LinConstraint(tuple(vars_), tuple(coeffs), int(self.beta[f]))

    def as_instance(self, provenance=None) -> LinInstance:
        cons = [self.constraint(f) for f in range(self.num_constraints)]
        bound = max((len(c.vars) for c in cons), default=0)
        return LinInstance(
            p=self.p,
            num_vars=self.num_vars,
            constraints=cons,
            arity_bound=bound,
            provenance=provenance or {"kind": "tanner-stream"},
        )


@dataclass
class UnsatReport:
    consistent: bool
    assignment: list[int] | None
    certificate: list[tuple[int, int]] | None

    def to_json(self) -> str:
        return json.dumps(
            {
                "consistent": self.consistent,
                "assignment": self.assignment,
                "certificate": (
                    [[i, c] for i, c in self.certificate]
                    if self.certificate is not None
                    else None
                ),
            },
            sort_keys=True,
        )


def certify_unsat(instance: LinInstance) -> UnsatReport:
    """Solve the full system; on inconsistency return the vanishing
    constraint combination with nonzero right-hand side."""
    p = instance.p
    a = instance.coefficient_matrix() % p
    b = instance.rhs_vector() % p
    y = solve(a, b, p)
    if y is not None:
        return UnsatReport(
            consistent=True, assignment=[int(v) for v in y], certificate=None
        )
    # u with u.A = 0 and u.b != 0; guaranteed to exist when unsolvable
    for u in kernel_basis(a.T, p):
        if int(u @ b) % p:
            nz = np.nonzero(u)[0]
            cert = [(int(i), int(u[i])) for i in nz]
            return UnsatReport(consistent=False, assignment=None, certificate=cert)
    raise DomainError("system reported unsolvable but no certificate found")


@dataclass
class SatReport:
    mode: str
    num_constraints: int
    best_satisfied: int
    best_fraction: float
    assignment: list[int]
    exact: bool
    certificate: list[tuple[int, int]] | None = None

    def to_json(self) -> str:
        return json.dumps(
            {
                "mode": self.mode,
                "num_constraints": self.num_constraints,
                "best_satisfied": self.best_satisfied,
                "best_fraction": self.best_fraction,
                "assignment": self.assignment,
                "exact": self.exact,
                "certificate": (
                    [[i, c] for i, c in self.certificate]
                    if self.certificate is not None
                    else None
                ),
            },
            sort_keys=True,
        )


def _assignments_chunk(start: int, stop: int, m: int, p: int) -> np.ndarray:
    """Rows start..stop-1 of the lexicographic assignment table."""
    idx = np.arange(start, stop, dtype=np.int64)
    digits = np.empty((len(idx), m), dtype=np.int64)
    rem = idx
    for pos in range(m - 1, -1, -1):
        digits[:, pos] = rem % p
        rem = rem // p
    return digits


def max_sat(
    instance: LinInstance,
    mode: str = "exact",
    budget: int = 2**20,
    seed: int = 0,
    restarts: int = 8,
    max_steps: int = 200,
) -> SatReport:
    """Best satisfied fraction: exhaustive in exact mode, multi-restart
    single-flip hill climbing otherwise.  Ties break toward the
    lexicographically least assignment."""
    if mode not in ("exact", "local-search"):
        raise DomainError(f"unknown mode {mode!r}")
    p, m, nc = instance.p, instance.num_vars, instance.num_constraints
    a = instance.coefficient_matrix() % p
    b = instance.rhs_vector() % p
    unsat = certify_unsat(instance)

    def count_vec(y: np.ndarray) -> int:
        return int(((a @ y) % p == b).sum())

    if mode == "exact":
        total = p**m
        if total > budget:
            raise BudgetExceeded(f"{p}^{m} assignments exceed budget {budget}")
        best_count, best_y = -1, None
        chunk = 1 << 14
        for start in range(0, total, chunk):
            ys = _assignments_chunk(start, min(start + chunk, total), m, p)
            counts = ((ys @ a.T) % p == b).sum(axis=1)
            k = int(np.argmax(counts))
            if int(counts[k]) > best_count:
                best_count, best_y = int(counts[k]), ys[k].copy()
        exact = True
    else:
        rng = np.random.default_rng(seed)
        best_count, best_y = -1, None
        for _ in range(restarts):
            y = rng.integers(0, p, size=m, dtype=np.int64)
            current = count_vec(y)
            for _ in range(max_steps):
                improved = False
                for v in range(m):
                    old = y[v]
                    for val in range(p):
                        if val == old:
                            continue
                        y[v] = val
                        c = count_vec(y)
                        if c > current:
                            current = c
                            improved = True
                            break
                        y[v] = old
                    if improved:
                        break
                if not improved:
                    break
            if current > best_count or (
                current == best_count and tuple(y) < tuple(best_y)
            ):
                best_count, best_y = current, y.copy()
        exact = False

    return SatReport(
        mode=mode,
        num_constraints=nc,
        best_satisfied=best_count,
        best_fraction=best_count / nc if nc else 1.0,
        assignment=[int(v) for v in best_y],
        exact=exact,
        certificate=unsat.certificate,
    )


def sos_level_bound(c1: float, c2: float, m: int, ell: int) -> float:
    """Refutation-level formula c1 * c2 * m / (4 * ell)."""
    if c1 <= 0 or c2 <= 0 or m <= 0 or ell <= 0:
        raise DomainError("all level-bound inputs must be positive")
    return c1 * c2 * m / (4.0 * ell)


class XorClause(NamedTuple):
    vars: tuple[int, ...]
    parity: int


@dataclass
class XorInstance:
    num_vars: int
    clauses: list[XorClause]

    def __post_init__(self):
        for idx, cl in enumerate(self.clauses):
            if len(cl.vars) > 3:
                raise DomainError(f"clause {idx} has arity {len(cl.vars)} > 3")
            if len(set(cl.vars)) != len(cl.vars):
                raise DomainError(f"clause {idx} repeats a variable")
            for v in cl.vars:
                if not 0 <= v < self.num_vars:
                    raise DomainError(f"clause {idx}: variable {v} out of range")
            if cl.parity not in (0, 1):
                raise DomainError(f"clause {idx}: parity must be 0 or 1")

    @property
    def num_clauses(self) -> int:
        return len(self.clauses)

    def satisfied_count(self, assignment) -> int:
        y = np.asarray(assignment, dtype=np.int64) % 2
        count = 0
        for cl in self.clauses:
            count += sum(int(y[v]) for v in cl.vars) % 2 == cl.parity
        return count

    def to_lin_instance(self) -> LinInstance:
        cons = [LinConstraint(cl.vars, (1,) * len(cl.vars), cl.parity) for cl in self.clauses]
        return LinInstance(
            p=2,
            num_vars=self.num_vars,
            constraints=cons,
            arity_bound=3,
            provenance={"kind": "3xor"},
        )

    def to_json(self) -> str:
        return json.dumps(
            {
                "num_vars": self.num_vars,
                "clauses": [{"vars": list(c.vars), "parity": c.parity} for c in self.clauses],
            },
            sort_keys=True,
        )

    def to_text(self) -> str:
        """DIMACS-flavored dump: 1-indexed variables, parity last."""
        lines = [f"p xor {self.num_vars} {self.num_clauses}"]
        for cl in self.clauses:
            body = " ".join(str(v + 1) for v in cl.vars)
            lines.append(f"x {body} {cl.parity}".replace("  ", " "))
        return "\n".join(lines) + "\n"

    @classmethod
    def from_text(cls, text: str) -> "XorInstance":
        lines = [ln.strip() for ln in text.splitlines() if ln.strip()]
        if not lines or not lines[0].startswith("p xor"):
            raise DomainError("missing 'p xor' header")
        _, _, nv, nc = lines[0].split()
        clauses = []
        for ln in lines[1:]:
            parts = ln.split()
            if parts[0] != "x":
                raise DomainError(f"unexpected line {ln!r}")
            *vars_, parity = parts[1:]
            clauses.append(
                XorClause(tuple(int(v) - 1 for v in vars_), int(parity))
            )
        inst = cls(num_vars=int(nv), clauses=clauses)
        if inst.num_clauses != int(nc):
            raise DomainError("clause count disagrees with header")
        return inst


def reduce_to_3xor(instance: LinInstance) -> XorInstance:
    """Chain every long parity constraint through fresh dummy variables.

    An arity-w constraint x1+...+xw = b with w > 3 becomes
        x1 + x2 + z1 = 0
        z_{j-1} + x_{j+1} + z_j = 0        (j = 2 .. w-2)
        z_{w-2} + xw = b
    adding w-2 dummies; short constraints pass through unchanged.
    """
    if instance.p != 2:
        raise UnsupportedField(f"3-XOR reduction requires GF(2), got GF({instance.p})")
    next_var = instance.num_vars
    clauses: list[XorClause] = []
    for con in instance.constraints:
        vs = con.vars
        b = con.rhs % 2
        w = len(vs)
        if w <= 3:
            clauses.append(XorClause(tuple(vs), b))
            continue
        zs = list(range(next_var, next_var + w - 2))
        next_var += w - 2
        clauses.append(XorClause((vs[0], vs[1], zs[0]), 0))
        for j in range(2, w - 1):
            clauses.append(XorClause((zs[j - 2], vs[j], zs[j - 1]), 0))
        clauses.append(XorClause((zs[w - 3], vs[w - 1]), b))
    return XorInstance(num_vars=next_var, clauses=clauses)
