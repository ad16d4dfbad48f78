"""LTI system container, positivity classification and the static-gain oracle.

The system is  dx/dt = A x + B u + E w,  z = C x + D u + F w.  It is positive
when A is Metzler and E, C, F are (entrywise) nonnegative; B and D play no
role in positivity and may be empty for analysis-only models.
"""

import json
from dataclasses import dataclass, field

import numpy as np

from . import numlin
from .errors import ClassificationError, DimensionError, StabilityError
from .lpcore import LpBuilder, StrictnessPolicy, solve_lp


@dataclass(frozen=True, eq=False)
class PositiveLtiSystem:
    A: np.ndarray
    B: np.ndarray
    C: np.ndarray
    D: np.ndarray
    E: np.ndarray
    F: np.ndarray
    metzler_A: bool = field(init=False)
    nonneg_E: bool = field(init=False)
    nonneg_C: bool = field(init=False)
    nonneg_F: bool = field(init=False)

    def __post_init__(self):
        a = numlin.as_matrix(self.A, "A")
        n = a.shape[0]
        if a.shape[1] != n:
            raise DimensionError(f"A must be square, got {a.shape}")
        e = numlin.as_matrix(self.E, "E")
        c = numlin.as_matrix(self.C, "C")
        f = numlin.as_matrix(self.F, "F")
        q, p = c.shape[0], e.shape[1]
        b = numlin.as_matrix(self.B, "B") if self.B is not None else np.zeros((n, 0))
        d = numlin.as_matrix(self.D, "D") if self.D is not None else np.zeros((q, 0))
        if b.size == 0:
            b = b.reshape(n, 0) if b.shape[0] in (0, n) else b
        if d.size == 0:
            d = d.reshape(q, 0) if d.shape[0] in (0, q) else d
        if e.shape[0] != n or c.shape[1] != n:
            raise DimensionError("E must be n x p and C must be q x n")
        if f.shape != (q, p):
            raise DimensionError(f"F must be {q} x {p}, got {f.shape}")
        if b.shape[0] != n:
            raise DimensionError(f"B must have {n} rows, got {b.shape}")
        if d.shape != (q, b.shape[1]):
            raise DimensionError(f"D must be {q} x {b.shape[1]}, got {d.shape}")
        for name, val in (("A", a), ("B", b), ("C", c), ("D", d), ("E", e), ("F", f)):
            object.__setattr__(self, name, val)
        object.__setattr__(self, "metzler_A", numlin.is_metzler(a))
        object.__setattr__(self, "nonneg_E", numlin.is_nonnegative(e))
        object.__setattr__(self, "nonneg_C", numlin.is_nonnegative(c))
        object.__setattr__(self, "nonneg_F", numlin.is_nonnegative(f))

    @property
    def n(self):
        return self.A.shape[0]

    @property
    def m(self):
        return self.B.shape[1]

    @property
    def p(self):
        return self.E.shape[1]

    @property
    def q(self):
        return self.C.shape[0]


@dataclass(frozen=True)
class PositivityReport:
    is_positive: bool
    violations: tuple   # of (matrix name, (i, j), value)


def make_system(A, C, E, F, B=None, D=None):
    """Convenience constructor with analysis matrices first."""
    return PositiveLtiSystem(A=A, B=B, C=C, D=D, E=E, F=F)


def classify(sys, tol=0.0):
    """List every positivity violation: off-diagonal negatives of A and
    negative entries of E, C, F."""
    violations = []
    for idx, val in numlin.metzler_violations(sys.A, tol):
        violations.append(("A", idx, val))
    for name, mat in (("E", sys.E), ("C", sys.C), ("F", sys.F)):
        for idx, val in numlin.nonneg_violations(mat, tol):
            violations.append((name, idx, val))
    return PositivityReport(is_positive=not violations, violations=tuple(violations))


def transpose_system(sys):
    """Swap the roles of the disturbance channel: (A^T, C^T in, E^T out, F^T).

    The L1-gain of the result equals the Linf-gain of the original and vice
    versa.  B and D do not participate and are dropped."""
    return PositiveLtiSystem(A=sys.A.T, B=None, C=sys.E.T, D=None,
                             E=sys.C.T, F=sys.F.T)


def metzler_stable(a, policy=None, tol=0.0):
    """Hurwitz test for a Metzler matrix via the copositive Lyapunov LP
    {lambda >= floor, lambda^T A <= -eps}.

    ``tol`` loosens only the Metzler precheck (useful when A was recomposed
    from a controller and carries machine-epsilon noise)."""
    policy = policy or StrictnessPolicy()
    a = numlin.as_matrix(a, "A")
    if not numlin.is_metzler(a, tol):
        raise ClassificationError("stability LP is only valid for Metzler matrices")
    n = a.shape[0]
    if n == 0:
        return True
    b = LpBuilder()
    lam = b.add_vars("lam", n, lower=policy.lambda_floor)
    for j in range(n):
        b.add_row({lam[i]: a[i, j] for i in range(n)}, "<=", -policy.epsilon, f"st{j}")
    return solve_lp(b.build()).status == "optimal"


def is_stable(sys, policy=None, tol=0.0):
    return metzler_stable(sys.A, policy, tol)


def static_gain(sys, policy=None, tol=0.0):
    """Zero-frequency transfer matrix F - C A^{-1} E (requires Hurwitz A)."""
    if not is_stable(sys, policy, tol):
        raise StabilityError("A is not Hurwitz; static gain undefined")
    if sys.p == 0 or sys.q == 0:
        return sys.F.copy()
    x = numlin.solve(sys.A, sys.E)
    return sys.F - sys.C @ x


def oracle_gains(sys, policy=None, tol=0.0):
    """Exact (l1, linf) gains from the static-gain matrix: max column sum and
    max row sum of F - C A^{-1} E."""
    h0 = static_gain(sys, policy, tol)
    l1 = float(np.max(h0.sum(axis=0))) if h0.shape[1] else 0.0
    linf = float(np.max(h0.sum(axis=1))) if h0.shape[0] else 0.0
    return l1, linf


def random_positive_system(n, m, p, q, seed):
    """Seeded random positive stable instance.

    Off-diagonals of A are uniform on [0, 1] and each diagonal entry is set to
    -(off-diagonal row sum + margin), margin uniform on [0.1, 1.1], which
    makes A strictly diagonally dominant and hence Hurwitz.  B, C, D, E, F are
    uniform nonnegative."""
    if min(n, p, q) < 1 or m < 0:
        raise DimensionError("dimensions must be >= 1 (m may be 0)")
    rng = np.random.Generator(np.random.PCG64(seed))
    a = rng.uniform(0.0, 1.0, (n, n))
    np.fill_diagonal(a, 0.0)
    margins = rng.uniform(0.1, 1.1, n)
    np.fill_diagonal(a, -(a.sum(axis=1) + margins))
    b = rng.uniform(0.0, 1.0, (n, m))
    c = rng.uniform(0.0, 1.0, (q, n))
    d = rng.uniform(0.0, 1.0, (q, m))
    e = rng.uniform(0.0, 1.0, (n, p))
    f = rng.uniform(0.0, 1.0, (q, p))
    return PositiveLtiSystem(A=a, B=b, C=c, D=d, E=e, F=f)


# ---------------------------------------------------------------------------
# system files: self-describing JSON with row-major matrices

def system_to_dict(sys):
    doc = {
        "n": sys.n, "m": sys.m, "p": sys.p, "q": sys.q,
        "A": sys.A.tolist(), "C": sys.C.tolist(),
        "E": sys.E.tolist(), "F": sys.F.tolist(),
    }
    if sys.m:
        doc["B"] = sys.B.tolist()
        doc["D"] = sys.D.tolist()
    return doc


def system_from_dict(doc):
    n, m = int(doc["n"]), int(doc.get("m", 0))
    p, q = int(doc["p"]), int(doc["q"])
    def mat(key, rows, cols):
        if key not in doc or doc[key] in ([], None):
            return np.zeros((rows, cols))
        return np.asarray(doc[key], dtype=float).reshape(rows, cols)
    return PositiveLtiSystem(
        A=mat("A", n, n), B=mat("B", n, m), C=mat("C", q, n),
        D=mat("D", q, m), E=mat("E", n, p), F=mat("F", q, p))


def write_system(sys, path):
    with open(path, "w") as fh:
        json.dump(system_to_dict(sys), fh, indent=2, sort_keys=True)
        fh.write("\n")


def read_system(path):
    with open(path) as fh:
        return system_from_dict(json.load(fh))
