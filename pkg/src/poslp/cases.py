"""Bundled benchmark cases used by the `reproduce` subcommands and tests."""

import numpy as np

from .poly import BoxDomain, polynomial_system
from .sysmodel import PositiveLtiSystem


def drug_system(a11, a12, a21, c):
    """Two-compartment drug distribution model with output matrix c.

    State 1 is blood plasma, state 2 the extravascular space; the drug enters
    the bloodstream directly and is cleared at rate a11."""
    a = np.array([[-(a11 + a21), a12], [a21, -a12]])
    e = np.array([[1.0], [0.0]])
    c = np.atleast_2d(np.asarray(c, dtype=float))
    f = np.zeros((c.shape[0], 1))
    return PositiveLtiSystem(A=a, B=None, C=c, D=None, E=e, F=f)


def drug_gain_formulas(a11, a12, a21, k1, k2):
    """Closed-form (l1, linf) gains for the diagonal output diag(k1, k2)."""
    t1 = abs(k1) / a11
    t2 = abs(k2) * a21 / (a11 * a12)
    return t1 + t2, max(t1, t2)


def gene_expression_system(rel_uncertainty):
    """mRNA/protein gene expression model, parameters known up to
    +/- rel_uncertainty of their nominal values; affine in eps in [-1,1]^3."""
    big_n = float(rel_uncertainty)
    gr0, kp0, gp0 = 1.0, 2.0, 1.0
    a0 = np.array([[-gr0, 0.0], [kp0, -gp0]])
    a_eps1 = np.array([[-big_n * gr0, 0.0], [0.0, 0.0]])
    a_eps2 = np.array([[0.0, 0.0], [big_n * kp0, 0.0]])
    a_eps3 = np.array([[0.0, 0.0], [0.0, -big_n * gp0]])
    e = np.array([[1.0], [0.0]])
    c = np.array([[0.0, 1.0]])
    f = np.zeros((1, 1))
    a_terms = {(0, 0, 0): a0}
    if big_n > 0.0:
        a_terms[(1, 0, 0)] = a_eps1
        a_terms[(0, 1, 0)] = a_eps2
        a_terms[(0, 0, 1)] = a_eps3
    return polynomial_system(
        a_terms=a_terms,
        c_terms={(0, 0, 0): c},
        e_terms={(0, 0, 0): e},
        f_terms={(0, 0, 0): f},
        domain=BoxDomain.symmetric(3))


GENE_TABLE = (
    (0.0, 2.0), (0.1, 2.7162), (0.3, 5.3063), (0.5, 12.0003), (0.7, 37.7783))

DRUG_SEED = 20260810


# degree-2 polynomial-uncertainty benchmark (3 states, 2 inputs, 2 outputs,
# one parameter on [0,1]); the reference robust L1/Linf values live with the
# acceptance tests
POLY3_A = (
    np.array([[-10.0, 2.0, 4.0], [3.0, -8.0, 1.0], [2.0, 1.0, -5.0]]),
    np.array([[1.0, 0.0, 2.0], [0.0, 1.0, 2.0], [-1.0, 2.0, -1.0]]),
    np.array([[1.0, -1.0, -1.0], [1.0, -1.0, 0.0], [0.0, 1.0, -1.0]]),
)
POLY3_E = (
    np.array([[1.0, 3.0], [3.0, 0.0], [2.0, 1.0]]),
    np.array([[1.0, 3.0], [1.0, 1.0], [2.0, 1.0]]),
    np.array([[1.0, 3.0], [0.0, 1.0], [1.0, 4.0]]),
)
POLY3_C = (
    np.array([[1.0, 3.0, 1.0], [2.0, 0.0, 1.0]]),
    np.array([[1.0, 0.0, 2.0], [3.0, 1.0, 0.0]]),
    np.array([[0.0, 3.0, 2.0], [1.0, 4.0, 1.0]]),
)
POLY3_F = (
    np.array([[2.0, 1.0], [1.0, 2.0]]),
    np.array([[0.0, 2.0], [1.0, 0.0]]),
    np.array([[1.0, 1.0], [2.0, 1.0]]),
)

POLY3_REFERENCE = {
    ("l1", "const"): 133.95,
    ("l1", "saturated2"): 94.167,
    ("linf", "const"): 86.195,
    ("linf", "saturated2"): 82.025,
    ("l1", "exact"): 92.8358,
    ("linf", "exact"): 82.0249,
}


def poly3_system():
    return polynomial_system(
        a_terms={k: POLY3_A[k] for k in range(3)},
        c_terms={k: POLY3_C[k] for k in range(3)},
        e_terms={k: POLY3_E[k] for k in range(3)},
        f_terms={k: POLY3_F[k] for k in range(3)},
        domain=BoxDomain.unit(1))
