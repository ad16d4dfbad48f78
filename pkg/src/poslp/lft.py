"""Positive linear-fractional representations of polynomially-uncertain systems.

The canonical construction works parameter by parameter: for parameter k with
state-channel degree s_k and input-channel degree t_k it stacks the loop
signals

    z0 = [x, delta_k x, ..., delta_k^{s_k-1} x, w1, delta_k w1, ...]

so that closing w0 = Delta(delta) z0 with Delta = blockdiag(delta_k I)
reproduces the polynomial system exactly.  Cross-parameter monomials are not
representable by this layout and are rejected; users with such dependence can
supply their own LFT through the file interface.
"""

import json
from dataclasses import dataclass

import numpy as np

from . import numlin
from .errors import DegreeError, DimensionError, ModelError, WellPosednessError
from .poly import BoxDomain, Poly, PolynomialLtiSystem
from .sysmodel import PositiveLtiSystem

_WELLPOSED_RCOND = 1e-10


@dataclass(frozen=True, eq=False)
class LftSystem:
    """Nine-block LFT data; the loop is w0 = Delta(delta) z0.

    ``delta_structure`` is an n0 x n0 matrix polynomial describing
    Delta(delta); it is None for operator-type uncertainty (e.g. delays)
    analyzed only through a constant static-gain matrix."""

    A: np.ndarray
    E0: np.ndarray
    E1: np.ndarray
    C0: np.ndarray
    C1: np.ndarray
    F00: np.ndarray
    F01: np.ndarray
    F10: np.ndarray
    F11: np.ndarray
    delta_structure: Poly | None
    domain: BoxDomain | None

    def __post_init__(self):
        a = numlin.as_matrix(self.A, "A")
        n = a.shape[0]
        if a.shape != (n, n):
            raise DimensionError("A must be square")
        e0 = numlin.as_matrix(self.E0, "E0")
        c0 = numlin.as_matrix(self.C0, "C0")
        n0 = e0.shape[1]
        e1 = numlin.as_matrix(self.E1, "E1")
        c1 = numlin.as_matrix(self.C1, "C1")
        p, q = e1.shape[1], c1.shape[0]
        f00 = numlin.as_matrix(self.F00, "F00")
        f01 = numlin.as_matrix(self.F01, "F01")
        f10 = numlin.as_matrix(self.F10, "F10")
        f11 = numlin.as_matrix(self.F11, "F11")
        expect = {"E0": (e0, (n, n0)), "C0": (c0, (n0, n)), "E1": (e1, (n, p)),
                  "C1": (c1, (q, n)), "F00": (f00, (n0, n0)), "F01": (f01, (n0, p)),
                  "F10": (f10, (q, n0)), "F11": (f11, (q, p))}
        for name, (mat, shape) in expect.items():
            if mat.shape != shape:
                raise DimensionError(f"{name} has shape {mat.shape}, expected {shape}")
            object.__setattr__(self, name, mat)
        object.__setattr__(self, "A", a)
        if self.delta_structure is not None:
            if self.delta_structure.shape != (n0, n0):
                raise DimensionError("delta_structure must be n0 x n0")
            if self.domain is None:
                raise DimensionError("parametric uncertainty needs a box domain")
            _check_well_posed(self)

    @property
    def n(self):
        return self.A.shape[0]

    @property
    def n0(self):
        return self.E0.shape[1]

    @property
    def p(self):
        return self.E1.shape[1]

    @property
    def q(self):
        return self.C1.shape[0]


class TransposedLft(LftSystem):
    """Canonical LFT of the transposed system.

    Transposition does not commute with taking LFTs, so this is a distinct
    object from the transpose of an LftSystem; in the canonical polynomial
    construction the C0, F00, F01 patterns do coincide with the original's
    whenever the disturbance and output channel widths agree."""


def _wellposed_points(domain):
    per_axis = {1: 11, 2: 7}.get(domain.nparams, 3)
    return domain.grid(per_axis)


def _check_well_posed(lft):
    if lft.n0 == 0:
        return
    eye = np.eye(lft.n0)
    for point in _wellposed_points(lft.domain):
        m = eye - lft.delta_structure.eval(point) @ lft.F00
        if 1.0 / max(np.linalg.cond(m, 1), 1.0) < _WELLPOSED_RCOND:
            raise WellPosednessError(
                f"I - Delta(delta) F00 is singular near delta={point}")


def close_with_matrix(lft, delta_matrix):
    """Close the loop w0 = Delta z0 for a constant matrix Delta."""
    n0 = lft.n0
    if n0 == 0:
        return PositiveLtiSystem(A=lft.A, B=None, C=lft.C1, D=None,
                                 E=lft.E1, F=lft.F11)
    delta_matrix = numlin.as_matrix(delta_matrix, "Delta")
    if delta_matrix.shape != (n0, n0):
        raise DimensionError(f"Delta must be {n0} x {n0}")
    m = np.eye(n0) - delta_matrix @ lft.F00
    if 1.0 / max(np.linalg.cond(m, 1), 1.0) < _WELLPOSED_RCOND:
        raise WellPosednessError("loop I - Delta F00 is singular")
    w = np.linalg.solve(m, delta_matrix)     # (I - Delta F00)^{-1} Delta
    return PositiveLtiSystem(
        A=lft.A + lft.E0 @ w @ lft.C0,
        B=None,
        C=lft.C1 + lft.F10 @ w @ lft.C0,
        D=None,
        E=lft.E1 + lft.E0 @ w @ lft.F01,
        F=lft.F11 + lft.F10 @ w @ lft.F01)


def close_at(lft, delta):
    """Close the loop at a parameter point of the box."""
    if lft.delta_structure is None:
        raise ModelError("this LFT has operator uncertainty, not parametric")
    return close_with_matrix(lft, lft.delta_structure.eval(delta))


def _per_parameter_degrees(psys):
    """Per-parameter chain lengths; rejects cross-parameter monomials."""
    big = psys.nparams
    for polyname in ("A", "C", "E", "F"):
        for alpha in getattr(psys, polyname).terms:
            if sum(1 for a in alpha if a > 0) > 1:
                raise ModelError(
                    "canonical LFT construction needs per-parameter (separable) "
                    f"dependence; {polyname} has cross term {alpha}")
    state_deg = [max(psys.A.degree_in(k), psys.C.degree_in(k)) for k in range(big)]
    input_deg = [max(psys.E.degree_in(k), psys.F.degree_in(k)) for k in range(big)]
    return state_deg, input_deg


def _coeff_power(poly, k, j):
    alpha = tuple(j if i == k else 0 for i in range(poly.nparams))
    return poly.coeff(alpha)


def channel_layout(psys):
    """Ordered channel blocks [(param, kind, power, offset, width), ...]."""
    state_deg, input_deg = _per_parameter_degrees(psys)
    n, p = psys.n, psys.p
    blocks = []
    offset = 0
    for k in range(psys.nparams):
        for j in range(1, state_deg[k] + 1):
            blocks.append((k, "state", j, offset, n))
            offset += n
        for j in range(1, input_deg[k] + 1):
            blocks.append((k, "input", j, offset, p))
            offset += p
    return blocks, offset


def lft_from_polynomial(psys, degree=None):
    """Canonical positive LFT of a polynomial system (disturbance channel only).

    Control matrices B, D are ignored; robust synthesis assembles its own
    program directly from the polynomial coefficients."""
    if degree is not None and psys.degree() > degree:
        raise DegreeError(f"system degree {psys.degree()} exceeds requested {degree}")
    blocks, n0 = channel_layout(psys)
    n, p, q = psys.n, psys.p, psys.q
    zero = (0,) * psys.nparams
    a0 = psys.A.coeff(zero)
    e_cols, f10_cols = [], []
    c0 = np.zeros((n0, n))
    f00 = np.zeros((n0, n0))
    f01 = np.zeros((n0, p))
    for (k, kind, j, off, width) in blocks:
        if kind == "state":
            e_cols.append(_coeff_power(psys.A, k, j))
            f10_cols.append(_coeff_power(psys.C, k, j))
            if j == 1:
                c0[off:off + width, :] = np.eye(n)
            else:
                prev = next(o for (kk, kd, jj, o, _w) in blocks
                            if kk == k and kd == "state" and jj == j - 1)
                f00[off:off + width, prev:prev + width] = np.eye(width)
        else:
            e_cols.append(_coeff_power(psys.E, k, j))
            f10_cols.append(_coeff_power(psys.F, k, j))
            if j == 1:
                f01[off:off + width, :] = np.eye(p)
            else:
                prev = next(o for (kk, kd, jj, o, _w) in blocks
                            if kk == k and kd == "input" and jj == j - 1)
                f00[off:off + width, prev:prev + width] = np.eye(width)
    e0 = np.hstack(e_cols) if e_cols else np.zeros((n, 0))
    f10 = np.hstack(f10_cols) if f10_cols else np.zeros((q, 0))
    delta = _block_delta(psys.nparams, blocks, n0)
    return LftSystem(A=a0, E0=e0, E1=psys.E.coeff(zero), C0=c0,
                     C1=psys.C.coeff(zero), F00=f00, F01=f01, F10=f10,
                     F11=psys.F.coeff(zero), delta_structure=delta,
                     domain=psys.domain)


def _block_delta(nparams, blocks, n0):
    terms = {}
    for k in range(nparams):
        sel = np.zeros((n0, n0))
        for (kk, _kind, _j, off, width) in blocks:
            if kk == k:
                sel[off:off + width, off:off + width] = np.eye(width)
        if np.any(sel):
            alpha = tuple(1 if i == k else 0 for i in range(nparams))
            terms[alpha] = sel
    return Poly(nparams, (n0, n0), terms)


def transposed_polynomial_system(psys):
    """Coefficient-wise transposed system: (A^T, C^T in, E^T out, F^T)."""
    zero_b = Poly.zero(psys.nparams, (psys.n, 0))
    zero_d = Poly.zero(psys.nparams, (psys.p, 0))
    return PolynomialLtiSystem(
        A=psys.A.transpose(), B=zero_b, C=psys.E.transpose(), D=zero_d,
        E=psys.C.transpose(), F=psys.F.transpose(), domain=psys.domain)


def transpose_lft(psys, degree=None):
    """Canonical LFT of the transposed polynomial system."""
    base = lft_from_polynomial(transposed_polynomial_system(psys), degree)
    return TransposedLft(A=base.A, E0=base.E0, E1=base.E1, C0=base.C0,
                         C1=base.C1, F00=base.F00, F01=base.F01, F10=base.F10,
                         F11=base.F11, delta_structure=base.delta_structure,
                         domain=base.domain)


def delay_lft(a, a_h, e=None, c=None, f=None):
    """LFT of dx/dt = A x(t) + A_h x(t - h) (+ E w), z = C x (+ F w): the
    delayed state enters through one operator channel with unit static gain.

    Without (e, c, f) the representation is stability-only (no performance
    channel)."""
    a = numlin.as_matrix(a, "A")
    a_h = numlin.as_matrix(a_h, "A_h")
    n = a.shape[0]
    if a.shape != (n, n) or a_h.shape != (n, n):
        raise DimensionError("A and A_h must be square of equal size")
    e = np.zeros((n, 0)) if e is None else numlin.as_matrix(e, "E")
    c = np.zeros((0, n)) if c is None else numlin.as_matrix(c, "C")
    p, q = e.shape[1], c.shape[0]
    f = np.zeros((q, p)) if f is None else numlin.as_matrix(f, "F")
    return LftSystem(A=a, E0=a_h, E1=e, C0=np.eye(n), C1=c,
                     F00=np.zeros((n, n)), F01=np.zeros((n, p)),
                     F10=np.zeros((q, n)), F11=f,
                     delta_structure=None, domain=None)


# ---------------------------------------------------------------------------
# direct LFT ingestion for user-supplied representations

def lft_to_dict(lft):
    doc = {name: getattr(lft, name).tolist()
           for name in ("A", "E0", "E1", "C0", "C1", "F00", "F01", "F10", "F11")}
    if lft.delta_structure is not None:
        doc["delta_terms"] = [
            {"exponents": list(alpha), "S": coeff.tolist()}
            for alpha, coeff in sorted(lft.delta_structure.terms.items())]
        doc["domain_lower"] = lft.domain.lower.tolist()
        doc["domain_upper"] = lft.domain.upper.tolist()
    return doc


def lft_from_dict(doc):
    mats = {name: np.asarray(doc[name], dtype=float)
            for name in ("A", "E0", "E1", "C0", "C1", "F00", "F01", "F10", "F11")}
    n = mats["A"].shape[0] if np.ndim(mats["A"]) == 2 else 0
    n0 = np.shape(mats["E0"])[1] if np.ndim(mats["E0"]) == 2 else 0
    delta = None
    domain = None
    if "delta_terms" in doc:
        lo = np.asarray(doc["domain_lower"], dtype=float)
        up = np.asarray(doc["domain_upper"], dtype=float)
        domain = BoxDomain(lo, up)
        terms = {tuple(int(a) for a in rec["exponents"]): np.asarray(rec["S"], dtype=float)
                 for rec in doc["delta_terms"]}
        delta = Poly(domain.nparams, (n0, n0), terms)
    return LftSystem(delta_structure=delta, domain=domain, **mats)


def write_lft(lft, path):
    with open(path, "w") as fh:
        json.dump(lft_to_dict(lft), fh, indent=2, sort_keys=True)
        fh.write("\n")


def read_lft(path):
    with open(path) as fh:
        return lft_from_dict(json.load(fh))
