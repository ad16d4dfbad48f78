"""Relax polynomial-in-delta LP rows to finite LPs via Handelman products.

A robust row  P(x, delta) <= 0 on a box  is certified by writing
P = sum_k Q_k(y) g^{(k)}(delta)  over all products g^{(k)} of the box's
defining linear forms up to total degree b, with every coefficient block
Q_k <= 0.  Matching coefficients monomial-by-monomial gives the full form;
eliminating an invertible block Upsilon_2 of the coefficient-matching matrix
gives the reduced form with fewer additional variables.  Cross-products of
the defining forms are included (pure powers of a single form would not span
the matched monomials).

The relaxation is sound for any b >= deg P and becomes necessary for some
finite b; since no a-priori bound on that b is used here, b is caller
escalatable and defaults to deg P + 2.
"""

from dataclasses import dataclass

import numpy as np

from .errors import CombinatorialCapError, DegreeError, DimensionError
from .lpcore import LpBuilder
from .poly import Poly, monomials

PRODUCT_CAP = 10_000


@dataclass(frozen=True, eq=False)
class LinForm:
    """Affine form coeffs . delta + const, nonnegative exactly on the box."""

    coeffs: np.ndarray
    const: float

    def as_poly(self):
        n = self.coeffs.shape[0]
        terms = {(0,) * n: np.asarray(self.const, dtype=float)}
        for k in range(n):
            if self.coeffs[k] != 0.0:
                alpha = tuple(1 if i == k else 0 for i in range(n))
                terms[alpha] = np.asarray(self.coeffs[k], dtype=float)
        return Poly(n, (), terms)


@dataclass(frozen=True, eq=False)
class HandelmanBasis:
    """Defining forms of the box plus the maximum total product degree b."""

    forms: tuple
    degree: int
    nparams: int

    @classmethod
    def from_box(cls, box, degree):
        if degree < 1:
            raise DegreeError("product degree b must be >= 1")
        forms = []
        for k in range(box.nparams):
            e = np.zeros(box.nparams)
            e[k] = 1.0
            forms.append(LinForm(coeffs=e.copy(), const=-float(box.lower[k])))
            forms.append(LinForm(coeffs=-e, const=float(box.upper[k])))
        return cls(forms=tuple(forms), degree=int(degree), nparams=box.nparams)


def enumerate_products(basis, cap=PRODUCT_CAP):
    """Exponent tuples over the forms with total degree 0..b, graded-lex;
    the degree-0 tuple stands for the constant product 1."""
    nf = len(basis.forms)
    count = 1
    for d in range(1, basis.degree + 1):
        count *= (nf + d)
        count //= d
    if count > cap:
        raise CombinatorialCapError(
            f"{count} basis products exceed the cap of {cap}")
    return monomials(nf, basis.degree)


def product_poly(basis, exponents):
    out = Poly.constant(1.0, basis.nparams)
    for form, e in zip(basis.forms, exponents):
        for _ in range(int(e)):
            fp = form.as_poly()
            out = _scalar_mul(out, fp)
    return out


def _scalar_mul(p, q):
    terms = {}
    for a, ca in p.terms.items():
        for b, cb in q.terms.items():
            key = tuple(x + y for x, y in zip(a, b))
            terms[key] = terms.get(key, 0.0) + float(ca) * float(cb)
    return Poly(p.nparams, (), {k: np.asarray(v) for k, v in terms.items()})


@dataclass(frozen=True, eq=False)
class UpsilonData:
    """Coefficient-matching data: matrix column k holds the monomial
    coefficients of product k."""

    monomials: tuple
    products: tuple
    matrix: np.ndarray

    def column_of(self, exponents):
        return self.products.index(tuple(exponents))

    def row_of(self, alpha):
        return self.monomials.index(tuple(alpha))


def build_upsilon(basis, cap=PRODUCT_CAP):
    prods = enumerate_products(basis, cap)
    mons = monomials(basis.nparams, basis.degree)
    u = np.zeros((len(mons), len(prods)))
    mon_index = {m: i for i, m in enumerate(mons)}
    for k, expo in enumerate(prods):
        poly = product_poly(basis, expo)
        for alpha, coeff in poly.terms.items():
            u[mon_index[alpha], k] = float(coeff)
    return UpsilonData(monomials=tuple(mons), products=tuple(prods), matrix=u)


def pure_power_columns(basis, ups):
    """Per-monomial product built from the lower forms only: the product
    prod_k g_{lower,k}^{alpha_k}.  In graded-lex order these columns form a
    triangular block with unit diagonal, hence an always-invertible
    Upsilon_2."""
    sel = []
    for alpha in ups.monomials:
        expo = [0] * len(basis.forms)
        for k, a in enumerate(alpha):
            expo[2 * k] = a
        sel.append(ups.column_of(expo))
    return sel


@dataclass(frozen=True, eq=False)
class RelaxationPlan:
    basis: HandelmanBasis
    ups: UpsilonData
    b: int


def plan_relaxation(rlp, b=None, cap=PRODUCT_CAP):
    if not rlp.poly_rows:
        return None
    d = max(row.degree() for row in rlp.poly_rows)
    if b is None:
        b = d + 2
    if b < d:
        raise DegreeError(f"product degree b={b} below row degree {d}")
    basis = HandelmanBasis.from_box(rlp.domain, b)
    ups = build_upsilon(basis, cap)
    return RelaxationPlan(basis=basis, ups=ups, b=b)


def _base_builder(rlp):
    builder = LpBuilder()
    for j, name in enumerate(rlp.var_names):
        lo = rlp.var_lower[j]
        up = rlp.var_upper[j]
        builder.add_var(name,
                        None if np.isneginf(lo) else lo,
                        None if np.isposinf(up) else up,
                        rlp.objective[j])
    for coeffs, rel, rhs, name in rlp.linear_rows:
        builder.add_row(dict(enumerate(coeffs)), rel, rhs, name)
    return builder


def _row_tables(row, ups, num_vars):
    """Dense (a_alpha, c_alpha) tables over the plan's monomials."""
    a = np.zeros((len(ups.monomials), num_vars))
    c = np.zeros(len(ups.monomials))
    for alpha, (coeffs, const) in row.terms.items():
        i = ups.row_of(alpha)
        a[i, : coeffs.shape[0]] = coeffs
        c[i] = const
    return a, c


def relax_full(rlp, b=None, cap=PRODUCT_CAP):
    """Full-form finite LP: per row, one nonpositive coefficient block Q_k per
    product and one coefficient-matching equality per monomial."""
    plan = plan_relaxation(rlp, b, cap)
    builder = _base_builder(rlp)
    if plan is None:
        return builder.build()
    nx = len(rlp.var_names)
    for r, row in enumerate(rlp.poly_rows):
        if row.degree() > plan.b:
            raise DegreeError(f"row {row.name} degree {row.degree()} > b={plan.b}")
        if row.degree() == 0:
            _pass_through(builder, row)
            continue
        a, c = _row_tables(row, plan.ups, nx)
        q = builder.add_vars(f"Q{r}_", len(plan.ups.products), upper=0.0)
        for i in range(len(plan.ups.monomials)):
            coeffs = dict(enumerate(a[i]))
            for k, col in enumerate(q):
                coeffs[col] = -plan.ups.matrix[i, k]
            builder.add_row(coeffs, "==", -c[i], f"hm{r}_{i}")
    return builder.build()


def _pass_through(builder, row):
    zero = next(iter(row.terms))
    coeffs, const = row.terms[zero]
    builder.add_row(dict(enumerate(coeffs)), "<=", -const, row.name)


def relax_reduced(rlp, b=None, cap=PRODUCT_CAP):
    """Reduced-form finite LP: the invertible pure-power block of Upsilon is
    eliminated, leaving only the cross-product tail blocks R_k <= 0 plus the
    inequality Upsilon_2^{-1}(P - Upsilon_1 R) <= 0.

    Falls back to the full form if the selected block is numerically
    singular (cannot happen for boxes, kept as a safety net)."""
    plan = plan_relaxation(rlp, b, cap)
    builder = _base_builder(rlp)
    if plan is None:
        return builder.build()
    sel = pure_power_columns(plan.basis, plan.ups)
    u2 = plan.ups.matrix[:, sel]
    if 1.0 / max(np.linalg.cond(u2), 1.0) < 1e-12:
        return relax_full(rlp, b, cap)
    tail = [k for k in range(len(plan.ups.products)) if k not in set(sel)]
    u1 = plan.ups.matrix[:, tail]
    w = np.linalg.inv(u2)
    g = w @ u1
    nx = len(rlp.var_names)
    for r, row in enumerate(rlp.poly_rows):
        if row.degree() > plan.b:
            raise DegreeError(f"row {row.name} degree {row.degree()} > b={plan.b}")
        if row.degree() == 0:
            _pass_through(builder, row)
            continue
        a, c = _row_tables(row, plan.ups, nx)
        wa = w @ a
        wc = w @ c
        rvars = builder.add_vars(f"R{r}_", len(tail), upper=0.0)
        for i in range(len(plan.ups.monomials)):
            coeffs = dict(enumerate(wa[i]))
            for t, col in enumerate(rvars):
                coeffs[col] = -g[i, t]
            builder.add_row(coeffs, "<=", -wc[i], f"hr{r}_{i}")
    return builder.build()


def certificate_blocks(lp, solution, num_poly_rows):
    """Pull the Q/R blocks out of a relaxed LP solution, keyed by row."""
    blocks = {}
    if solution.x is None:
        return blocks
    names = lp.var_names
    for r in range(num_poly_rows):
        qs = [(int(names[j][len(f"Q{r}_"):]), solution.x[j])
              for j in range(len(names)) if names[j].startswith(f"Q{r}_")]
        rs = [(int(names[j][len(f"R{r}_"):]), solution.x[j])
              for j in range(len(names)) if names[j].startswith(f"R{r}_")]
        if qs:
            blocks[r] = ("Q", np.array([v for _, v in sorted(qs)]))
        elif rs:
            blocks[r] = ("R", np.array([v for _, v in sorted(rs)]))
    return blocks


@dataclass(frozen=True, eq=False)
class HandelmanCertificate:
    """Solved certificate data: the product list, the nonpositive coefficient
    blocks per polynomial row (Q for the full form, tail R for the reduced
    form), and the shape/split of the coefficient-matching matrix."""

    products: tuple
    monomials: tuple
    blocks: dict                  # row name -> (kind, values)
    upsilon_shape: tuple
    eliminated_columns: tuple | None    # Upsilon_2 product columns (reduced)


def extract_certificate(rlp, lp, solution, b=None, form="reduced"):
    plan = plan_relaxation(rlp, b)
    if plan is None:
        return None
    raw = certificate_blocks(lp, solution, len(rlp.poly_rows))
    blocks = {rlp.poly_rows[r].name: kv for r, kv in raw.items()}
    eliminated = None
    if form == "reduced":
        sel = pure_power_columns(plan.basis, plan.ups)
        eliminated = tuple(plan.ups.products[k] for k in sel)
    return HandelmanCertificate(
        products=plan.ups.products, monomials=plan.ups.monomials,
        blocks=blocks, upsilon_shape=plan.ups.matrix.shape,
        eliminated_columns=eliminated)
