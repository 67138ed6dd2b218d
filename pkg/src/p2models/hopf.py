"""Finitely presented Hopf algebras with triangular monic relations.

A presentation holds generators g_0..g_{n-1}, one optional relation per
generator (relation i monic in g_i, other terms of lower g_i-degree and
only earlier generators), the comultiplication as one polynomial per
generator in the 2n tensor variables (g_i (x) 1 at index i, 1 (x) g_i at
index n+i), the counit constants, the antipode, and designated units.

Finite presentations (every relation present) are free modules on the
monomials below the relation degrees; rank = product of the degrees.
Smooth presentations omit relations; their designated units carry no
polynomial inverse, so identities involving 1/u are verified on
LocalizedElement values by clearing denominators.  All designated units
are required to be group-like (Delta u = u (x) u, eps u = 1), which is
what makes denominators compose through comultiplications and morphisms.

Antipode compatibility of morphisms is not checked separately: a
bialgebra morphism between Hopf algebras automatically commutes with the
antipodes (the antipode is the convolution inverse of the identity).
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .dvr import IndeterminateAtPrecision, RingElement
from .errors import DivisibilityError, PrecisionError
from .poly import ExactBase, FpBase, Poly, QuotBase, normal_form


@dataclass(frozen=True)
class UnitSpec:
    """A designated unit: its polynomial and, when the quotient is
    finite, an explicit polynomial inverse certificate."""

    poly: Poly
    inverse: Poly | None = None


@dataclass(frozen=True)
class HopfPresentation:
    base: object
    gens: tuple
    relations: tuple          # Poly | None per generator
    comult: tuple             # Poly in 2n variables per generator
    counit: tuple             # base element per generator
    antipode: tuple           # Poly | LocalizedElement per generator
    units: tuple = ()         # UnitSpec
    name: str = ""

    @property
    def ngens(self) -> int:
        return len(self.gens)

    @property
    def is_finite(self) -> bool:
        return all(r is not None for r in self.relations)

    def rank(self):
        if not self.is_finite:
            return None
        out = 1
        for i, r in enumerate(self.relations):
            out *= r.degree_in(i)
        return out

    def nf(self, poly: Poly) -> Poly:
        return normal_form(poly, list(self.relations))

    def var(self, i: int) -> Poly:
        return Poly.var(self.base, self.ngens, i)

    def zero_poly(self) -> Poly:
        return Poly.zero(self.base, self.ngens)

    def one_poly(self) -> Poly:
        return Poly.one(self.base, self.ngens)

    def counit_of(self, poly: Poly):
        """Evaluate the counit (an algebra map to the base) on a polynomial."""
        base = self.base
        acc = base.zero()
        for m, c in poly.terms.items():
            val = c
            for i, k in enumerate(m):
                for _ in range(k):
                    val = base.mul(val, self.counit[i])
            acc = base.add(acc, val)
        return acc

    def to_json(self):
        return {
            "base": repr(self.base),
            "generators": list(self.gens),
            "relations": [r.to_json() if r is not None else None
                          for r in self.relations],
            "comult": [c.to_json() for c in self.comult],
            "counit": [self.base.coeff_json(c) for c in self.counit],
            "antipode": [a.to_json() if isinstance(a, Poly) else repr(a)
                         for a in self.antipode],
            "units": [u.poly.to_json() for u in self.units],
        }


# ---------------------------------------------------------------------------
# tensor powers
# ---------------------------------------------------------------------------

def tensor_relations(pres: HopfPresentation, k: int) -> list:
    """Relations of the k-fold tensor power (kn variables)."""
    n = pres.ngens
    out = []
    for f in range(k):
        for i, r in enumerate(pres.relations):
            if r is None:
                out.append(None)
            else:
                out.append(r.embed(k * n, f * n))
    return out


def tensor_nf(pres: HopfPresentation, k: int, poly: Poly) -> Poly:
    return normal_form(poly, tensor_relations(pres, k))


# ---------------------------------------------------------------------------
# localized elements (smooth presentations)
# ---------------------------------------------------------------------------

class LocalizedElement:
    """num / prod_i units[i]^den[i] over a presentation's coordinate ring.

    Valid because designated units are nonzerodivisors; equality is
    decided by clearing denominators.  `den` is a tuple of nonnegative
    exponents aligned with `pres.units`.
    """

    __slots__ = ("pres", "num", "den")

    def __init__(self, pres: HopfPresentation, num: Poly, den: tuple = None):
        self.pres = pres
        self.num = num
        self.den = den if den is not None else (0,) * len(pres.units)

    @classmethod
    def from_poly(cls, pres, poly):
        return cls(pres, poly)

    def _common(self, other: "LocalizedElement"):
        den = tuple(max(a, b) for a, b in zip(self.den, other.den))
        n1, n2 = self.num, other.num
        for i, (a, b) in enumerate(zip(self.den, other.den)):
            u = self.pres.units[i].poly
            for _ in range(den[i] - a):
                n1 = n1 * u
            for _ in range(den[i] - b):
                n2 = n2 * u
        return n1, n2, den

    def __add__(self, other):
        other = self._coerce(other)
        n1, n2, den = self._common(other)
        return LocalizedElement(self.pres, n1 + n2, den)

    def __sub__(self, other):
        other = self._coerce(other)
        n1, n2, den = self._common(other)
        return LocalizedElement(self.pres, n1 - n2, den)

    def __neg__(self):
        return LocalizedElement(self.pres, -self.num, self.den)

    def __mul__(self, other):
        other = self._coerce(other)
        return LocalizedElement(
            self.pres, self.num * other.num,
            tuple(a + b for a, b in zip(self.den, other.den)))

    def _coerce(self, other):
        if isinstance(other, LocalizedElement):
            return other
        if isinstance(other, Poly):
            return LocalizedElement(self.pres, other)
        raise TypeError(other)

    def mul_unit_power(self, i: int, e: int) -> "LocalizedElement":
        """Multiply by units[i]^e (e may be negative)."""
        if e >= 0:
            num = self.num
            for _ in range(e):
                num = num * self.pres.units[i].poly
            return LocalizedElement(self.pres, num, self.den)
        den = list(self.den)
        den[i] -= e
        return LocalizedElement(self.pres, self.num, tuple(den))

    def is_zero(self) -> bool:
        if self.pres.is_finite:
            return self.pres.nf(self.num).is_zero()
        return self.num.is_zero()

    def eq(self, other: "LocalizedElement") -> bool:
        return (self - self._coerce(other)).is_zero()

    def clear_in_finite(self, pres_fin: HopfPresentation) -> Poly:
        """Image in a finite quotient, using the inverse certificates.

        The finite presentation must share the generator layout and
        declare the same units with polynomial inverses.
        """
        out = pres_fin.nf(self.num)
        for i, e in enumerate(self.den):
            inv = pres_fin.units[i].inverse
            if e and inv is None:
                raise DivisibilityError("no inverse certificate for unit")
            for _ in range(e):
                out = pres_fin.nf(out * inv)
        return out

    def __repr__(self):
        return f"LocalizedElement({self.num!r} / u^{self.den})"


# ---------------------------------------------------------------------------
# axiom checking
# ---------------------------------------------------------------------------

@dataclass
class AxiomReport:
    coassoc: bool
    counit_law: bool
    antipode_law: bool
    commutativity: bool
    rank: int | None
    unit_certificates: bool
    failures: list = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return (self.coassoc and self.counit_law and self.antipode_law
                and self.unit_certificates)


def _subst_vars(poly: Poly, images: list) -> Poly:
    return poly.subst(images)


def check_hopf_axioms(pres: HopfPresentation) -> AxiomReport:
    """Verify coassociativity, counit law, antipode law, cocommutativity
    and the designated-unit certificates by symbolic identities in the
    tensor quotients."""
    base = pres.base
    n = pres.ngens
    failures = []

    rel3 = tensor_relations(pres, 3)
    rel2 = tensor_relations(pres, 2)

    # coassociativity: (Delta x id) Delta = (id x Delta) Delta
    coassoc = True
    for g in range(n):
        d = pres.comult[g]
        left_imgs = ([pres.comult[i].embed(3 * n, 0) for i in range(n)]
                     + [Poly.var(base, 3 * n, 2 * n + i) for i in range(n)])
        right_imgs = ([Poly.var(base, 3 * n, i) for i in range(n)]
                      + [pres.comult[i].embed(3 * n, n) for i in range(n)])
        lhs = normal_form(_subst_vars(d, left_imgs), rel3)
        rhs = normal_form(_subst_vars(d, right_imgs), rel3)
        if not lhs.eq(rhs):
            coassoc = False
            failures.append(f"coassociativity fails on generator {g}")

    # counit law: (eps x id) Delta = id = (id x eps) Delta
    counit_ok = True
    for g in range(n):
        d = pres.comult[g]
        left = _subst_vars(d, [Poly.const(base, n, pres.counit[i])
                               for i in range(n)]
                           + [pres.var(i) for i in range(n)])
        right = _subst_vars(d, [pres.var(i) for i in range(n)]
                            + [Poly.const(base, n, pres.counit[i])
                               for i in range(n)])
        idg = pres.var(g)
        if pres.is_finite:
            left, right, idg = pres.nf(left), pres.nf(right), pres.nf(idg)
        if not (left.eq(idg) and right.eq(idg)):
            counit_ok = False
            failures.append(f"counit law fails on generator {g}")

    # antipode law: m (sigma x id) Delta = unit . counit
    antipode_ok = True
    for g in range(n):
        d = pres.comult[g]
        target = Poly.const(base, n, pres.counit[g])
        if all(isinstance(a, Poly) for a in pres.antipode):
            imgs = ([pres.antipode[i] for i in range(n)]
                    + [pres.var(i) for i in range(n)])
            lhs = _subst_vars(d, imgs)
            if pres.is_finite:
                lhs, target_nf = pres.nf(lhs), pres.nf(target)
            else:
                target_nf = target
            if not lhs.eq(target_nf):
                antipode_ok = False
                failures.append(f"antipode law fails on generator {g}")
        else:
            # localized antipode (num, den) pairs on a smooth presentation
            imgs = [LocalizedElement(pres, a[0], a[1])
                    if isinstance(a, tuple) else LocalizedElement(pres, a)
                    for a in pres.antipode]
            imgs += [LocalizedElement(pres, pres.var(i)) for i in range(n)]
            lhs = _subst_localized(d, imgs, pres)
            if not lhs.eq(LocalizedElement(pres, target)):
                antipode_ok = False
                failures.append(f"antipode law fails on generator {g}")

    # cocommutativity (the group law is abelian)
    cocomm = True
    swap = ([Poly.var(base, 2 * n, n + i) for i in range(n)]
            + [Poly.var(base, 2 * n, i) for i in range(n)])
    for g in range(n):
        d = pres.comult[g]
        sw = normal_form(_subst_vars(d, swap), rel2)
        if not sw.eq(normal_form(d, rel2)):
            cocomm = False
            failures.append(f"comultiplication not cocommutative at {g}")

    # unit certificates
    units_ok = True
    for k, u in enumerate(pres.units):
        if u.inverse is not None:
            prod = pres.nf(u.poly * u.inverse)
            if not prod.eq(pres.one_poly()):
                units_ok = False
                failures.append(f"unit certificate {k} fails")
        else:
            # group-likeness makes the unit usable in localized arithmetic
            uu = (u.poly.embed(2 * n, 0)) * (u.poly.embed(2 * n, n))
            du = _subst_vars(u.poly, [pres.comult[i] for i in range(n)])
            if not normal_form(du - uu, rel2).is_zero():
                units_ok = False
                failures.append(f"designated unit {k} not group-like")
            if not base.eq(pres.counit_of(u.poly), base.one()):
                units_ok = False
                failures.append(f"designated unit {k} has counit != 1")

    return AxiomReport(coassoc, counit_ok, antipode_ok, cocomm,
                       pres.rank(), units_ok, failures)


def _subst_localized(poly: Poly, images: list, pres: HopfPresentation
                     ) -> LocalizedElement:
    """Substitute LocalizedElement images into a polynomial."""
    acc = LocalizedElement(pres, Poly.zero(images[0].num.base,
                                           images[0].num.nvars))
    for m, c in poly.terms.items():
        term = LocalizedElement(
            pres, Poly.const(images[0].num.base, images[0].num.nvars, c))
        for i, k in enumerate(m):
            for _ in range(k):
                term = term * images[i]
        acc = acc + term
    return acc


# ---------------------------------------------------------------------------
# morphisms
# ---------------------------------------------------------------------------

@dataclass
class HopfMorphism:
    """Group-scheme map source -> target = algebra map R[target] ->
    R[source]: one image (Poly or LocalizedElement over the source) per
    target generator.

    `unit_images[i]` expresses the image of target unit i as a monomial
    prod_j (source unit j)^e_j, which is how all the maps in this
    artifact behave; it lets localized target elements pull back.
    """

    source: HopfPresentation
    target: HopfPresentation
    images: tuple
    unit_images: tuple = ()   # tuple of dict {source unit index: exponent}
    name: str = ""

    def apply(self, poly: Poly):
        """Image of a target polynomial in the source coordinate ring."""
        images = [im if isinstance(im, LocalizedElement)
                  else LocalizedElement(self.source, im)
                  for im in self.images]
        return _subst_localized(poly, images, self.source)

    def apply_poly(self, poly: Poly) -> Poly:
        """Image when all generator images are plain polynomials."""
        assert all(isinstance(im, Poly) for im in self.images)
        return poly.subst(list(self.images))


def _tensor_square_pres(pres: HopfPresentation) -> HopfPresentation:
    """The tensor square as a bare presentation (for localized equality)."""
    n = pres.ngens
    units = []
    for u in pres.units:
        units.append(UnitSpec(u.poly.embed(2 * n, 0),
                              None if u.inverse is None
                              else u.inverse.embed(2 * n, 0)))
    for u in pres.units:
        units.append(UnitSpec(u.poly.embed(2 * n, n),
                              None if u.inverse is None
                              else u.inverse.embed(2 * n, n)))
    return HopfPresentation(
        base=pres.base,
        gens=tuple(f"{g}'" for g in pres.gens) + tuple(
            f"{g}''" for g in pres.gens),
        relations=tuple(tensor_relations(pres, 2)),
        comult=(),
        counit=pres.counit + pres.counit,
        antipode=(),
        units=tuple(units),
        name=pres.name + " (x) " + pres.name,
    )


def check_morphism(f: HopfMorphism) -> bool:
    """Relations map to zero, comultiplications commute, counits agree."""
    src, tgt = f.source, f.target
    n_s, n_t = src.ngens, tgt.ngens
    base = src.base

    images = [im if isinstance(im, LocalizedElement)
              else LocalizedElement(src, im) for im in f.images]

    # relations of the target must die in the source
    for r in tgt.relations:
        if r is None:
            continue
        if not _subst_localized(r, images, src).is_zero():
            return False

    # counits
    for g in range(n_t):
        im = images[g]
        eps = src.counit_of(im.num)
        # group-like units have counit 1, so the denominator drops out
        if not base.eq(eps, tgt.counit[g]):
            return False

    # comultiplication squares
    sq = _tensor_square_pres(src)
    lifted = []
    for im in images:
        den2 = tuple(im.den) + (0,) * len(src.units)
        lifted.append(LocalizedElement(sq, im.num.embed(2 * n_s, 0), den2))
    # images of target units as unit monomials, needed to pull back
    # denominators of target comultiplications (none appear in this
    # artifact: target comults are polynomial)
    delta_src_imgs = []
    for i in range(n_s):
        delta_src_imgs.append(LocalizedElement(sq, src.comult[i]))
    for g in range(n_t):
        # LHS: Delta_src(f(g))
        num_l = _subst_localized(images[g].num, delta_src_imgs, sq)
        den_l = list((0,) * len(sq.units))
        for i, e in enumerate(images[g].den):
            den_l[i] += e
            den_l[len(src.units) + i] += e
        lhs = LocalizedElement(sq, num_l.num,
                               tuple(a + b for a, b in
                                     zip(num_l.den, tuple(den_l))))
        # RHS: (f x f)(Delta_tgt(g))
        subs = []
        for j in range(n_t):
            subs.append(lifted[j])
        for j in range(n_t):
            im = images[j]
            den2 = (0,) * len(src.units) + tuple(im.den)
            subs.append(LocalizedElement(sq, im.num.embed(2 * n_s, n_s),
                                         den2))
        rhs = _subst_localized(tgt.comult[g], subs, sq)
        if not lhs.eq(rhs):
            return False
    return True


def morphism_matrix(f: HopfMorphism):
    """Matrix of the algebra map in the monomial bases (finite case)."""
    src, tgt = f.source, f.target
    assert src.is_finite and tgt.is_finite
    assert src.rank() == tgt.rank()
    import itertools
    degs_t = [r.degree_in(i) for i, r in enumerate(tgt.relations)]
    degs_s = [r.degree_in(i) for i, r in enumerate(src.relations)]
    basis_t = list(itertools.product(*[range(d) for d in degs_t]))
    basis_s = list(itertools.product(*[range(d) for d in degs_s]))
    index_s = {m: i for i, m in enumerate(basis_s)}
    cols = []
    for m in basis_t:
        poly = Poly(tgt.base, tgt.ngens, {m: tgt.base.one()})
        img = f.apply(poly)
        img_poly = (img.num if all(e == 0 for e in img.den)
                    else img.clear_in_finite(src))
        img_poly = src.nf(img_poly)
        col = [src.base.zero()] * len(basis_s)
        for mm, c in img_poly.terms.items():
            col[index_s[mm]] = c
        cols.append(col)
    # rows indexed by source basis, columns by target basis
    return [[cols[j][i] for j in range(len(basis_t))]
            for i in range(len(basis_s))]


def det_valuation(matrix):
    """Valuation of the determinant over R, by min-valuation pivoting.

    Returns an int, or None when the determinant is indistinguishable
    from 0 at working precision.
    """
    m = [row[:] for row in matrix]
    n = len(m)
    total = 0
    for col in range(n):
        pivot_row, pivot_val = None, None
        for r in range(col, n):
            v = m[r][col].valuation()
            if isinstance(v, IndeterminateAtPrecision):
                continue
            if pivot_val is None or v < pivot_val:
                pivot_row, pivot_val = r, v
        if pivot_row is None:
            return None
        m[col], m[pivot_row] = m[pivot_row], m[col]
        total += pivot_val
        piv = m[col][col]
        for r in range(col + 1, n):
            entry = m[r][col]
            if entry.is_zero():
                continue
            factor = entry.divide_exact(piv)
            m[r] = [a - factor * b for a, b in zip(m[r], m[col])]
    return total


def is_model_map(f: HopfMorphism) -> bool:
    """Morphism that is an isomorphism after inverting pi: the basis
    matrix determinant has determinate finite valuation."""
    if not check_morphism(f):
        return False
    if not (f.source.is_finite and f.target.is_finite):
        raise ValueError("model-map check needs finite presentations")
    if f.source.rank() != f.target.rank():
        return False
    return det_valuation(morphism_matrix(f)) is not None


def is_isomorphism(f: HopfMorphism) -> bool:
    """Model map whose determinant is a unit."""
    if not check_morphism(f):
        return False
    if f.source.rank() != f.target.rank():
        return False
    return det_valuation(morphism_matrix(f)) == 0


# ---------------------------------------------------------------------------
# residue fiber
# ---------------------------------------------------------------------------

def _coeff_mod_pi(c):
    if isinstance(c, RingElement):
        if c.prec < 1:
            raise PrecisionError("coefficient indeterminate at precision 0")
        return c.digits[0] % c.ring.p
    # QuotElement
    if c.t < 1:
        raise PrecisionError("coefficient in the zero ring")
    return c.digits[0]


def residue_fiber(pres: HopfPresentation) -> HopfPresentation:
    """Base change to the residue field F_p (reduce everything mod pi)."""
    if isinstance(pres.base, ExactBase):
        p = pres.base.ring.p
    elif isinstance(pres.base, QuotBase):
        p = pres.base.ring.p
    else:
        raise ValueError("presentation already over the residue field")
    fp = FpBase(p)

    def red(poly):
        return poly.map_coeffs(_coeff_mod_pi, fp) if poly is not None else None

    return HopfPresentation(
        base=fp,
        gens=pres.gens,
        relations=tuple(red(r) for r in pres.relations),
        comult=tuple(red(c) for c in pres.comult),
        counit=tuple(_coeff_mod_pi(c) for c in pres.counit),
        antipode=tuple(red(a) if isinstance(a, Poly) else a
                       for a in pres.antipode),
        units=tuple(UnitSpec(red(u.poly),
                             red(u.inverse) if u.inverse is not None else None)
                    for u in pres.units),
        name=pres.name + " (special fiber)",
    )
