"""Constructors and classifiers for the order-p^2 models.

Conventions.  Models are keyed by valuations: mu = pi^m, lam = pi^n with
p >= m >= n >= 0 (unit ambiguity is absorbed into the parameter a).  A
descriptor (m, n, a, j) stands for the extension with relations

    (1+mu S1)^p - 1) / mu^p,
    ((F(S1) + lam S2)^p - (1+mu S1)^j) / lam^p,      F = sum a^i/i! S1^i,

the second stored in its unit-normalized monic form.  The parameter
group Phi_{mu,lam} consists of the pairs (a, j) with a^p = 0 mod pi^n
and p*a - j*mu = (p/mu^(p-1)) a^p mod pi^(pn); extensions with j != 0
are exactly the models of the constant group of order p^2 on the
generic fiber, and (m, n, a mod pi^n) with j = 1 classifies them.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from fractions import Fraction

from .dvr import (IndeterminateAtPrecision, QuotElement, RingDescriptor,
                  RingElement, eq_mod, eta)
from .errors import (BudgetError, DivisibilityError, LinearSolveError,
                     P2ModelsError, ValuationError)
from .hopf import (HopfMorphism, HopfPresentation, LocalizedElement,
                   UnitSpec, check_morphism, is_model_map, residue_fiber)
from .poly import ExactBase, Poly, QuotBase, normal_form

DEFAULT_BUDGET = 10 ** 7


def _budget_for(ring: RingDescriptor, budget) -> int:
    # module default: enumerations capped at p^9 candidates; callers
    # (e.g. the CLI, default 10^7) may pass an explicit budget
    return ring.p ** 9 if budget is None else budget


def _check_budget(count: int, budget: int):
    if count > budget:
        raise BudgetError(f"{count} candidates exceed budget {budget}")


def poly_in_var(base, nvars: int, var: int, coeffs) -> Poly:
    """sum coeffs[k] * x_var^k."""
    terms = {}
    for k, c in enumerate(coeffs):
        if not base.is_zero(c):
            m = tuple(k if i == var else 0 for i in range(nvars))
            terms[m] = c
    return Poly(base, nvars, terms)


def kummer_quotient_coeffs(ring: RingDescriptor, lam: RingElement, N: int):
    """Coefficients c_1..c_N of ((1+lam T)^N - 1)/lam^N, c_k = C(N,k) lam^(k-N).

    Exists exactly under the degree condition; raises ValuationError if
    some binomial is not divisible.
    """
    lamN = lam ** N
    out = []
    for k in range(1, N + 1):
        c = ring.from_int(math.comb(N, k)) * lam ** k
        out.append(c.divide_exact(lamN))
    return out


def star_condition(ring: RingDescriptor, lam: RingElement, n: int) -> bool:
    """(*): v(p) >= p^(n-1)(p-1) v(lam)."""
    v = lam.valuation()
    if isinstance(v, IndeterminateAtPrecision):
        raise ValuationError("lam valuation indeterminate")
    return ring.e >= ring.p ** (n - 1) * (ring.p - 1) * v


# ---------------------------------------------------------------------------
# the groups G_{lam,n} and G^(lam)
# ---------------------------------------------------------------------------

def build_g(ring: RingDescriptor, lam: RingElement, n: int) -> HopfPresentation:
    """Finite kernel group of the degree-p^n isogeny: R[T]/P_{lam,n}(T)."""
    if not star_condition(ring, lam, n):
        raise ValuationError(
            "condition (*) fails: v(p) < p^(n-1)(p-1) v(lam)")
    base = ExactBase(ring)
    N = ring.p ** n
    rel = poly_in_var(base, 1, 0,
                      [ring.zero()] + kummer_quotient_coeffs(ring, lam, N))
    T0 = Poly.var(base, 2, 0)
    T1 = Poly.var(base, 2, 1)
    comult = T0 + T1 + (T0 * T1).scale(lam)
    # antipode: ((1+lam T)^(N-1) - 1)/lam, a polynomial
    anti_coeffs = [ring.zero()]
    for k in range(1, N):
        anti_coeffs.append(
            ring.from_int(math.comb(N - 1, k)) * lam ** (k - 1))
    antipode = poly_in_var(base, 1, 0, anti_coeffs)
    unit_poly = Poly.one(base, 1) + Poly.var(base, 1, 0).scale(lam)
    unit_inv = normal_form(unit_poly ** (N - 1), [rel])
    vlam = lam.valuation()
    return HopfPresentation(
        base=base, gens=("T",), relations=(rel,), comult=(comult,),
        counit=(ring.zero(),), antipode=(antipode,),
        units=(UnitSpec(unit_poly, unit_inv),),
        name=f"G(v(lam)={vlam}, n={n})")


def build_g_smooth(ring: RingDescriptor, lam: RingElement) -> HopfPresentation:
    """The smooth deformation R[T, 1/(1+lam T)] of G_a to G_m."""
    base = ExactBase(ring)
    T0 = Poly.var(base, 2, 0)
    T1 = Poly.var(base, 2, 1)
    comult = T0 + T1 + (T0 * T1).scale(lam)
    unit_poly = Poly.one(base, 1) + Poly.var(base, 1, 0).scale(lam)
    antipode = (-Poly.var(base, 1, 0), (1,))  # -T / (1+lam T)
    return HopfPresentation(
        base=base, gens=("T",), relations=(None,), comult=(comult,),
        counit=(ring.zero(),), antipode=(antipode,),
        units=(UnitSpec(unit_poly, None),),
        name=f"G_smooth(v(lam)={lam.valuation()})")


def isogeny_psi(ring: RingDescriptor, lam: RingElement, n: int) -> HopfMorphism:
    """The degree-p^n isogeny G^(lam) -> G^(lam^(p^n)), T' -> P_{lam,n}(T)."""
    if not star_condition(ring, lam, n):
        raise ValuationError("condition (*) fails")
    src = build_g_smooth(ring, lam)
    tgt = build_g_smooth(ring, lam ** (ring.p ** n))
    base = ExactBase(ring)
    N = ring.p ** n
    img = poly_in_var(base, 1, 0,
                      [ring.zero()] + kummer_quotient_coeffs(ring, lam, N))
    f = HopfMorphism(source=src, target=tgt, images=(img,),
                     unit_images=({0: N},), name=f"psi(n={n})")
    if not check_morphism(f):
        raise P2ModelsError("isogeny failed the morphism check")
    return f


def neron_blowup_unit(ring: RingDescriptor, mu: RingElement) -> HopfMorphism:
    """The unit-section dilatation: T -> pi T realizes
    G_{mu pi,1} -> G_{mu,1} as a model map."""
    vmu = mu.valuation()
    if isinstance(vmu, IndeterminateAtPrecision) or \
            ring.e <= (ring.p - 1) * vmu:
        raise ValuationError("need v(p) > (p-1) v(mu)")
    src = build_g(ring, mu * ring.pi(), 1)
    tgt = build_g(ring, mu, 1)
    base = ExactBase(ring)
    img = Poly.var(base, 1, 0).scale(ring.pi())
    f = HopfMorphism(source=src, target=tgt, images=(img,),
                     unit_images=({0: 1},), name="unit-section blow-up")
    if not is_model_map(f):
        raise P2ModelsError("blow-up map failed the model-map check")
    return f


def hom_gln(ring: RingDescriptor, lam: RingElement, lam2: RingElement,
            n: int) -> list[HopfMorphism]:
    """Hom(G_{lam,n}, G_{lam2,n}): empty if v(lam) < v(lam2), else the
    p^n maps T' -> ((1+lam T)^i - 1)/lam2."""
    v1, v2 = lam.valuation(), lam2.valuation()
    if isinstance(v1, IndeterminateAtPrecision) or \
            isinstance(v2, IndeterminateAtPrecision):
        raise ValuationError("indeterminate valuations")
    if v1 < v2:
        return []
    src = build_g(ring, lam, n)
    tgt = build_g(ring, lam2, n)
    base = ExactBase(ring)
    out = []
    for i in range(ring.p ** n):
        coeffs = [ring.zero()]
        for k in range(1, i + 1):
            coeffs.append(
                (ring.from_int(math.comb(i, k)) * lam ** k).divide_exact(lam2))
        img = src.nf(poly_in_var(base, 1, 0, coeffs))
        f = HopfMorphism(source=src, target=tgt, images=(img,),
                         name=f"hom_g(i={i})")
        if not check_morphism(f):
            raise P2ModelsError(f"hom candidate i={i} failed verification")
        out.append(f)
    return out


# ---------------------------------------------------------------------------
# Hom(G_{mu,1}|S_lam, Gm|S_lam): closed form vs brute force
# ---------------------------------------------------------------------------

def _mu_relation_quot(ring, m: int, t: int, nvars: int, var: int) -> Poly:
    """P_{pi^m,1} as a Poly over R/pi^t in the given variable."""
    qb = QuotBase(ring, t)
    coeffs = [ring.zero().reduce_mod(t)]
    for c in kummer_quotient_coeffs(ring, ring.pi(m), ring.p):
        coeffs.append(c.reduce_mod(t))
    return poly_in_var(qb, nvars, var, coeffs)


def hom_closed(ring: RingDescriptor, m: int, n: int) -> list[tuple]:
    """Degree < p representatives of Hom(G_{mu,1}|S_lam, Gm|S_lam) with
    mu = pi^m, lam = pi^n, as coefficient tuples over R/pi^n.

    v(mu) = 0 is the multiplicative case {(1+mu S)^i}; v(lam) = 0 gives
    the one-element group (empty base).  Otherwise the elements are the
    evaluated exponentials with a ranging over the twisted kernel
    {a : a^p = mu^(p-1) a mod pi^n}.
    """
    from .artin_hasse import ep_poly_special
    p = ring.p
    one_row = tuple([ring.one().reduce_mod(n)]
                    + [ring.zero().reduce_mod(n)] * (p - 1))
    if n == 0:
        return [tuple(ring.zero().reduce_mod(0) for _ in range(p))]
    if m == 0:
        out = set()
        for i in range(p):
            coeffs = [ring.from_int(math.comb(i, k)).reduce_mod(n)
                      for k in range(p)]
            out.add(tuple(coeffs))
        return sorted(out, key=lambda row: [c.digits for c in row])
    if ring.e < (p - 1) * m or ring.e < n:
        raise ValuationError("closed form needs v(p) >= (p-1)v(mu), v(lam)")
    mu = ring.pi(m)
    out = []
    from .dvr import enumerate_quotient
    for a in enumerate_quotient(ring, n):
        al = a.lift()
        ok, _ = eq_mod(al ** p, mu ** (p - 1) * al, n)
        if ok:
            out.append(tuple(ep_poly_special(al, mu, n)))
    return sorted(out, key=lambda row: [c.digits for c in row])


def hom_brute(ring: RingDescriptor, m: int, n: int,
              budget: int | None = None) -> list[tuple]:
    """All degree < p polynomials F over R/pi^n with F(0) = 1 (and
    F = 1 mod pi when mu is not a unit) satisfying
    F(S)F(T) = F(S+T+mu ST) modulo the relation ideal."""
    p = ring.p
    if n == 0:
        return [tuple(ring.zero().reduce_mod(0) for _ in range(p))]
    qb = QuotBase(ring, n)
    relS = _mu_relation_quot(ring, m, n, 2, 0)
    relT = _mu_relation_quot(ring, m, n, 2, 1)
    S = Poly.var(qb, 2, 0)
    T = Poly.var(qb, 2, 1)
    mu_red = ring.pi(m).reduce_mod(n) if m < n else ring.zero().reduce_mod(n)
    arg = S + T + (S * T).scale(mu_red)

    budget = _budget_for(ring, budget)
    if m == 0:
        coeff_pools = [_all_digits(ring, n)] * p
    else:
        # F = 1 mod pi: constant term 1 + pi(...), others pi(...)
        coeff_pools = [[c for c in _all_digits(ring, n) if c.digits[0] == 1]]
        coeff_pools += [[c for c in _all_digits(ring, n)
                         if c.digits[0] == 0]] * (p - 1)
    count = 1
    for pool in coeff_pools:
        count *= len(pool)
    _check_budget(count, budget)

    out = []
    for coeffs in itertools.product(*coeff_pools):
        F_S = poly_in_var(qb, 2, 0, coeffs)
        F_T = poly_in_var(qb, 2, 1, coeffs)
        F_arg = _eval_poly_at(coeffs, arg, qb)
        lhs = normal_form(F_S * F_T, [relS, relT])
        rhs = normal_form(F_arg, [relS, relT])
        if lhs.eq(rhs):
            out.append(tuple(coeffs))
    return sorted(out, key=lambda row: [c.digits for c in row])


def _all_digits(ring, n):
    from .dvr import enumerate_quotient
    return list(enumerate_quotient(ring, n))


def _eval_poly_at(coeffs, arg: Poly, base) -> Poly:
    acc = Poly.const(base, arg.nvars, coeffs[0])
    power = Poly.one(base, arg.nvars)
    for c in coeffs[1:]:
        power = power * arg
        acc = acc + power.scale(c)
    return acc


# ---------------------------------------------------------------------------
# the parameter group Phi and the projection to Z/pZ
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class PhiElement:
    a: QuotElement
    j: int

    def sort_key(self):
        return (self.a.digits, self.j)

    def to_json(self):
        return {"a_digits": list(self.a.digits), "j": self.j}


def rho_scalar(ring: RingDescriptor, m: int) -> RingElement:
    """p / mu^(p-1) for mu = pi^m (exists for m <= p)."""
    return ring.from_int(ring.p).divide_exact(ring.pi(m) ** (ring.p - 1))


def phi_congruence(ring: RingDescriptor, m: int, n: int,
                   a: QuotElement, j: int) -> bool:
    """(a, j) in Phi: a^p = 0 mod pi^n and
    p a - j mu = (p/mu^(p-1)) a^p mod pi^(pn), on canonical lifts."""
    p = ring.p
    if n == 0:
        return True
    al = a.lift()
    if not (al ** p).reduce_mod(n).is_zero():
        return False
    lhs = al.scale(p) - ring.pi(m).scale(j)
    rhs = rho_scalar(ring, m) * al ** p
    ok, _ = eq_mod(lhs, rhs, p * n)
    return ok


def ker_p2(ring: RingDescriptor, m: int, n: int) -> list[PhiElement]:
    """Closed form of the kernel of the projection (a, j) -> j:
    pairs (a, 0) with p v(a) >= max(p v(lam) + (p-1) v(mu) - v(p), v(lam))."""
    p = ring.p
    if n == 0:
        return [PhiElement(QuotElement(ring, 0, ()), 0)]
    bound = max(p * n + (p - 1) * m - ring.e, n)
    vmin = math.ceil(bound / p)
    out = []
    from .dvr import enumerate_quotient
    for a in enumerate_quotient(ring, n):
        v = a.valuation()
        if a.is_zero() or (not isinstance(v, IndeterminateAtPrecision)
                           and v >= vmin):
            out.append(PhiElement(a, 0))
    return sorted(out, key=PhiElement.sort_key)


def p2_surjective(ring: RingDescriptor, m: int, n: int) -> bool:
    """Every j is hit iff m >= pn, or m < pn and pm - n >= v(p)."""
    return m >= ring.p * n or ring.p * m - n >= ring.e


def phi_closed(ring: RingDescriptor, m: int, n: int) -> list[PhiElement]:
    """Phi_{pi^m, pi^n} assembled from the surjectivity trichotomy."""
    if not (ring.p >= m >= n >= 0):
        raise ValueError("need p >= m >= n >= 0")
    p = ring.p
    ker = ker_p2(ring, m, n)
    if n == 0:
        return [PhiElement(QuotElement(ring, 0, ()), j) for j in range(p)]
    out = []
    if m >= p * n:
        for j in range(p):
            for alpha in ker:
                out.append(PhiElement(alpha.a, j))
    elif p * m - n >= ring.e:
        base_sol = (eta(ring) * ring.pi(m)).divide_exact(ring.lam1)
        for j in range(p):
            shift = base_sol.scale(j)
            for alpha in ker:
                out.append(PhiElement(
                    (shift + alpha.a.lift()).reduce_mod(n), j))
    else:
        out = list(ker)
    return sorted(out, key=PhiElement.sort_key)


def phi_brute(ring: RingDescriptor, m: int, n: int,
              budget: int | None = None) -> list[PhiElement]:
    """Direct enumeration of the defining congruence."""
    p = ring.p
    _check_budget(p ** n * p, _budget_for(ring, budget))
    out = []
    from .dvr import enumerate_quotient
    for a in enumerate_quotient(ring, n):
        for j in range(p):
            if phi_congruence(ring, m, n, a, j):
                out.append(PhiElement(a, j))
    return sorted(out, key=PhiElement.sort_key)


def ker_p2_brute(ring: RingDescriptor, m: int, n: int,
                 budget: int | None = None) -> list[PhiElement]:
    return [el for el in phi_brute(ring, m, n, budget) if el.j == 0]


# ---------------------------------------------------------------------------
# descriptors and the extension presentations
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class ModelDescriptor:
    ring: RingDescriptor
    m: int
    n: int
    a: QuotElement
    j: int

    def __post_init__(self):
        if not (self.ring.p >= self.m >= self.n >= 0):
            raise ValueError("need p >= m >= n >= 0")
        if self.a.t != self.n:
            raise ValueError("a must live in R/pi^n")
        if not (0 <= self.j < self.ring.p):
            raise ValueError("j must be reduced mod p")

    def sort_key(self):
        return (self.m, self.n, self.a.digits, self.j)

    def to_json(self):
        return {"p": self.ring.p, "M": self.ring.M, "m": self.m,
                "n": self.n, "a_digits": list(self.a.digits), "j": self.j}

    @classmethod
    def from_json(cls, ring: RingDescriptor, obj) -> "ModelDescriptor":
        if obj["p"] != ring.p:
            raise ValueError("descriptor p does not match ring")
        a = QuotElement(ring, obj["n"], tuple(obj["a_digits"]))
        return cls(ring, obj["m"], obj["n"], a, obj["j"])


def canonical_lift_coeffs(d: ModelDescriptor) -> list[RingElement]:
    """F = sum a^i / i! S^i on the canonical digit lift of a."""
    ring = d.ring
    al = d.a.lift()
    out = [ring.one()]
    for i in range(1, ring.p):
        out.append((al ** i).scale_unit_fraction(
            Fraction(1, math.factorial(i))))
    return out


def _extension_data(d: ModelDescriptor):
    """Shared polynomial data for the finite and smooth presentations.

    Variables: S1 = 0, S2 = 1 (tensor squares use S1', S2', S1'', S2'').
    Returns (base, mu, lam, Fcoeffs, rel1, Ft as 2-var poly).
    """
    ring = d.ring
    base = ExactBase(ring)
    mu = ring.pi(d.m)
    lam = ring.pi(d.n)
    rel1 = poly_in_var(base, 2, 0,
                       [ring.zero()] + kummer_quotient_coeffs(ring, mu, ring.p))
    fc = canonical_lift_coeffs(d)
    Ft = poly_in_var(base, 2, 0, fc)
    return base, mu, lam, fc, rel1, Ft


def _cocycle(base, fc, mu, lam, nvars, v0, v1, reduce_rels=None) -> Poly:
    """(F(x) F(y) - F(x+y+mu x y)) / lam in variables v0, v1.

    With reduce_rels the division happens after normal form (finite
    quotient); otherwise raw coefficient-wise (smooth case, valid when
    v(mu) >= v(lam))."""
    Fx = poly_in_var(base, nvars, v0, fc)
    Fy = poly_in_var(base, nvars, v1, fc)
    x = Poly.var(base, nvars, v0)
    y = Poly.var(base, nvars, v1)
    arg = x + y + (x * y).scale(mu)
    Farg = _eval_poly_at(fc, arg, base)
    num = Fx * Fy - Farg
    if reduce_rels is not None:
        num = normal_form(num, reduce_rels)
    return num.div_scalar(lam)


def build_extension(d: ModelDescriptor) -> HopfPresentation:
    """The finite rank-p^2 presentation attached to a descriptor.

    Divisibility failures (relation by lam^p, cocycle by lam) raise
    DivisibilityError and signal (a, j) not in Phi or precision loss.
    """
    ring = d.ring
    p = ring.p
    base, mu, lam, fc, rel1, Ft = _extension_data(d)
    S2 = Poly.var(base, 2, 1)
    u1 = Poly.one(base, 2) + Poly.var(base, 2, 0).scale(mu)

    num2 = (Ft + S2.scale(lam)) ** p - u1 ** d.j
    num2 = normal_form(num2, [rel1, None])
    rel2 = num2.div_scalar(lam ** p).pruned()

    # comultiplication (4 variables: S1', S2', S1'', S2'')
    v = [Poly.var(base, 4, i) for i in range(4)]
    d_s1 = v[0] + v[2] + (v[0] * v[2]).scale(mu)
    rel1_t = [rel1.embed(4, 0), None, rel1.embed(4, 2), None]
    coc = _cocycle(base, fc, mu, lam, 4, 0, 2, reduce_rels=rel1_t).pruned()
    F_x = poly_in_var(base, 4, 0, fc)
    F_y = poly_in_var(base, 4, 2, fc)
    d_s2 = v[1] * F_y + F_x * v[3] + (v[1] * v[3]).scale(lam) + coc

    # counit
    eps2 = (ring.one() - fc[0]).divide_exact(lam) if d.n else ring.zero()
    # fc[0] = 1 for the canonical lift, so eps2 = 0; kept general
    eps2 = ring.zero() if d.n == 0 else eps2

    # antipode
    anti1_coeffs = [ring.zero()]
    for k in range(1, p):
        anti1_coeffs.append(
            ring.from_int(math.comb(p - 1, k)) * mu ** (k - 1))
    anti1 = poly_in_var(base, 2, 0, anti1_coeffs)
    F_anti = _eval_poly_at(fc, anti1, base)
    anti2_num = (Ft + S2.scale(lam)) ** (p - 1) * u1 ** (p - d.j) - F_anti
    anti2_num = normal_form(anti2_num, [rel1, None])
    anti2 = anti2_num.div_scalar(lam).pruned()

    u2 = Ft + S2.scale(lam)
    rel_system = (rel1, rel2)
    inv1 = normal_form(u1 ** (p - 1), list(rel_system)).pruned()
    inv2 = normal_form(u2 ** (p - 1) * u1 ** (p - d.j),
                       list(rel_system)).pruned()
    return HopfPresentation(
        base=base, gens=("S1", "S2"),
        relations=rel_system, comult=(d_s1, d_s2),
        counit=(ring.zero(), eps2), antipode=(anti1, anti2),
        units=(UnitSpec(u1, inv1), UnitSpec(u2, inv2)),
        name=f"E(m={d.m}, n={d.n}, a={d.a.digit_string() or '0'}, j={d.j})")


def build_extension_smooth(d: ModelDescriptor) -> HopfPresentation:
    """The ambient smooth two-dimensional group over the descriptor's
    (mu, lam, F); designated units (1+mu S1) and (F+lam S2), no
    finiteness relations."""
    ring = d.ring
    base, mu, lam, fc, rel1, Ft = _extension_data(d)
    S2 = Poly.var(base, 2, 1)
    u1 = Poly.one(base, 2) + Poly.var(base, 2, 0).scale(mu)
    u2 = Ft + S2.scale(lam)

    v = [Poly.var(base, 4, i) for i in range(4)]
    d_s1 = v[0] + v[2] + (v[0] * v[2]).scale(mu)
    coc = _cocycle(base, fc, mu, lam, 4, 0, 2, reduce_rels=None).pruned()
    F_x = poly_in_var(base, 4, 0, fc)
    F_y = poly_in_var(base, 4, 2, fc)
    d_s2 = v[1] * F_y + F_x * v[3] + (v[1] * v[3]).scale(lam) + coc

    eps2 = ring.zero()

    # sigma(S1) = -S1/(1+mu S1); sigma(S2) via the inverse of (F+lam S2):
    # ((1+mu S1)^(p-1) - u2 * G1)/ (lam u2 u1^(p-1)),
    # G1 = sum a^i/i! (-S1)^i (1+mu S1)^(p-1-i)
    S1 = Poly.var(base, 2, 0)
    G1 = Poly.zero(base, 2)
    for i, c in enumerate(fc):
        G1 = G1 + ((-S1) ** i) * (u1 ** (ring.p - 1 - i)).scale(c)
    anti2_num = (u1 ** (ring.p - 1) - u2 * G1).div_scalar(lam).pruned()
    anti = ((-S1, (1, 0)), (anti2_num, (ring.p - 1, 1)))

    return HopfPresentation(
        base=base, gens=("S1", "S2"), relations=(None, None),
        comult=(d_s1, d_s2), counit=(ring.zero(), eps2),
        antipode=anti,
        units=(UnitSpec(u1, None), UnitSpec(u2, None)),
        name=f"E_smooth(m={d.m}, n={d.n}, a={d.a.digit_string() or '0'})")


# ---------------------------------------------------------------------------
# the ambient isogeny
# ---------------------------------------------------------------------------

def _chain_solve(ring: RingDescriptor, rows, rhs, t: int):
    """Solve A x = rhs over R/pi^t by min-valuation pivoting.

    rows: list of lists of RingElements (lifts); rhs: RingElements.
    Returns x as RingElements (canonical lifts of the solution mod pi^t);
    raises LinearSolveError when inconsistent or underdetermined by a
    non-unit pivot.
    """
    ncols = len(rows[0])
    A = [[c.reduce_mod(t) for c in row] for row in rows]
    b = [c.reduce_mod(t) for c in rhs]
    nrows = len(A)
    where = [None] * ncols
    used = set()
    for col in range(ncols):
        best, best_v = None, None
        for r in range(nrows):
            if r in used:
                continue
            v = A[r][col].valuation()
            if isinstance(v, IndeterminateAtPrecision):
                continue
            if best_v is None or v < best_v:
                best, best_v = r, v
        if best is None:
            # column identically zero: the unknown must be irrelevant
            where[col] = None
            continue
        if best_v != 0:
            raise LinearSolveError(
                f"pivot for unknown {col} has valuation {best_v}; "
                "solution not unique at working precision")
        used.add(best)
        where[col] = best
        piv_inv = A[best][col].lift().invert_unit()
        for r in range(nrows):
            if r == best:
                continue
            factor = (A[r][col].lift() * piv_inv).reduce_mod(t)
            if factor.is_zero():
                continue
            fl = factor.lift()
            A[r] = [(x.lift() - fl * y.lift()).reduce_mod(t)
                    for x, y in zip(A[r], A[best])]
            b[r] = (b[r].lift() - fl * b[best].lift()).reduce_mod(t)
    # consistency of untouched rows
    for r in range(nrows):
        if r not in used and not b[r].is_zero():
            raise LinearSolveError("inconsistent linear system")
    out = []
    for col in range(ncols):
        r = where[col]
        if r is None:
            out.append(ring.zero())
        else:
            out.append((b[r].lift() * A[r][col].lift().invert_unit())
                       .reduce_mod(t).lift())
    return out


def solve_target_hom(d: ModelDescriptor) -> list[RingElement]:
    """Coefficients g_0..g_{p-1} of G with
    F(S)^p (1+mu S)^(-j) = G(P_{mu,1}(S)) mod lam^p (raw identity).

    Solved as a linear system over R/pi^(pn); the solution is unique
    because P_{mu,1} is monic.
    """
    ring = d.ring
    p = ring.p
    if d.n == 0:
        out = [ring.one()] + [ring.zero()] * (p - 1)
        return out
    base = ExactBase(ring)
    mu = ring.pi(d.m)
    fc = canonical_lift_coeffs(d)
    Pmu = poly_in_var(base, 1, 0,
                      [ring.zero()] + kummer_quotient_coeffs(ring, mu, p))
    u1 = Poly.one(base, 1) + Poly.var(base, 1, 0).scale(mu)
    F = poly_in_var(base, 1, 0, fc)
    lhs_poly = F ** p
    u1j = u1 ** d.j
    # columns: coefficients of P^k (1+mu S)^j as polynomials in S
    deg = p * (p - 1) + d.j
    cols = []
    Pk = Poly.one(base, 1)
    for k in range(p):
        if k:
            Pk = Pk * Pmu
        colpoly = Pk * u1j
        cols.append([colpoly.coefficient((i,)) for i in range(deg + 1)])
    rows = [[cols[k][i] for k in range(p)] for i in range(deg + 1)]
    rhs = [lhs_poly.coefficient((i,)) for i in range(deg + 1)]
    g = _chain_solve(ring, rows, rhs, p * d.n)
    return g


def target_hom_closed_form(d: ModelDescriptor) -> list[RingElement]:
    """The predicted solution G = E_p(a^p, mu^p; X): coefficients
    prod_{k<i}(a^p - k mu^p)/i!."""
    ring = d.ring
    al = d.a.lift() if d.n else ring.zero()
    mup = ring.pi(d.m) ** ring.p
    ap = al ** ring.p
    out = [ring.one()]
    running = ring.one()
    for i in range(1, ring.p):
        running = running * (ap - mup.scale(i - 1))
        out.append(running.scale_unit_fraction(
            Fraction(1, math.factorial(i))))
    return out


def ambient_isogeny(d: ModelDescriptor):
    """Present the finite extension as the kernel of an isogeny of smooth
    two-dimensional groups.

    Returns (source, target, morphism): source = E_smooth over (mu, lam, F),
    target = E_smooth over (mu^p, lam^p, G), morphism the Kummer-type map.
    Verifies the morphism property and kernel containment.
    """
    ring = d.ring
    p = ring.p
    src = build_extension_smooth(d)
    base = ExactBase(ring)
    mu, lam = ring.pi(d.m), ring.pi(d.n)
    fc = canonical_lift_coeffs(d)
    g = solve_target_hom(d)

    # target descriptor data: relations etc. built by hand since the
    # canonical-lift constructor assumes the E_p(aS) shape
    tgt = _smooth_from_hom(ring, mu ** p, lam ** p, g, name_suffix="target")

    Pmu = poly_in_var(base, 2, 0,
                      [ring.zero()] + kummer_quotient_coeffs(ring, mu, p))
    Ft = poly_in_var(base, 2, 0, fc)
    S2 = Poly.var(base, 2, 1)
    u1 = Poly.one(base, 2) + Poly.var(base, 2, 0).scale(mu)
    Gt = _eval_poly_at(g, Pmu, base)
    bracket = (Ft + S2.scale(lam)) ** p - Gt * u1 ** d.j
    img2_num = bracket.div_scalar(lam ** p)
    img2 = LocalizedElement(src, img2_num, (d.j, 0))
    f = HopfMorphism(source=src, target=tgt,
                     images=(Pmu, img2),
                     unit_images=({0: p}, {1: p, 0: -d.j}),
                     name=f"ambient isogeny (j={d.j})")
    if not check_morphism(f):
        raise P2ModelsError("ambient isogeny failed the morphism check")

    # kernel containment: both target generators pull back to their
    # counit values inside the finite quotient
    fin = build_extension(d)
    img1_fin = fin.nf(Pmu)
    if not img1_fin.is_zero():
        raise P2ModelsError("kernel containment fails for S1")
    img2_fin = LocalizedElement(fin, img2_num, (d.j, 0)).clear_in_finite(fin)
    eps2 = (ring.one() - g[0]).divide_exact(lam ** p) if d.n else ring.zero()
    if not (img2_fin - Poly.const(base, 2, eps2)).is_zero() \
            and not fin.nf(img2_fin - Poly.const(base, 2, eps2)).is_zero():
        raise P2ModelsError("kernel containment fails for S2")
    return src, tgt, f


def _smooth_from_hom(ring, mu, lam, fc, name_suffix=""):
    """Smooth E-presentation from arbitrary hom coefficients fc."""
    base = ExactBase(ring)
    S2 = Poly.var(base, 2, 1)
    Ft = poly_in_var(base, 2, 0, fc)
    u1 = Poly.one(base, 2) + Poly.var(base, 2, 0).scale(mu)
    u2 = Ft + S2.scale(lam)
    v = [Poly.var(base, 4, i) for i in range(4)]
    d_s1 = v[0] + v[2] + (v[0] * v[2]).scale(mu)
    coc = _cocycle(base, fc, mu, lam, 4, 0, 2, reduce_rels=None).pruned()
    F_x = poly_in_var(base, 4, 0, fc)
    F_y = poly_in_var(base, 4, 2, fc)
    d_s2 = v[1] * F_y + F_x * v[3] + (v[1] * v[3]).scale(lam) + coc
    eps2 = ((ring.one() - fc[0]).divide_exact(lam)
            if not (ring.one() - fc[0]).is_zero() else ring.zero())
    S1 = Poly.var(base, 2, 0)
    G1 = Poly.zero(base, 2)
    for i, c in enumerate(fc):
        G1 = G1 + ((-S1) ** i) * (u1 ** (ring.p - 1 - i)).scale(c)
    anti2_num = (u1 ** (ring.p - 1) - u2 * G1).div_scalar(lam).pruned()
    anti = ((-S1, (1, 0)), (anti2_num, (ring.p - 1, 1)))
    return HopfPresentation(
        base=base, gens=("S1", "S2"), relations=(None, None),
        comult=(d_s1, d_s2), counit=(ring.zero(), eps2),
        antipode=anti,
        units=(UnitSpec(u1, None), UnitSpec(u2, None)),
        name=f"E_smooth {name_suffix}")


# ---------------------------------------------------------------------------
# classification: normal form, isomorphism, Hom, enumeration
# ---------------------------------------------------------------------------

def normal_form_model(d: ModelDescriptor) -> ModelDescriptor:
    """Replace (m, n, a, j) by the isomorphic (m, n, a/j, 1)."""
    if d.j == 0:
        raise ValueError("j = 0 is not a model of the cyclic group")
    inv = pow(d.j, -1, d.ring.p)
    a2 = d.a.scale(inv)
    out = ModelDescriptor(d.ring, d.m, d.n, a2, 1)
    if not phi_congruence(d.ring, d.m, d.n, a2, 1):
        raise P2ModelsError("normalized parameters left Phi")
    return out


def _a_congruent(d1: ModelDescriptor, d2: ModelDescriptor) -> bool:
    """a1 = (j1/j2)(mu1/mu2) a2 mod pi^(n2)."""
    ring = d1.ring
    r = (d1.j * pow(d2.j, -1, ring.p)) % ring.p
    lhs = d1.a.lift()
    rhs = (d2.a.lift() * ring.pi(d1.m - d2.m)).scale(r)
    ok, _ = eq_mod(lhs, rhs, d2.n)
    return ok


def is_isomorphic(d1: ModelDescriptor, d2: ModelDescriptor) -> bool:
    if d1.j == 0 or d2.j == 0:
        raise ValueError("isomorphism criterion applies to models (j != 0)")
    if d1.m != d2.m or d1.n != d2.n:
        return False
    return _a_congruent(d1, d2)


@dataclass(frozen=True)
class HomClass:
    tag: str                 # "Zero" | "OrderP" | "OrderP2"
    maps: tuple = ()         # witness (r, s) pairs when brute-forced

    def order(self) -> int:
        return {"Zero": 1, "OrderP": None, "OrderP2": None}.get(self.tag)

    def to_json(self):
        return {"class": self.tag, "maps": [list(m) for m in self.maps]}


def hom_models(d1: ModelDescriptor, d2: ModelDescriptor) -> HomClass:
    """The trichotomy for Hom between two models."""
    if d1.j == 0 or d2.j == 0:
        raise ValueError("hom classification applies to models (j != 0)")
    if d1.m < d2.n:
        return HomClass("Zero")
    if d2.m <= d1.m and d2.n <= d1.n and _a_congruent(d1, d2):
        return HomClass("OrderP2")
    return HomClass("OrderP")


def psi_rs(d1: ModelDescriptor, d2: ModelDescriptor, r: int, s: int):
    """Candidate map between the extensions; None when a required exact
    division fails (the candidate is not well defined over R)."""
    return _psi_rs_built(build_extension(d1), build_extension(d2),
                         d1, d2, r, s)


def _psi_rs_built(src, tgt, d1, d2, r, s):
    ring = d1.ring
    p = ring.p
    base = ExactBase(ring)
    mu1, lam1 = ring.pi(d1.m), ring.pi(d1.n)
    mu2, lam2 = ring.pi(d2.m), ring.pi(d2.n)
    x = (r * d1.j * pow(d2.j, -1, p)) % p
    # S1' -> ((1+mu1 S1)^x - 1)/mu2
    try:
        coeffs1 = [ring.zero()]
        for k in range(1, x + 1):
            coeffs1.append(
                (ring.from_int(math.comb(x, k)) * mu1 ** k).divide_exact(mu2))
        img1 = poly_in_var(base, 2, 0, coeffs1)
        fc1 = canonical_lift_coeffs(d1)
        fc2 = canonical_lift_coeffs(d2)
        F1 = poly_in_var(base, 2, 0, fc1)
        S2 = Poly.var(base, 2, 1)
        u1 = Poly.one(base, 2) + Poly.var(base, 2, 0).scale(mu1)
        F2_at = _eval_poly_at(fc2, img1, base)
        num = (F1 + S2.scale(lam1)) ** r * u1 ** s - F2_at
        num = src.nf(num)
        img2 = num.div_scalar(lam2)
    except (DivisibilityError, ValuationError):
        return None
    f = HopfMorphism(source=src, target=tgt, images=(img1, img2),
                     name=f"psi({r},{s})")
    return f


def hom_models_brute(d1: ModelDescriptor, d2: ModelDescriptor):
    """Test all p^2 candidate maps; return (HomClass, morphisms)."""
    ring = d1.ring
    p = ring.p
    src = build_extension(d1)
    tgt = build_extension(d2)
    survivors = []
    maps = []
    for r in range(p):
        for s in range(p):
            f = _psi_rs_built(src, tgt, d1, d2, r, s)
            if f is not None and check_morphism(f):
                survivors.append((r, s))
                maps.append(f)
    if len(survivors) == p * p:
        tag = "OrderP2"
    elif len(survivors) == p and all(r == 0 for r, _ in survivors):
        tag = "OrderP"
    elif survivors == [(0, 0)]:
        tag = "Zero"
    else:
        raise P2ModelsError(
            f"unexpected hom survivor pattern {survivors}")
    return HomClass(tag, tuple(survivors)), maps


def enumerate_models(ring: RingDescriptor, m_max: int) -> list[ModelDescriptor]:
    """All models (m, n, a, 1), m_max >= m >= n >= 0, canonical a."""
    if m_max > ring.p:
        raise ValueError("m_max exceeds v(lam_(1))")
    out = []
    for m in range(m_max + 1):
        for n in range(m + 1):
            for el in phi_closed(ring, m, n):
                if el.j == 1:
                    out.append(ModelDescriptor(ring, m, n, el.a, 1))
    return sorted(out, key=ModelDescriptor.sort_key)


# ---------------------------------------------------------------------------
# the regime v(mu) < v(lam): brute force only
# ---------------------------------------------------------------------------

def rad_brute(ring: RingDescriptor, m: int, n: int,
              budget: int | None = None) -> list[tuple]:
    """Pairs (F, j) with F a hom representative over R/pi^n and
    F^p (1+mu S)^(-j) = 1 over R/pi^(pn); survivors must have j = 0
    when v(mu) < v(lam) (no cyclic-p^2 models in this regime)."""
    p = ring.p
    homs = hom_brute(ring, m, n, budget)
    qb = QuotBase(ring, p * n)
    rel = _mu_relation_quot(ring, m, p * n, 1, 0)
    u1 = (Poly.one(qb, 1)
          + Poly.var(qb, 1, 0).scale(ring.pi(m).reduce_mod(p * n)))
    out = []
    for row in homs:
        lifts = [c.lift().reduce_mod(p * n) for c in row]
        F = poly_in_var(qb, 1, 0, lifts)
        Fp = normal_form(F ** p, [rel])
        for j in range(p):
            rhs = normal_form(u1 ** j, [rel])
            if Fp.eq(rhs):
                out.append((row, j))
    if n > m and any(j != 0 for _, j in out):
        raise P2ModelsError(
            "survivor with j != 0 in the v(mu) < v(lam) regime")
    return out


def rad_witt_count(ring: RingDescriptor, m: int, n: int,
                   budget: int | None = None) -> int:
    """Independent count of rad survivors via the Witt layer, for
    support-1 classes: a with [a] in the twisted kernel over R/pi^n and
    p[a] in the image of the isogeny pullback over R/pi^(pn)."""
    from .dvr import enumerate_quotient
    from .witt import (WittVector, is_frobenius_kernel, mult_by_p,
                       psi_star_image)
    p = ring.p
    mu = ring.pi(m)
    _check_budget(p ** n * p ** (p * n), _budget_for(ring, budget))
    pool_b = list(enumerate_quotient(ring, p * n))
    count = 0
    for a in enumerate_quotient(ring, n):
        w = WittVector(ring, n, [a])
        if not is_frobenius_kernel(w, mu, n):
            continue
        pw = mult_by_p(w, p * n)
        found = False
        for b0 in pool_b:
            b = WittVector(ring, p * n, [b0])
            if not is_frobenius_kernel(b, mu ** p, p * n):
                continue
            if psi_star_image(b, mu) == pw:
                found = True
                break
        if found:
            count += 1
    return count
