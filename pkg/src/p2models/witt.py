"""Witt-vector calculus over R and its quotients R/pi^t.

Vectors are finite coordinate lists.  Arithmetic is exact: operands are
lifted canonically to R (characteristic zero), combined through the
ghost components Phi_r(c) = c_0^{p^r} + p c_1^{p^(r-1)} + ... + p^r c_r,
and the result coordinates are recovered by the inverse recursion whose
divisions by p^r are exact precisely because the universal sum/product
polynomials are integral.  This evaluates the same universal polynomials
without expanding them; the symbolic expansions (sum_poly, frob_poly)
are kept for the identity and isobaricity checks.

Over a quotient R/pi^t with nilpotent coordinates, a sum of vectors of
support <= K has coordinates of weight p^r and hence of valuation at
least p^(r-K+1), so indices beyond K + log_p(t) vanish; `_settle`
computes one extra coordinate and fails loudly if it does not vanish.
"""

from __future__ import annotations

import math
from fractions import Fraction
from functools import lru_cache

from .dvr import (IndeterminateAtPrecision, QuotElement, RingDescriptor,
                  RingElement)
from .errors import P2ModelsError, ValuationError
from .poly import Poly


# ---------------------------------------------------------------------------
# symbolic universal polynomials (exact rationals, asserted integral)
# ---------------------------------------------------------------------------

class QQBase:
    def zero(self):
        return Fraction(0)

    def one(self):
        return Fraction(1)

    def from_int(self, n):
        return Fraction(n)

    def add(self, a, b):
        return a + b

    def neg(self, a):
        return -a

    def mul(self, a, b):
        return a * b

    def is_zero(self, a):
        return a == 0

    def eq(self, a, b):
        return a == b

    def scale_fraction(self, a, q):
        return a * q

    def coeff_json(self, a):
        return str(a)


_QQ = QQBase()


def _reindex(poly: Poly, mapping: dict, nvars: int) -> Poly:
    out = {}
    for m, c in poly.terms.items():
        mm = [0] * nvars
        for i, k in enumerate(m):
            if k:
                mm[mapping[i]] += k
        out[tuple(mm)] = c
    return Poly(poly.base, nvars, out)


def ghost_poly(p: int, r: int, nvars: int, offset: int = 0) -> Poly:
    """Phi_r in variables offset..offset+r of an nvars-variable ring."""
    terms = {}
    for i in range(r + 1):
        m = [0] * nvars
        m[offset + i] = p ** (r - i)
        terms[tuple(m)] = Fraction(p ** i)
    return Poly(_QQ, nvars, terms)


@lru_cache(maxsize=None)
def sum_poly(p: int, r: int) -> Poly:
    """S_r(T_0..T_r, U_0..U_r): variables 0..r are T, r+1..2r+1 are U."""
    nv = 2 * (r + 1)
    acc = ghost_poly(p, r, nv, 0) + ghost_poly(p, r, nv, r + 1)
    for k in range(r):
        sk = sum_poly(p, k)
        mapping = {i: i for i in range(k + 1)}
        mapping.update({k + 1 + i: r + 1 + i for i in range(k + 1)})
        sk = _reindex(sk, mapping, nv)
        acc = acc - (sk ** (p ** (r - k))).scale(Fraction(p ** k))
    out = acc.map_coeffs(lambda c: c / p ** r)
    for c in out.terms.values():
        assert c.denominator == 1, "sum polynomial not integral"
    return out


@lru_cache(maxsize=None)
def prod_poly(p: int, r: int) -> Poly:
    nv = 2 * (r + 1)
    acc = ghost_poly(p, r, nv, 0) * ghost_poly(p, r, nv, r + 1)
    for k in range(r):
        mk = prod_poly(p, k)
        mapping = {i: i for i in range(k + 1)}
        mapping.update({k + 1 + i: r + 1 + i for i in range(k + 1)})
        mk = _reindex(mk, mapping, nv)
        acc = acc - (mk ** (p ** (r - k))).scale(Fraction(p ** k))
    out = acc.map_coeffs(lambda c: c / p ** r)
    for c in out.terms.values():
        assert c.denominator == 1, "product polynomial not integral"
    return out


@lru_cache(maxsize=None)
def frob_poly(p: int, r: int) -> Poly:
    """F_r(T_0..T_{r+1}) with Phi_r(F_0..F_r) = Phi_{r+1}(T_0..T_{r+1})."""
    nv = r + 2
    acc = ghost_poly(p, r + 1, nv, 0)
    for k in range(r):
        fk = frob_poly(p, k).embed(nv, 0)
        acc = acc - (fk ** (p ** (r - k))).scale(Fraction(p ** k))
    out = acc.map_coeffs(lambda c: c / p ** r)
    for c in out.terms.values():
        assert c.denominator == 1, "Frobenius polynomial not integral"
    return out


def monomial_weight(p: int, monomial: tuple, r: int) -> int:
    """Weight with T_i, U_i of weight p^i (variable layout of sum_poly)."""
    w = 0
    for i, k in enumerate(monomial):
        idx = i if i <= r else i - (r + 1)
        w += k * p ** idx
    return w


# ---------------------------------------------------------------------------
# vectors
# ---------------------------------------------------------------------------

class WittVector:
    """Finite-support Witt vector over R (t=0) or over R/pi^t (t>0)."""

    __slots__ = ("ring", "t", "coords")

    def __init__(self, ring: RingDescriptor, t: int, coords):
        self.ring = ring
        self.t = t
        coords = list(coords)
        while coords and self._coord_zero(coords[-1]):
            coords.pop()
        self.coords = tuple(coords)

    def _coord_zero(self, c):
        return c.is_zero()

    @classmethod
    def integral(cls, ring, coords):
        return cls(ring, 0, coords)

    @classmethod
    def teichmuller(cls, ring, a, t: int = 0):
        return cls(ring, t, [a])

    @classmethod
    def zero(cls, ring, t: int = 0):
        return cls(ring, t, [])

    def __len__(self):
        return len(self.coords)

    def coord(self, i: int):
        if i < len(self.coords):
            return self.coords[i]
        if self.t == 0:
            return self.ring.zero()
        return QuotElement(self.ring, self.t, (0,) * self.t)

    def lift_coords(self, length: int) -> list[RingElement]:
        out = []
        for i in range(length):
            c = self.coord(i)
            out.append(c.lift() if isinstance(c, QuotElement) else c)
        return out

    def reduce(self, t: int) -> "WittVector":
        return WittVector(self.ring, t,
                          [c.reduce_mod(t) if isinstance(c, RingElement)
                           else c.lift().reduce_mod(t)
                           for c in self.coords])

    def __eq__(self, other):
        if not isinstance(other, WittVector):
            return NotImplemented
        if self.ring is not other.ring or self.t != other.t:
            return False
        n = max(len(self), len(other))
        for i in range(n):
            a, b = self.coord(i), other.coord(i)
            if isinstance(a, QuotElement):
                if a != b:
                    return False
            else:
                if not (a - b).is_zero():
                    return False
        return True

    def __hash__(self):
        raise TypeError("WittVector is unhashable")

    def __repr__(self):
        return f"WittVector(t={self.t}, {list(self.coords)!r})"

    def to_json(self):
        return [c.to_json() for c in self.coords]

    def is_nilpotent(self) -> bool:
        """All coordinates nilpotent in R/pi^t (valuation >= 1)."""
        if self.t == 0:
            raise ValueError("nilpotency is a quotient-level predicate")
        for c in self.coords:
            v = c.valuation()
            if not isinstance(v, IndeterminateAtPrecision) and v == 0:
                return False
        return True


def ghost(w: WittVector, r: int) -> RingElement:
    """Phi_r of the (canonically lifted) vector, computed exactly."""
    ring = w.ring
    coords = w.lift_coords(r + 1)
    acc = ring.zero()
    for i, c in enumerate(coords):
        acc = acc + (c ** (ring.p ** (r - i))).scale(ring.p ** i)
    return acc


def _recover(ring: RingDescriptor, ghosts: list[RingElement]) -> list[RingElement]:
    """Coordinates from ghost components (divisions by p^r are exact)."""
    p = ring.p
    coords = []
    for r, g in enumerate(ghosts):
        acc = g
        for k, c in enumerate(coords):
            acc = acc - (c ** (p ** (r - k))).scale(p ** k)
        if r:
            acc = acc.divide_exact(ring.from_int(p ** r))
        coords.append(acc)
    return coords


def _extra_length(p: int, t: int) -> int:
    """Indices needed beyond the support for coordinates to vanish mod pi^t."""
    if t <= 1:
        return 1
    return max(1, math.ceil(math.log(t, p))) + 1


def _settle(ring, t, coords):
    """Build a quotient vector, checking the dropped tail really vanishes."""
    reduced = [c.reduce_mod(t) for c in coords]
    if reduced and not reduced[-1].is_zero():
        raise P2ModelsError(
            "Witt vector did not settle within the working length; "
            "input coordinates were likely not nilpotent")
    return WittVector(ring, t, reduced)


def _binary_ghost_op(u: WittVector, v: WittVector, combine):
    ring = u.ring
    if u.t != v.t or u.ring is not v.ring:
        raise ValueError("Witt operands on different bases")
    t = u.t
    if t == 0:
        length = max(len(u), len(v))
        gh = [combine(ghost(u, r), ghost(v, r)) for r in range(length)]
        return WittVector(ring, 0, _recover(ring, gh))
    length = max(len(u), len(v)) + _extra_length(ring.p, t)
    ul = WittVector(ring, 0, u.lift_coords(length))
    vl = WittVector(ring, 0, v.lift_coords(length))
    gh = [combine(ghost(ul, r), ghost(vl, r)) for r in range(length)]
    return _settle(ring, t, _recover(ring, gh))


def witt_add(u: WittVector, v: WittVector) -> WittVector:
    return _binary_ghost_op(u, v, lambda a, b: a + b)


def witt_mul(u: WittVector, v: WittVector) -> WittVector:
    return _binary_ghost_op(u, v, lambda a, b: a * b)


def witt_neg(u: WittVector) -> WittVector:
    # coordinate-wise for p odd
    return WittVector(u.ring, u.t, [-c for c in u.coords])


def witt_sub(u: WittVector, v: WittVector) -> WittVector:
    return witt_add(u, witt_neg(v))


def scalar_teich(c: RingElement, u: WittVector) -> WittVector:
    """[c] * u = (c u_0, c^p u_1, c^{p^2} u_2, ...), the closed form."""
    ring = u.ring
    out = []
    for k, a in enumerate(u.coords):
        ck = c ** (ring.p ** k)
        if isinstance(a, QuotElement):
            out.append((ck * a.lift()).reduce_mod(u.t))
        else:
            out.append(ck * a)
    return WittVector(ring, u.t, out)


def verschiebung(u: WittVector) -> WittVector:
    zero = (u.ring.zero() if u.t == 0
            else QuotElement(u.ring, u.t, (0,) * u.t))
    return WittVector(u.ring, u.t, (zero,) + u.coords)


def frobenius_w(u: WittVector) -> WittVector:
    """Generalized Frobenius; on a base where p = 0 it is the
    coordinate-wise p-power map."""
    ring = u.ring
    if u.t == 0:
        length = max(len(u) - 1, 0) + 1
        ul = u
    else:
        length = len(u) + _extra_length(ring.p, u.t)
        ul = WittVector(ring, 0, u.lift_coords(length + 1))
    gh = [ghost(ul, r + 1) for r in range(length)]
    coords = _recover(ring, gh)
    if u.t == 0:
        return WittVector(ring, 0, coords)
    return _settle(ring, u.t, coords)


def is_frobenius_kernel(u: WittVector, mu: RingElement, t: int) -> bool:
    """Membership in W^(F - [mu^(p-1)]) over R/pi^t, nilpotence included."""
    if t == 0:
        raise ValueError("kernel predicate needs a positive modulus")
    uq = u if u.t == t else u.reduce(t)
    if not uq.is_nilpotent():
        return False
    lhs = frobenius_w(uq)
    rhs = scalar_teich(mu ** (uq.ring.p - 1), uq)
    return lhs == rhs


def mult_by_p(u: WittVector, target_t: int) -> WittVector:
    """Multiplication by p: lift canonically, multiply in W(R), reduce.

    Used as the map W^(F-[mu^(p-1)])(R/lam) -> W(R/lam^p); the class of
    the result does not depend on the chosen lift.
    """
    ring = u.ring
    if u.t == 0:
        raise ValueError("mult_by_p expects a quotient-level vector")
    length = len(u) + _extra_length(ring.p, target_t)
    ul = WittVector(ring, 0, u.lift_coords(length))
    gh = [ghost(ul, r).scale(ring.p) for r in range(length)]
    return _settle(ring, target_t, _recover(ring, gh))


def witt_int_multiple(u: WittVector, n: int, length: int) -> WittVector:
    """n * u in W_length(R) for an integral vector (exact)."""
    if u.t != 0:
        raise ValueError("integral vectors only")
    gh = [ghost(u, r).scale(n) for r in range(length)]
    return WittVector(u.ring, 0, _recover(u.ring, gh))


def psi_star_image(b: WittVector, mu: RingElement) -> WittVector:
    """[p/mu^(p-1)] b + V(b), the pullback along the degree-p isogeny."""
    ring = b.ring
    if ring.p == 2:
        raise ValueError("p = 2 needs the variant shift operator")
    scalar = ring.from_int(ring.p).divide_exact(mu ** (ring.p - 1))
    return witt_add(scalar_teich(scalar, b), verschiebung(b))
