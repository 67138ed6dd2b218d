"""Multivariate polynomials over pluggable coefficient bases.

The bases are thin adapters exposing a common protocol (zero/one/
from_int/add/neg/mul/is_zero/eq, plus exact scalar division where it
makes sense):

  * ExactBase  -- elements of R at working precision,
  * QuotBase   -- canonical elements of R/pi^t R,
  * FpBase     -- integers mod p (the residue field).

Polynomials are sparse dicts {exponent tuple: coefficient}.  Normal
forms modulo a triangular monic relation system (relation i monic in
variable i, other terms of lower degree in variable i and involving
only earlier variables) are computed by iterated rewriting, which
terminates because each step strictly lowers the reversed-lex key.
"""

from __future__ import annotations

from .dvr import QuotElement, RingDescriptor, RingElement
from .errors import DivisibilityError, ValuationError


class ExactBase:
    """Coefficients in R itself, compared at stored precision."""

    def __init__(self, ring: RingDescriptor):
        self.ring = ring

    def zero(self):
        return self.ring.zero()

    def one(self):
        return self.ring.one()

    def from_int(self, n):
        return self.ring.from_int(n)

    def add(self, a, b):
        return a + b

    def neg(self, a):
        return -a

    def mul(self, a, b):
        return a * b

    def is_zero(self, a):
        return a.is_zero()

    def eq(self, a, b):
        return (a - b).is_zero()

    def div_exact(self, a, d):
        try:
            return a.divide_exact(d)
        except ValuationError as exc:
            raise DivisibilityError(str(exc)) from exc

    def scale_fraction(self, a, q):
        return a.scale_unit_fraction(q)

    def prune_zero(self, a):
        # Only structural zeros may be dropped from polynomials: an
        # element that merely vanishes at its stored precision still
        # carries "known only mod pi^prec" information for its monomial.
        return all(d == 0 for d in a.digits)

    def coeff_json(self, a):
        return a.to_json()

    def __eq__(self, other):
        return isinstance(other, ExactBase) and other.ring is self.ring

    def __repr__(self):
        return f"ExactBase(p={self.ring.p})"


class QuotBase:
    """Coefficients in R/pi^t R, canonical digit representatives."""

    def __init__(self, ring: RingDescriptor, t: int):
        self.ring = ring
        self.t = t

    def zero(self):
        return QuotElement(self.ring, self.t, (0,) * self.t)

    def one(self):
        return self.ring.one().reduce_mod(self.t)

    def from_int(self, n):
        return self.ring.from_int(n).reduce_mod(self.t)

    def add(self, a, b):
        return a + b

    def neg(self, a):
        return -a

    def mul(self, a, b):
        return a * b

    def is_zero(self, a):
        return a.is_zero()

    def eq(self, a, b):
        return a == b

    def prune_zero(self, a):
        return a.is_zero()

    def coeff_json(self, a):
        return a.to_json()

    def __eq__(self, other):
        return (isinstance(other, QuotBase) and other.ring is self.ring
                and other.t == self.t)

    def __repr__(self):
        return f"QuotBase(p={self.ring.p}, t={self.t})"


class FpBase:
    """The residue field F_p."""

    def __init__(self, p: int):
        self.p = p

    def zero(self):
        return 0

    def one(self):
        return 1

    def from_int(self, n):
        return n % self.p

    def add(self, a, b):
        return (a + b) % self.p

    def neg(self, a):
        return (-a) % self.p

    def mul(self, a, b):
        return (a * b) % self.p

    def is_zero(self, a):
        return a % self.p == 0

    def eq(self, a, b):
        return (a - b) % self.p == 0

    def prune_zero(self, a):
        return a % self.p == 0

    def coeff_json(self, a):
        return a % self.p

    def __eq__(self, other):
        return isinstance(other, FpBase) and other.p == self.p

    def __repr__(self):
        return f"FpBase({self.p})"


class Poly:
    """Sparse multivariate polynomial over a coefficient base."""

    __slots__ = ("base", "nvars", "terms")

    def __init__(self, base, nvars: int, terms: dict):
        self.base = base
        self.nvars = nvars
        drop = getattr(base, "prune_zero", base.is_zero)
        self.terms = {m: c for m, c in terms.items() if not drop(c)}

    # -- constructors --------------------------------------------------------

    @classmethod
    def zero(cls, base, nvars):
        return cls(base, nvars, {})

    @classmethod
    def const(cls, base, nvars, c):
        return cls(base, nvars, {(0,) * nvars: c})

    @classmethod
    def one(cls, base, nvars):
        return cls.const(base, nvars, base.one())

    @classmethod
    def var(cls, base, nvars, i, c=None):
        m = tuple(1 if j == i else 0 for j in range(nvars))
        return cls(base, nvars, {m: base.one() if c is None else c})

    # -- arithmetic ----------------------------------------------------------

    def __add__(self, other: "Poly") -> "Poly":
        out = dict(self.terms)
        base = self.base
        for m, c in other.terms.items():
            if m in out:
                out[m] = base.add(out[m], c)
            else:
                out[m] = c
        return Poly(base, self.nvars, out)

    def __neg__(self) -> "Poly":
        base = self.base
        return Poly(base, self.nvars,
                    {m: base.neg(c) for m, c in self.terms.items()})

    def __sub__(self, other: "Poly") -> "Poly":
        return self + (-other)

    def __mul__(self, other: "Poly") -> "Poly":
        base = self.base
        out = {}
        for m1, c1 in self.terms.items():
            for m2, c2 in other.terms.items():
                m = tuple(a + b for a, b in zip(m1, m2))
                c = base.mul(c1, c2)
                if m in out:
                    out[m] = base.add(out[m], c)
                else:
                    out[m] = c
        return Poly(base, self.nvars, out)

    def scale(self, c) -> "Poly":
        base = self.base
        return Poly(base, self.nvars,
                    {m: base.mul(c, v) for m, v in self.terms.items()})

    def __pow__(self, n: int) -> "Poly":
        result = Poly.one(self.base, self.nvars)
        b = self
        while n:
            if n & 1:
                result = result * b
            b = b * b
            n >>= 1
        return result

    # -- structure -----------------------------------------------------------

    def is_zero(self) -> bool:
        """All coefficients indistinguishable from zero at their stated
        precision."""
        return all(self.base.is_zero(c) for c in self.terms.values())

    def pruned(self) -> "Poly":
        """Drop coefficients that vanish at their stored precision.

        Only for construction-time data whose vanishing is certified by
        theory (relations, cocycles): run-time arithmetic keeps such
        coefficients to track per-monomial precision honestly.
        """
        return Poly(self.base, self.nvars,
                    {m: c for m, c in self.terms.items()
                     if not self.base.is_zero(c)})

    def eq(self, other: "Poly") -> bool:
        return (self - other).is_zero()

    def degree_in(self, i: int) -> int:
        return max((m[i] for m in self.terms), default=-1)

    def coefficient(self, monomial: tuple):
        return self.terms.get(monomial, self.base.zero())

    def coeff_in_var(self, i: int, k: int) -> "Poly":
        """Coefficient of var_i^k, a polynomial in the remaining variables
        (still indexed over nvars, with exponent 0 in slot i)."""
        out = {}
        for m, c in self.terms.items():
            if m[i] == k:
                out[m[:i] + (0,) + m[i + 1:]] = c
        return Poly(self.base, self.nvars, out)

    def map_coeffs(self, fn, new_base=None) -> "Poly":
        base = new_base if new_base is not None else self.base
        return Poly(base, self.nvars,
                    {m: fn(c) for m, c in self.terms.items()})

    def div_scalar(self, d) -> "Poly":
        """Exact coefficient-wise division by a base element (ExactBase)."""
        return self.map_coeffs(lambda c: self.base.div_exact(c, d))

    def embed(self, nvars: int, offset: int) -> "Poly":
        """Reindex into a larger variable set at the given offset."""
        out = {}
        for m, c in self.terms.items():
            mm = (0,) * offset + m + (0,) * (nvars - offset - self.nvars)
            out[mm] = c
        return Poly(self.base, nvars, out)

    def subst(self, images: list["Poly"]) -> "Poly":
        """Substitute images[i] for variable i (algebra map on generators).

        All images must share a base and variable count; coefficients are
        carried over unchanged.
        """
        nv = images[0].nvars
        base = images[0].base
        result = Poly.zero(base, nv)
        power_cache = [{0: Poly.one(base, nv)} for _ in range(self.nvars)]

        def ipow(i, k):
            cache = power_cache[i]
            if k not in cache:
                cache[k] = ipow(i, k - 1) * images[i]
            return cache[k]

        for m, c in self.terms.items():
            term = Poly.const(base, nv, c)
            for i, k in enumerate(m):
                if k:
                    term = term * ipow(i, k)
            result = result + term
        return result

    def to_json(self):
        return {"nvars": self.nvars,
                "terms": [{"monomial": list(m),
                           "coeff": self.base.coeff_json(c)}
                          for m, c in sorted(self.terms.items())]}

    def __repr__(self):
        if not self.terms:
            return "Poly(0)"
        bits = []
        for m, c in sorted(self.terms.items()):
            mono = "*".join(f"x{i}^{k}" for i, k in enumerate(m) if k) or "1"
            bits.append(f"({c!r})*{mono}")
        return "Poly(" + " + ".join(bits) + ")"


def normal_form(poly: Poly, relations: list) -> Poly:
    """Reduce modulo a triangular monic relation system.

    `relations[i]` is either None (no relation on variable i) or a Poly
    that is monic of degree d_i in variable i, with all other terms of
    lower degree in variable i and involving only variables j < i.
    """
    base = poly.base
    nv = poly.nvars
    degs = [None if r is None else r.degree_in(i)
            for i, r in enumerate(relations)]
    reducers = []
    for i, r in enumerate(relations):
        if r is None:
            reducers.append(None)
        else:
            lead = tuple(degs[i] if j == i else 0 for j in range(nv))
            rest = Poly(base, nv,
                        {m: c for m, c in r.terms.items() if m != lead})
            reducers.append(-rest)  # var_i^{d_i} == reducers[i]

    drop = getattr(base, "prune_zero", base.is_zero)
    terms = dict(poly.terms)
    changed = True
    while changed:
        changed = False
        for i in reversed(range(nv)):
            d = degs[i]
            if d is None:
                continue
            hot = [m for m in terms if m[i] >= d]
            if not hot:
                continue
            changed = True
            for m in hot:
                c = terms.pop(m)
                rem = m[:i] + (m[i] - d,) + m[i + 1:]
                for rm, rc in reducers[i].terms.items():
                    mm = tuple(a + b for a, b in zip(rem, rm))
                    cc = base.mul(c, rc)
                    if mm in terms:
                        s = base.add(terms[mm], cc)
                        if drop(s):
                            del terms[mm]
                        else:
                            terms[mm] = s
                    else:
                        terms[mm] = cc
    return Poly(base, nv, terms)
