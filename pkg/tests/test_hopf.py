"""Tests for presentations, axiom checking, morphisms, residue fibers."""

import pytest

from p2models.dvr import make_ring
from p2models.errors import PrecisionError
from p2models.hopf import (
    HopfMorphism,
    check_hopf_axioms,
    check_morphism,
    det_valuation,
    is_isomorphism,
    is_model_map,
    morphism_matrix,
    residue_fiber,
)
from p2models.models import build_g, build_g_smooth, poly_in_var
from p2models.poly import ExactBase, Poly, normal_form


@pytest.fixture(scope="module")
def R3():
    return make_ring(3, 12)


def test_normal_form_basics(R3):
    G = build_g(R3, R3.one(), 1)  # mu_p
    rel = G.relations[0]
    assert G.nf(rel).is_zero()
    c = Poly.const(G.base, 1, R3.from_int(7))
    assert G.nf(c).eq(c)


def test_normal_form_unit_power(R3):
    # (1 + mu S)^p reduces to 1 in R[S]/P_{mu,1}
    mu = R3.pi()
    G = build_g(R3, mu, 1)
    u = Poly.one(G.base, 1) + Poly.var(G.base, 1, 0).scale(mu)
    assert G.nf(u ** 3).eq(G.one_poly())


def test_normal_form_idempotent_linear(R3):
    import random
    rng = random.Random(0)
    G = build_g(R3, R3.pi(), 1)
    base = G.base
    for _ in range(5):
        poly = Poly(base, 1, {(k,): R3.from_digits(
            [rng.randrange(R3.pM) for _ in range(R3.e)])
            for k in range(6)})
        nf1 = G.nf(poly)
        assert G.nf(nf1).eq(nf1)
    a = Poly.var(base, 1, 0) ** 4
    b = Poly.var(base, 1, 0) ** 5
    assert G.nf(a + b).eq(G.nf(a) + G.nf(b))


def test_mu_p_axioms(R3):
    report = check_hopf_axioms(build_g(R3, R3.one(), 1))
    assert report.ok and report.commutativity
    assert report.rank == 3


def test_g_pi_axioms(R3):
    report = check_hopf_axioms(build_g(R3, R3.pi(), 1))
    assert report.ok
    assert report.rank == 3


def test_g_lam1_axioms(R3):
    report = check_hopf_axioms(build_g(R3, R3.lam1, 1))
    assert report.ok
    assert report.rank == 3


def test_g_n2_axioms(R3):
    report = check_hopf_axioms(build_g(R3, R3.pi(), 2))
    assert report.ok
    assert report.rank == 9


def test_smooth_axioms(R3):
    report = check_hopf_axioms(build_g_smooth(R3, R3.pi()))
    assert report.ok
    assert report.rank is None


def test_star_condition_guard(R3):
    from p2models.errors import ValuationError
    with pytest.raises(ValuationError):
        build_g(R3, R3.pi(4), 1)  # v(p)=6 < 2*4


def test_identity_morphism(R3):
    G = build_g(R3, R3.pi(), 1)
    f = HopfMorphism(source=G, target=G, images=(G.var(0),))
    assert check_morphism(f)
    assert is_model_map(f)
    assert is_isomorphism(f)


def test_alpha_map_to_mu_p(R3):
    # x -> 1 + lam x is not a generator-level Hopf map; the induced map
    # G_{lam,1} -> mu_p is T' -> lam T / 1 ... in our coordinates
    # mu_p = G_{1,1}, and the map is T' -> ((1+lam T) - 1)/1 = lam T.
    lam = R3.lam1
    G = build_g(R3, lam, 1)
    Mu = build_g(R3, R3.one(), 1)
    img = G.var(0).scale(lam)
    f = HopfMorphism(source=G, target=Mu, images=(img,))
    assert check_morphism(f)
    assert is_model_map(f)       # iso on the generic fiber
    assert not is_isomorphism(f)  # v(lam) > 0: determinant not a unit


def test_zero_map_fails_nonzero_relation(R3):
    # sending the generator to 0 is not a morphism onto a target whose
    # comultiplication has the extra lam-term... it is a morphism for
    # G-type groups (counit 0), so use a target with a twisted relation:
    # the constant map T -> 1 violates the counit.
    G = build_g(R3, R3.pi(), 1)
    f = HopfMorphism(source=G, target=G,
                     images=(Poly.one(G.base, 1),))
    assert not check_morphism(f)


def test_det_valuation(R3):
    one, pi = R3.one(), R3.pi()
    m = [[one, pi], [R3.zero(), pi]]
    assert det_valuation(m) == 1
    m2 = [[pi, one], [pi, one]]
    assert det_valuation(m2) is None  # singular at working precision


def test_residue_fiber_mu_p(R3):
    Gk = residue_fiber(build_g(R3, R3.one(), 1))
    # relation (1+T)^3 - 1 = T^3 + 3T^2 + 3T reduces to T^3 over F_3
    rel = Gk.relations[0]
    assert rel.terms == {(3,): 1}
    report = check_hopf_axioms(Gk)
    assert report.ok and report.rank == 3


def test_residue_fiber_alpha_p(R3):
    # 0 < (p-1)v(lam) < v(p): relation becomes S^p = 0
    Gk = residue_fiber(build_g(R3, R3.pi(), 1))
    assert Gk.relations[0].terms == {(3,): 1}
    # additive comultiplication: T x 1 + 1 x T
    assert Gk.comult[0].terms == {(1, 0): 1, (0, 1): 1}


def test_residue_fiber_z_mod_p(R3):
    # boundary case v(lam) = v(lam_(1)): relation S^p - c S with c a unit
    Gk = residue_fiber(build_g(R3, R3.lam1, 1))
    rel = Gk.relations[0]
    assert rel.degree_in(0) == 3
    c = rel.terms.get((1,), 0)
    assert c != 0  # unit coefficient: the etale Z/pZ form
    assert rel.terms.get((2,), 0) == 0
    report = check_hopf_axioms(Gk)
    assert report.ok


def test_residue_fiber_precision_guard(R3):
    # a structure constant known to precision 0 cannot be reduced mod pi
    G = build_g(R3, R3.pi(), 1)
    from dataclasses import replace
    G0 = replace(G, counit=(R3.zero(prec=0),))
    with pytest.raises(PrecisionError):
        residue_fiber(G0)


def test_rank_of_tensor_square(R3):
    from p2models.hopf import tensor_relations
    G = build_g(R3, R3.pi(), 1)
    rels = tensor_relations(G, 2)
    total = 1
    for i, r in enumerate(rels):
        total *= r.degree_in(i)
    assert total == 9  # rank(H x H) = rank(H)^2
