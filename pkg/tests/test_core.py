import random
from fractions import Fraction

import pytest

from ietlab.core import (
    CIRCLE,
    Component,
    Domain,
    DomainMismatchError,
    Iet,
    IetError,
    PartitionError,
    Point,
    PointError,
    Subdomain,
    circle_rotation,
    from_lengths,
    interval_rotation,
    lengths_of,
    make_point,
    perm_is_realizable,
    permutation_of,
    subdomain_as_domain,
)
from ietlab.field import QuadNum

from randgen import random_iet, random_quad_lengths, random_realizable_perm

R2 = QuadNum.sqrt(2)
ALPHA = R2 - 1  # irrational rotation number in (0, 1)
H = Fraction(1, 2)


def test_from_lengths_half_swap_is_rotation():
    h = from_lengths((2, 1), [H, H])
    assert h == interval_rotation(H)
    assert [pt.x for pt in h.discontinuities()] == [QuadNum(H)]
    assert lengths_of(h) == (QuadNum(H), QuadNum(H))
    assert permutation_of(h) == (2, 1)


def test_from_lengths_irrational_rotation():
    h = from_lengths((2, 1), [1 - ALPHA, ALPHA])
    assert h == interval_rotation(ALPHA)
    assert h.d() == 1
    assert lengths_of(h) == (1 - ALPHA, ALPHA)


def test_from_lengths_reversal_translation_vector():
    # independent oracle (direct image-start evaluation): (3/4, 1/4, -1/2)
    h = from_lengths((3, 2, 1), [Fraction(1, 4), Fraction(1, 4), H])
    assert h.translation_vector() == (QuadNum(Fraction(3, 4)), QuadNum(Fraction(1, 4)), QuadNum(-H))
    assert h(make_point(h.source, 0, 0)).x == Fraction(3, 4)


def test_from_lengths_rejects_bad_input():
    with pytest.raises(IetError):
        from_lengths((2, 1), [Fraction(3, 4), Fraction(1, 2)])  # sum != 1
    with pytest.raises(IetError):
        from_lengths((2, 1), [Fraction(5, 4), Fraction(-1, 4)])  # negative
    with pytest.raises(IetError):
        from_lengths((1, 2), [H, H])  # adjacent images merge
    with pytest.raises(IetError):
        from_lengths((2, 2), [H, H])  # not a permutation


def test_translation_vector_trivial_and_rotation():
    assert Iet.identity(Domain.interval(1)).translation_vector() == (QuadNum(0),)
    assert interval_rotation(H).translation_vector() == (QuadNum(H), QuadNum(-H))


def test_compose_basics():
    h = from_lengths((2, 1, 3), random_quad_lengths(random.Random(1), 3))
    ident = Iet.identity(h.source)
    assert ident * h == h
    assert h * ident == h
    assert h * ~h == ident
    assert ~h * h == ident


def test_compose_rotations():
    third = Fraction(1, 3)
    r = interval_rotation(third)
    assert r * r == interval_rotation(Fraction(2, 3))
    assert (r * r).d() == 1
    assert r * r * r == Iet.identity(r.source)


def test_compose_domain_mismatch():
    r = interval_rotation(H)
    c = circle_rotation(1, H)
    with pytest.raises(DomainMismatchError):
        r * c


def test_invert():
    assert ~Iet.identity(Domain.interval(1)) == Iet.identity(Domain.interval(1))
    assert ~interval_rotation(ALPHA) == interval_rotation(1 - ALPHA)
    rng = random.Random(2)
    for _ in range(100):
        h = random_iet(rng, 6)
        assert ~(~h) == h


def test_apply():
    ident = Iet.identity(Domain.interval(1))
    p = make_point(ident.source, 0, Fraction(2, 7))
    assert ident(p) == p
    r = interval_rotation(Fraction(1, 3))
    assert r(make_point(r.source, 0, 0)).x == Fraction(1, 3)
    h = from_lengths((2, 1), [H, H])
    assert h(make_point(h.source, 0, Fraction(3, 4))).x == Fraction(1, 4)
    with pytest.raises(PointError):
        r(Point(0, QuadNum(2)))


def test_apply_respects_composition():
    rng = random.Random(3)
    for _ in range(50):
        g = random_iet(rng, 5)
        h = random_iet(rng, 5)
        x = make_point(h.source, 0, random_quad_lengths(rng, 2)[0])
        assert (g * h)(x) == g(h(x))


def test_bijectivity_on_random_points():
    rng = random.Random(4)
    h = random_iet(rng, 8)
    for _ in range(100):
        x = make_point(h.source, 0, random_quad_lengths(rng, 2)[0])
        assert (~h)(h(x)) == x


def test_discontinuities_id_and_rotation():
    assert Iet.identity(Domain.interval(1)).discontinuities() == ()
    r = interval_rotation(ALPHA)
    assert [pt.x for pt in r.discontinuities()] == [1 - ALPHA]
    assert circle_rotation(1, ALPHA).discontinuities() == ()
    assert circle_rotation(1, ALPHA).d() == 0


def test_circle_opening_is_discontinuous_at_cut():
    # one-piece map from a circle onto an interval: discontinuous exactly at 0
    dom_c = Domain.circle(1)
    dom_i = Domain.interval(1)
    cut = Iet(dom_c, dom_i, [(0, 0, 1, 0, 0)])
    assert [ (pt.comp, pt.x) for pt in cut.discontinuities() ] == [(0, QuadNum(0))]


def test_support():
    ident = Iet.identity(Domain.interval(1))
    assert ident.support().is_empty()
    # translation by tau on [0, l - tau), wrap on [l - tau, l), identity above l
    l, tau = Fraction(3, 4), Fraction(1, 4)
    h = Iet(
        Domain.interval(1),
        Domain.interval(1),
        [(0, 0, l - tau, 0, tau), (0, l - tau, tau, 0, 0), (0, l, 1 - l, 0, l)],
    )
    assert h.support().parts == ((0, QuadNum(0), QuadNum(l)),)
    swap = from_lengths((2, 1, 3), [Fraction(1, 4), Fraction(1, 4), H])
    assert swap.support().parts == ((0, QuadNum(0), QuadNum(H)),)


def test_support_is_conjugation_natural():
    rng = random.Random(5)
    for _ in range(50):
        g = random_iet(rng, 6)
        h = random_iet(rng, 6)
        assert (g * h * ~g).support() == g.image_of(h.support())


def test_power():
    r = interval_rotation(Fraction(1, 3))
    assert r ** 0 == Iet.identity(r.source)
    assert r ** 3 == Iet.identity(r.source)
    assert r ** -1 == ~r
    rng = random.Random(6)
    for _ in range(20):
        h = random_iet(rng, 5)
        acc = Iet.identity(h.source)
        for n in range(9):
            assert h ** n == acc
            acc = h * acc


def test_subadditivity_small():
    rng = random.Random(7)
    for _ in range(200):
        g = random_iet(rng, 8)
        h = random_iet(rng, 8)
        assert (g * h).d() <= g.d() + h.d()


def test_conjugation_growth_bound():
    rng = random.Random(8)
    for _ in range(20):
        g = random_iet(rng, 5)
        h = random_iet(rng, 5)
        conj = g * h * ~g
        bound = g.d() + (~g).d()
        for n in range(1, 11):
            assert abs((conj ** n).d() - (h ** n).d()) <= bound


def test_is_q_rational():
    r3 = interval_rotation(Fraction(1, 3))
    assert r3.is_q_rational(3)
    assert not r3.is_q_rational(2)
    assert r3 ** 6 == Iet.identity(r3.source)
    assert not interval_rotation(ALPHA).is_q_rational(97)
    assert Iet.identity(Domain.interval(1)).is_q_rational(1)


def test_equality_and_canonical_merge():
    r = interval_rotation(Fraction(1, 3))
    assert r * Iet.identity(r.source) == r
    assert r != interval_rotation(Fraction(2, 3))
    # a redundant split of the same rotation canonicalizes to the merged form
    split = Iet(
        Domain.interval(1),
        Domain.interval(1),
        [
            (0, 0, Fraction(1, 3), 0, Fraction(1, 3)),
            (0, Fraction(1, 3), Fraction(1, 3), 0, Fraction(2, 3)),
            (0, Fraction(2, 3), Fraction(1, 3), 0, 0),
        ],
    )
    assert split == r
    assert len(split.pieces) == 2
    assert hash(split) == hash(r)


def test_partition_validation():
    dom = Domain.interval(1)
    with pytest.raises(PartitionError):
        Iet(dom, dom, [(0, 0, H, 0, 0)])  # gap
    with pytest.raises(PartitionError):
        Iet(dom, dom, [(0, 0, H, 0, 0), (0, Fraction(1, 4), Fraction(3, 4), 0, H)])  # overlap
    with pytest.raises(PartitionError):
        Iet(dom, dom, [(0, 0, 1, 0, H)])  # image leaves component


def test_circle_rotation_wrap_continuity():
    c = circle_rotation(2, ALPHA)
    assert c.d() == 0
    assert c.support().parts == ((0, QuadNum(0), QuadNum(2)),)
    assert (c ** 5).d() == 0
    assert c * ~c == Iet.identity(c.source)


def test_point_normalization_on_circles():
    dom = Domain.circle(Fraction(3, 2))
    p = make_point(dom, 0, Fraction(7, 4))
    assert p.x == Fraction(1, 4)
    with pytest.raises(PointError):
        make_point(Domain.interval(1), 0, Fraction(3, 2))


def test_subdomain_algebra():
    dom = Domain.of(Component(CIRCLE, "C", QuadNum(2)), Component("interval", "J", QuadNum(1)))
    a = Subdomain.make(dom, [(0, 0, 1), (1, 0, H)])
    b = Subdomain.make(dom, [(0, H, Fraction(3, 2))])
    assert a.union(b).parts == ((0, QuadNum(0), QuadNum(Fraction(3, 2))), (1, QuadNum(0), QuadNum(H)))
    assert a.intersection(b).parts == ((0, QuadNum(H), QuadNum(1)),)
    assert a.complement().union(a) == Subdomain.full(dom)
    assert a.covers(a.intersection(b))
    assert not a.intersection(b).covers(a)
    assert Subdomain.full(dom).measure() == 3
    touching = Subdomain.make(dom, [(0, 0, 1), (0, 1, 2)])
    assert touching.parts == ((0, QuadNum(0), QuadNum(2)),)


def test_restrict_to_invariant_subdomain():
    # 2.3-style map: its restriction to [0, l) is a rolled-out rotation
    l, tau = Fraction(3, 4), ALPHA / 4
    h = Iet(
        Domain.interval(1),
        Domain.interval(1),
        [(0, 0, l - tau, 0, tau), (0, l - tau, tau, 0, 0), (0, l, 1 - l, 0, l)],
    )
    sub = Subdomain.make(h.source, [(0, 0, l)])
    r = h.restrict(sub)
    assert len(r.source.components) == 1
    assert r.source.components[0].length == QuadNum(l)
    p = make_point(r.source, 0, 0)
    assert r(p).x == tau
    with pytest.raises(IetError):
        h.restrict(Subdomain.make(h.source, [(0, 0, H)]))  # not invariant


def test_subdomain_as_domain_kinds():
    dom = Domain.of(Component(CIRCLE, "C", QuadNum(2)), Component("interval", "J", QuadNum(1)))
    sub = Subdomain.make(dom, [(0, 0, 2), (1, H, 1)])
    d2 = subdomain_as_domain(sub)
    assert d2.components[0].kind == CIRCLE
    assert d2.components[1].kind == "interval"
    assert d2.components[1].length == QuadNum(H)


def test_realizable_perm_check():
    assert perm_is_realizable((2, 1))
    assert perm_is_realizable((3, 2, 1))
    assert perm_is_realizable((1, 3, 2))  # fixes 1, yet genuinely 3 pieces
    assert not perm_is_realizable((2, 3, 1))
    assert not perm_is_realizable((3, 1, 2))
    assert not perm_is_realizable((1, 2, 3))


def random_mixed_conjugate(rng):
    """Random automorphism of a random mixed circle/interval domain, made by
    repackaging a random map of [0, 1) through a random cut-and-place map."""
    g = random_iet(rng, 6)
    k = rng.randint(1, 3)
    lengths = random_quad_lengths(rng, k)
    comps = tuple(
        Component(CIRCLE if rng.random() < 0.5 else "interval", f"M{i}", lengths[i])
        for i in range(k)
    )
    target = Domain(comps)
    pieces = []
    acc = QuadNum(0)
    for i, ln in enumerate(lengths):
        pieces.append((0, acc, ln, i, 0))
        acc = acc + ln
    phi = Iet(g.source, target, pieces)
    return phi * g * ~phi


def left_limit_oracle(h, ci, x):
    """One-sided limit at coordinate x of component ci via a genuine nearby
    point: step halfway back to the previous piece boundary and push the
    image forward again."""
    comps = h.source.components
    starts = [p.a for p in h.pieces if p.src == ci]
    length = comps[ci].length
    below = [s for s in starts if s < x]
    if below:
        prev = max(below)
    else:
        prev = max(starts) - length  # wrap on a circle
    delta = (x - prev) / 2
    probe_coord = x - delta
    if probe_coord < 0:
        probe_coord = probe_coord + length
    y = h(Point(ci, probe_coord))
    return (y.comp, y.x + delta)


def test_discontinuities_match_one_sided_limit_oracle():
    rng = random.Random(271828)
    for _ in range(40):
        h = random_mixed_conjugate(rng)
        jumps = set(h.discontinuities())
        for ci, comp in enumerate(h.source.components):
            candidates = [p.a for p in h.pieces if p.src == ci and p.a > 0]
            if comp.kind == CIRCLE:
                candidates.append(QuadNum(0))
            for x in candidates:
                lc, lx = left_limit_oracle(h, ci, x)
                val = h(Point(ci, x))
                tgt = h.source.components[lc]
                same = lc == val.comp and (
                    lx == val.x or (tgt.kind == CIRCLE and lx == tgt.length and val.x == 0)
                )
                assert (Point(ci, x) in jumps) == (not same), (ci, x)


def test_compose_associativity_on_mixed_domains():
    rng = random.Random(314159)
    for _ in range(25):
        base = random_mixed_conjugate(rng)
        lengths = [c.length for c in base.source.components]
        pieces = []
        acc = QuadNum(0)
        for i, ln in enumerate(lengths):
            pieces.append((0, acc, ln, i, 0))
            acc = acc + ln
        phi = Iet(Domain.interval(1), base.source, pieces)
        g, h, k = (phi * random_iet(rng, 6) * ~phi for _ in range(3))
        assert (g * h) * k == g * (h * k)
        assert ~(g * h) == ~h * ~g


def test_support_conjugation_on_mixed_domains():
    rng = random.Random(161803)
    for _ in range(25):
        h = random_iet(rng, 6)
        g = random_mixed_conjugate(rng)
        # repackage h onto g's domain with a fresh cut-and-place map
        lengths = [c.length for c in g.source.components]
        pieces = []
        acc = QuadNum(0)
        for i, ln in enumerate(lengths):
            pieces.append((0, acc, ln, i, 0))
            acc = acc + ln
        phi = Iet(h.source, g.source, pieces)
        hd = phi * h * ~phi
        assert (g * hd * ~g).support() == g.image_of(hd.support())
