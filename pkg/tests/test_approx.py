import random
from fractions import Fraction

import pytest

from ietlab.approx import (
    FiniteQuotient,
    GridCapError,
    all_words,
    common_grid,
    enumerate_finite_group,
    orbit_ball,
    permutation_group_order,
    pl_trace,
    rationalize,
    translation_amplitude_count,
    _closure,
)
from ietlab.core import (
    Domain,
    Iet,
    IetError,
    Point,
    from_lengths,
    interval_rotation,
    lengths_of,
    make_point,
    permutation_of,
)
from ietlab.field import QuadNum, Rel, lp_nearby_points, lp_rational_point
from ietlab.relations import Word, commutator_word, lcm_up_to

from randgen import random_iet, random_q_rational_iet, random_realizable_perm

R2 = QuadNum.sqrt(2)
ALPHA = R2 - 1


# -- orbit balls ------------------------------------------------------------------


def test_orbit_ball_rational_rotation():
    r = interval_rotation(Fraction(1, 3))
    ball = orbit_ball([r], make_point(r.source, 0, 0), 2)
    assert {p.x for p in ball} == {QuadNum(0), QuadNum(Fraction(1, 3)), QuadNum(Fraction(2, 3))}


def test_orbit_ball_identity():
    ident = Iet.identity(Domain.interval(1))
    x = make_point(ident.source, 0, Fraction(1, 7))
    assert orbit_ball([ident], x, 5) == {x}


def test_orbit_ball_irrational_rotation():
    r = interval_rotation(ALPHA)
    ball = orbit_ball([r], make_point(r.source, 0, 0), 4)
    assert len(ball) == 9  # n*alpha mod 1 for |n| <= 4


def test_orbit_ball_polynomial_bound():
    rng = random.Random(17)
    for _ in range(40):
        gens = [random_iet(rng, 4) for _ in range(rng.randint(1, 2))]
        radius = rng.randint(1, 5)
        x = make_point(gens[0].source, 0, Fraction(rng.randint(0, 99), 100))
        ball = orbit_ball(gens, x, radius)
        m = translation_amplitude_count(gens)
        assert len(ball) <= (2 * radius + 1) ** m


# -- the PL trace -----------------------------------------------------------------


def test_all_words_count():
    assert len(all_words(2, 4)) == 4 + 16 + 64 + 256  # 340
    assert len(all_words(1, 3)) == 2 + 4 + 8


def system_holds_at(system, values):
    for c in system.constraints:
        acc = QuadNum(c.const)
        for coef, v in zip(c.coeffs, values):
            acc = acc + QuadNum(coef) * v
        if c.relation is Rel.ZERO:
            if acc != 0:
                return False
        elif not acc > 0:
            return False
    return True


def test_pl_trace_single_rotation():
    g = interval_rotation(ALPHA)
    tr = pl_trace([g], 1)
    s = Word.gen(0)
    assert tr.word_pattern[s] is not None  # nontrivial, with a witness piece
    assert tr.word_pattern[s.inverse()] is not None
    assert system_holds_at(tr.system, tr.realized_point)
    # positivity of both unknown lengths is part of the system
    kinds = {(c.relation, c.coeffs) for c in tr.system.constraints}
    assert (Rel.POSITIVE, (Fraction(1), Fraction(0))) in kinds
    assert (Rel.POSITIVE, (Fraction(0), Fraction(1))) in kinds


def test_pl_trace_identity_generator():
    g = from_lengths((1,), [1])
    tr = pl_trace([g], 3)
    assert all(w is None for w in tr.word_pattern.values())


def test_pl_trace_commuting_rotations():
    g1 = interval_rotation(Fraction(1, 3))
    g2 = interval_rotation(Fraction(1, 5))
    tr = pl_trace([g1, g2], 4)
    com = commutator_word(Word.gen(0), Word.gen(1))
    assert tr.word_pattern[com] is None  # [s, t] trivial
    assert tr.word_pattern[Word.gen(0) * Word.gen(1)] is not None


def test_pl_trace_soundness_at_sampled_solutions():
    g1 = interval_rotation(ALPHA)
    g2 = from_lengths((3, 2, 1), [Fraction(1, 4), ALPHA / 4, Fraction(3, 4) - ALPHA / 4])
    tr = pl_trace([g1, g2], 3)
    base = lp_rational_point(tr.system)
    assert base is not None
    sigmas = [permutation_of(g) for g in (g1, g2)]
    for pt in lp_nearby_points(tr.system, base, 10, seed=3):
        gens = []
        offset = 0
        for sigma in sigmas:
            gens.append(from_lengths(sigma, pt[offset : offset + len(sigma)]))
            offset += len(sigma)
        for word, witness in tr.word_pattern.items():
            assert (witness is None) == word.evaluate(gens).is_identity()


# -- rationalization ----------------------------------------------------------------


def test_rationalize_irrational_rotation():
    g = interval_rotation(ALPHA)  # lengths (2 - sqrt2, sqrt2 - 1)
    rats, quot = rationalize([g], 2)
    (g2,) = rats
    ls = lengths_of(g2)
    assert all(x.is_rational() for x in ls)
    # pattern {s, s^2 nontrivial} forces a rational rotation of order > 2
    assert not g2.is_identity() and not (g2 * g2).is_identity()
    assert quot.group_size is not None and quot.group_size > 2
    assert quot.grid >= 3


def test_rationalize_identity():
    g = from_lengths((1,), [1])
    rats, quot = rationalize([g], 2)
    assert rats[0].is_identity()
    assert quot.grid == 1 and quot.group_size == 1


def test_rationalize_fixes_rational_input():
    g = interval_rotation(Fraction(1, 2))
    rats, quot = rationalize([g], 3)
    assert rats[0] == g  # s^2 = id is traced as an equality, pinning 1/2
    assert quot.group_size == 2


def test_rationalize_mixed_pair_preserves_pattern():
    g1 = interval_rotation(ALPHA)
    g2 = from_lengths((3, 2, 1), [Fraction(1, 4), ALPHA / 4, Fraction(3, 4) - ALPHA / 4])
    rats, quot = rationalize([g1, g2], 3)
    tr = pl_trace([g1, g2], 3)
    for word, witness in tr.word_pattern.items():
        assert (witness is None) == word.evaluate(rats).is_identity()
    assert quot.group_size is not None and quot.group_size >= 1


# -- finite groups ------------------------------------------------------------------


def test_enumerate_cyclic():
    size, table = enumerate_finite_group([interval_rotation(Fraction(1, 3))], want_table=True)
    assert size == 3
    assert table is not None and len(table) == 3
    assert table[0] == [0, 1, 2]  # identity row


def test_enumerate_symmetric_on_four_cells():
    r4 = interval_rotation(Fraction(1, 4))
    swap = from_lengths((2, 1, 3), [Fraction(1, 4), Fraction(1, 4), Fraction(1, 2)])
    size, _ = enumerate_finite_group([r4, swap])
    assert size == 24  # a 4-cycle and a transposition generate everything


def test_enumerate_identity_and_errors():
    ident = from_lengths((1,), [1])
    assert enumerate_finite_group([ident])[0] == 1
    with pytest.raises(IetError):
        enumerate_finite_group([interval_rotation(ALPHA)])
    with pytest.raises(GridCapError):
        enumerate_finite_group([interval_rotation(Fraction(1, 97))], cap=10)


def test_common_grid():
    assert common_grid([interval_rotation(Fraction(1, 4))]) == 4
    assert (
        common_grid(
            [interval_rotation(Fraction(1, 4)), interval_rotation(Fraction(1, 6))]
        )
        == 12
    )


def test_q_rational_power_identity():
    rng = random.Random(23)
    for q in range(2, 7):
        for _ in range(5):
            h = random_q_rational_iet(rng, q)
            assert h.is_q_rational(q)
            assert (h ** lcm_up_to(q)).is_identity()


def test_permutation_group_order_matches_bfs():
    rng = random.Random(6)
    for _ in range(100):
        n = rng.randint(1, 7)
        perms = []
        for _ in range(rng.randint(1, 3)):
            p = list(range(n))
            rng.shuffle(p)
            perms.append(tuple(p))
        bfs, _ = _closure(perms, cap=10 ** 5, want_table=False)
        assert permutation_group_order(perms) == bfs


def test_permutation_group_order_known_groups():
    assert permutation_group_order([]) == 1
    assert permutation_group_order([(1, 2, 3, 0), (1, 0, 2, 3)]) == 24
    assert permutation_group_order([tuple(range(10))]) == 1
