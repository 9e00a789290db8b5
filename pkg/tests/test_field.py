import math
import random
from fractions import Fraction

import pytest

from ietlab.field import (
    ConstraintSystem,
    FieldMismatchError,
    LinConstraint,
    LiteralError,
    QuadNum,
    Rel,
    format_number,
    lp_rational_point,
    parse_number,
    quad_sign,
)


def interval_sign(a: Fraction, b: Fraction, d: int, bits: int = 128) -> int:
    """Oracle: sign of a + b*sqrt(d) by interval arithmetic, refining as needed."""
    if b == 0:
        return -1 if a < 0 else (1 if a > 0 else 0)
    while True:
        s = math.isqrt(d << (2 * bits))
        lo, hi = Fraction(s, 1 << bits), Fraction(s + 1, 1 << bits)
        if b > 0:
            vlo, vhi = a + b * lo, a + b * hi
        else:
            vlo, vhi = a + b * hi, a + b * lo
        if vlo > 0:
            return 1
        if vhi < 0:
            return -1
        bits *= 2  # straddles zero at this precision; a+b*sqrt(d) != 0 for non-square d


def test_quad_sign_examples():
    assert quad_sign(QuadNum(0, 0)) == 0
    assert quad_sign(QuadNum(-1, 1, 2)) == 1  # sqrt(2) > 1
    assert quad_sign(QuadNum(3, -2, 2)) == 1  # 9 > 8


def test_quad_sign_against_interval_oracle():
    rng = random.Random(20240211)
    for _ in range(1000):
        a = Fraction(rng.randint(-50, 50), rng.randint(1, 40))
        b = Fraction(rng.randint(-50, 50), rng.randint(1, 40))
        d = rng.choice([2, 3, 5, 7])
        x = QuadNum(a, b, d)
        y = QuadNum(
            Fraction(rng.randint(-50, 50), rng.randint(1, 40)),
            Fraction(rng.randint(-50, 50), rng.randint(1, 40)),
            d,
        )
        diff = x - y
        assert quad_sign(diff) == interval_sign(diff.a, diff.b, d)


def test_arithmetic_and_order():
    r2 = QuadNum.sqrt(2)
    assert r2 * r2 == 2
    x = QuadNum(1, 1, 2)  # 1 + sqrt(2)
    assert (x * (1 - r2)) == -1  # (1+sqrt2)(1-sqrt2) = -1
    assert (1 / x) == r2 - 1
    assert QuadNum(Fraction(1, 3)) < QuadNum(Fraction(1, 2))
    assert r2 - 1 > 0
    assert 1 - r2 < 0
    assert abs(1 - r2) == r2 - 1


def test_field_mixing_is_an_error():
    with pytest.raises(FieldMismatchError):
        QuadNum.sqrt(2) + QuadNum.sqrt(3)
    # rationals interoperate with every field
    assert QuadNum(1) + QuadNum.sqrt(2) == QuadNum(1, 1, 2)


def test_rational_values_hash_and_compare_across_fields():
    assert QuadNum(Fraction(1, 2)) == Fraction(1, 2)
    assert hash(QuadNum(Fraction(1, 2))) == hash(Fraction(1, 2))
    z = QuadNum.sqrt(2) - QuadNum.sqrt(2)
    assert z.d == 0 and z == 0


def test_floor_and_mod():
    r2 = QuadNum.sqrt(2)
    assert r2.floor() == 1
    assert (-r2).floor() == -2
    assert (3 * r2).floor() == 4
    assert QuadNum(Fraction(7, 2)).floor() == 3
    assert QuadNum(Fraction(-7, 2)).floor() == -4
    x = 3 * r2  # 4.2426...
    m = x.mod(QuadNum(1))
    assert 0 <= m.sign() and (m - 1).sign() < 0
    assert m == 3 * r2 - 4
    rng = random.Random(7)
    for _ in range(200):
        v = QuadNum(
            Fraction(rng.randint(-400, 400), rng.randint(1, 30)),
            Fraction(rng.randint(-40, 40), rng.randint(1, 30)),
            2,
        )
        n = v.floor()
        assert (v - n).sign() >= 0 and (v - (n + 1)).sign() < 0


def test_literal_round_trip():
    cases = [
        QuadNum(Fraction(1, 2)),
        QuadNum(Fraction(-3, 4), Fraction(1, 2), 2),
        QuadNum(0, Fraction(-5, 7), 3),
        QuadNum(7),
    ]
    for x in cases:
        assert parse_number(format_number(x), x.d or None) == x


def test_literal_forms():
    assert parse_number("3") == 3
    assert parse_number("-4/6") == Fraction(-2, 3)
    assert parse_number("1/2+1/4*sqrt(2)", 2) == QuadNum(Fraction(1, 2), Fraction(1, 4), 2)
    assert parse_number("1/2-1/4*sqrt(2)") == QuadNum(Fraction(1, 2), Fraction(-1, 4), 2)
    assert parse_number("-1/2*sqrt(5)") == QuadNum(0, Fraction(-1, 2), 5)
    with pytest.raises(LiteralError):
        parse_number("1/2 + 1/4*sqrt(2)")  # embedded whitespace
    with pytest.raises(LiteralError):
        parse_number("sqrt(2)")
    with pytest.raises(LiteralError):
        parse_number("1/2+1/4*sqrt(4)")  # square radicand
    with pytest.raises(LiteralError):
        parse_number("1/2+1/4*sqrt(3)", d=2)  # wrong field


def gt(coeffs, const):
    return LinConstraint.make(coeffs, const, Rel.POSITIVE)


def eq(coeffs, const):
    return LinConstraint.make(coeffs, const, Rel.ZERO)


def test_lp_forced_equality():
    sys = ConstraintSystem(1, (eq([1], Fraction(-1, 2)),))
    assert lp_rational_point(sys) == (Fraction(1, 2),)


def test_lp_strict_chain():
    # x1 > 0, x1 < 1, 2 x1 - x2 = 0, x2 > 1
    sys = ConstraintSystem(
        2,
        (
            gt([1, 0], 0),
            gt([-1, 0], 1),
            eq([2, -1], 0),
            gt([0, 1], -1),
        ),
    )
    pt = lp_rational_point(sys)
    assert pt is not None
    assert sys.satisfied_by(pt)


def test_lp_contradiction():
    sys = ConstraintSystem(1, (gt([1], 0), gt([-1], 0)))
    assert lp_rational_point(sys) is None


def test_lp_inconsistent_equalities():
    sys = ConstraintSystem(2, (eq([1, 1], 0), eq([1, 1], -1)))
    assert lp_rational_point(sys) is None


def test_lp_zero_row_handling():
    sys = ConstraintSystem(1, (gt([0], 1), eq([1], -2)))
    assert lp_rational_point(sys) == (Fraction(2),)
    sys = ConstraintSystem(1, (gt([0], 0), eq([1], -2)))
    assert lp_rational_point(sys) is None


def test_lp_succeeds_when_strictly_satisfiable_at_quadratic_point():
    # systems built to hold strictly at a known quadratic witness must be solvable
    rng = random.Random(99)
    r2 = QuadNum.sqrt(2)
    for trial in range(50):
        nvars = rng.randint(1, 4)
        witness = [
            QuadNum(Fraction(rng.randint(-9, 9), 10)) + r2 * Fraction(rng.randint(-9, 9), 20)
            for _ in range(nvars)
        ]
        constraints = []
        for _ in range(rng.randint(1, 8)):
            coeffs = [Fraction(rng.randint(-5, 5)) for _ in range(nvars)]
            val = sum((QuadNum(c) * w for c, w in zip(coeffs, witness)), QuadNum(0))
            s = val.sign()
            if s > 0:
                constraints.append(gt(coeffs, 0))
            elif s < 0:
                constraints.append(gt([-c for c in coeffs], 0))
            else:
                constraints.append(eq(coeffs, 0))
        sys = ConstraintSystem(nvars, tuple(constraints))
        pt = lp_rational_point(sys)
        assert pt is not None, f"trial {trial}: solvable system reported infeasible"
        assert sys.satisfied_by(pt)


def test_lp_solution_substitutes_exactly():
    rng = random.Random(5)
    for _ in range(30):
        nvars = rng.randint(1, 5)
        cs = []
        for _ in range(rng.randint(1, 6)):
            coeffs = [Fraction(rng.randint(-4, 4)) for _ in range(nvars)]
            const = Fraction(rng.randint(-4, 4), rng.randint(1, 4))
            cs.append(gt(coeffs, const) if rng.random() < 0.7 else eq(coeffs, const))
        sys = ConstraintSystem(nvars, tuple(cs))
        pt = lp_rational_point(sys)
        if pt is not None:
            assert sys.satisfied_by(pt)  # zero tolerance by construction
