"""Shared random-instance generators for the test suite (seeded, exact)."""

from __future__ import annotations

import random
from fractions import Fraction

from ietlab.core import Domain, Iet, from_lengths, perm_is_realizable
from ietlab.field import QuadNum


def random_realizable_perm(rng: random.Random, n: int) -> tuple[int, ...]:
    while True:
        p = list(range(1, n + 1))
        rng.shuffle(p)
        if perm_is_realizable(p) and (n == 1 or p != list(range(1, n + 1))):
            return tuple(p)


def random_quad_lengths(rng: random.Random, n: int) -> list[QuadNum]:
    """n positive values in Q(sqrt 2) summing exactly to 1."""
    raw = [
        QuadNum(Fraction(rng.randint(40, 120), 1), Fraction(rng.randint(-20, 20), 50), 2)
        for _ in range(n)
    ]
    total = QuadNum(0)
    for x in raw:
        total = total + x
    lengths = [x / total for x in raw]
    assert all(x.sign() > 0 for x in lengths)
    return lengths


def random_rational_lengths(rng: random.Random, n: int, q: int) -> list[QuadNum]:
    """n positive multiples of 1/q summing exactly to 1 (needs n <= q)."""
    assert n <= q
    cuts = sorted(rng.sample(range(1, q), n - 1)) if n > 1 else []
    marks = [0] + cuts + [q]
    return [QuadNum(Fraction(marks[i + 1] - marks[i], q)) for i in range(n)]


def random_iet(rng: random.Random, nmax: int = 8, nmin: int = 2) -> Iet:
    n = rng.randint(nmin, nmax)
    return from_lengths(random_realizable_perm(rng, n), random_quad_lengths(rng, n))


def random_q_rational_iet(rng: random.Random, q: int) -> Iet:
    n = rng.randint(2, min(q, 6))
    return from_lengths(random_realizable_perm(rng, n), random_rational_lengths(rng, n, q))
