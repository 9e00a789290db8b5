"""Orbit growth, piecewise-linear traces, and finite rational quotients.

Because translations commute, the orbit of a point under words in finitely
many interval exchanges grows polynomially; :func:`orbit_ball` enumerates it
exactly.  More is true: with the permutations frozen, every comparison that
steers the composition of words is affine in the unknown piece lengths with
rational coefficients.  :func:`pl_trace` replays all words of bounded length
over coordinates that carry their own affine form and records every
comparison as a linear constraint, so any rational solution of the recorded
system reproduces the exact trivial/nontrivial pattern of the traced words.
:func:`rationalize` solves that system, yielding rational generators with
the same marked ball; rational generators act on a finite grid, so the group
they generate is finite and :func:`enumerate_finite_group` computes it.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass
from fractions import Fraction
from typing import Optional, Sequence

from ietlab.core import (
    INTERVAL,
    Component,
    Domain,
    Iet,
    IetError,
    Point,
    from_lengths,
    lengths_of,
    permutation_of,
)
from ietlab.field import (
    ConstraintSystem,
    LinConstraint,
    LpInternalError,
    QuadNum,
    Rel,
    lp_rational_point,
)
from ietlab.relations import Word


class TraceVerificationError(IetError):
    """Rational generators failed to reproduce the traced pattern (a bug)."""


class GridCapError(IetError):
    pass


# -- orbit balls ----------------------------------------------------------------


def orbit_ball(generators: Sequence[Iet], x: Point, radius: int) -> set[Point]:
    """Exact set of w(x) over all words of length <= radius in the generators
    and their inverses (breadth-first, exact point hashing)."""
    if radius < 0:
        raise IetError("radius must be >= 0")
    for g in generators:
        if g.source != g.target or (generators and g.source != generators[0].source):
            raise IetError("generators must share one domain")
    maps = []
    for g in generators:
        maps.append(g)
        maps.append(~g)
    seen = {x}
    frontier = [x]
    for _ in range(radius):
        nxt = []
        for p in frontier:
            for g in maps:
                q = g(p)
                if q not in seen:
                    seen.add(q)
                    nxt.append(q)
        frontier = nxt
    return seen


def translation_amplitude_count(generators: Sequence[Iet]) -> int:
    """Number of distinct piece translation amounts across all generators
    (component moves are tagged by the component pair)."""
    amps = set()
    for g in generators:
        for p in g.pieces:
            amps.add((p.src, p.dst, p.b - p.a))
    return len(amps)


# -- tracked affine coordinates ----------------------------------------------------


class TraceRecorder:
    """Collects, from tracked comparisons, the affine constraints over the
    unknown lengths that steered a composition."""

    def __init__(self, dim: int):
        self.dim = dim
        self._seen: set = set()
        self.constraints: list[LinConstraint] = []

    def record(self, form: tuple[Fraction, ...], const: Fraction, rel: Rel) -> None:
        if all(c == 0 for c in form):
            # constant comparison: nothing to pin down
            return
        denom = 1
        for c in list(form) + [const]:
            denom = denom * c.denominator // _gcd(denom, c.denominator)
        ints = [int(c * denom) for c in form] + [int(const * denom)]
        g = 0
        for v in ints:
            g = _gcd(g, abs(v))
        ints = [v // g for v in ints]
        if rel is Rel.ZERO:
            first = next(v for v in ints if v != 0)
            if first < 0:
                ints = [-v for v in ints]
        key = (tuple(ints), rel)
        if key in self._seen:
            return
        self._seen.add(key)
        self.constraints.append(
            LinConstraint.make([Fraction(v) for v in ints[:-1]], Fraction(ints[-1]), rel)
        )


def _gcd(a: int, b: int) -> int:
    while b:
        a, b = b, a % b
    return a if a else 1


class TrackedNum:
    """An exact value together with the affine form (over the unknown length
    coordinates) it was computed from.  Arithmetic combines the forms;
    comparisons consult the exact value and record their outcome."""

    __slots__ = ("form", "const", "value", "rec")

    def __init__(self, form, const, value, rec: TraceRecorder):
        self.form = form
        self.const = const
        self.value = value
        self.rec = rec

    @staticmethod
    def constant(c, rec: TraceRecorder) -> "TrackedNum":
        c = Fraction(c)
        return TrackedNum((Fraction(0),) * rec.dim, c, QuadNum(c), rec)

    @staticmethod
    def unknown(index: int, value: QuadNum, rec: TraceRecorder) -> "TrackedNum":
        form = tuple(Fraction(1) if i == index else Fraction(0) for i in range(rec.dim))
        return TrackedNum(form, Fraction(0), value, rec)

    def _coerce(self, other) -> Optional["TrackedNum"]:
        if isinstance(other, TrackedNum):
            return other
        if isinstance(other, (int, Fraction)):
            return TrackedNum.constant(other, self.rec)
        if isinstance(other, QuadNum) and other.is_rational():
            return TrackedNum.constant(other.a, self.rec)
        return None

    def __add__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return TrackedNum(
            tuple(a + b for a, b in zip(self.form, o.form)),
            self.const + o.const,
            self.value + o.value,
            self.rec,
        )

    __radd__ = __add__

    def __sub__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return TrackedNum(
            tuple(a - b for a, b in zip(self.form, o.form)),
            self.const - o.const,
            self.value - o.value,
            self.rec,
        )

    def __rsub__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return o - self

    def __neg__(self):
        return TrackedNum(tuple(-a for a in self.form), -self.const, -self.value, self.rec)

    def _cmp_record(self, other) -> int:
        o = self._coerce(other)
        if o is None:
            raise TypeError(f"cannot compare TrackedNum with {type(other)}")
        diff = self - o
        s = diff.value.sign()
        if s == 0:
            self.rec.record(diff.form, diff.const, Rel.ZERO)
        elif s > 0:
            self.rec.record(diff.form, diff.const, Rel.POSITIVE)
        else:
            self.rec.record(tuple(-a for a in diff.form), -diff.const, Rel.POSITIVE)
        return s

    def __lt__(self, other):
        return self._cmp_record(other) < 0

    def __le__(self, other):
        return self._cmp_record(other) <= 0

    def __gt__(self, other):
        return self._cmp_record(other) > 0

    def __ge__(self, other):
        return self._cmp_record(other) >= 0

    def __eq__(self, other):
        if isinstance(other, (TrackedNum, int, Fraction, QuadNum)):
            return self._cmp_record(other) == 0
        return NotImplemented

    def __ne__(self, other):
        r = self.__eq__(other)
        return r if r is NotImplemented else not r

    def __hash__(self):
        return hash(self.value)

    def __repr__(self):
        return f"TrackedNum({self.value})"


# -- the trace ------------------------------------------------------------------


@dataclass(frozen=True)
class PlTrace:
    """Constraint system steering all words of bounded length, the real point
    that realized it, and the trivial/nontrivial pattern (nontrivial words
    carry a witness piece index with nonzero translation)."""

    system: ConstraintSystem
    realized_point: tuple[QuadNum, ...]
    word_pattern: dict[Word, Optional[int]]


def all_words(n_gens: int, radius: int) -> list[Word]:
    """Every nonempty word of length <= radius over the generators and their
    inverses, in breadth-first order."""
    letters = []
    for i in range(n_gens):
        letters.append((i, 1))
        letters.append((i, -1))
    out: list[Word] = []
    frontier = [()]
    for _ in range(radius):
        nxt = []
        for w in frontier:
            for let in letters:
                nxt.append(w + (let,))
        out.extend(Word(w) for w in nxt)
        frontier = nxt
    return out


def _tracked_generators(generators: Sequence[Iet], rec: TraceRecorder) -> list[Iet]:
    dom = Domain((Component(INTERVAL, "I", TrackedNum.constant(1, rec)),))
    tracked = []
    offset = 0
    for g in generators:
        sigma = permutation_of(g)
        ls = lengths_of(g)
        tls = [TrackedNum.unknown(offset + j, ls[j], rec) for j in range(len(ls))]
        offset += len(ls)
        tracked.append(from_lengths(sigma, tls, domain=dom))
    return tracked


def _classify(w_iet: Iet) -> Optional[int]:
    """None when the map is the identity; else a witness piece index whose
    translation is nonzero (the comparison lands in the recorder)."""
    pieces = w_iet.pieces
    if len(pieces) == 1 and pieces[0].b == pieces[0].a:
        return None
    for idx, p in enumerate(pieces):
        if p.b != p.a:
            return idx
    raise IetError("several pieces yet no translation: canonical form broken")  # pragma: no cover


def pl_trace(generators: Sequence[Iet], radius: int) -> PlTrace:
    """Replay every word of length <= radius, recording each combinatorial
    decision as an affine constraint over the unknown lengths."""
    if not generators:
        raise IetError("at least one generator required")
    for g in generators:
        if len(g.source.components) != 1 or g.source.components[0].kind != INTERVAL:
            raise IetError("tracing needs generators on a single interval")
        if g.source != g.target:
            raise IetError("tracing needs automorphisms")
    dim = sum(len(g.pieces) for g in generators)
    rec = TraceRecorder(dim)
    tracked = _tracked_generators(generators, rec)
    letter_maps = []
    for g in tracked:
        letter_maps.append(g)
        letter_maps.append(~g)

    pattern: dict[Word, Optional[int]] = {}
    prefixes: dict[tuple, Iet] = {(): Iet.identity(tracked[0].source)}
    frontier = [()]
    for _ in range(radius):
        nxt = []
        for w in frontier:
            base = prefixes[w]
            for li, lmap in enumerate(letter_maps):
                letter = (li // 2, 1 if li % 2 == 0 else -1)
                w2 = w + (letter,)
                iet2 = base * lmap
                prefixes[w2] = iet2
                pattern[Word(w2)] = _classify(iet2)
                nxt.append(w2)
        frontier = nxt

    realized = []
    for g in generators:
        realized.extend(lengths_of(g))
    trace = PlTrace(
        system=ConstraintSystem(dim, tuple(rec.constraints)),
        realized_point=tuple(realized),
        word_pattern=pattern,
    )
    return trace


# -- rationalization ----------------------------------------------------------------


@dataclass(frozen=True)
class FiniteQuotient:
    """Generators of a finite group acting on the uniform grid of [0, 1)."""

    grid: int
    generators: tuple[tuple[int, ...], ...]
    group_size: Optional[int]


GRID_WARN = 10 ** 6
GRID_CAP = 10 ** 7


def _cell_permutation(g: Iet, grid: int) -> tuple[int, ...]:
    out = []
    for j in range(grid):
        x = QuadNum(Fraction(j, grid))
        y = g(Point(0, x)).x
        cell = y.a * grid
        if not y.is_rational() or cell.denominator != 1:
            raise IetError("map does not permute the grid cells")  # pragma: no cover
        out.append(int(cell))
    return tuple(out)


def rationalize(
    generators: Sequence[Iet],
    radius: int,
    grid_cap: int = GRID_CAP,
    compute_order: bool = True,
) -> tuple[list[Iet], FiniteQuotient]:
    """Rational generators with the same permutations and the same marked
    ball of radius ``radius``, plus the finite quotient they generate.

    The recorded trace always contains its own realized point, so the linear
    program is feasible by construction; the triviality pattern of every
    traced word is re-verified exactly on the rational generators.
    """
    trace = pl_trace(generators, radius)
    sol = lp_rational_point(trace.system)
    if sol is None:
        raise LpInternalError("trace system lost its realized point")  # pragma: no cover
    rat_gens: list[Iet] = []
    offset = 0
    for g in generators:
        sigma = permutation_of(g)
        n = len(sigma)
        rat_gens.append(from_lengths(sigma, sol[offset : offset + n]))
        offset += n
    for word, witness in trace.word_pattern.items():
        if (witness is None) != word.evaluate(rat_gens).is_identity():
            raise TraceVerificationError(f"pattern mismatch at {word.format()}")
    grid = 1
    for x in sol:
        grid = grid * x.denominator // _gcd(grid, x.denominator)
    if grid > grid_cap:
        raise GridCapError(f"grid needs {grid} cells (cap {grid_cap})")
    if grid > GRID_WARN:
        warnings.warn(f"finite quotient grid has {grid} cells", RuntimeWarning)
    perms = tuple(_cell_permutation(g, grid) for g in rat_gens)
    size = permutation_group_order(perms) if compute_order else None
    return rat_gens, FiniteQuotient(grid=grid, generators=perms, group_size=size)


# -- finite groups from rational maps -------------------------------------------------


def permutation_group_order(perms: Sequence[tuple[int, ...]]) -> int:
    """Exact order of the permutation group the inputs generate, by a
    deterministic stabilizer chain (no element listing, no caps)."""
    perms = [tuple(p) for p in perms]
    if not perms:
        return 1
    n = len(perms[0])
    ident = tuple(range(n))
    gens = [p for p in perms if p != ident]
    if not gens:
        return 1

    def mul(a, b):  # apply b first
        return tuple(a[b[i]] for i in range(n))

    def inv(a):
        out = [0] * n
        for i, v in enumerate(a):
            out[v] = i
        return tuple(out)

    base: list[int] = []
    strong: list[list[tuple[int, ...]]] = []
    trans: list[dict[int, tuple[int, ...]]] = []

    def extend_base_for(g):
        mv = next(p for p in range(n) if g[p] != p)
        base.append(mv)
        strong.append([])
        trans.append({})

    def register(g, upto: int) -> None:
        # g stabilizes base[:upto]; it belongs to every level <= upto
        for i in range(upto + 1):
            if i >= len(base):
                extend_base_for(g)
            strong[i].append(g)

    def rebuild(i: int) -> None:
        b = base[i]
        t = {b: ident}
        frontier = [b]
        while frontier:
            x = frontier.pop()
            tx = t[x]
            for g in strong[i]:
                y = g[x]
                if y not in t:
                    t[y] = mul(g, tx)
                    frontier.append(y)
        trans[i] = t

    def strip(g, i: int) -> tuple[tuple[int, ...], int]:
        while i < len(base):
            x = g[base[i]]
            rep = trans[i].get(x)
            if rep is None:
                return g, i
            g = mul(inv(rep), g)
            i += 1
        return g, len(base)

    for g in gens:
        lvl = 0
        while lvl < len(base) and g[base[lvl]] == base[lvl]:
            lvl += 1
        register(g, lvl if lvl < len(base) else len(base))
    for i in range(len(base)):
        rebuild(i)

    i = len(base) - 1
    while i >= 0:
        rebuild(i)
        ok = True
        for x in list(trans[i].keys()):
            tx = trans[i][x]
            for g in strong[i]:
                y = g[x]
                sg = mul(inv(trans[i][y]), mul(g, tx))
                if sg == ident:
                    continue
                res, j = strip(sg, i + 1)
                if res != ident:
                    if j == len(base):
                        extend_base_for(res)
                    for lvl in range(i + 1, j + 1):
                        strong[lvl].append(res)
                        rebuild(lvl)
                    i = j
                    ok = False
                    break
            if not ok:
                break
        if ok:
            i -= 1
    order = 1
    for t in trans:
        order *= len(t)
    return order


def _closure(
    perms: Sequence[tuple[int, ...]], cap: int, want_table: bool
) -> tuple[int, Optional[list[list[int]]]]:
    n = len(perms[0]) if perms else 0
    ident = tuple(range(n))
    index: dict[tuple[int, ...], int] = {ident: 0}
    elements = [ident]
    frontier = [ident]
    while frontier:
        nxt = []
        for el in frontier:
            for p in perms:
                q = tuple(el[p[i]] for i in range(n))
                if q not in index:
                    if len(elements) >= cap:
                        raise GridCapError(f"group size exceeded cap {cap}")
                    index[q] = len(elements)
                    elements.append(q)
                    nxt.append(q)
        frontier = nxt
    table = None
    if want_table:
        table = [
            [index[tuple(a[b[i]] for i in range(n))] for b in elements] for a in elements
        ]
    return len(elements), table


def common_grid(generators: Sequence[Iet]) -> int:
    """Least q making every generator q-rational; errors on irrational jumps."""
    q = 1
    for g in generators:
        if len(g.source.components) != 1 or g.source.components[0].kind != INTERVAL:
            raise IetError("finite enumeration needs maps of a single interval")
        for pt in g.discontinuities():
            if not isinstance(pt.x, QuadNum) or not pt.x.is_rational():
                raise IetError("a generator has an irrational jump; not q-rational")
            q = q * pt.x.a.denominator // _gcd(q, pt.x.a.denominator)
    return q


def enumerate_finite_group(
    generators: Sequence[Iet], cap: int = 10 ** 6, want_table: bool = False
) -> tuple[int, Optional[list[list[int]]]]:
    """Exact order (and optionally the multiplication table) of the group
    generated by q-rational maps of [0, 1), by closure over grid-cell
    permutations; deterministic: cells by position, elements by discovery."""
    grid = common_grid(generators)
    perms = tuple(_cell_permutation(g, grid) for g in generators)
    return _closure(perms, cap, want_table)
