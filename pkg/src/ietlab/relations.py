"""Commutator support-shrinking and drift: exact relation certificates.

Two routes to a relation in a group generated by interval exchanges S, T:

* when R is a multi-rotation, a power R^n moves every point very little, so
  U = [[S, R^n], R^n] has support pinched into a neighbourhood of the jumps
  of S (plus component ends); an element with support disjoint from a
  conjugate commutes with it;
* when S is close to a q-rational map, S^e with e = lcm(1..q) is close to
  the identity away from the grid (1/q)N, so U = [S^e, T S^e T^-1] has
  support pinched around the grid; if some T^k moves that neighbourhood off
  itself, U commutes with T^k U T^-k.

Either way the commutation relation, read as a word in the abstract free
group, is nonempty after free reduction, so the pair does not generate a
free group of rank 2.  Everything here is verified by exact arithmetic:
supports are computed and intersected exactly, and the word is re-evaluated
to the identity map before a certificate is issued.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Optional, Sequence

from ietlab.core import (
    CIRCLE,
    INTERVAL,
    Domain,
    Iet,
    IetError,
    Point,
    Subdomain,
    from_lengths,
    lengths_of,
    permutation_of,
    perm_validate,
)
from ietlab.field import QuadNum
from ietlab.rotations import circle_angles, is_multi_rotation


class CapExceededError(IetError):
    pass


class ShrinkVerificationError(IetError):
    """The pinched-support guarantee failed; indicates a bug, not bad input."""


# -- free words -------------------------------------------------------------------


@dataclass(frozen=True)
class Word:
    """Word in the free group on abstract generators 0, 1, ...; letters are
    (generator index, +-1)."""

    letters: tuple[tuple[int, int], ...] = ()

    @staticmethod
    def gen(i: int, exp: int = 1) -> "Word":
        if exp == 0:
            return Word()
        e = 1 if exp > 0 else -1
        return Word(((i, e),) * abs(exp))

    def __mul__(self, other: "Word") -> "Word":
        return Word(self.letters + other.letters)

    def inverse(self) -> "Word":
        return Word(tuple((i, -e) for i, e in reversed(self.letters)))

    def __pow__(self, n: int) -> "Word":
        if n < 0:
            return self.inverse() ** (-n)
        out = Word()
        for _ in range(n):
            out = out * self
        return out

    def __len__(self):
        return len(self.letters)

    def evaluate(self, gens: Sequence[Iet]) -> Iet:
        if not gens:
            raise IetError("no generators to evaluate over")
        result = Iet.identity(gens[0].source)
        for i, e in self.letters:
            g = gens[i]
            result = result * (g if e > 0 else ~g)
        return result

    def format(self, names: Sequence[str] = ("s", "t", "u", "v")) -> str:
        if not self.letters:
            return "1"
        out = []
        i = 0
        letters = self.letters
        while i < len(letters):
            j = i
            while j < len(letters) and letters[j] == letters[i]:
                j += 1
            gen, e = letters[i]
            count = (j - i) * e
            name = names[gen] if gen < len(names) else f"g{gen}"
            out.append(name if count == 1 else f"{name}^{count}")
            i = j
        return " ".join(out)


def free_reduce(w: Word) -> Word:
    """Fully reduced form; empty exactly when w is trivial in the free group."""
    stack: list[tuple[int, int]] = []
    for let in w.letters:
        if stack and stack[-1][0] == let[0] and stack[-1][1] == -let[1]:
            stack.pop()
        else:
            stack.append(let)
    return Word(tuple(stack))


def commutator_word(x: Word, y: Word) -> Word:
    return x.inverse() * y.inverse() * x * y


def commutator(g: Iet, h: Iet) -> Iet:
    """[g, h] = g^-1 h^-1 g h as a map."""
    return ~g * ~h * g * h


# -- closed neighbourhoods and pinched supports --------------------------------------


def _closed_cover(
    domain: Domain, pts: Iterable[Point], eps, include_interval_ends: bool
) -> dict[int, list[tuple]]:
    """Merged closed eps-balls per component; circle arcs are doubled onto
    [0, 2L] so containment queries can cross the coordinate cut."""
    eps = QuadNum.of(eps)
    raw: dict[int, list[tuple]] = {ci: [] for ci in range(len(domain.components))}
    for ci, comp in enumerate(domain.components):
        if include_interval_ends and comp.kind == INTERVAL:
            raw[ci].append((QuadNum(0), eps))
            raw[ci].append((comp.length - eps, comp.length))
    for p in pts:
        comp = domain.components[p.comp]
        length = comp.length
        if comp.kind == INTERVAL:
            lo = p.x - eps
            hi = p.x + eps
            raw[p.comp].append((lo if lo > 0 else QuadNum(0), hi if hi < length else length))
        else:
            if 2 * eps >= length:
                raw[p.comp].append((QuadNum(0), 2 * length))
                continue
            lo = (p.x - eps).mod(length)
            raw[p.comp].append((lo, lo + 2 * eps))
    out: dict[int, list[tuple]] = {}
    for ci, comp in enumerate(domain.components):
        ivs = raw[ci]
        if comp.kind == CIRCLE:
            ivs = ivs + [(lo + comp.length, hi + comp.length) for lo, hi in ivs]
        ivs.sort()
        merged: list[list] = []
        for lo, hi in ivs:
            if merged and lo <= merged[-1][1]:
                if hi > merged[-1][1]:
                    merged[-1][1] = hi
            else:
                merged.append([lo, hi])
        out[ci] = [tuple(iv) for iv in merged]
    return out


def _cover_contains(domain: Domain, cover: dict[int, list[tuple]], sub: Subdomain) -> bool:
    for ci, s, e in sub.parts:
        shift = domain.components[ci].length if domain.components[ci].kind == CIRCLE else None
        candidates = [(s, e)] if shift is None else [(s, e), (s + shift, e + shift)]
        ok = False
        for lo, hi in cover.get(ci, ()):
            for u, v in candidates:
                if lo <= u and v <= hi:
                    ok = True
        if not ok:
            return False
    return True


def jump_marks(s: Iet) -> list[Point]:
    """Jumps of the map and of its inverse, as one list of points."""
    return list(s.discontinuities()) + list((~s).discontinuities())


_FLOAT_GUARD = 1e-9  # far above any drift a 500k-step float accumulation can reach


def small_rotation_power(r: Iet, eps, cap: int = 500_000) -> int:
    """Least n >= 1 such that r^n moves every point by at most eps/2
    (exhaustive search over n).

    A floating-point accumulator skips powers whose movement provably
    exceeds the threshold by more than the drift guard; every surviving
    candidate is decided by exact arithmetic, so the answer is the true
    minimum.
    """
    eps = QuadNum.of(eps)
    if not eps > 0:
        raise IetError("eps must be positive")
    if not is_multi_rotation(r):
        raise IetError("small powers need a multi-rotation")
    thresh = eps / 2
    exact: list[tuple] = []  # (angle, length)
    ratios: list[float] = []
    for ci, ang in circle_angles(r).items():
        if ang == 0:
            continue
        length = r.source.components[ci].length
        exact.append((ang, length))
        ratios.append(float(ang / length))
    if not exact:
        return 1

    def exact_ok(n: int) -> bool:
        for ang, length in exact:
            c = (ang * n).mod(length)
            dist = c if 2 * c <= length else length - c
            if dist > thresh:
                return False
        return True

    k = len(ratios)
    lo = [float(thresh / length) + _FLOAT_GUARD for _, length in exact]
    hi = [1.0 - b for b in lo]  # skip only inside (b+guard, 1-b-guard)
    cums = [0.0] * k
    for n in range(1, cap + 1):
        ok = True
        for i in range(k):
            c = cums[i] + ratios[i]
            if c >= 1.0:
                c -= 1.0
            cums[i] = c
            if lo[i] < c < hi[i]:
                ok = False
        if ok and exact_ok(n):
            return n
    raise CapExceededError(f"no power within cap {cap} moves points by <= eps/2")


@dataclass(frozen=True)
class ShrinkConfig:
    epsilon: QuadNum
    n_cap: int = 200_000

    def __post_init__(self):
        if not QuadNum.of(self.epsilon) > 0:
            raise IetError("epsilon must be positive")


def shrink_support(r: Iet, s: Iet, cfg: ShrinkConfig) -> tuple[int, Iet]:
    """n and U = [[S, R^n], R^n], with the exact guarantee that supp(U) lies
    in the closed eps-neighbourhood of the jumps of S and S^-1 together with
    the component ends (ends drop out on all-circle domains).

    The power search runs at eps/2 (movement at most eps/4): the inner
    commutator then translates by at most eps/2 off the eps/2-neighbourhood
    of the jumps, and the outer one dies off the eps-neighbourhood; each of
    the two commutator steps spends a factor of two.
    """
    if r.source != s.source or r.source != r.target or s.source != s.target:
        raise IetError("R and S must be automorphisms of one domain")
    n = small_rotation_power(r, QuadNum.of(cfg.epsilon) / 2, cfg.n_cap)
    rn = r ** n
    u = commutator(commutator(s, rn), rn)
    cover = _closed_cover(s.source, jump_marks(s), cfg.epsilon, include_interval_ends=True)
    if not _cover_contains(s.source, cover, u.support()):
        raise ShrinkVerificationError("support escaped its eps-neighbourhood")
    return n, u


# -- drift -----------------------------------------------------------------------


def is_admissible(sigma: Sequence[int]) -> bool:
    """No m with sigma(m) = m and {1..m-1} invariant."""
    sigma = perm_validate(sigma)
    for m in range(1, len(sigma) + 1):
        if sigma[m - 1] == m and set(sigma[: m - 1]) == set(range(1, m)):
            return False
    return True


def translation_response(sigma: Sequence[int], v: Sequence[Fraction]) -> tuple[Fraction, ...]:
    """Change of the piece translations induced by a change v of the piece
    lengths (a linear map with integer coefficients)."""
    sigma = perm_validate(sigma)
    n = len(sigma)
    inv = [0] * n
    for i, s in enumerate(sigma):
        inv[s - 1] = i + 1
    out = []
    for i in range(1, n + 1):
        t = -sum(v[j] for j in range(i - 1)) + sum(v[inv[j - 1] - 1] for j in range(1, sigma[i - 1]))
        out.append(Fraction(t))
    return tuple(out)


@dataclass(frozen=True)
class DriftData:
    """Zero-sum length change dl whose translation response dr is positive in
    every coordinate."""

    sigma: tuple[int, ...]
    dl: tuple[Fraction, ...]
    dr: tuple[Fraction, ...]
    dr_min: Fraction
    dr_max: Fraction


def drift_direction(sigma: Sequence[int]) -> Optional[DriftData]:
    """Drift data for an admissible permutation (sum over inverted pairs of
    e_j - e_i), or None when the permutation is not admissible."""
    sigma = perm_validate(sigma)
    if not is_admissible(sigma):
        return None
    n = len(sigma)
    dl = [Fraction(0)] * n
    for i in range(n):
        for j in range(i + 1, n):
            if sigma[i] > sigma[j]:
                dl[i] -= 1
                dl[j] += 1
    dr = translation_response(sigma, dl)
    if any(c < 1 for c in dr):
        raise IetError("drift construction failed to reach 1 everywhere")  # pragma: no cover
    return DriftData(sigma, tuple(dl), dr, min(dr), max(dr))


def vanishing_coordinate_certificate(sigma: Sequence[int]) -> tuple[int, bool]:
    """For a non-admissible permutation: the fixed coordinate m (1-based) and
    the exact check that coordinate m of the translation response vanishes on
    a basis of the zero-sum hyperplane."""
    sigma = perm_validate(sigma)
    n = len(sigma)
    m = next(
        (
            m
            for m in range(1, n + 1)
            if sigma[m - 1] == m and set(sigma[: m - 1]) == set(range(1, m))
        ),
        None,
    )
    if m is None:
        raise IetError("permutation is admissible; no vanishing coordinate")
    for i in range(n - 1):
        v = [Fraction(0)] * n
        v[i], v[i + 1] = Fraction(1), Fraction(-1)
        if translation_response(sigma, v)[m - 1] != 0:
            return m, False  # pragma: no cover
    return m, True


def drifted(t0: Iet, theta, dd: DriftData) -> Iet:
    """Same permutation, lengths moved by theta * dl; the translation vector
    moves by exactly theta * dr (checked)."""
    theta = QuadNum.of(theta)
    sigma = permutation_of(t0)
    if sigma != dd.sigma:
        raise IetError("drift data is for a different permutation")
    lengths = [l + theta * c for l, c in zip(lengths_of(t0), dd.dl)]
    for x in lengths:
        if not x > 0:
            raise IetError("theta too large: a length became non-positive")
    t_theta = from_lengths(sigma, lengths)
    before = t0.translation_vector()
    after = t_theta.translation_vector()
    for x, y, c in zip(before, after, dd.dr):
        if y - x != theta * c:
            raise IetError("translation response disagrees with drift data")  # pragma: no cover
    return t_theta


# -- relation certificates ----------------------------------------------------------


@dataclass(frozen=True)
class RelationCertificate:
    """A nonempty reduced word in s, t that evaluates to the identity on the
    pair (S, T), witnessed by U and the exact disjointness of supp(U) from
    supp(T^k U T^-k) (vacuous when U is already the identity)."""

    word: Word
    q: int
    exponent: int
    epsilon: Optional[Fraction]
    k: int
    u: Iet
    supp_u: Subdomain


def lcm_up_to(q: int) -> int:
    return math.lcm(*range(1, q + 1))


def _default_epsilon(t: Iet, q: int) -> Optional[Fraction]:
    try:
        sigma = permutation_of(t)
    except IetError:
        return None
    dd = drift_direction(sigma)
    if dd is None:
        return None
    rho = dd.dr_max / dd.dr_min
    return Fraction(1, 100 * q) / rho


def relation_certificate(
    s: Iet, t: Iet, q: int, k_cap: int = 16
) -> Optional[RelationCertificate]:
    """Search for a commutation relation between words in S and T.

    Uses e = lcm(1..q) (every q-rational map has order dividing it, and e
    divides q!).  With u = [s^e, t s^e t^-1]: if U = u(S, T) is the identity
    the word u itself is the certificate; otherwise each k <= k_cap is tried
    for exact disjointness of supp(U) and supp(T^k U T^-k), giving the word
    [t^k u t^-k, u].  The word is re-evaluated to the identity by exact
    composition, and its free reduction is checked nonempty.  None means the
    search failed, not that the group is free.
    """
    if q < 2:
        raise IetError("q must be >= 2")
    if s.source != t.source or s.source != s.target or t.source != t.target:
        raise IetError("S and T must be automorphisms of one domain")
    e = lcm_up_to(q)
    se = s ** e
    tse = t * se * ~t
    u_iet = commutator(se, tse)
    w_s, w_t = Word.gen(0), Word.gen(1)
    u_word = commutator_word(w_s ** e, w_t * w_s ** e * w_t.inverse())
    eps = _default_epsilon(t, q)

    def issue(word: Word, k: int) -> RelationCertificate:
        reduced = free_reduce(word)
        if not reduced.letters:
            raise IetError("relator freely reduces to the empty word")  # pragma: no cover
        if not word.evaluate([s, t]).is_identity():
            raise IetError("relator fails to evaluate to the identity")  # pragma: no cover
        return RelationCertificate(
            word=word,
            q=q,
            exponent=e,
            epsilon=eps,
            k=k,
            u=u_iet,
            supp_u=u_iet.support(),
        )

    if u_iet.is_identity():
        return issue(u_word, 0)
    supp_u = u_iet.support()
    tk = Iet.identity(t.source)
    for k in range(1, k_cap + 1):
        tk = t * tk
        uk = tk * u_iet * ~tk
        if uk.support().intersection(supp_u).is_empty():
            word = commutator_word(w_t ** k * u_word * w_t ** -k, u_word)
            return issue(word, k)
    return None


# -- helpers for checking translation behaviour on pieces of the domain ---------------


def translation_amplitude_on(h: Iet, comp: int, start, end) -> Optional[QuadNum]:
    """If h maps [start, end) of a component into the same component by one
    translation, its amount; None otherwise."""
    start, end = QuadNum.of(start), QuadNum.of(end)
    for p in h.pieces:
        if p.src == comp and p.a <= start and end <= p.a + p.length:
            if p.dst != comp:
                return None
            return p.b - p.a
    return None
