"""
Braid group B_n: Artin words, permutation braids, the Garside left canonical
form and Dehornoy's handle reduction.

A braid word is a tuple of nonzero ints: ``i`` stands for sigma_i and ``-i``
for its inverse, with ``1 <= |i| <= n - 1``.  The empty tuple is the identity.

Permutation braids (the divisors of the half twist Delta) are stored as
permutation tables ``p`` of ``range(n)`` in one-line notation.  Positive words
map to permutations by ``sigma_i -> s_{i-1}`` (adjacent transposition on
positions ``i-1, i``) with concatenation sent to composition ``p o q``, i.e.
``(p * q)[j] = p[q[j]]``.  A positive word is a permutation braid iff its image
is a reduced expression.
"""

from __future__ import annotations

import dataclasses
import functools
import random
from typing import Iterable, Sequence

Word = tuple[int, ...]
Perm = tuple[int, ...]


class BraidError(ValueError):
    pass


class IndexTooSmall(BraidError):
    pass


# --- permutation tables -------------------------------------------------------


def identity_perm(n: int) -> Perm:
    return tuple(range(n))


@functools.lru_cache(maxsize=None)
def half_twist(n: int) -> Perm:
    """The permutation of Delta, i.e. the longest element ``j -> n-1-j``."""
    return tuple(range(n - 1, -1, -1))


@functools.lru_cache(maxsize=None)
def transposition(i: int, n: int) -> Perm:
    """Adjacent transposition swapping positions ``i`` and ``i+1`` (0-indexed)."""
    p = list(range(n))
    p[i], p[i + 1] = p[i + 1], p[i]
    return tuple(p)


def compose(p: Sequence[int], q: Sequence[int]) -> Perm:
    return tuple(p[j] for j in q)


def perm_inverse(p: Sequence[int]) -> Perm:
    inv = [0] * len(p)
    for j, pj in enumerate(p):
        inv[pj] = j
    return tuple(inv)


def tau(p: Perm) -> Perm:
    """Conjugation by Delta; an involution on permutation braids."""
    n = len(p)
    return tuple(n - 1 - p[n - 1 - j] for j in range(n))


@functools.lru_cache(maxsize=1 << 16)
def right_descents(p: Perm) -> frozenset[int]:
    """Finishing set: generators a positive word for ``p`` can end with."""
    return frozenset(i for i in range(len(p) - 1) if p[i] > p[i + 1])


@functools.lru_cache(maxsize=1 << 16)
def left_descents(p: Perm) -> frozenset[int]:
    """Starting set: generators a positive word for ``p`` can begin with."""
    return right_descents(perm_inverse(p))


def reduced_word(p: Sequence[int]) -> Word:
    """A positive Artin word whose permutation braid is ``p``.

    >>> reduced_word((1, 0, 2))
    (1,)
    >>> reduced_word((2, 1, 0))
    (1, 2, 1)
    """
    p = list(p)
    tail = []
    while True:
        for i in range(len(p) - 1):
            if p[i] > p[i + 1]:
                p[i], p[i + 1] = p[i + 1], p[i]
                tail.append(i + 1)
                break
        else:
            return tuple(reversed(tail))


def perm_of_positive_word(word: Iterable[int], n: int) -> Perm:
    """Permutation of a positive word; raises if the word is not reduced.

    Used as an independent check that a positive word is a permutation braid.
    """
    p = identity_perm(n)
    for letter in word:
        if letter <= 0:
            raise BraidError("positive word expected")
        i = letter - 1
        if p[i] > p[i + 1]:
            raise BraidError("word is not a permutation braid (strands cross twice)")
        p = compose(p, transposition(i, n))
    return p


@functools.lru_cache(maxsize=1 << 18)
def left_weight(a: Perm, b: Perm) -> tuple[Perm, Perm]:
    """Make the pair ``(a, b)`` left-weighted without changing the product ``a b``.

    Generators are moved from the front of ``b`` to the back of ``a`` until the
    starting set of ``b`` is contained in the finishing set of ``a``.
    """
    n = len(a)
    while True:
        movable = left_descents(b) - right_descents(a)
        if not movable:
            return a, b
        s = transposition(min(movable), n)
        a = compose(a, s)
        b = compose(s, b)


def is_left_weighted(a: Perm, b: Perm) -> bool:
    return left_descents(b) <= right_descents(a)


# --- words ---------------------------------------------------------------------


def check_word(word: Iterable[int], n: int) -> Word:
    if n < 2:
        raise BraidError(f"braid index must be >= 2, got {n}")
    word = tuple(int(x) for x in word)
    for x in word:
        if x == 0 or abs(x) > n - 1:
            raise BraidError(f"letter {x} out of range for B_{n}")
    return word


def inverse_word(word: Sequence[int]) -> Word:
    return tuple(-x for x in reversed(word))


def free_reduce(word: Iterable[int]) -> Word:
    out: list[int] = []
    for x in word:
        if out and out[-1] == -x:
            out.pop()
        else:
            out.append(x)
    return tuple(out)


def delta_word(n: int) -> Word:
    return reduced_word(half_twist(n))


# --- Garside normal form -------------------------------------------------------


@dataclasses.dataclass(frozen=True)
class GarsideForm:
    """Left canonical form ``Delta^infimum * factors[0] * ... * factors[-1]``."""

    index: int
    infimum: int
    factors: tuple[Perm, ...]

    @property
    def canonical_length(self) -> int:
        return len(self.factors)

    @property
    def supremum(self) -> int:
        return self.infimum + len(self.factors)

    def is_identity(self) -> bool:
        return self.infimum == 0 and not self.factors

    def to_word(self) -> Word:
        n = self.index
        d = delta_word(n)
        if self.infimum >= 0:
            word = d * self.infimum
        else:
            word = inverse_word(d) * (-self.infimum)
        for f in self.factors:
            word += reduced_word(f)
        return word

    def is_valid(self) -> bool:
        """Check the canonical-form conditions on the stored factors."""
        n = self.index
        e, d = identity_perm(n), half_twist(n)
        if any(f in (e, d) for f in self.factors):
            return False
        return all(is_left_weighted(a, b) for a, b in zip(self.factors, self.factors[1:]))


def _push(factors: list[Perm], f: Perm) -> None:
    factors.append(f)
    j = len(factors) - 1
    while j > 0:
        a, b = left_weight(factors[j - 1], factors[j])
        if a == factors[j - 1]:
            break
        factors[j - 1], factors[j] = a, b
        j -= 1


def _settle(factors: list[Perm], n: int) -> list[Perm]:
    e = identity_perm(n)
    while True:
        factors = [f for f in factors if f != e]
        changed = False
        for j in range(len(factors) - 1):
            a, b = left_weight(factors[j], factors[j + 1])
            if a != factors[j]:
                factors[j], factors[j + 1] = a, b
                changed = True
        if not changed:
            return [f for f in factors if f != e]


def left_canonical_form(word: Sequence[int], n: int) -> GarsideForm:
    """Garside left canonical form of a braid word in B_n.

    Each inverse letter is rewritten as ``Delta^-1 (Delta sigma_i^-1)`` and the
    ``Delta^-1`` are pulled to the front, twisting the factors they cross by
    ``tau``.  The simple factors are then inserted one at a time and
    left-weighted right to left.
    """
    word = check_word(word, n)
    e, d = identity_perm(n), half_twist(n)
    remaining = sum(1 for x in word if x < 0)
    infimum = -remaining
    factors: list[Perm] = []
    for x in word:
        if x > 0:
            f = transposition(x - 1, n)
        else:
            f = compose(d, transposition(-x - 1, n))
            remaining -= 1
        if remaining % 2:
            f = tau(f)
        if f != e:
            _push(factors, f)
    factors = _settle(factors, n)
    lead = 0
    while lead < len(factors) and factors[lead] == d:
        lead += 1
    return GarsideForm(n, infimum + lead, tuple(factors[lead:]))


# --- handle reduction ------------------------------------------------------------


def _find_handle(word: Sequence[int]) -> tuple[int, int] | None:
    # Leftmost-ending handle sigma_i^e ... sigma_i^-e with only letters of
    # index > i in between; such a handle contains no other handle.
    last: dict[int, int] = {}
    for k, x in enumerate(word):
        i = abs(x)
        j = last.get(i)
        if j is not None and word[j] == -x:
            if all(last.get(t, -1) < j for t in range(1, i)):
                return j, k
        last[i] = k
    return None


def handle_reduce(word: Sequence[int]) -> Word:
    """Reduce all handles; the result is empty iff the word is trivial in B_n.

    >>> handle_reduce((1, 3, -1, -3))
    ()
    >>> handle_reduce((1, 2, 1, -2, -1, -2))
    ()
    """
    w = list(word)
    while True:
        h = _find_handle(w)
        if h is None:
            return tuple(w)
        start, end = h
        i = abs(w[start])
        e = 1 if w[start] > 0 else -1
        middle: list[int] = []
        for x in w[start + 1:end]:
            if abs(x) == i + 1:
                d = 1 if x > 0 else -1
                middle += [-e * (i + 1), d * i, e * (i + 1)]
            else:
                middle.append(x)
        w[start:end + 1] = middle


def is_trivial(word: Sequence[int]) -> bool:
    return not handle_reduce(word)


def words_equal(w1: Sequence[int], w2: Sequence[int]) -> bool:
    return is_trivial(tuple(w1) + inverse_word(w2))


# --- relators and rewriting ---------------------------------------------------------


def relators(n: int) -> list[Word]:
    """Trivial words from the Artin presentation: one per relation and its inverse."""
    out = []
    for i in range(1, n):
        out.append((i, -i))
        out.append((-i, i))
        for j in range(1, n):
            if abs(i - j) > 1 and i < j:
                r = (i, j, -i, -j)
                out += [r, inverse_word(r)]
            elif abs(i - j) == 1:
                r = (i, j, i, -j, -i, -j)
                out += [r, inverse_word(r)]
    return out


def insert_relators(word: Sequence[int], n: int, rng: random.Random, count: int = 1) -> Word:
    """Rewrite ``word`` into an equal word by inserting ``count`` random relators."""
    rels = relators(n)
    w = list(word)
    for _ in range(count):
        pos = rng.randint(0, len(w))
        w[pos:pos] = rng.choice(rels)
    return tuple(w)


def random_word(n: int, length: int, rng: random.Random) -> Word:
    return tuple(rng.choice((1, -1)) * rng.randint(1, n - 1) for _ in range(length))


def standard_commuting_subgroups(n: int):
    """Generator sets of LB_n and UB_n, separated by a gap so that they commute.

    LB_n uses sigma_1 .. sigma_{n//2 - 1} and UB_n uses sigma_{n//2 + 1} .. sigma_{n-1}.
    """
    from .algebra import Platform, SubsetSpec

    if n < 5:
        raise IndexTooSmall(f"B_{n} has no two commuting nonempty generator ranges with gap >= 2")
    g = Platform.braid(n)
    half = n // 2
    lower = [g.element((i,)) for i in range(1, half)]
    upper = [g.element((i,)) for i in range(half + 1, n)]
    return SubsetSpec(tuple(lower)), SubsetSpec(tuple(upper))
