"""
Platform semigroups and their elements.

Three platforms are supported: the braid group ``B_n`` (infinite, words decided
by handle reduction and normalised by the Garside form), the symmetric group on
``degree`` points, and the full matrix semigroup ``M_dim(Z_p)`` (which contains
non-invertible elements).  Elements are immutable; ``==`` is equality in the
platform, not payload equality, and ``hash`` goes through the canonical form.
"""

from __future__ import annotations

import dataclasses
import enum
import functools
import itertools
import random
import struct
from typing import Iterable, Iterator, Sequence

from . import braid

TAG_BRAID = 0x01
TAG_PERMUTATION = 0x02
TAG_MATRIX = 0x03

# enumerate() refuses finite platforms larger than this
ENUMERATION_CAP = 1 << 20


class AlgebraError(Exception):
    pass


class PlatformMismatch(AlgebraError):
    pass


class NonInvertible(AlgebraError):
    pass


class InfinitePlatform(AlgebraError):
    pass


class DecodeError(AlgebraError):
    pass


class PlatformKind(enum.Enum):
    BRAID = TAG_BRAID
    PERMUTATION = TAG_PERMUTATION
    MATRIX = TAG_MATRIX


def _is_prime(p: int) -> bool:
    return p >= 2 and all(p % d for d in range(2, int(p**0.5) + 1))


@dataclasses.dataclass(frozen=True)
class Platform:
    """A platform semigroup: ``Braid(n)``, ``Permutation(degree)`` or ``MatrixModP(dim, p)``."""

    kind: PlatformKind
    size: int
    modulus: int = 0

    def __post_init__(self):
        if self.kind is PlatformKind.BRAID and self.size < 2:
            raise ValueError("Braid(n) requires n >= 2")
        if self.kind is PlatformKind.PERMUTATION and self.size < 1:
            raise ValueError("Permutation(degree) requires degree >= 1")
        if self.kind is PlatformKind.MATRIX:
            if self.size < 2:
                raise ValueError("MatrixModP requires dim >= 2")
            if not _is_prime(self.modulus):
                raise ValueError(f"MatrixModP requires a prime modulus, got {self.modulus}")
            if self.modulus >= 1 << 16:
                raise ValueError("modulus must fit in 16 bits")

    @classmethod
    def braid(cls, n: int) -> Platform:
        return cls(PlatformKind.BRAID, n)

    @classmethod
    def permutation(cls, degree: int) -> Platform:
        return cls(PlatformKind.PERMUTATION, degree)

    @classmethod
    def matrix(cls, dim: int, p: int) -> Platform:
        return cls(PlatformKind.MATRIX, dim, p)

    def __str__(self):
        if self.kind is PlatformKind.BRAID:
            return f"B_{self.size}"
        if self.kind is PlatformKind.PERMUTATION:
            return f"S_{self.size}"
        return f"M_{self.size}(Z_{self.modulus})"

    @property
    def has_inverses(self) -> bool:
        return self.kind is not PlatformKind.MATRIX

    @property
    def has_canonical_form(self) -> bool:
        return True

    @property
    def is_finite(self) -> bool:
        return self.kind is not PlatformKind.BRAID

    @property
    def order(self) -> int:
        if self.kind is PlatformKind.PERMUTATION:
            return _factorial(self.size)
        if self.kind is PlatformKind.MATRIX:
            return self.modulus ** (self.size * self.size)
        raise InfinitePlatform(f"{self} is infinite")

    # --- element construction ---

    def element(self, payload: Iterable[int]) -> Element:
        payload = tuple(int(x) for x in payload)
        if self.kind is PlatformKind.BRAID:
            braid.check_word(payload, self.size)
        elif self.kind is PlatformKind.PERMUTATION:
            if sorted(payload) != list(range(self.size)):
                raise ValueError(f"{payload} is not a permutation of degree {self.size}")
        else:
            if len(payload) != self.size * self.size:
                raise ValueError("matrix payload has the wrong number of entries")
            if any(not 0 <= x < self.modulus for x in payload):
                raise ValueError(f"matrix entries must lie in 0..{self.modulus - 1}")
        return Element(self, payload)

    def identity(self) -> Element:
        if self.kind is PlatformKind.BRAID:
            return Element(self, ())
        if self.kind is PlatformKind.PERMUTATION:
            return Element(self, tuple(range(self.size)))
        d = self.size
        return Element(self, tuple(int(i == j) for i in range(d) for j in range(d)))

    def cycles(self, *cycles: Sequence[int]) -> Element:
        """Permutation from 1-indexed cycles, e.g. ``S6.cycles((2, 4), (5, 6))``."""
        if self.kind is not PlatformKind.PERMUTATION:
            raise TypeError("cycles() is only defined for permutation platforms")
        img = list(range(self.size))
        for cyc in cycles:
            for a, b in zip(cyc, cyc[1:] + cyc[:1]):
                img[a - 1] = b - 1
        return self.element(img)

    def matrix_of(self, rows: Sequence[Sequence[int]]) -> Element:
        if self.kind is not PlatformKind.MATRIX:
            raise TypeError("matrix_of() is only defined for matrix platforms")
        return self.element(x % self.modulus for row in rows for x in row)

    def word(self, *letters: int) -> Element:
        if self.kind is not PlatformKind.BRAID:
            raise TypeError("word() is only defined for braid platforms")
        return self.element(letters)

    def generators(self) -> tuple[Element, ...]:
        """A generating set of the whole platform as a semigroup."""
        if self.kind is PlatformKind.BRAID:
            return tuple(self.element((s * i,)) for i in range(1, self.size) for s in (1, -1))
        if self.kind is PlatformKind.PERMUTATION:
            if self.size == 1:
                return (self.identity(),)
            return tuple(
                self.element(braid.transposition(i, self.size)) for i in range(self.size - 1)
            )
        return tuple(self.elements())

    def elements(self) -> Iterator[Element]:
        """All elements of a finite platform in lexicographic payload order."""
        if self.order > ENUMERATION_CAP:
            raise ValueError(f"{self} has {self.order} elements; too many to enumerate")
        if self.kind is PlatformKind.PERMUTATION:
            for p in itertools.permutations(range(self.size)):
                yield Element(self, p)
        else:
            for m in itertools.product(range(self.modulus), repeat=self.size * self.size):
                yield Element(self, m)

    def to_bytes(self) -> bytes:
        return struct.pack(">BHH", self.kind.value, self.size, self.modulus)

    @classmethod
    def read(cls, data: bytes, pos: int = 0) -> tuple[Platform, int]:
        try:
            tag, size, modulus = struct.unpack_from(">BHH", data, pos)
            return cls(PlatformKind(tag), size, modulus), pos + 5
        except (struct.error, ValueError) as exc:
            raise DecodeError(f"bad platform descriptor: {exc}") from None


@functools.lru_cache(maxsize=None)
def _factorial(n: int) -> int:
    out = 1
    for k in range(2, n + 1):
        out *= k
    return out


@dataclasses.dataclass(frozen=True, eq=False)
class Element:
    """An element of a platform.

    The payload is a braid word, a permutation image table or a row-major
    matrix entry table, depending on the platform.
    """

    platform: Platform
    payload: tuple[int, ...]

    def __mul__(self, other: Element) -> Element:
        return multiply(self, other)

    def __eq__(self, other):
        if not isinstance(other, Element):
            return NotImplemented
        return equal(self, other)

    def __hash__(self):
        return hash(self.canonical_bytes)

    def inverse(self) -> Element:
        return invert(self)

    def canonical(self) -> Element:
        return canonicalize(self)

    def is_identity(self) -> bool:
        return equal(self, self.platform.identity())

    @functools.cached_property
    def garside(self) -> braid.GarsideForm:
        if self.platform.kind is not PlatformKind.BRAID:
            raise TypeError("Garside form is only defined for braids")
        return braid.left_canonical_form(self.payload, self.platform.size)

    @functools.cached_property
    def canonical_bytes(self) -> bytes:
        return serialize(self)

    def __repr__(self):
        g = self.platform
        if g.kind is PlatformKind.BRAID:
            body = " ".join(f"s{x}" if x > 0 else f"s{-x}^-1" for x in self.payload) or "e"
        elif g.kind is PlatformKind.PERMUTATION:
            body = _cycle_string(self.payload)
        else:
            d = g.size
            rows = [list(self.payload[r * d:(r + 1) * d]) for r in range(d)]
            body = str(rows)
        return f"<{g}: {body}>"


def _cycle_string(p: Sequence[int]) -> str:
    seen, out = set(), []
    for start in range(len(p)):
        if start in seen or p[start] == start:
            continue
        cyc, j = [], start
        while j not in seen:
            seen.add(j)
            cyc.append(j + 1)
            j = p[j]
        out.append("(" + " ".join(map(str, cyc)) + ")")
    return "".join(out) or "()"


def _same_platform(e1: Element, e2: Element) -> Platform:
    if e1.platform != e2.platform:
        raise PlatformMismatch(f"{e1.platform} vs {e2.platform}")
    return e1.platform


def _matmul(a: Sequence[int], b: Sequence[int], d: int, p: int) -> tuple[int, ...]:
    return tuple(
        sum(a[i * d + k] * b[k * d + j] for k in range(d)) % p for i in range(d) for j in range(d)
    )


def multiply(e1: Element, e2: Element) -> Element:
    """Product ``e1 * e2``.  Braid words are concatenated, not normalised."""
    g = _same_platform(e1, e2)
    if g.kind is PlatformKind.BRAID:
        return Element(g, e1.payload + e2.payload)
    if g.kind is PlatformKind.PERMUTATION:
        p = e1.payload
        return Element(g, tuple(p[j] for j in e2.payload))
    return Element(g, _matmul(e1.payload, e2.payload, g.size, g.modulus))


def product(elements: Iterable[Element], platform: Platform) -> Element:
    out = platform.identity()
    for x in elements:
        out = multiply(out, x)
    return out


def _matinv(a: Sequence[int], d: int, p: int) -> tuple[int, ...]:
    m = [list(a[r * d:(r + 1) * d]) + [int(r == c) for c in range(d)] for r in range(d)]
    for col in range(d):
        pivot = next((r for r in range(col, d) if m[r][col] % p), None)
        if pivot is None:
            raise NonInvertible("matrix is singular mod p")
        m[col], m[pivot] = m[pivot], m[col]
        s = pow(m[col][col], -1, p)
        m[col] = [x * s % p for x in m[col]]
        for r in range(d):
            if r != col and m[r][col]:
                f = m[r][col]
                m[r] = [(x - f * y) % p for x, y in zip(m[r], m[col])]
    return tuple(x for row in m for x in row[d:])


def invert(e: Element) -> Element:
    g = e.platform
    if g.kind is PlatformKind.BRAID:
        return Element(g, braid.inverse_word(e.payload))
    if g.kind is PlatformKind.PERMUTATION:
        return Element(g, braid.perm_inverse(e.payload))
    return Element(g, _matinv(e.payload, g.size, g.modulus))


def is_invertible(e: Element) -> bool:
    try:
        invert(e)
    except NonInvertible:
        return False
    return True


def equal(e1: Element, e2: Element) -> bool:
    """Equality in the platform.  Braids are compared by handle reduction of ``e1 e2^-1``."""
    g = _same_platform(e1, e2)
    if g.kind is PlatformKind.BRAID:
        if e1.payload == e2.payload:
            return True
        return braid.words_equal(e1.payload, e2.payload)
    return e1.payload == e2.payload


def commute(e1: Element, e2: Element) -> bool:
    return equal(multiply(e1, e2), multiply(e2, e1))


def canonicalize(e: Element) -> Element:
    """Rewrite to the canonical representative (Garside normal form for braids)."""
    if e.platform.kind is PlatformKind.BRAID:
        return Element(e.platform, e.garside.to_word())
    return e


# --- serialization ---------------------------------------------------------------


def serialize(e: Element) -> bytes:
    """Canonical serialization; equal elements give identical bytes."""
    g = e.platform
    if g.kind is PlatformKind.BRAID:
        nf = e.garside
        out = struct.pack(">BHIi", TAG_BRAID, g.size, len(nf.factors), nf.infimum)
        for f in nf.factors:
            out += struct.pack(f">{g.size}H", *f)
        return out
    if g.kind is PlatformKind.PERMUTATION:
        return struct.pack(f">BH{g.size}H", TAG_PERMUTATION, g.size, *e.payload)
    n = g.size * g.size
    return struct.pack(f">BHH{n}H", TAG_MATRIX, g.size, g.modulus, *e.payload)


def read_element(data: bytes, pos: int = 0) -> tuple[Element, int]:
    """Decode one serialized element starting at ``pos``; returns it and the next offset."""
    try:
        tag = data[pos]
        if tag == TAG_BRAID:
            _, n, count, inf = struct.unpack_from(">BHIi", data, pos)
            pos += 11
            factors = []
            for _ in range(count):
                factors.append(struct.unpack_from(f">{n}H", data, pos))
                pos += 2 * n
            nf = braid.GarsideForm(n, inf, tuple(factors))
            if any(sorted(f) != list(range(n)) for f in factors) or not nf.is_valid():
                raise DecodeError("braid factors are not in left canonical form")
            return Platform.braid(n).element(nf.to_word()), pos
        if tag == TAG_PERMUTATION:
            _, n = struct.unpack_from(">BH", data, pos)
            img = struct.unpack_from(f">{n}H", data, pos + 3)
            return Platform.permutation(n).element(img), pos + 3 + 2 * n
        if tag == TAG_MATRIX:
            _, d, p = struct.unpack_from(">BHH", data, pos)
            entries = struct.unpack_from(f">{d * d}H", data, pos + 5)
            return Platform.matrix(d, p).element(entries), pos + 5 + 2 * d * d
    except (struct.error, IndexError, braid.BraidError, ValueError) as exc:
        raise DecodeError(f"malformed element: {exc}") from None
    raise DecodeError(f"unknown element tag {tag:#x}")


def deserialize(data: bytes) -> Element:
    e, pos = read_element(data)
    if pos != len(data):
        raise DecodeError("trailing bytes after element")
    return e


# --- subsets ------------------------------------------------------------------------

LABELS = ("L_A", "R_A", "L_B", "R_B", "Z", "custom")


@dataclasses.dataclass(frozen=True)
class SubsetSpec:
    """A finitely generated subset together with how secrets are drawn from it.

    Sampled elements are products of ``k`` generators, ``k`` uniform in
    ``length_range``.  With ``signed`` set (groups only) each chosen generator is
    inverted with probability 1/2.
    """

    generators: tuple[Element, ...]
    label: str = "custom"
    length_range: tuple[int, int] = (1, 1)
    signed: bool = False

    def __post_init__(self):
        object.__setattr__(self, "generators", tuple(self.generators))
        object.__setattr__(self, "length_range", tuple(self.length_range))
        if not self.generators:
            raise ValueError("a subset needs at least one generator")
        g = self.generators[0].platform
        if any(x.platform != g for x in self.generators):
            raise PlatformMismatch("subset generators live on different platforms")
        lo, hi = self.length_range
        if not 0 <= lo <= hi:
            raise ValueError(f"bad length range {self.length_range}")
        if self.label not in LABELS:
            raise ValueError(f"unknown subset label {self.label!r}")
        if self.signed and not g.has_inverses:
            raise ValueError("signed sampling needs a platform with inverses")

    @property
    def platform(self) -> Platform:
        return self.generators[0].platform

    def relabel(self, label: str) -> SubsetSpec:
        return dataclasses.replace(self, label=label)

    def with_range(self, lo: int, hi: int) -> SubsetSpec:
        return dataclasses.replace(self, length_range=(lo, hi))

    def to_bytes(self) -> bytes:
        out = struct.pack(
            ">BHH?I", LABELS.index(self.label), *self.length_range, self.signed, len(self.generators)
        )
        return out + b"".join(serialize(x) for x in self.generators)

    @classmethod
    def read(cls, data: bytes, pos: int = 0) -> tuple[SubsetSpec, int]:
        try:
            label, lo, hi, signed, count = struct.unpack_from(">BHH?I", data, pos)
            label = LABELS[label]
        except (struct.error, IndexError) as exc:
            raise DecodeError(f"bad subset header: {exc}") from None
        pos += 10
        gens = []
        for _ in range(count):
            x, pos = read_element(data, pos)
            gens.append(x)
        try:
            return cls(tuple(gens), label, (lo, hi), signed), pos
        except ValueError as exc:
            raise DecodeError(str(exc)) from None


def sample(subset: SubsetSpec, rng: random.Random) -> Element:
    """Draw a random product of generators; deterministic for a seeded ``rng``."""
    lo, hi = subset.length_range
    k = rng.randint(lo, hi)
    out = subset.platform.identity()
    for _ in range(k):
        x = rng.choice(subset.generators)
        if subset.signed and rng.random() < 0.5:
            x = invert(x)
        out = multiply(out, x)
    return out


def words(subset: SubsetSpec, length: int) -> Iterator[tuple[Element, ...]]:
    """Every generator sequence of the given length (signed letters included)."""
    letters = list(subset.generators)
    if subset.signed:
        letters += [invert(x) for x in subset.generators]
    return itertools.product(letters, repeat=length)


def enumerate_products(subset: SubsetSpec, max_length: int, cap: int | None = None) -> list[Element]:
    """Distinct elements that are products of at most ``max_length`` generators.

    The identity (empty product) comes first, then elements in order of first
    appearance in shortlex order of generator words.
    """
    g = subset.platform
    letters = list(subset.generators)
    if subset.signed:
        letters += [invert(x) for x in subset.generators]
    seen = {g.identity()}
    out = [g.identity()]
    frontier = [g.identity()]
    for _ in range(max_length):
        nxt = []
        for u in frontier:
            for x in letters:
                v = multiply(u, x)
                if v.platform.kind is PlatformKind.BRAID:
                    v = canonicalize(v)
                if v not in seen:
                    seen.add(v)
                    out.append(v)
                    nxt.append(v)
                    if cap is not None and len(out) > cap:
                        raise OverflowError(f"more than {cap} distinct products")
        frontier = nxt
        if not frontier:
            break
    return out


def generated_subgroup(subset: SubsetSpec) -> list[Element]:
    """Closure of a finite-platform subset under multiplication."""
    if not subset.platform.is_finite:
        raise InfinitePlatform("closure is only computed on finite platforms")
    return enumerate_products(subset, subset.platform.order)


# --- centralizers ------------------------------------------------------------------------


def centralizer_elements(platform: Platform, targets: Iterable[Element]) -> list[Element]:
    """All elements commuting with every target, by exhaustive enumeration."""
    if not platform.is_finite:
        raise InfinitePlatform(f"centralizers on {platform} are not computed")
    targets = list(targets)
    for t in targets:
        _same_platform(t, platform.identity())
    return [c for c in platform.elements() if all(commute(c, t) for t in targets)]


def centralizer_enumerate(platform: Platform, e: Element) -> SubsetSpec:
    """The centralizer of ``e`` as a subset whose generators are all its members."""
    return SubsetSpec(tuple(centralizer_elements(platform, [e])), "custom")
