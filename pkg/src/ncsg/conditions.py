"""Commutativity conditions on the protocol subsets and the ways of choosing them."""

from __future__ import annotations

import dataclasses
import random
from typing import Optional, Sequence

from .algebra import (
    Element,
    InfinitePlatform,
    Platform,
    PlatformKind,
    SubsetSpec,
    _same_platform,
    centralizer_elements,
    commute,
    enumerate_products,
    sample,
)

COMMUTE = "commute"
NOT_COMMUTE = "not-commute"


class ConditionError(Exception):
    pass


class ZIsIdentity(ConditionError):
    pass


class ZNotIdentity(ConditionError):
    pass


def subsets_commute(s1: SubsetSpec, s2: SubsetSpec) -> tuple[bool, Optional[tuple[Element, Element]]]:
    """Whether every generator of ``s1`` commutes with every generator of ``s2``.

    Commuting generators give commuting products, so this decides ``[s1, s2] = 1``.
    On failure a non-commuting generator pair is returned as witness.
    """
    _same_platform(s1.generators[0], s2.generators[0])
    for x in s1.generators:
        for y in s2.generators:
            if not commute(x, y):
                return False, (x, y)
    return True, None


@dataclasses.dataclass(frozen=True)
class Clause:
    left: str
    right: str
    required: str
    holds: bool
    witness: Optional[tuple[Element, Element]] = None

    @property
    def label(self) -> str:
        op = "=" if self.required == COMMUTE else "!="
        return f"[{self.left},{self.right}]{op}1"


@dataclasses.dataclass(frozen=True)
class ConditionReport:
    variant: str
    clauses: tuple[Clause, ...]

    @property
    def all_hold(self) -> bool:
        return all(c.holds for c in self.clauses)

    def failing(self) -> list[Clause]:
        return [c for c in self.clauses if not c.holds]

    def clause(self, label: str) -> Clause:
        for c in self.clauses:
            if c.label == label:
                return c
        raise KeyError(label)

    def table(self) -> str:
        rows = [("clause", "required", "holds", "witness")]
        for c in self.clauses:
            w = "" if c.witness is None else f"{c.witness[0]!r} , {c.witness[1]!r}"
            rows.append((c.label, c.required, "yes" if c.holds else "NO", w))
        widths = [max(len(r[i]) for r in rows) for i in range(3)]
        lines = [
            "  ".join(r[i].ljust(widths[i]) for i in range(3)) + "  " + r[3] for r in rows
        ]
        name = {"a": "condition a (z != e)", "b": "condition b (z = e)"}[self.variant]
        verdict = "all clauses hold" if self.all_hold else f"{len(self.failing())} clause(s) fail"
        return "\n".join([f"{name}: {verdict}", *lines])


CONDITION_A = (
    ("L_A", "L_B", COMMUTE),
    ("R_A", "R_B", COMMUTE),
    ("L_B", "Z", NOT_COMMUTE),
    ("L_A", "Z", NOT_COMMUTE),
    ("R_B", "Z", NOT_COMMUTE),
    ("R_A", "Z", NOT_COMMUTE),
    ("L_A", "R_A", NOT_COMMUTE),
    ("L_B", "R_B", NOT_COMMUTE),
)

CONDITION_B = (
    ("L_A", "L_B", COMMUTE),
    ("R_A", "R_B", COMMUTE),
    ("L_A", "R_A", NOT_COMMUTE),
    ("L_B", "R_B", NOT_COMMUTE),
    ("L_B", "R_A", NOT_COMMUTE),
    ("L_A", "R_B", NOT_COMMUTE),
)


def _subsets_of(params) -> dict[str, SubsetSpec]:
    z_set = params.Z if params.Z is not None else SubsetSpec((params.z,), "Z")
    return {"L_A": params.L_A, "R_A": params.R_A, "L_B": params.L_B, "R_B": params.R_B, "Z": z_set}


def _evaluate(params, variant: str, spec) -> ConditionReport:
    subsets = _subsets_of(params)
    clauses = []
    for left, right, required in spec:
        ok, witness = subsets_commute(subsets[left], subsets[right])
        holds = ok if required == COMMUTE else not ok
        clauses.append(Clause(left, right, required, holds, witness))
    return ConditionReport(variant, tuple(clauses))


def check_condition_a(params) -> ConditionReport:
    """Evaluate the eight clauses required when the public element z is not the identity."""
    if params.z.is_identity():
        raise ZIsIdentity("z = e: condition b applies")
    return _evaluate(params, "a", CONDITION_A)


def check_condition_b(params) -> ConditionReport:
    """Evaluate the six clauses required when z is the identity."""
    if not params.z.is_identity():
        raise ZNotIdentity("z != e: condition a applies")
    return _evaluate(params, "b", CONDITION_B)


def check_conditions(params) -> ConditionReport:
    return check_condition_a(params) if params.condition_variant == "a" else check_condition_b(params)


# --- selection methods ------------------------------------------------------------

FIRST, SECOND, THIRD = 1, 2, 3


@dataclasses.dataclass(frozen=True)
class SelectionOutcome:
    """Result of choosing the subsets.

    ``subsets`` is what is public.  For methods 2 and 3 a party's own anchor is
    its secret on that side, so ``secret_subsets`` replaces the public
    "anything in G" side by the singleton anchor the party actually uses.
    """

    method: int
    subsets: dict
    private_anchors: dict = dataclasses.field(default_factory=dict)

    def secret_subsets(self) -> dict[str, SubsetSpec]:
        out = dict(self.subsets)
        side = {"a1": "L_A", "a2": "R_A", "b1": "L_B", "b2": "R_B"}
        for name, anchor in self.private_anchors.items():
            out[side[name]] = SubsetSpec((anchor,), side[name], (1, 1))
        return out

    def invariants_hold(self) -> bool:
        a = self.private_anchors
        if self.method == SECOND:
            return all(commute(g, a["a1"]) for g in self.subsets["L_B"].generators) and all(
                commute(g, a["a2"]) for g in self.subsets["R_B"].generators
            )
        if self.method == THIRD:
            return all(commute(g, a["a1"]) for g in self.subsets["L_B"].generators) and all(
                commute(g, a["b2"]) for g in self.subsets["R_A"].generators
            )
        return True


def first_method(L_A: SubsetSpec, R_A: SubsetSpec, L_B: SubsetSpec, R_B: SubsetSpec,
                 Z: SubsetSpec) -> SelectionOutcome:
    subsets = dict(L_A=L_A.relabel("L_A"), R_A=R_A.relabel("R_A"), L_B=L_B.relabel("L_B"),
                   R_B=R_B.relabel("R_B"), Z=Z.relabel("Z"))
    for s in subsets.values():
        _same_platform(s.generators[0], L_A.generators[0])
    return SelectionOutcome(FIRST, subsets)


def _publish(platform: Platform, anchor: Element, rng: random.Random, k: int,
             family: Optional[Sequence[Element]]) -> tuple[Element, ...]:
    if family is not None:
        family = tuple(family)
        bad = [g for g in family if not commute(g, anchor)]
        if bad:
            raise ConditionError(f"supplied generator {bad[0]!r} does not commute with its anchor")
        return family
    if not platform.is_finite:
        raise InfinitePlatform("centralizers of braids are not computed; supply generator families")
    cent = centralizer_elements(platform, [anchor])
    nontrivial = [c for c in cent if not c.is_identity()] or cent
    return tuple(rng.sample(nontrivial, min(k, len(nontrivial))))


def _random_element(platform: Platform, rng: random.Random, length: int = 8) -> Element:
    if platform.is_finite:
        return rng.choice(list(platform.elements()))
    return sample(SubsetSpec(platform.generators(), length_range=(length, length)), rng)


def _full(platform: Platform, label: str, length_range) -> SubsetSpec:
    return SubsetSpec(platform.generators(), label, length_range,
                      signed=platform.kind is PlatformKind.BRAID)


def select_method2(platform: Platform, rng: random.Random, anchors: Optional[tuple] = None,
                   families: Optional[tuple] = None, max_generators: int = 4,
                   length_range=(1, 3), z: Optional[Element] = None) -> SelectionOutcome:
    """A picks anchors (a1, a2) and publishes L_B, R_B inside their centralizers."""
    a1, a2 = anchors if anchors is not None else (
        _random_element(platform, rng), _random_element(platform, rng))
    fam1, fam2 = families if families is not None else (None, None)
    L_B = _publish(platform, a1, rng, max_generators, fam1)
    R_B = _publish(platform, a2, rng, max_generators, fam2)
    z = z if z is not None else _random_element(platform, rng)
    subsets = dict(
        L_A=_full(platform, "L_A", (1, 1)),
        R_A=_full(platform, "R_A", (1, 1)),
        L_B=SubsetSpec(L_B, "L_B", length_range),
        R_B=SubsetSpec(R_B, "R_B", length_range),
        Z=SubsetSpec((z,), "Z"),
    )
    return SelectionOutcome(SECOND, subsets, {"a1": a1, "a2": a2})


def select_method3(platform: Platform, rng: random.Random, anchors: Optional[tuple] = None,
                   families: Optional[tuple] = None, max_generators: int = 4,
                   length_range=(1, 3), z: Optional[Element] = None) -> SelectionOutcome:
    """A picks a1 and publishes L_B in C(a1); B picks b2 and publishes R_A in C(b2)."""
    a1, b2 = anchors if anchors is not None else (
        _random_element(platform, rng), _random_element(platform, rng))
    fam1, fam2 = families if families is not None else (None, None)
    L_B = _publish(platform, a1, rng, max_generators, fam1)
    R_A = _publish(platform, b2, rng, max_generators, fam2)
    z = z if z is not None else _random_element(platform, rng)
    subsets = dict(
        L_A=_full(platform, "L_A", (1, 1)),
        R_A=SubsetSpec(R_A, "R_A", length_range),
        L_B=SubsetSpec(L_B, "L_B", length_range),
        R_B=_full(platform, "R_B", (1, 1)),
        Z=SubsetSpec((z,), "Z"),
    )
    return SelectionOutcome(THIRD, subsets, {"a1": a1, "b2": b2})


# --- platform requirements ------------------------------------------------------------


@dataclasses.dataclass(frozen=True)
class Requirement:
    name: str
    status: Optional[bool]
    note: str


def platform_report(platform: Platform, growth_length: int = 4) -> list[Requirement]:
    """Check the platform requirements that are decidable at desk scale.

    ``status`` is None where the requirement is a hardness claim that cannot be
    checked by computation.
    """
    gens = SubsetSpec(platform.generators())
    noncomm = not subsets_commute(gens, gens)[0]
    counts = []
    spec = SubsetSpec(platform.generators(), signed=platform.has_inverses)
    prev = 0
    for k in range(growth_length + 1):
        size = len(enumerate_products(spec, k, cap=1 << 16))
        counts.append(size - prev)
        prev = size
    growing = all(b > a for a, b in zip(counts[1:], counts[2:]))
    finite = platform.is_finite
    hard = None if not finite else False
    return [
        Requirement("P1", noncomm and not finite,
                    f"non-commutative={noncomm}; sphere sizes {counts[1:]}"
                    + ("; finite, so growth is eventually zero" if finite else
                       ("; growing" if growing else "; not growing"))),
        Requirement("P2", platform.has_canonical_form,
                    "Garside left canonical form" if not finite else "payload is canonical"),
        Requirement("P3", True, "multiplication and inversion are polynomial in the input size"),
        Requirement("P4", True, "LB_n/UB_n commute" if not finite else "centralizers by enumeration"),
        Requirement("P5", hard, "centralizers enumerable" if finite else "hardness is not checkable"),
        Requirement("P6", hard, "double cosets enumerable" if finite else "hardness is not checkable"),
        Requirement("P7", hard, "double cosets enumerable" if finite else "hardness is not checkable"),
        Requirement("P8", hard, "double cosets enumerable" if finite else "hardness is not checkable"),
        Requirement("P9", True, "handle reduction" if not finite else "payload comparison"),
    ]
