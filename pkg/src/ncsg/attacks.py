"""
Desk-scale solvers for the decomposition problem and key-recovery attacks.

Attacks only succeed on small platforms where centralizers and double cosets
can be enumerated.  Every reported success has been checked end to end: a
forged prover key must pass fresh challenges, and a recovered responder key
must reproduce the honest shared key.
"""

from __future__ import annotations

import dataclasses
import random
from typing import Iterator, Optional, Sequence

from .algebra import (
    Element,
    InfinitePlatform,
    Platform,
    SubsetSpec,
    centralizer_elements,
    commute,
    enumerate_products,
    equal,
    generated_subgroup,
    invert,
    is_invertible,
    serialize,
)
from .protocols import (
    KeyPair,
    ProtocolParams,
    challenge,
    challenge_variant,
    respond,
    respond_variant,
    verify,
    verify_variant,
)

DEFAULT_CAP = 10**6


class AttackError(Exception):
    pass


class SearchSpaceTooLarge(AttackError):
    pass


class NotFound(AttackError):
    pass


@dataclasses.dataclass(frozen=True)
class DecompositionInstance:
    """Find f in the left subset and g in the right subset with f x g = y."""

    x: Element
    y: Element
    left_subset: SubsetSpec
    right_subset: SubsetSpec
    left_bound: int
    right_bound: int

    @property
    def platform(self) -> Platform:
        return self.x.platform

    def is_solution(self, f: Element, g: Element) -> bool:
        return equal(f * self.x * g, self.y)


def _members(subset: SubsetSpec, bound: int, cap: int) -> list[Element]:
    try:
        return enumerate_products(subset, bound, cap=cap)
    except OverflowError:
        raise SearchSpaceTooLarge(f"{subset.label} has more than {cap} products of length <= {bound}")


def brute_force_dp(inst: DecompositionInstance, cap: int = DEFAULT_CAP):
    """Exhaustive solution of a bounded decomposition instance, or None.

    Candidates are tried in shortlex order of their generator words, left
    factor first; the first pair that works is returned.
    """
    left = _members(inst.left_subset, inst.left_bound, cap)
    right = _members(inst.right_subset, inst.right_bound, cap)
    if len(left) * len(right) > cap:
        raise SearchSpaceTooLarge(f"{len(left)} x {len(right)} candidate pairs exceed cap {cap}")
    for f in left:
        fx = f * inst.x
        for g in right:
            if equal(fx * g, inst.y):
                return f, g
    return None


def _coset_solutions(w: Element, target: Element, left: Sequence[Element],
                     right: Sequence[Element]) -> Iterator[tuple[tuple[Element, Element], int]]:
    """Yield solutions of x w y = target with their running search cost."""
    cost = 0
    if w.platform.has_inverses:
        index = {}
        for y in right:
            index.setdefault(y, y)
        for x in left:
            cost += 1
            y = invert(x * w) * target
            if y in index:
                yield (x, index[y]), cost
    else:
        for x in left:
            xw = x * w
            for y in right:
                cost += 1
                if equal(xw * y, target):
                    yield (x, y), cost


def double_coset_search(w: Element, w_target: Element, H1, H2, bounds=(4, 4),
                        cap: int = DEFAULT_CAP):
    """Find x in H1 and y in H2 with x w y = w_target, or None.

    ``H1``/``H2`` are subsets (enumerated up to ``bounds``) or explicit member lists.
    """
    left = H1 if isinstance(H1, (list, tuple)) else _members(H1, bounds[0], cap)
    right = H2 if isinstance(H2, (list, tuple)) else _members(H2, bounds[1], cap)
    if len(left) * len(right) > cap:
        raise SearchSpaceTooLarge(f"{len(left)} x {len(right)} candidate pairs exceed cap {cap}")
    for pair, _ in _coset_solutions(w, w_target, left, right):
        return pair
    return None


# --- attacks on the protocols ---------------------------------------------------------------


@dataclasses.dataclass(frozen=True)
class AttackResult:
    target: str
    equivalent_pair: tuple[Element, Element]
    verified_by: str
    verified: bool
    search_cost: int
    search_space: int

    def report(self) -> str:
        a, b = self.equivalent_pair
        return "\n".join([
            f"target:        {self.target}",
            f"pair[0]:       {a!r}  ({serialize(a).hex()})",
            f"pair[1]:       {b!r}  ({serialize(b).hex()})",
            f"search cost:   {self.search_cost} of {self.search_space} candidate pairs",
            f"verification:  {self.verified_by}: {'PASS' if self.verified else 'FAIL'}",
        ])


def _public_subsets(params: ProtocolParams) -> dict[str, SubsetSpec]:
    if params.selection is not None:
        return params.selection.subsets
    return {"L_A": params.L_A, "R_A": params.R_A, "L_B": params.L_B, "R_B": params.R_B}


def commuting_pool(platform: Platform, targets: Sequence[Element],
                   bound: Optional[int] = None) -> list[Element]:
    """Elements commuting with all targets.

    Exact centralizer on finite platforms; on braid groups only the braids of
    length <= ``bound`` in the Artin generators are tried.
    """
    if platform.is_finite:
        return centralizer_elements(platform, targets)
    if bound is None:
        raise InfinitePlatform("centralizers of braids need a length bound")
    gens = SubsetSpec(platform.generators())
    return [c for c in enumerate_products(gens, bound) if all(commute(c, t) for t in targets)]


def _closure(subset: SubsetSpec, bound: Optional[int]) -> list[Element]:
    if subset.platform.is_finite and bound is None:
        return generated_subgroup(subset)
    if bound is None:
        raise InfinitePlatform("subsets of braid groups need a length bound")
    return enumerate_products(subset, bound)


def _a_key_space(params: ProtocolParams, bound: Optional[int]):
    pub = _public_subsets(params)
    g = params.platform
    left = commuting_pool(g, pub["L_B"].generators, bound)
    if params.selection_method == 3:
        # a2 is drawn from the published R_A
        right = _closure(pub["R_A"], bound)
    else:
        right = commuting_pool(g, pub["R_B"].generators, bound)
    return left, right


def _impersonates(params: ProtocolParams, forged: KeyPair, rng: random.Random, variant: bool,
                  rounds: int) -> bool:
    for _ in range(rounds):
        if variant:
            x, state = challenge_variant(params, forged.public, rng)
            if not verify_variant(params, state, respond_variant(params, forged, x)):
                return False
        else:
            x, state = challenge(params, rng)
            if not verify(params, state, forged.public, respond(params, forged, x)):
                return False
    return True


def attack_A_key(public_key, params: ProtocolParams, rng: random.Random, variant: bool = False,
                 bound: Optional[int] = None, rounds: int = 8) -> AttackResult:
    """Recover a pair equivalent to the prover's secret from z' = a1 z a2.

    Searches C(L_B) z C(R_B), or C(L_B) z <R_A> under the third selection
    method, and accepts a candidate only if it answers fresh challenges.
    """
    z, z_prime = public_key
    left, right = _a_key_space(params, bound)
    if variant:
        left = [x for x in left if is_invertible(x)]
        right = [y for y in right if is_invertible(y)]
    cost = 0
    for (a1, a2), cost in _coset_solutions(z, z_prime, left, right):
        forged = KeyPair((a1, a2), (z, z_prime))
        if _impersonates(params, forged, rng, variant, rounds):
            return AttackResult("A-key", (a1, a2), "impersonation-accept", True, cost,
                                len(left) * len(right))
    raise NotFound(f"no verified equivalent A key among {len(left) * len(right)} candidates")


def attack_B_key(K_B: Element, K_A: Element, honest_kappa: Element, params: ProtocolParams,
                 bound: Optional[int] = None) -> AttackResult:
    """Recover a pair equivalent to the responder's secret from K_B = b1 z b2.

    The candidate is accepted only if b1' K_A b2' equals the honest shared key.
    """
    pub = _public_subsets(params)
    left = _closure(pub["L_B"], bound)
    if params.selection_method == 3:
        right = commuting_pool(params.platform, pub["R_A"].generators, bound)
    else:
        right = _closure(pub["R_B"], bound)
    cost = 0
    for (b1, b2), cost in _coset_solutions(params.z, K_B, left, right):
        if equal(b1 * K_A * b2, honest_kappa):
            return AttackResult("B-key", (b1, b2), "shared-key-match", True, cost,
                                len(left) * len(right))
    raise NotFound(f"no verified equivalent B key among {len(left) * len(right)} candidates")


def attack_variant_B(z_prime: Element, K_B: Element, honest_kappa: Element, params: ProtocolParams,
                     bound: Optional[int] = None) -> AttackResult:
    """Find invertible (a1', a2') with a1'^-1 z' a2'^-1 = z in the variant protocols.

    Searches u z' v = z over the same spaces as the A-key attack (they are
    closed under inversion) and checks a1'^-1 K_B a2'^-1 against the honest key.
    """
    left, right = _a_key_space(params, bound)
    left = [x for x in left if is_invertible(x)]
    right = [y for y in right if is_invertible(y)]
    cost = 0
    for (u, v), cost in _coset_solutions(z_prime, params.z, left, right):
        if equal(u * K_B * v, honest_kappa):
            return AttackResult("shared-key", (invert(u), invert(v)), "shared-key-match", True, cost,
                                len(left) * len(right))
    raise NotFound(f"no verified invertible pair among {len(left) * len(right)} candidates")
