"""Named parameter sets, including the schemes the generic protocols specialise to."""

from __future__ import annotations

import random
from typing import Callable

from .algebra import Element, Platform, SubsetSpec
from .braid import standard_commuting_subgroups
from .conditions import SelectionOutcome, select_method2, select_method3
from .protocols import INVERSE, ProtocolError, ProtocolParams


def _s(label: str, *gens: Element, length_range=(1, 4), signed: bool = False) -> SubsetSpec:
    return SubsetSpec(tuple(gens), label, length_range, signed)


def perm6(seed: int = 0) -> ProtocolParams:
    """Permutations of six points: L_A = Sym{1,2,3} commutes with L_B = Sym{4,5,6}."""
    g = Platform.permutation(6)
    c = g.cycles
    return ProtocolParams(
        g,
        z=c((1, 4), (2, 5), (3, 6)),
        L_A=_s("L_A", c((1, 2)), c((2, 3))),
        R_A=_s("R_A", c((3, 4))),
        L_B=_s("L_B", c((4, 5)), c((5, 6))),
        R_B=_s("R_B", c((1, 2)), c((5, 6))),
        name="perm6",
    )


def perm6_condition_b(seed: int = 0) -> ProtocolParams:
    g = Platform.permutation(6)
    c = g.cycles
    return ProtocolParams(
        g,
        z=g.identity(),
        L_A=_s("L_A", c((1, 2))),
        R_A=_s("R_A", c((2, 3))),
        L_B=_s("L_B", c((3, 4))),
        R_B=_s("R_B", c((1, 4))),
        condition_variant="b",
        name="perm6-b",
    )


def matrix_2_3(seed: int = 0) -> ProtocolParams:
    """2x2 matrices mod 3.  A's subsets are invertible; B's include singular matrices."""
    g = Platform.matrix(2, 3)
    m = g.matrix_of
    return ProtocolParams(
        g,
        z=m([[1, 0], [1, 1]]),
        L_A=_s("L_A", m([[1, 0], [0, 2]]), m([[2, 0], [0, 1]])),
        R_A=_s("R_A", m([[1, 1], [0, 1]]), m([[2, 1], [0, 2]])),
        L_B=_s("L_B", m([[0, 0], [0, 1]]), m([[1, 0], [0, 0]]), m([[2, 0], [0, 1]])),
        R_B=_s("R_B", m([[0, 1], [0, 0]]), m([[1, 2], [0, 1]])),
        name="matrix-2-3",
    )


def _mixed_braid(n: int) -> Element:
    # conjugation by s1...s(n-1) shifts indices, so z commutes with neither LB_n nor UB_n
    return Platform.braid(n).word(*range(1, n), n // 2)


def _braid_params(n: int, name: str, shape: str = "independent", length_range=(1, 5),
                  shpilrain: bool = False) -> ProtocolParams:
    g = Platform.braid(n)
    lb, ub = standard_commuting_subgroups(n)
    lb = SubsetSpec(lb.generators, length_range=length_range, signed=True)
    ub = SubsetSpec(ub.generators, length_range=length_range, signed=True)
    if shpilrain:
        left_a, right_a, left_b, right_b = lb, ub, ub, lb
    else:
        left_a, right_a, left_b, right_b = lb, lb, ub, ub
    return ProtocolParams(
        g,
        z=_mixed_braid(n),
        L_A=left_a.relabel("L_A"),
        R_A=right_a.relabel("R_A"),
        L_B=left_b.relabel("L_B"),
        R_B=right_b.relabel("R_B"),
        secret_shape=shape,
        name=name,
        check=not shpilrain,
    )


def sdg(n: int = 6) -> ProtocolParams:
    """Conjugacy-based authentication: a2 = a1^-1 and b2 = b1^-1 over LB_n / UB_n."""
    return _braid_params(n, f"sdg-b{n}", INVERSE)


def cklhc(n: int = 6) -> ProtocolParams:
    return _braid_params(n, f"cklhc-b{n}")


def klchkp(n: int = 6) -> ProtocolParams:
    return _braid_params(n, f"klchkp-b{n}", INVERSE)


def shpilrain(n: int = 6) -> ProtocolParams:
    """L_A = R_B = LB_n and L_B = R_A = UB_n.

    This choice makes [L_A, R_A] = 1, so condition a cannot hold and the
    parameters are built unchecked.
    """
    return _braid_params(n, f"shpilrain-b{n}", shpilrain=True)


def braid5() -> ProtocolParams:
    """B_5 with single-generator-wide subsets (LB_5 alone is abelian)."""
    g = Platform.braid(5)
    w = g.word
    return ProtocolParams(
        g,
        z=_mixed_braid(5),
        L_A=_s("L_A", w(1), length_range=(1, 4), signed=True),
        R_A=_s("R_A", w(2), length_range=(1, 4), signed=True),
        L_B=_s("L_B", w(3), w(4), length_range=(1, 4), signed=True),
        R_B=_s("R_B", w(4), length_range=(1, 4), signed=True),
        name="b5",
    )


STICKEL_P = 101


def stickel_generators():
    g = Platform.matrix(2, STICKEL_P)
    a = g.matrix_of([[1, 1], [0, 1]])
    b = g.matrix_of([[1, 0], [1, 1]])
    return g, a, b


def element_order(e: Element, limit: int = 1 << 16) -> int:
    x, k = e, 1
    while not x.is_identity():
        x, k = x * e, k + 1
        if k > limit:
            raise ValueError("element order exceeds limit")
    return k


def stickel(name: str = "stickel") -> ProtocolParams:
    """z = e, secrets a^v and b^w with 0 < v < ord(a), 0 < w < ord(b)."""
    g, a, b = stickel_generators()
    pa = _s("L_A", a, length_range=(1, element_order(a) - 1))
    pb = _s("R_A", b, length_range=(1, element_order(b) - 1))
    return ProtocolParams(
        g,
        z=g.identity(),
        L_A=pa,
        R_A=pb,
        L_B=pa.relabel("L_B"),
        R_B=pb.relabel("R_B"),
        condition_variant="b",
        name=name,
    )


def from_selection(outcome: SelectionOutcome, name: str, length_range=(1, 3)) -> ProtocolParams:
    subsets = outcome.secret_subsets()
    return ProtocolParams(
        outcome.subsets["Z"].platform,
        z=outcome.subsets["Z"].generators[0],
        L_A=subsets["L_A"],
        R_A=subsets["R_A"],
        L_B=subsets["L_B"],
        R_B=subsets["R_B"],
        selection_method=outcome.method,
        name=name,
        selection=outcome,
    )


def _by_selection(platform: Platform, method: int, seed: int, name: str,
                  attempts: int = 200) -> ProtocolParams:
    rng = random.Random(seed)
    select = select_method2 if method == 2 else select_method3
    for _ in range(attempts):
        outcome = select(platform, rng)
        try:
            return from_selection(outcome, name)
        except (ProtocolError, ValueError):
            continue
    raise RuntimeError(f"no condition-satisfying selection for {name} in {attempts} attempts")


PRESETS: dict[str, Callable[[int], ProtocolParams]] = {
    "perm6": perm6,
    "perm6-b": perm6_condition_b,
    "matrix-2-3": matrix_2_3,
    "sdg-b6": lambda seed=0: sdg(6),
    "sdg-b8": lambda seed=0: sdg(8),
    "b5": lambda seed=0: braid5(),
    "cklhc-b6": lambda seed=0: cklhc(6),
    "klchkp-b6": lambda seed=0: klchkp(6),
    "shpilrain-b6": lambda seed=0: shpilrain(6),
    "stickel": lambda seed=0: stickel(),
    "perm6-method2": lambda seed=0: _by_selection(Platform.permutation(6), 2, seed, "perm6-method2"),
    "perm6-method3": lambda seed=0: _by_selection(Platform.permutation(6), 3, seed, "perm6-method3"),
    "matrix-2-3-method2": lambda seed=0: _by_selection(Platform.matrix(2, 3), 2, seed,
                                                       "matrix-2-3-method2"),
    "matrix-2-3-method3": lambda seed=0: _by_selection(Platform.matrix(2, 3), 3, seed,
                                                       "matrix-2-3-method3"),
}

DESCRIPTIONS = {
    "perm6": "S_6, condition a, Sym{1,2,3} / Sym{4,5,6} commuting blocks",
    "perm6-b": "S_6, condition b (z = e), single transpositions",
    "matrix-2-3": "M_2(Z_3) semigroup, condition a; B's subsets contain singular matrices",
    "sdg-b6": "B_6, LB/UB subgroups, a2 = a1^-1 and b2 = b1^-1 (conjugacy-based)",
    "sdg-b8": "B_8 version of sdg-b6",
    "b5": "B_5, sigma_1 / sigma_2 against sigma_3, sigma_4; used for the bit exchange",
    "cklhc-b6": "B_6, LB/UB subgroups, independent left and right secrets",
    "klchkp-b6": "B_6, LB/UB subgroups, a2 = a1^-1 and b2 = b1^-1",
    "shpilrain-b6": "B_6, L_A = R_B = LB, L_B = R_A = UB (condition a does not hold)",
    "stickel": "2x2 matrices mod 101, z = e, secrets a^v, b^w",
    "perm6-method2": "S_6, A publishes L_B, R_B inside centralizers of her anchors",
    "perm6-method3": "S_6, A publishes L_B in C(a1), B publishes R_A in C(b2)",
    "matrix-2-3-method2": "M_2(Z_3), second selection method",
    "matrix-2-3-method3": "M_2(Z_3), third selection method",
}


def preset(name: str, seed: int = 0) -> ProtocolParams:
    try:
        factory = PRESETS[name]
    except KeyError:
        raise KeyError(f"unknown preset {name!r}; known: {', '.join(PRESETS)}") from None
    return factory(seed)
