from __future__ import annotations

import os
import sys

from hypothesis import HealthCheck, settings
from hypothesis import strategies as st

from ncsg.algebra import Platform

settings.register_profile(
    "default", max_examples=60, deadline=None, suppress_health_check=[HealthCheck.too_slow]
)
settings.register_profile("ci", max_examples=300, deadline=None)
settings.load_profile(os.environ.get("HYPOTHESIS_PROFILE", "default"))


def braid_words(n: int, max_length: int = 20):
    letter = st.integers(1, n - 1).flatmap(lambda i: st.sampled_from((i, -i)))
    return st.lists(letter, max_size=max_length).map(tuple)


@st.composite
def braid_elements(draw, n: int = 4, max_length: int = 12):
    return Platform.braid(n).element(draw(braid_words(n, max_length)))


@st.composite
def permutations(draw, degree: int = 5):
    return Platform.permutation(degree).element(draw(st.permutations(range(degree))))


@st.composite
def matrices(draw, dim: int = 2, p: int = 3):
    entries = draw(st.lists(st.integers(0, p - 1), min_size=dim * dim, max_size=dim * dim))
    return Platform.matrix(dim, p).element(entries)


def elements_of(kind: str):
    return {"braid": braid_elements(), "perm": permutations(), "matrix": matrices()}[kind]


def word_distribution(subset):
    """Exact sampling distribution of ``sample(subset, rng)`` as {element: probability}."""
    from collections import defaultdict
    from fractions import Fraction

    from ncsg.algebra import product, words

    lo, hi = subset.length_range
    letters = len(subset.generators) * (2 if subset.signed else 1)
    dist = defaultdict(Fraction)
    for k in range(lo, hi + 1):
        weight = Fraction(1, (hi - lo + 1) * letters**k)
        for seq in words(subset, k):
            dist[product(seq, subset.platform)] += weight
    return dict(dist)


def transcript_distributions(params, keypair):
    """Honest and simulated (x, w) distributions over every verifier secret pair."""
    from collections import defaultdict
    from fractions import Fraction

    from ncsg.algebra import canonicalize, serialize
    from ncsg.protocols import respond, simulate_transcript

    honest, simulated = defaultdict(Fraction), defaultdict(Fraction)
    left, right = word_distribution(params.L_B), word_distribution(params.R_B)
    for b1, p1 in left.items():
        for b2, p2 in right.items():
            x = canonicalize(b1 * params.z * b2)
            honest[(serialize(x), respond(params, keypair, x))] += p1 * p2
            sx, sw = simulate_transcript(params, keypair.public, b1, b2)
            simulated[(serialize(sx), sw)] += p1 * p2
    return dict(honest), dict(simulated), len(left) * len(right)


def pytest_terminal_summary(terminalreporter):
    module = sys.modules.get("test_acceptance")
    results = getattr(module, "RESULTS", None)
    if not results:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(results):
        terminalreporter.write_line(results[number])
