from __future__ import annotations

import hashlib
import random
import struct

import pytest
from hypothesis import given
from hypothesis import strategies as st

from ncsg.algebra import DecodeError, NonInvertible, Platform, SubsetSpec, canonicalize, equal, invert, serialize
from ncsg.presets import PRESETS, element_order, preset, stickel_generators
from ncsg.protocols import (
    ELEMENT,
    H,
    ConditionViolation,
    KeyPair,
    ProtocolError,
    ProtocolParams,
    RoundAmbiguous,
    Transcript,
    bit_exchange,
    challenge,
    challenge_variant,
    ka_publish,
    ka_shared,
    ka_variant_respond,
    ka_variant_shared,
    keygen,
    public_key_from_bytes,
    public_key_to_bytes,
    receive_bit,
    respond,
    respond_variant,
    rewrite,
    run_auth,
    run_ka,
    send_bit,
    verify,
    verify_variant,
)

from conftest import transcript_distributions

S6 = Platform.permutation(6)
FAST = ["perm6", "perm6-b", "matrix-2-3", "sdg-b6", "cklhc-b6", "klchkp-b6", "b5", "stickel"]


def _identity_params(platform=S6, z=None):
    e = SubsetSpec((platform.identity(),))
    z = z if z is not None else S6.cycles((1, 2, 3))
    return ProtocolParams(platform, z, e.relabel("L_A"), e.relabel("R_A"), e.relabel("L_B"),
                          e.relabel("R_B"), check=False)


def _compose(*perms):
    """Image table of the product: j goes through the rightmost factor first."""
    out = []
    for j in range(len(perms[0])):
        for p in reversed(perms):
            j = p[j]
        out.append(j)
    return tuple(out)


def test_hash_is_length_prefixed_sha256():
    e = S6.cycles((1, 2))
    data = serialize(e)
    assert H(e) == hashlib.sha256(struct.pack(">I", len(data)) + data).digest()
    assert H(e, ELEMENT) == data


def test_identity_secrets_reduce_everything_to_z():
    p = _identity_params()
    rng = random.Random(0)
    kp = keygen(p, rng)
    assert kp.public == (p.z, p.z)
    x, _ = challenge(p, rng)
    assert x == p.z
    assert respond(p, kp, x) == H(canonicalize(p.z))
    secret, K = ka_publish(p, "A", rng)
    assert K == p.z
    assert ka_shared(p, secret, K) == p.z
    assert run_auth(p, kp, rng, variant=True)[0]
    assert ka_variant_shared(p, "B", ka_variant_respond(p, K, rng)[0]) == p.z


def test_perm6_public_key_matches_direct_composition():
    p = preset("perm6")
    kp = keygen(p, random.Random(17))
    a1, a2 = kp.secret
    assert kp.public[1].payload == _compose(a1.payload, p.z.payload, a2.payload)


def test_sdg_messages_are_conjugates():
    p = preset("sdg-b6")
    rng = random.Random(4)
    kp = keygen(p, rng)
    a1, a2 = kp.secret
    assert equal(a2, invert(a1))
    assert equal(kp.public[1], a1 * p.z * invert(a1))
    x, state = challenge(p, rng)
    assert equal(state.b2, invert(state.b1))
    assert equal(x, state.b1 * p.z * invert(state.b1))


def test_challenge_is_reproducible_from_the_seed():
    p = preset("cklhc-b6")
    assert challenge(p, random.Random(8))[0].payload == challenge(p, random.Random(8))[0].payload


@pytest.mark.parametrize("name", FAST)
def test_honest_runs_succeed(name):
    p = preset(name)
    rng = random.Random(name)
    for _ in range(25):
        kp = keygen(p, rng, variant=True)
        assert run_auth(p, kp, rng)[0]
        assert run_auth(p, kp, rng, variant=True)[0]
        ka, kb = run_ka(p, rng)
        assert equal(ka, kb)
        ka, kb = run_ka(p, rng, variant=True)
        assert equal(ka, kb)


@pytest.mark.parametrize("name", ["perm6-method2", "perm6-method3", "matrix-2-3-method2"])
def test_selection_presets_run_honestly(name):
    p = preset(name, seed=3)
    rng = random.Random(1)
    for _ in range(20):
        kp = keygen(p, rng)
        assert run_auth(p, kp, rng)[0]
        assert equal(*run_ka(p, rng))


def test_hashed_shared_key_matches_on_both_sides():
    p = preset("matrix-2-3")
    rng = random.Random(2)
    sa, K_A = ka_publish(p, "A", rng)
    sb, K_B = ka_publish(p, "B", rng)
    assert ka_shared(p, sa, K_B, hashed=True) == ka_shared(p, sb, K_A, hashed=True)


def test_klchkp_key_is_nested_conjugate():
    p = preset("klchkp-b6")
    rng = random.Random(6)
    (a1, _), K_A = ka_publish(p, "A", rng)
    (b1, _), K_B = ka_publish(p, "B", rng)
    kappa = ka_shared(p, (a1, invert(a1)), K_B)
    assert equal(kappa, a1 * b1 * p.z * invert(b1) * invert(a1))


def _power(m, k):
    result, base = m.platform.identity(), m
    while k:
        if k & 1:
            result = result * base
        base, k = base * base, k >> 1
    return result


def _log(base, target):
    x = base.platform.identity()
    for k in range(element_order(base) + 1):
        if x == target:
            return k
        x = x * base
    raise AssertionError("not a power")


def test_stickel_variant_key_is_a_power_product():
    p = preset("stickel")
    _, a, b = stickel_generators()
    rng = random.Random(12)
    for _ in range(10):
        _, K_A = ka_publish(p, "A", rng, variant=True)
        (b1, b2), K_B = ka_variant_respond(p, K_A, rng)
        v, w = _log(a, b1), _log(b, b2)
        expected = _power(a, v) * _power(b, w)
        assert equal(ka_variant_shared(p, "B", (b1, b2)), expected)
        assert equal(ka_variant_shared(p, "A", _, K_B), expected)


def test_rewritten_challenge_gives_the_same_response():
    p = preset("sdg-b6")
    rng = random.Random(1)
    kp = keygen(p, rng)
    x, _ = challenge(p, rng)
    x2 = rewrite(x, rng, insertions=4)
    assert x2.payload != x.payload
    assert respond(p, kp, x) == respond(p, kp, x2)


def test_flipped_response_is_rejected():
    p = preset("perm6")
    rng = random.Random(3)
    kp = keygen(p, rng)
    x, state = challenge(p, rng)
    w = bytearray(respond(p, kp, x))
    w[0] ^= 1
    assert not verify(p, state, kp.public, bytes(w))


def test_unrelated_key_is_accepted_only_when_the_hash_inputs_agree():
    p = preset("perm6")
    rng = random.Random(5)
    for _ in range(50):
        kp, other = keygen(p, rng), keygen(p, rng)
        x, state = challenge(p, rng)
        a1, a2 = other.secret
        same = equal(a1 * x * a2, state.b1 * kp.public[1] * state.b2)
        assert verify(p, state, kp.public, respond(p, other, x)) == same


def test_variant_needs_invertible_secrets():
    p = preset("matrix-2-3")
    s = SubsetSpec((p.platform.matrix_of([[1, 0], [0, 0]]),), "L_A")
    bad = ProtocolParams(p.platform, p.z, s, p.R_A, p.L_B, p.R_B, check=False)
    kp = keygen(bad, random.Random(0))
    x, _ = challenge_variant(bad, kp.public, random.Random(0))
    with pytest.raises(NonInvertible):
        respond_variant(bad, kp, x)
    with pytest.raises(NonInvertible):
        keygen(bad, random.Random(0), variant=True)


def test_protocol_depends_on_the_commutation_clauses():
    p = preset("perm6")
    clash = SubsetSpec((S6.cycles((2, 3)), S6.cycles((3, 4))), "L_B", (1, 4))
    bad = ProtocolParams(S6, p.z, p.L_A, p.R_A, clash, p.R_B, check=False)
    assert not bad.report().all_hold
    rng = random.Random(0)
    outcomes = [run_auth(bad, keygen(bad, rng), rng)[0] for _ in range(60)]
    assert not all(outcomes)
    with pytest.raises(ConditionViolation):
        ProtocolParams(S6, p.z, p.L_A, p.R_A, clash, p.R_B)


def test_condition_variant_must_match_z():
    p = preset("perm6")
    with pytest.raises(ProtocolError):
        ProtocolParams(S6, p.z, p.L_A, p.R_A, p.L_B, p.R_B, condition_variant="b")


def test_element_identity_hash_mode():
    p = preset("perm6")
    q = ProtocolParams(S6, p.z, p.L_A, p.R_A, p.L_B, p.R_B, hash_mode=ELEMENT)
    rng = random.Random(0)
    kp = keygen(q, rng)
    accepted, x, w = run_auth(q, kp, rng)
    assert accepted and w == serialize(canonicalize(kp.secret[0] * x * kp.secret[1]))


def test_simulator_distribution_equals_honest_distribution():
    p = preset("perm6")
    kp = keygen(p, random.Random(21))
    honest, simulated, pairs = transcript_distributions(p, kp)
    assert pairs <= 10**4
    assert honest == simulated


# --- bit exchange ------------------------------------------------------------------------------


def test_zero_bits():
    p = preset("b5")
    ka, kb = run_ka(p, random.Random(0))
    assert bit_exchange(ka, kb, 0, random.Random(0)) == ([], [], [])


def test_eight_bits_on_b5():
    p = preset("b5")
    rng = random.Random(7)
    ka, kb = run_ka(p, rng)
    sent, received, wire = bit_exchange(kb, ka, 8, rng)
    assert sent == received and len(sent) == 8
    for bit, r in zip(sent, wire):
        if bit == 0:
            assert equal(r, ka) and r.payload != canonicalize(ka).payload


def test_equal_rewrite_decodes_to_the_fixed_bit():
    p = preset("b5")
    kappa = run_ka(p, random.Random(1))[0]
    r = send_bit(kappa, 1, 1, random.Random(2))
    assert receive_bit(kappa, r, 1) == 1


def test_decoy_equal_to_the_key_is_ambiguous():
    s3 = Platform.permutation(2)
    kappa = s3.identity()
    with pytest.raises(RoundAmbiguous):
        for seed in range(100):
            send_bit(kappa, 1, 0, random.Random(seed))


# --- serialization ---------------------------------------------------------------------------


@pytest.mark.parametrize("name", sorted(PRESETS))
def test_params_round_trip(name):
    p = preset(name)
    data = p.to_bytes()
    assert data[:5] == b"NCSG1" and data[5] == 1
    q = ProtocolParams.from_bytes(data, check=p.check)
    assert q.to_bytes() == data
    assert q.digest() == p.digest()


def test_params_file_rejects_garbage():
    with pytest.raises(DecodeError):
        ProtocolParams.from_bytes(b"NCSG1\x09" + b"\x00" * 10)
    with pytest.raises(DecodeError):
        ProtocolParams.from_bytes(preset("perm6").to_bytes()[:-3])


@given(st.integers(0, 2**32))
def test_keypair_and_public_key_round_trip(seed):
    p = preset("sdg-b6")
    kp = keygen(p, random.Random(seed))
    back = KeyPair.from_bytes(kp.to_bytes())
    assert back == kp
    assert public_key_from_bytes(public_key_to_bytes(kp.public)) == kp.public
    assert public_key_from_bytes(kp.to_bytes()) == kp.public


def test_transcript_round_trip():
    t = Transcript()
    t.add(0x10, b"abc")
    t.add_element(0x11, S6.cycles((1, 2)))
    assert Transcript.from_bytes(t.to_bytes()).records == t.records
