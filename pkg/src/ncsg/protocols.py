"""
Authentication and key agreement over a platform semigroup.

Public element ``z`` and subsets ``L_A, R_A`` (prover / initiator) and
``L_B, R_B`` (verifier / responder) are fixed by :class:`ProtocolParams`.

* auth:          z' = a1 z a2,  x = b1 z b2,   w = H(a1 x a2)        check w = H(b1 z' b2)
* auth-variant:  z' = a1 z a2,  x = b1 z' b2,  w = H(a1^-1 x a2^-1)  check w = H(b1 z b2)
* ka:            K_A = a1 z a2, K_B = b1 z b2, kappa = a1 K_B a2 = b1 K_A b2
* ka-variant:    K_A = a1 z a2, K_B = b1 K_A b2, kappa = a1^-1 K_B a2^-1 = b1 z b2

Every transmitted element is canonicalized first.
"""

from __future__ import annotations

import dataclasses
import hashlib
import random
import struct
from typing import Optional

from . import braid
from .algebra import (
    DecodeError,
    Element,
    NonInvertible,
    Platform,
    PlatformKind,
    SubsetSpec,
    canonicalize,
    equal,
    invert,
    read_element,
    sample,
    serialize,
)
from .conditions import ConditionReport, SelectionOutcome, check_conditions

PARAMS_MAGIC = b"NCSG1"
KEYPAIR_MAGIC = b"NCKP1"
PUBLIC_MAGIC = b"NCPK1"
FORMAT_VERSION = 1

BITSTRING = "bitstring"
ELEMENT = "element-identity"
HASH_MODES = (BITSTRING, ELEMENT)
_TRAILER = ">cBBBH"  # condition variant, selection method, hash mode, secret shape, name length

INDEPENDENT = "independent"
INVERSE = "inverse"


class ProtocolError(Exception):
    pass


class ConditionViolation(ProtocolError):
    def __init__(self, report: ConditionReport):
        self.report = report
        failing = ", ".join(c.label for c in report.failing())
        super().__init__(f"condition {report.variant} fails: {failing}")


class RoundAmbiguous(ProtocolError):
    pass


def H(e: Element, mode: str = BITSTRING) -> bytes:
    """Hash of an element: SHA-256 over the length-prefixed canonical serialization.

    In element-identity mode the canonical serialization itself is returned.
    """
    data = serialize(e)
    if mode == ELEMENT:
        return data
    return hashlib.sha256(struct.pack(">I", len(data)) + data).digest()


@dataclasses.dataclass(frozen=True)
class ProtocolParams:
    platform: Platform
    z: Element
    L_A: SubsetSpec
    R_A: SubsetSpec
    L_B: SubsetSpec
    R_B: SubsetSpec
    Z: Optional[SubsetSpec] = None
    condition_variant: str = "a"
    selection_method: int = 1
    hash_mode: str = BITSTRING
    secret_shape: str = INDEPENDENT
    name: str = ""
    check: bool = dataclasses.field(default=True, compare=False, repr=False)
    selection: Optional[SelectionOutcome] = dataclasses.field(default=None, compare=False, repr=False)

    def __post_init__(self):
        for s in (self.L_A, self.R_A, self.L_B, self.R_B) + ((self.Z,) if self.Z else ()):
            if s.platform != self.platform:
                raise ProtocolError(f"subset {s.label} is not on {self.platform}")
        if self.z.platform != self.platform:
            raise ProtocolError("z is not on the protocol platform")
        if self.condition_variant not in ("a", "b"):
            raise ProtocolError(f"unknown condition variant {self.condition_variant!r}")
        if self.selection_method not in (1, 2, 3):
            raise ProtocolError(f"unknown selection method {self.selection_method}")
        if self.hash_mode not in HASH_MODES:
            raise ProtocolError(f"unknown hash mode {self.hash_mode!r}")
        if self.secret_shape not in (INDEPENDENT, INVERSE):
            raise ProtocolError(f"unknown secret shape {self.secret_shape!r}")
        z_is_e = self.z.is_identity()
        if self.check:
            if z_is_e != (self.condition_variant == "b"):
                raise ProtocolError("condition a needs z != e and condition b needs z = e")
            report = check_conditions(self)
            if not report.all_hold:
                raise ConditionViolation(report)

    def report(self) -> ConditionReport:
        return check_conditions(self)

    def hash(self, e: Element) -> bytes:
        return H(e, self.hash_mode)

    def to_bytes(self) -> bytes:
        out = PARAMS_MAGIC + bytes([FORMAT_VERSION]) + self.platform.to_bytes() + serialize(self.z)
        for s in (self.L_A, self.R_A, self.L_B, self.R_B):
            out += s.to_bytes()
        out += b"\x01" + self.Z.to_bytes() if self.Z is not None else b"\x00"
        name = self.name.encode()
        out += struct.pack(
            _TRAILER,
            self.condition_variant.encode(),
            self.selection_method,
            HASH_MODES.index(self.hash_mode),
            (INDEPENDENT, INVERSE).index(self.secret_shape),
            len(name),
        )
        return out + name

    @classmethod
    def from_bytes(cls, data: bytes, check: bool = True) -> ProtocolParams:
        if data[:5] != PARAMS_MAGIC:
            raise DecodeError("not a params file")
        if len(data) < 6 or data[5] != FORMAT_VERSION:
            raise DecodeError("unsupported params format version")
        platform, pos = Platform.read(data, 6)
        z, pos = read_element(data, pos)
        subsets = []
        for _ in range(4):
            s, pos = SubsetSpec.read(data, pos)
            subsets.append(s)
        Z = None
        if data[pos:pos + 1] == b"\x01":
            Z, pos = SubsetSpec.read(data, pos + 1)
        else:
            pos += 1
        try:
            variant, method, hmode, shape, nlen = struct.unpack_from(_TRAILER, data, pos)
            pos += struct.calcsize(_TRAILER)
            name = data[pos:pos + nlen].decode()
            hmode, shape = HASH_MODES[hmode], (INDEPENDENT, INVERSE)[shape]
        except (struct.error, IndexError, UnicodeDecodeError) as exc:
            raise DecodeError(f"bad params trailer: {exc}") from None
        if pos + nlen != len(data):
            raise DecodeError("trailing bytes in params file")
        return cls(platform, z, *subsets, Z=Z, condition_variant=variant.decode(),
                   selection_method=method, hash_mode=hmode, secret_shape=shape, name=name,
                   check=check)

    def digest(self) -> bytes:
        return hashlib.sha256(self.to_bytes()).digest()


def draw_pair(left: SubsetSpec, right: SubsetSpec, shape: str, rng: random.Random):
    first = sample(left, rng)
    second = invert(first) if shape == INVERSE else sample(right, rng)
    return first, second


def _require_invertible(*elements: Element) -> tuple[Element, ...]:
    try:
        return tuple(invert(e) for e in elements)
    except NonInvertible:
        raise NonInvertible("variant protocols need invertible secrets") from None


@dataclasses.dataclass(frozen=True)
class KeyPair:
    secret: tuple[Element, Element]
    public: tuple[Element, Element]

    def to_bytes(self) -> bytes:
        return KEYPAIR_MAGIC + bytes([FORMAT_VERSION]) + b"".join(
            serialize(e) for e in self.secret + self.public)

    @classmethod
    def from_bytes(cls, data: bytes) -> KeyPair:
        if data[:5] != KEYPAIR_MAGIC or len(data) < 6 or data[5] != FORMAT_VERSION:
            raise DecodeError("not a keypair file")
        pos, items = 6, []
        for _ in range(4):
            e, pos = read_element(data, pos)
            items.append(e)
        if pos != len(data):
            raise DecodeError("trailing bytes in keypair file")
        return cls((items[0], items[1]), (items[2], items[3]))


def public_key_to_bytes(public) -> bytes:
    return PUBLIC_MAGIC + bytes([FORMAT_VERSION]) + b"".join(serialize(e) for e in public)


def public_key_from_bytes(data: bytes) -> tuple[Element, Element]:
    """Read a public-key file, or take the public half of a keypair file."""
    if data[:5] == KEYPAIR_MAGIC:
        return KeyPair.from_bytes(data).public
    if data[:5] != PUBLIC_MAGIC or len(data) < 6 or data[5] != FORMAT_VERSION:
        raise DecodeError("not a public-key file")
    z, pos = read_element(data, 6)
    z_prime, pos = read_element(data, pos)
    if pos != len(data):
        raise DecodeError("trailing bytes in public-key file")
    return z, z_prime


def keygen(params: ProtocolParams, rng: random.Random, variant: bool = False) -> KeyPair:
    """Draw a1 from L_A and a2 from R_A and publish z' = a1 z a2 in canonical form."""
    a1, a2 = draw_pair(params.L_A, params.R_A, params.secret_shape, rng)
    if variant:
        _require_invertible(a1, a2)
    return KeyPair((a1, a2), (params.z, canonicalize(a1 * params.z * a2)))


# --- authentication ------------------------------------------------------------------


@dataclasses.dataclass(frozen=True)
class VerifierState:
    b1: Element
    b2: Element
    x: Element


def challenge(params: ProtocolParams, rng: random.Random) -> tuple[Element, VerifierState]:
    b1, b2 = draw_pair(params.L_B, params.R_B, params.secret_shape, rng)
    x = canonicalize(b1 * params.z * b2)
    return x, VerifierState(b1, b2, x)


def respond(params: ProtocolParams, keypair: KeyPair, x: Element) -> bytes:
    a1, a2 = keypair.secret
    return params.hash(a1 * x * a2)


def verify(params: ProtocolParams, state: VerifierState, public_key, w: bytes) -> bool:
    _, z_prime = public_key
    return w == params.hash(state.b1 * z_prime * state.b2)


def challenge_variant(params: ProtocolParams, public_key, rng: random.Random):
    _, z_prime = public_key
    b1, b2 = draw_pair(params.L_B, params.R_B, params.secret_shape, rng)
    x = canonicalize(b1 * z_prime * b2)
    return x, VerifierState(b1, b2, x)


def respond_variant(params: ProtocolParams, keypair: KeyPair, x: Element) -> bytes:
    a1_inv, a2_inv = _require_invertible(*keypair.secret)
    return params.hash(a1_inv * x * a2_inv)


def verify_variant(params: ProtocolParams, state: VerifierState, w: bytes) -> bool:
    return w == params.hash(state.b1 * params.z * state.b2)


def simulate_transcript(params: ProtocolParams, public_key, b1: Element, b2: Element):
    """Transcript ``(x, w)`` produced without the prover's secret."""
    _, z_prime = public_key
    return canonicalize(b1 * params.z * b2), params.hash(b1 * z_prime * b2)


# --- key agreement ---------------------------------------------------------------------


def ka_publish(params: ProtocolParams, role: str, rng: random.Random, variant: bool = False):
    """Secret pair for ``role`` ('A' or 'B') and its public value s1 z s2."""
    left, right = (params.L_A, params.R_A) if role == "A" else (params.L_B, params.R_B)
    s1, s2 = draw_pair(left, right, params.secret_shape, rng)
    if variant and role == "A":
        _require_invertible(s1, s2)
    return (s1, s2), canonicalize(s1 * params.z * s2)


def ka_shared(params: ProtocolParams, secret, other_K: Element, hashed: bool = False):
    s1, s2 = secret
    kappa = canonicalize(s1 * other_K * s2)
    return params.hash(kappa) if hashed else kappa


def ka_variant_respond(params: ProtocolParams, K_A: Element, rng: random.Random):
    """Responder's move in the variant exchange: K_B = b1 K_A b2."""
    b1, b2 = draw_pair(params.L_B, params.R_B, params.secret_shape, rng)
    return (b1, b2), canonicalize(b1 * K_A * b2)


def ka_variant_shared(params: ProtocolParams, role: str, secret, K_B: Optional[Element] = None,
                      hashed: bool = False):
    if role == "A":
        a1_inv, a2_inv = _require_invertible(*secret)
        kappa = canonicalize(a1_inv * K_B * a2_inv)
    else:
        b1, b2 = secret
        kappa = canonicalize(b1 * params.z * b2)
    return params.hash(kappa) if hashed else kappa


# --- bit exchange without a normal form ---------------------------------------------------


def rewrite(e: Element, rng: random.Random, insertions: int = 3) -> Element:
    """An equal element whose representation is scrambled (braids only)."""
    g = e.platform
    if g.kind is PlatformKind.BRAID:
        return Element(g, braid.insert_relators(e.payload, g.size, rng, insertions))
    return e


def random_decoy(e: Element, rng: random.Random) -> Element:
    g = e.platform
    if g.kind is PlatformKind.BRAID:
        length = max(len(e.payload), 4)
        return Element(g, braid.random_word(g.size, length, rng))
    return rng.choice(list(g.elements()))


def send_bit(kappa: Element, bit: int, fixed_bit: int, rng: random.Random) -> Element:
    """One round of the sender: a rewrite of kappa encodes ``fixed_bit``, a decoy the other."""
    if bit == fixed_bit:
        return rewrite(kappa, rng)
    r = random_decoy(kappa, rng)
    if equal(r, kappa):
        raise RoundAmbiguous("decoy word equals the shared key")
    return r


def receive_bit(kappa: Element, r: Element, fixed_bit: int) -> int:
    return fixed_bit if equal(r, kappa) else 1 - fixed_bit


def bit_exchange(kappa_sender: Element, kappa_receiver: Element, m: int, rng: random.Random,
                 fixed_bit: int = 0, max_resample: int = 32):
    """Exchange ``m`` bits using only the word problem; returns both sides' bit lists."""
    sent, received, wire = [], [], []
    for _ in range(m):
        bit = rng.randrange(2)
        for _attempt in range(max_resample):
            try:
                r = send_bit(kappa_sender, bit, fixed_bit, rng)
                break
            except RoundAmbiguous:
                continue
        else:
            raise RoundAmbiguous(f"no decoy found in {max_resample} attempts")
        sent.append(bit)
        wire.append(r)
        received.append(receive_bit(kappa_receiver, r, fixed_bit))
    return sent, received, wire


# --- transcripts -------------------------------------------------------------------------------


@dataclasses.dataclass
class Transcript:
    """Ordered protocol messages as ``(tag, payload)`` records."""

    records: list = dataclasses.field(default_factory=list)

    def add(self, tag: int, payload: bytes) -> None:
        self.records.append((tag, bytes(payload)))

    def add_element(self, tag: int, e: Element) -> None:
        self.add(tag, serialize(e))

    def to_bytes(self) -> bytes:
        return b"".join(struct.pack(">BI", t, len(p)) + p for t, p in self.records)

    @classmethod
    def from_bytes(cls, data: bytes) -> Transcript:
        out, pos = cls(), 0
        while pos < len(data):
            if pos + 5 > len(data):
                raise DecodeError("truncated transcript record header")
            tag, n = struct.unpack_from(">BI", data, pos)
            if pos + 5 + n > len(data):
                raise DecodeError("truncated transcript record")
            out.add(tag, data[pos + 5:pos + 5 + n])
            pos += 5 + n
        return out


# --- honest runs ------------------------------------------------------------------------------


def run_auth(params: ProtocolParams, keypair: KeyPair, rng: random.Random, variant: bool = False):
    """One honest challenge/response round; returns (accepted, x, w)."""
    if variant:
        x, state = challenge_variant(params, keypair.public, rng)
        w = respond_variant(params, keypair, x)
        return verify_variant(params, state, w), x, w
    x, state = challenge(params, rng)
    w = respond(params, keypair, x)
    return verify(params, state, keypair.public, w), x, w


def run_ka(params: ProtocolParams, rng: random.Random, variant: bool = False):
    """Both sides of one honest key agreement; returns (kappa_A, kappa_B)."""
    sec_a, K_A = ka_publish(params, "A", rng, variant=variant)
    if variant:
        sec_b, K_B = ka_variant_respond(params, K_A, rng)
        return (ka_variant_shared(params, "A", sec_a, K_B), ka_variant_shared(params, "B", sec_b))
    sec_b, K_B = ka_publish(params, "B", rng)
    return ka_shared(params, sec_a, K_B), ka_shared(params, sec_b, K_A)
