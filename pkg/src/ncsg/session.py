"""
Two-party sessions over a byte stream.

Every message is ``tag (1 byte) | length (4 bytes, big-endian) | payload``.
Parameters never cross the wire; each side loads its own copy and the two
copies are compared by digest before anything else is sent.
"""

from __future__ import annotations

import dataclasses
import hashlib
import random
import socket
import struct
import threading
from typing import Callable, Optional

from .algebra import DecodeError, Element, Platform, deserialize, serialize
from .protocols import (
    H,
    KeyPair,
    ProtocolParams,
    Transcript,
    challenge,
    challenge_variant,
    ka_publish,
    ka_shared,
    ka_variant_respond,
    ka_variant_shared,
    receive_bit,
    respond,
    respond_variant,
    send_bit,
    verify,
    verify_variant,
    RoundAmbiguous,
)

HELLO = 0x01
CHALLENGE = 0x10
RESPONSE = 0x11
VERDICT = 0x12
K_PUBLISH = 0x20
KAPPA_CONFIRM = 0x21
BIT_ROUND = 0x30
ERROR = 0x7F

TAG_NAMES = {
    HELLO: "hello",
    CHALLENGE: "challenge",
    RESPONSE: "response",
    VERDICT: "verdict",
    K_PUBLISH: "K-publish",
    KAPPA_CONFIRM: "kappa-confirm",
    BIT_ROUND: "bit-round",
    ERROR: "error",
}

MAX_PAYLOAD = 1 << 24
MODES = ("auth", "auth-variant", "ka", "ka-variant", "bits")


class SessionError(Exception):
    pass


class TransportFailure(SessionError):
    pass


class ParamsMismatch(SessionError):
    pass


class ProtocolViolation(SessionError):
    pass


@dataclasses.dataclass(frozen=True)
class WireMessage:
    tag: int
    payload: bytes = b""

    def __post_init__(self):
        if self.tag not in TAG_NAMES:
            raise ProtocolViolation(f"unknown message tag {self.tag:#04x}")

    def to_bytes(self) -> bytes:
        return struct.pack(">BI", self.tag, len(self.payload)) + self.payload

    @classmethod
    def from_bytes(cls, data: bytes) -> WireMessage:
        if len(data) < 5:
            raise ProtocolViolation("short message header")
        tag, n = struct.unpack_from(">BI", data)
        if len(data) - 5 != n:
            raise ProtocolViolation(f"length field {n} does not match payload size {len(data) - 5}")
        return cls(tag, data[5:])


# --- raw (non-canonical) element encoding for the bit exchange ------------------------------


def encode_raw(e: Element) -> bytes:
    """Platform descriptor followed by the payload as-is (a braid word is not normalised)."""
    return e.platform.to_bytes() + struct.pack(f">I{len(e.payload)}h", len(e.payload), *e.payload)


def decode_raw(data: bytes) -> Element:
    platform, pos = Platform.read(data)
    try:
        (n,) = struct.unpack_from(">I", data, pos)
        payload = struct.unpack_from(f">{n}h", data, pos + 4)
    except struct.error as exc:
        raise DecodeError(f"bad raw element: {exc}") from None
    if pos + 4 + 2 * n != len(data):
        raise DecodeError("trailing bytes after raw element")
    try:
        return platform.element(payload)
    except ValueError as exc:
        raise DecodeError(str(exc)) from None


# --- channels ------------------------------------------------------------------------------------


class Channel:
    """Framed message channel over a connected socket; records what it sees."""

    def __init__(self, sock: socket.socket, timeout: float = 30.0,
                 tamper: Optional[Callable[[WireMessage], WireMessage]] = None):
        self.sock = sock
        self.sock.settimeout(timeout)
        self.tamper = tamper
        self.transcript = Transcript()

    def send(self, tag: int, payload: bytes = b"") -> None:
        msg = WireMessage(tag, bytes(payload))
        if self.tamper is not None:
            msg = self.tamper(msg)
        try:
            self.sock.sendall(msg.to_bytes())
        except OSError as exc:
            raise TransportFailure(str(exc)) from None
        self.transcript.add(msg.tag, msg.payload)

    def _read_exact(self, n: int) -> bytes:
        buf = bytearray()
        while len(buf) < n:
            try:
                chunk = self.sock.recv(n - len(buf))
            except OSError as exc:
                raise TransportFailure(str(exc)) from None
            if not chunk:
                raise TransportFailure("connection closed by peer")
            buf += chunk
        return bytes(buf)

    def recv(self) -> WireMessage:
        tag, n = struct.unpack(">BI", self._read_exact(5))
        if tag not in TAG_NAMES:
            raise ProtocolViolation(f"unknown message tag {tag:#04x}")
        if n > MAX_PAYLOAD:
            raise ProtocolViolation(f"payload of {n} bytes is too large")
        msg = WireMessage(tag, self._read_exact(n))
        self.transcript.add(msg.tag, msg.payload)
        return msg

    def expect(self, tag: int) -> bytes:
        msg = self.recv()
        if msg.tag == ERROR:
            text = msg.payload.decode(errors="replace")
            if text.startswith("params-mismatch"):
                raise ParamsMismatch(f"peer reports: {text}")
            raise SessionError(f"peer reports: {text}")
        if msg.tag != tag:
            raise ProtocolViolation(f"expected {TAG_NAMES[tag]}, got {TAG_NAMES[msg.tag]}")
        return msg.payload

    def close(self) -> None:
        try:
            self.sock.close()
        except OSError:
            pass


def pipe_pair(timeout: float = 30.0) -> tuple[Channel, Channel]:
    a, b = socket.socketpair()
    return Channel(a, timeout), Channel(b, timeout)


def parse_address(text: str) -> tuple[str, int]:
    host, _, port = text.rpartition(":")
    return host or "127.0.0.1", int(port)


def tcp_listen(host: str = "127.0.0.1", port: int = 0) -> socket.socket:
    server = socket.socket(socket.AF_INET, socket.SOCK_STREAM)
    server.setsockopt(socket.SOL_SOCKET, socket.SO_REUSEADDR, 1)
    server.bind((host, port))
    server.listen(1)
    return server


def tcp_accept(server: socket.socket, timeout: float = 30.0) -> Channel:
    server.settimeout(timeout)
    try:
        conn, _ = server.accept()
    except OSError as exc:
        raise TransportFailure(str(exc)) from None
    return Channel(conn, timeout)


def tcp_connect(host: str, port: int, timeout: float = 30.0) -> Channel:
    try:
        sock = socket.create_connection((host, port), timeout=timeout)
    except OSError as exc:
        raise TransportFailure(str(exc)) from None
    return Channel(sock, timeout)


# --- sessions --------------------------------------------------------------------------------------


@dataclasses.dataclass
class SessionConfig:
    params: ProtocolParams
    role: str
    mode: str = "auth"
    seed: Optional[int] = None
    keypair: Optional[KeyPair] = None
    public_key: Optional[tuple[Element, Element]] = None
    bits: int = 0
    transcript_path: Optional[str] = None

    def __post_init__(self):
        if self.role not in ("A", "B"):
            raise ValueError("role must be 'A' (prover/initiator) or 'B' (verifier/responder)")
        if self.mode not in MODES:
            raise ValueError(f"unknown mode {self.mode!r}")

    def rng(self) -> random.Random:
        if self.seed is None:
            return random.Random()
        return random.Random(f"{self.seed}:{self.role}")


@dataclasses.dataclass
class SessionResult:
    role: str
    mode: str
    accepted: Optional[bool] = None
    kappa_digest: Optional[bytes] = None
    bits: Optional[list] = None
    transcript: Transcript = dataclasses.field(default_factory=Transcript)

    @property
    def ok(self) -> bool:
        if self.accepted is not None:
            return self.accepted
        return self.kappa_digest is not None


def _hello(ch: Channel, params: ProtocolParams, role: str) -> None:
    mine = params.digest()
    if role == "A":
        ch.send(HELLO, mine)
        theirs = ch.expect(HELLO)
        if theirs != mine:
            raise ParamsMismatch("peer loaded different parameters")
    else:
        theirs = ch.expect(HELLO)
        if theirs != mine:
            ch.send(ERROR, b"params-mismatch")
            raise ParamsMismatch("peer loaded different parameters")
        ch.send(HELLO, mine)


def _kappa_digest(kappa: Element) -> bytes:
    return H(kappa)


def _confirm(ch: Channel, role: str, digest: bytes) -> bool:
    if role == "A":
        ch.send(KAPPA_CONFIRM, digest)
        return ch.expect(KAPPA_CONFIRM) == digest
    theirs = ch.expect(KAPPA_CONFIRM)
    ch.send(KAPPA_CONFIRM, digest)
    return theirs == digest


def _element(payload: bytes, params: ProtocolParams) -> Element:
    try:
        e = deserialize(payload)
    except DecodeError as exc:
        raise ProtocolViolation(f"undecodable element: {exc}") from None
    if e.platform != params.platform:
        raise ProtocolViolation(f"element on {e.platform}, expected {params.platform}")
    return e


def _auth(ch: Channel, cfg: SessionConfig, rng: random.Random, variant: bool) -> bool:
    p = cfg.params
    if cfg.role == "A":
        if cfg.keypair is None:
            raise SessionError("the prover needs a keypair")
        x = _element(ch.expect(CHALLENGE), p)
        w = respond_variant(p, cfg.keypair, x) if variant else respond(p, cfg.keypair, x)
        ch.send(RESPONSE, w)
        return ch.expect(VERDICT) == b"\x01"
    if cfg.public_key is None:
        raise SessionError("the verifier needs the prover's public key")
    if variant:
        x, state = challenge_variant(p, cfg.public_key, rng)
    else:
        x, state = challenge(p, rng)
    ch.send(CHALLENGE, serialize(x))
    w = ch.expect(RESPONSE)
    ok = verify_variant(p, state, w) if variant else verify(p, state, cfg.public_key, w)
    ch.send(VERDICT, b"\x01" if ok else b"\x00")
    return ok


def _ka(ch: Channel, cfg: SessionConfig, rng: random.Random, variant: bool) -> Element:
    p = cfg.params
    if cfg.role == "A":
        secret, K_A = ka_publish(p, "A", rng, variant=variant)
        ch.send(K_PUBLISH, serialize(K_A))
        K_B = _element(ch.expect(K_PUBLISH), p)
        if variant:
            return ka_variant_shared(p, "A", secret, K_B)
        return ka_shared(p, secret, K_B)
    K_A = _element(ch.expect(K_PUBLISH), p)
    if variant:
        secret, K_B = ka_variant_respond(p, K_A, rng)
        ch.send(K_PUBLISH, serialize(K_B))
        return ka_variant_shared(p, "B", secret)
    secret, K_B = ka_publish(p, "B", rng)
    ch.send(K_PUBLISH, serialize(K_B))
    return ka_shared(p, secret, K_A)


def _bits(ch: Channel, cfg: SessionConfig, rng: random.Random, kappa: Element) -> list[int]:
    # B sends, A decodes; bit 0 is the one signalled by a rewrite of kappa
    out = []
    for _ in range(cfg.bits):
        if cfg.role == "B":
            bit = rng.randrange(2)
            for _attempt in range(32):
                try:
                    r = send_bit(kappa, bit, 0, rng)
                    break
                except RoundAmbiguous:
                    continue
            else:
                raise RoundAmbiguous("no decoy distinct from the shared key")
            ch.send(BIT_ROUND, encode_raw(r))
        else:
            try:
                r = decode_raw(ch.expect(BIT_ROUND))
            except DecodeError as exc:
                raise ProtocolViolation(str(exc)) from None
            if r.platform != kappa.platform:
                raise ProtocolViolation("bit-round element on the wrong platform")
            bit = receive_bit(kappa, r, 0)
        out.append(bit)
    return out


def run_session(cfg: SessionConfig, ch: Channel) -> SessionResult:
    """Drive one endpoint of a session to completion over an open channel."""
    rng = cfg.rng()
    result = SessionResult(cfg.role, cfg.mode, transcript=ch.transcript)
    try:
        _hello(ch, cfg.params, cfg.role)
        if cfg.mode in ("auth", "auth-variant"):
            result.accepted = _auth(ch, cfg, rng, cfg.mode == "auth-variant")
        else:
            kappa = _ka(ch, cfg, rng, cfg.mode == "ka-variant")
            if cfg.mode == "bits":
                result.bits = _bits(ch, cfg, rng, kappa)
                digest = hashlib.sha256(bytes(result.bits)).digest()
            else:
                digest = _kappa_digest(kappa)
            if _confirm(ch, cfg.role, digest):
                result.kappa_digest = digest
    finally:
        if cfg.transcript_path:
            with open(cfg.transcript_path, "wb") as fh:
                fh.write(ch.transcript.to_bytes())
    return result


def run_pair(params: ProtocolParams, mode: str, seed: Optional[int] = None,
             transport: str = "pipe", keypair: Optional[KeyPair] = None, bits: int = 0,
             params_b: Optional[ProtocolParams] = None,
             tamper_a: Optional[Callable[[WireMessage], WireMessage]] = None,
             timeout: float = 30.0) -> tuple[SessionResult, SessionResult]:
    """Run both endpoints in threads over a pipe or a loopback TCP connection.

    Exceptions raised by either endpoint are re-raised here (A's first).
    """
    if mode in ("auth", "auth-variant") and keypair is None:
        raise ValueError("authentication needs the prover's keypair")
    cfg_a = SessionConfig(params, "A", mode, seed, keypair=keypair, bits=bits)
    cfg_b = SessionConfig(params_b or params, "B", mode, seed,
                          public_key=keypair.public if keypair else None, bits=bits)
    if transport == "pipe":
        ch_a, ch_b = pipe_pair(timeout)
    elif transport == "tcp":
        server = tcp_listen()
        port = server.getsockname()[1]
        box: dict = {}
        t = threading.Thread(target=lambda: box.update(ch=tcp_accept(server, timeout)))
        t.start()
        ch_a = tcp_connect("127.0.0.1", port, timeout)
        t.join()
        server.close()
        if "ch" not in box:
            raise TransportFailure("loopback accept failed")
        ch_b = box["ch"]
    else:
        raise ValueError(f"unknown transport {transport!r}")
    ch_a.tamper = tamper_a
    results: dict = {}
    errors: dict = {}

    def run(name, cfg, ch):
        try:
            results[name] = run_session(cfg, ch)
        except Exception as exc:
            errors[name] = exc
            ch.close()

    threads = [threading.Thread(target=run, args=("A", cfg_a, ch_a)),
               threading.Thread(target=run, args=("B", cfg_b, ch_b))]
    for t in threads:
        t.start()
    for t in threads:
        t.join()
    ch_a.close()
    ch_b.close()
    for name in ("A", "B"):
        if name in errors:
            raise errors[name]
    return results["A"], results["B"]
