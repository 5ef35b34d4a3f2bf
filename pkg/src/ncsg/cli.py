"""Command-line front end.

Exit codes: 0 success or accept, 1 reject or attack failure, 2 usage error,
3 runtime error (transport failure, parameter mismatch, bad files).
"""

from __future__ import annotations

import argparse
import random
import sys
from typing import Optional

from .algebra import AlgebraError
from .attacks import AttackError, attack_A_key, attack_B_key, attack_variant_B
from .conditions import ConditionError
from .presets import DESCRIPTIONS, PRESETS, preset
from .protocols import (
    KeyPair,
    ProtocolError,
    ProtocolParams,
    ka_publish,
    ka_shared,
    ka_variant_respond,
    ka_variant_shared,
    keygen,
    public_key_from_bytes,
    public_key_to_bytes,
)
from .session import (
    SessionConfig,
    SessionError,
    SessionResult,
    parse_address,
    run_pair,
    run_session,
    tcp_accept,
    tcp_connect,
    tcp_listen,
)

EXIT_OK, EXIT_REJECT, EXIT_USAGE, EXIT_RUNTIME = 0, 1, 2, 3


class UsageError(Exception):
    pass


def _read(path: str) -> bytes:
    with open(path, "rb") as fh:
        return fh.read()


def _write(path: str, data: bytes) -> None:
    with open(path, "wb") as fh:
        fh.write(data)


def _params(args, check: bool = True) -> ProtocolParams:
    if args.params:
        return ProtocolParams.from_bytes(_read(args.params), check=check)
    if args.preset:
        return preset(args.preset, args.seed or 0)
    raise UsageError("give --preset NAME or --params FILE")


def _add_params_args(p: argparse.ArgumentParser) -> None:
    src = p.add_mutually_exclusive_group()
    src.add_argument("--preset", choices=sorted(PRESETS), help="named parameter set")
    src.add_argument("--params", metavar="FILE", help="parameter file written by 'presets export'")
    p.add_argument("--seed", type=int, default=None, help="seed for all randomness")


def _add_session_args(p: argparse.ArgumentParser) -> None:
    _add_params_args(p)
    net = p.add_mutually_exclusive_group()
    net.add_argument("--listen", metavar="HOST:PORT", help="wait for the peer on this address")
    net.add_argument("--connect", metavar="HOST:PORT", help="connect to a listening peer")
    p.add_argument("--transport", choices=("pipe", "tcp"), default="pipe",
                   help="transport when both roles run in this process")
    p.add_argument("--transcript", metavar="PATH", help="write this side's wire transcript")


def _channel(args):
    if args.listen:
        host, port = parse_address(args.listen)
        server = tcp_listen(host, port)
        try:
            return tcp_accept(server, timeout=120.0)
        finally:
            server.close()
    if args.connect:
        host, port = parse_address(args.connect)
        return tcp_connect(host, port, timeout=120.0)
    raise UsageError("a single role needs --listen or --connect")


def _run_one(cfg: SessionConfig, args) -> SessionResult:
    ch = _channel(args)
    try:
        return run_session(cfg, ch)
    finally:
        ch.close()


def _write_transcript(args, result: SessionResult) -> None:
    if args.transcript:
        _write(args.transcript, result.transcript.to_bytes())


# --- subcommands ------------------------------------------------------------------------------


def cmd_presets(args) -> int:
    if args.action == "list":
        width = max(len(n) for n in PRESETS)
        for name in PRESETS:
            print(f"{name.ljust(width)}  {DESCRIPTIONS.get(name, '')}")
        return EXIT_OK
    if not args.name or not args.out:
        raise UsageError("presets export needs NAME and --out FILE")
    params = preset(args.name, args.seed or 0)
    _write(args.out, params.to_bytes())
    print(f"wrote {args.name} to {args.out} (digest {params.digest().hex()[:16]})")
    return EXIT_OK


def cmd_keygen(args) -> int:
    params = _params(args)
    kp = keygen(params, random.Random(args.seed), variant=args.variant)
    _write(args.out, kp.to_bytes())
    if args.pub_out:
        _write(args.pub_out, public_key_to_bytes(kp.public))
    print(f"z' = {kp.public[1]!r}")
    return EXIT_OK


def cmd_auth(args) -> int:
    params = _params(args)
    mode = "auth-variant" if args.variant else "auth"
    if args.role == "both":
        kp = (KeyPair.from_bytes(_read(args.key)) if args.key
              else keygen(params, random.Random(args.seed), variant=args.variant))
        a, _ = run_pair(params, mode, args.seed, args.transport, keypair=kp)
        result = a
    elif args.role == "prover":
        if not args.key:
            raise UsageError("the prover needs --key KEYFILE")
        cfg = SessionConfig(params, "A", mode, args.seed, keypair=KeyPair.from_bytes(_read(args.key)))
        result = _run_one(cfg, args)
    else:
        source = args.pub or args.key
        if not source:
            raise UsageError("the verifier needs --pub FILE (or a keypair via --key)")
        cfg = SessionConfig(params, "B", mode, args.seed,
                            public_key=public_key_from_bytes(_read(source)))
        result = _run_one(cfg, args)
    _write_transcript(args, result)
    print("accept" if result.accepted else "reject")
    return EXIT_OK if result.accepted else EXIT_REJECT


def _agreement(args, mode: str, roles: dict, bits: int = 0) -> SessionResult:
    params = _params(args)
    if args.role == "both":
        result, _ = run_pair(params, mode, args.seed, args.transport, bits=bits)
    else:
        result = _run_one(SessionConfig(params, roles[args.role], mode, args.seed, bits=bits), args)
    _write_transcript(args, result)
    return result


def cmd_ka(args) -> int:
    result = _agreement(args, "ka-variant" if args.variant else "ka", {"A": "A", "B": "B"})
    if result.kappa_digest is None:
        print("key confirmation failed")
        return EXIT_REJECT
    print(f"kappa digest: {result.kappa_digest.hex()}")
    return EXIT_OK


def cmd_bits(args) -> int:
    if args.m < 1:
        raise UsageError("-m must be positive")
    result = _agreement(args, "bits", {"receiver": "A", "sender": "B"}, bits=args.m)
    print("bits: " + "".join(map(str, result.bits or [])))
    if result.kappa_digest is None:
        print("bit confirmation failed")
        return EXIT_REJECT
    return EXIT_OK


def cmd_check(args) -> int:
    params = _params(args, check=False)
    report = params.report()
    print(f"{params.name or 'params'} on {params.platform}")
    print(report.table())
    return EXIT_OK if report.all_hold else EXIT_REJECT


def cmd_attack(args) -> int:
    seed = args.seed or 0
    params = preset(args.preset, seed)
    rng = random.Random(seed)
    bound: Optional[int] = args.bound
    if args.target == "a-key":
        kp = keygen(params, rng)
        result = attack_A_key(kp.public, params, rng, bound=bound)
    elif args.target == "b-key":
        sec_a, K_A = ka_publish(params, "A", rng)
        sec_b, K_B = ka_publish(params, "B", rng)
        result = attack_B_key(K_B, K_A, ka_shared(params, sec_b, K_A), params, bound=bound)
    else:
        _, K_A = ka_publish(params, "A", rng, variant=True)
        sec_b, K_B = ka_variant_respond(params, K_A, rng)
        kappa = ka_variant_shared(params, "B", sec_b)
        result = attack_variant_B(K_A, K_B, kappa, params, bound=bound)
    print(result.report())
    return EXIT_OK if result.verified else EXIT_REJECT


# --- parser ---------------------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="ncsg", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("presets", help="list or export named parameter sets")
    p.add_argument("action", choices=("list", "export"))
    p.add_argument("name", nargs="?", choices=sorted(PRESETS))
    p.add_argument("--out", metavar="FILE")
    p.add_argument("--seed", type=int, default=None)
    p.set_defaults(func=cmd_presets)

    p = sub.add_parser("keygen", help="generate a prover keypair")
    _add_params_args(p)
    p.add_argument("--out", metavar="FILE", required=True, help="keypair file")
    p.add_argument("--pub-out", metavar="FILE", help="public-key file for the verifier")
    p.add_argument("--variant", action="store_true", help="require invertible secrets")
    p.set_defaults(func=cmd_keygen)

    p = sub.add_parser("auth", help="run the challenge-response protocol")
    _add_session_args(p)
    p.add_argument("--role", choices=("prover", "verifier", "both"), required=True)
    p.add_argument("--key", metavar="FILE", help="prover keypair file")
    p.add_argument("--pub", metavar="FILE", help="prover public-key file (verifier side)")
    p.add_argument("--variant", action="store_true")
    p.set_defaults(func=cmd_auth)

    p = sub.add_parser("ka", help="run key agreement")
    _add_session_args(p)
    p.add_argument("--role", choices=("A", "B", "both"), required=True)
    p.add_argument("--variant", action="store_true")
    p.set_defaults(func=cmd_ka)

    p = sub.add_parser("bits", help="agree on a key, then send bits without a normal form")
    _add_session_args(p)
    p.add_argument("-m", type=int, required=True, help="number of bits")
    p.add_argument("--role", choices=("sender", "receiver", "both"), required=True)
    p.set_defaults(func=cmd_bits)

    p = sub.add_parser("check-conditions", help="evaluate the commutativity conditions")
    _add_params_args(p)
    p.set_defaults(func=cmd_check)

    p = sub.add_parser("attack", help="recover an equivalent key on a small platform")
    p.add_argument("--target", choices=("a-key", "b-key", "variant"), required=True)
    p.add_argument("--preset", choices=sorted(PRESETS), required=True)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--bound", type=int, default=None,
                   help="word-length bound for braid centralizer and subgroup search")
    p.set_defaults(func=cmd_attack)
    return parser


def cli_dispatch(argv: Optional[list[str]] = None) -> int:
    """Parse ``argv`` and run the subcommand; returns the exit code."""
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except UsageError as exc:
        parser.print_usage(sys.stderr)
        print(f"ncsg: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except AttackError as exc:
        print(f"attack failed: {exc}")
        return EXIT_REJECT
    except (SessionError, ProtocolError, ConditionError, AlgebraError, OSError, ValueError,
            KeyError, RuntimeError) as exc:
        print(f"ncsg: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_RUNTIME


def main(argv: Optional[list[str]] = None) -> int:
    try:
        return cli_dispatch(argv)
    except SystemExit as exc:
        return exc.code if isinstance(exc.code, int) else EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
