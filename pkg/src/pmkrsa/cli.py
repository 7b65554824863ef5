"""Command-line interface: keygen, encrypt, decrypt, selftest, bench.

Exit codes are stable and meant for scripting:

    0  success
    1  unexpected failure
    2  usage error (bad flags)
    3  invalid configuration
    4  I/O error
    5  malformed key file
    6  malformed ciphertext container
    7  decryption failed (wrong key, corruption, tampering)
    8  self-test failed
    9  benchmark trend check failed
"""
from __future__ import annotations

import argparse
import json
import os
import sys
import tempfile
from pathlib import Path

from pmkrsa import __version__, _backend, bench, container, core, keystore
from pmkrsa.errors import (
    ContainerError,
    DecryptionError,
    InvalidConfig,
    MalformedKeyFile,
    NotInvertible,
    SelfTestFailed,
    TrendViolation,
)
from pmkrsa.parallel import ParallelConfig
from pmkrsa.primegen import source_from_env
from pmkrsa.selftest import run_selftest

EXIT_OK = 0
EXIT_FAILURE = 1
EXIT_USAGE = 2
EXIT_INVALID_CONFIG = 3
EXIT_IO = 4
EXIT_MALFORMED_KEY = 5
EXIT_MALFORMED_CONTAINER = 6
EXIT_DECRYPT = 7
EXIT_SELFTEST = 8
EXIT_TREND = 9

ALLOWED_BITS = (512, 1024, 2048, 3072, 4096, 6144, 8192)
PUBLIC_NAME = "pmkrsa.pub"
PRIVATE_NAME = "pmkrsa.key"


def _bits(text):
    bits = int(text)
    if bits not in ALLOWED_BITS:
        raise argparse.ArgumentTypeError(f"bits must be one of {ALLOWED_BITS}")
    return bits


def _positive(text):
    value = int(text)
    if value < 1:
        raise argparse.ArgumentTypeError("must be >= 1")
    return value


def _variant(text):
    try:
        bench.parse_variant(text)
    except InvalidConfig as exc:
        raise argparse.ArgumentTypeError(str(exc)) from None
    return text


def atomic_write(path, data: bytes, mode=0o644):
    """Write via a temp file in the same directory, then rename."""
    path = Path(path)
    fd, tmp = tempfile.mkstemp(prefix=f".{path.name}.", dir=path.parent or ".")
    try:
        with os.fdopen(fd, "wb") as fh:
            fh.write(data)
        os.chmod(tmp, mode)
        os.replace(tmp, path)
    except BaseException:
        try:
            os.unlink(tmp)
        except FileNotFoundError:
            pass
        raise


def _parallel(args):
    return ParallelConfig.from_env(args.threads)


def cmd_keygen(args):
    name, nprimes = bench.parse_variant(args.variant)
    if name not in ("pmkrsa", "multiprime"):
        raise InvalidConfig(f"keygen supports pmkrsa or multiprime:b, not {args.variant}")
    out = Path(args.out)
    if not out.is_dir():
        raise OSError(f"output directory {out} does not exist")
    rng = source_from_env(args.seed)
    bundle = keystore.gen_bundle(args.keys, args.bits, rng, e=args.e, nprimes=nprimes,
                                 config=_parallel(args))
    atomic_write(out / PUBLIC_NAME, keystore.serialize_public(bundle))
    atomic_write(out / PRIVATE_NAME, keystore.serialize_private(bundle), mode=0o600)
    print(f"warning: {out / PRIVATE_NAME} holds unprotected private keys", file=sys.stderr)
    rows = [{"row": t, "fingerprint": row.fingerprint(), "e": row.e}
            for t, row in enumerate(bundle.rows)]
    if args.json:
        print(json.dumps({"bits": args.bits, "keys": args.keys, "rows": rows}))
    else:
        for r in rows:
            print(f"row {r['row']:3d}  N fingerprint {r['fingerprint']}  e={r['e']}")
    return EXIT_OK


def cmd_encrypt(args):
    bundle = keystore.parse_bundle(Path(args.key).read_bytes()).public()
    data = Path(args.infile).read_bytes()
    rng = source_from_env(args.seed)
    pack = core.encrypt(data, bundle, rng, _parallel(args), args.payload_bytes)
    atomic_write(args.outfile, container.write_container(pack))
    if args.json:
        print(json.dumps({"cells": pack.layout.k, "bytes": len(data)}))
    return EXIT_OK


def cmd_decrypt(args):
    bundle = keystore.parse_private(Path(args.key).read_bytes())
    pack = container.parse_container(Path(args.infile).read_bytes())
    plain = core.decrypt(pack, bundle, _parallel(args), use_crt=args.variant != "rsa")
    atomic_write(args.outfile, plain)
    if args.json:
        print(json.dumps({"cells": pack.layout.k, "bytes": len(plain)}))
    return EXIT_OK


def cmd_selftest(args):
    try:
        results = run_selftest(args.vectors, strict=False)
    except SelfTestFailed as exc:
        print(f"FAIL {exc}", file=sys.stderr)
        return EXIT_SELFTEST
    failed = [vid for vid, ok in results if not ok]
    if args.json:
        print(json.dumps({"backend": _backend.NAME,
                          "results": [{"id": vid, "pass": ok} for vid, ok in results]}))
    else:
        for vid, ok in results:
            print(f"{'PASS' if ok else 'FAIL'} {vid}")
    if failed:
        print(f"self-test failed: {', '.join(failed)}", file=sys.stderr)
        return EXIT_SELFTEST
    return EXIT_OK


def cmd_bench(args):
    if args.kernels:
        rows = bench.compare_backends(args.bits or (512, 1024, 2048), reps=args.reps)
        if args.json:
            print(json.dumps({"backend": _backend.NAME, "kernels": rows}, indent=2))
        else:
            for row in rows:
                print("  ".join(f"{k}={v:.6g}" if isinstance(v, float) else f"{k}={v}"
                                for k, v in row.items()))
        return EXIT_OK
    configs = bench.matrix(
        variants=args.variant or ["pmkrsa"],
        bits=args.bits or [2048],
        sizes=args.size or [102400],
        threads=args.threads_list or [ParallelConfig.from_env(None).resolved_workers()],
        keys=[args.keys],
    )
    rng = source_from_env(args.seed)
    records = bench.run_suite(configs, rng, reps=args.reps, phases=args.phases,
                              payload_bytes=args.payload_bytes)
    extra = {}
    status = EXIT_OK
    if args.check:
        try:
            extra["trend"] = bench.trend_check(records)
        except TrendViolation as exc:
            extra["trend"] = {"violation": str(exc), "ratios": exc.ratios}
            print(f"trend violation: {exc}", file=sys.stderr)
            status = EXIT_TREND
    text = bench.to_csv(records)
    if args.out:
        atomic_write(args.out, text.encode())
    if args.json:
        print(bench.to_json(records, extra))
    else:
        sys.stdout.write(text)
    return status


def build_parser():
    parser = argparse.ArgumentParser(prog="pmkrsa", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p, threads=True):
        if threads:
            p.add_argument("--threads", type=int, default=None,
                           help="worker threads (0 = all cores; default $PMKRSA_THREADS or 0)")
        p.add_argument("--seed", default=None,
                       help="64 hex chars; deterministic DRBG (default $PMKRSA_TEST_SEED)")
        p.add_argument("--json", action="store_true", help="machine-readable output")

    p = sub.add_parser("keygen", help="generate a multi-key bundle")
    p.add_argument("--bits", type=_bits, default=2048)
    p.add_argument("--keys", type=_positive, default=16)
    p.add_argument("--e", type=int, default=None, help="public exponent (default 65537)")
    p.add_argument("--variant", type=_variant, default="pmkrsa")
    p.add_argument("--out", required=True, help="output directory")
    common(p)
    p.set_defaults(func=cmd_keygen)

    p = sub.add_parser("encrypt", help="encrypt a file under a public bundle")
    p.add_argument("--key", required=True)
    p.add_argument("--in", dest="infile", required=True)
    p.add_argument("--out", dest="outfile", required=True)
    p.add_argument("--payload-bytes", type=_positive, default=None)
    common(p)
    p.set_defaults(func=cmd_encrypt)

    p = sub.add_parser("decrypt", help="decrypt a container with a private bundle")
    p.add_argument("--key", required=True)
    p.add_argument("--in", dest="infile", required=True)
    p.add_argument("--out", dest="outfile", required=True)
    p.add_argument("--variant", choices=("pmkrsa", "crt", "rsa"), default="pmkrsa",
                   help="rsa = full private exponent, otherwise per-prime CRT")
    common(p)
    p.set_defaults(func=cmd_decrypt)

    p = sub.add_parser("selftest", help="run the known-answer vectors")
    p.add_argument("--vectors", default=None, help="alternate vector file")
    p.add_argument("--json", action="store_true")
    p.set_defaults(func=cmd_selftest)

    p = sub.add_parser("bench", help="wall-clock benchmarks (CSV on stdout)")
    p.add_argument("--variant", type=_variant, action="append",
                   help="pmkrsa, rsa, crt or multiprime:b (repeatable)")
    p.add_argument("--bits", type=_bits, action="append")
    p.add_argument("--size", type=int, action="append", help="plaintext bytes (repeatable)")
    p.add_argument("--threads", dest="threads_list", type=int, action="append")
    p.add_argument("--keys", type=_positive, default=16)
    p.add_argument("--reps", type=int, default=5)
    p.add_argument("--phases", nargs="+", choices=bench.PHASES, default=list(bench.PHASES))
    p.add_argument("--payload-bytes", type=_positive, default=None,
                   help="fixed cell payload across key lengths")
    p.add_argument("--check", action="store_true", help="run the key-length trend check")
    p.add_argument("--kernels", action="store_true",
                   help="compare compiled and pure-Python modexp kernels instead")
    p.add_argument("--out", default=None, help="also write the CSV here")
    common(p, threads=False)
    p.set_defaults(func=cmd_bench)
    return parser


def main(argv=None):
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except InvalidConfig as exc:
        print(f"invalid configuration: {exc}", file=sys.stderr)
        return EXIT_INVALID_CONFIG
    except MalformedKeyFile as exc:
        print(f"malformed key file: {exc}", file=sys.stderr)
        return EXIT_MALFORMED_KEY
    except ContainerError as exc:
        print(f"malformed container: {exc}", file=sys.stderr)
        return EXIT_MALFORMED_CONTAINER
    except (DecryptionError, NotInvertible) as exc:
        print(f"decryption failed: {exc}", file=sys.stderr)
        return EXIT_DECRYPT
    except OSError as exc:
        print(f"I/O error: {exc}", file=sys.stderr)
        return EXIT_IO
    except ValueError as exc:
        print(f"invalid configuration: {exc}", file=sys.stderr)
        return EXIT_INVALID_CONFIG


if __name__ == "__main__":
    sys.exit(main())
