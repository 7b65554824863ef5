"""Wall-clock benchmarks: variant comparisons, key-length and size sweeps.

Every timing is the median of ``reps`` runs after one discarded warm-up.
Pass/fail decisions are only ever made on ratios, never absolute times.
"""
from __future__ import annotations

import csv
import io
import itertools
import json
import math
import os
import statistics
import time
from dataclasses import asdict, dataclass

from pmkrsa import _backend, core
from pmkrsa.errors import InvalidConfig, MismatchedConfigs, TrendViolation
from pmkrsa.keystore import gen_bundle
from pmkrsa.modmath import mod_pow, mont_new
from pmkrsa.parallel import ParallelConfig, par_map
from pmkrsa.rsa_variants import crt_decrypt, multiprime_decrypt, rsa_decrypt

PHASES = ("keygen", "encrypt", "decrypt")
CSV_COLUMNS = ("variant", "bits", "file_bytes", "threads", "keys", "phase", "median_s", "repetitions")


@dataclass(frozen=True)
class BenchConfig:
    variant: str = "pmkrsa"
    bits: int = 2048
    file_bytes: int = 102400
    threads: int = 1
    keys: int = 16


@dataclass(frozen=True)
class BenchRecord:
    variant: str
    bits: int
    file_bytes: int
    threads: int
    keys: int
    phase: str
    wall_seconds: float
    repetitions: int


@dataclass(frozen=True)
class SpeedupReport:
    baseline: BenchRecord
    candidate: BenchRecord
    ratio: float

    def row(self) -> str:
        return (
            f"{self.baseline.variant} -> {self.candidate.variant} "
            f"[{self.candidate.phase}, {self.candidate.bits} bits, {self.candidate.file_bytes} B]: "
            f"{self.baseline.wall_seconds:.4f}s / {self.candidate.wall_seconds:.4f}s = {self.ratio:.2f}x"
        )


def parse_variant(variant: str) -> tuple[str, int]:
    """('pmkrsa'|'rsa'|'crt'|'multiprime', prime count)."""
    if variant in ("pmkrsa", "rsa", "crt"):
        return variant, 2
    name, _, b = variant.partition(":")
    if name == "multiprime" and b.isdigit() and int(b) >= 2:
        return name, int(b)
    raise InvalidConfig(f"unknown variant {variant!r}")


def matrix(variants=("pmkrsa",), bits=(2048,), sizes=(102400,), threads=(1,), keys=(16,)):
    return [
        BenchConfig(variant=v, bits=b, file_bytes=s, threads=t, keys=k)
        for v, b, s, t, k in itertools.product(variants, bits, sizes, threads, keys)
    ]


def timed(fn, reps=5, warmup=1):
    for _ in range(warmup):
        fn()
    samples = []
    for _ in range(reps):
        start = time.perf_counter()
        fn()
        samples.append(time.perf_counter() - start)
    return statistics.median(samples)


class _Runner:
    """Key material and operations for one benchmark configuration."""

    def __init__(self, cfg, rng, payload_bytes):
        self.cfg = cfg
        self.rng = rng
        self.name, self.nprimes = parse_variant(cfg.variant)
        self.par = ParallelConfig(workers=cfg.threads)
        self.payload_bytes = payload_bytes
        self.data = rng.randbytes(cfg.file_bytes)
        self.bundle = self.keygen()
        self.pack = self.encrypt()

    def keygen(self):
        rows = self.cfg.keys if self.name == "pmkrsa" else 1
        return gen_bundle(rows, self.cfg.bits, self.rng, nprimes=self.nprimes, config=self.par)

    def encrypt(self):
        if self.name == "pmkrsa":
            return core.encrypt(self.data, self.bundle, self.rng, self.par, self.payload_bytes)
        # Single-key chunked baselines: same cells, no blinding.
        key = self.bundle.rows[0]
        grid = core.chunk(self.data, self.bundle, self.payload_bytes)
        return par_map(grid.cells, lambda t, m: mod_pow(m, key.e, key.N, key.ctx), self.par)

    def decrypt(self):
        if self.name == "pmkrsa":
            return core.decrypt(self.pack, self.bundle, self.par)
        key = self.bundle.rows[0]
        if self.name == "rsa":
            op = lambda t, c: rsa_decrypt(c, key)
        elif self.name == "crt":
            op = lambda t, c: crt_decrypt(c, key.crt, key.N)
        else:
            op = lambda t, c: multiprime_decrypt(c, key.multiprime)
        return par_map(self.pack, op, self.par)


def run_suite(configs, rng, reps=5, warmup=1, phases=PHASES, payload_bytes=None, progress=None):
    """Benchmark every config; one record per (config, phase).

    ``payload_bytes`` fixes the cell payload across key lengths (the default
    scales it with each key length).
    """
    if reps < 3:
        raise InvalidConfig("at least 3 repetitions are required")
    records = []
    for cfg in configs:
        runner = _Runner(cfg, rng, payload_bytes)
        for phase in phases:
            if phase not in PHASES:
                raise InvalidConfig(f"unknown phase {phase!r}")
            seconds = timed(getattr(runner, phase), reps, warmup)
            rec = BenchRecord(
                variant=cfg.variant, bits=cfg.bits, file_bytes=cfg.file_bytes, threads=cfg.threads,
                keys=cfg.keys if runner.name == "pmkrsa" else 1, phase=phase,
                wall_seconds=seconds, repetitions=reps,
            )
            records.append(rec)
            if progress:
                progress(rec)
    return records


def speedup(baseline: BenchRecord, candidate: BenchRecord) -> SpeedupReport:
    for attr in ("bits", "file_bytes", "phase"):
        if getattr(baseline, attr) != getattr(candidate, attr):
            raise MismatchedConfigs(
                f"{attr} differs: {getattr(baseline, attr)} vs {getattr(candidate, attr)}"
            )
    return SpeedupReport(baseline, candidate, baseline.wall_seconds / candidate.wall_seconds)


def _band(scale):
    # [quadratic, 1.5 x cubic]; for a doubling this is [4, 12].
    return scale ** 2, 1.5 * scale ** 3


def trend_check(records, variant=None) -> dict:
    """Check that decrypt time grows super-quadratically with key length.

    The gate uses the 2048/4096 pair when present, otherwise the two largest
    key lengths. When encrypt records exist, encrypt must grow strictly slower
    than decrypt over the same pair. Raises :class:`TrendViolation`.
    """
    if variant is not None:
        records = [r for r in records if r.variant == variant]
    elif len({r.variant for r in records}) > 1:
        raise InvalidConfig("records mix several variants; pass variant=")
    by_phase = {}
    for rec in records:
        by_phase.setdefault(rec.phase, {})[rec.bits] = rec.wall_seconds
    dec = by_phase.get("decrypt", {})
    lengths = sorted(dec)
    if len(lengths) < 2:
        raise TrendViolation("need decrypt records for at least two key lengths")

    steps = {}
    for lo, hi in zip(lengths, lengths[1:]):
        ratio = dec[hi] / dec[lo]
        steps[f"{hi}/{lo}"] = {
            "ratio": ratio,
            "growth_exponent": math.log(ratio) / math.log(hi / lo) if ratio > 0 else float("-inf"),
        }
    lo, hi = (2048, 4096) if {2048, 4096} <= set(lengths) else tuple(lengths[-2:])
    ratio = dec[hi] / dec[lo]
    low, high = _band(hi / lo)
    report = {"pair": [lo, hi], "decrypt_ratio": ratio, "band": [low, high], "steps": steps}
    if not low <= ratio <= high:
        raise TrendViolation(
            f"decrypt {hi}/{lo} ratio {ratio:.3f} outside [{low:.2f}, {high:.2f}]",
            {"decrypt": ratio},
        )
    enc = by_phase.get("encrypt", {})
    if lo in enc and hi in enc:
        enc_ratio = enc[hi] / enc[lo]
        report["encrypt_ratio"] = enc_ratio
        if not enc_ratio < ratio:
            raise TrendViolation(
                f"encrypt grows as fast as decrypt ({enc_ratio:.3f} >= {ratio:.3f})",
                {"decrypt": ratio, "encrypt": enc_ratio},
            )
    return report


def to_csv(records) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(CSV_COLUMNS)
    for r in records:
        writer.writerow(
            [r.variant, r.bits, r.file_bytes, r.threads, r.keys, r.phase,
             f"{r.wall_seconds:.6f}", r.repetitions]
        )
    return buf.getvalue()


def to_json(records, extra=None) -> str:
    doc = {"backend": _backend.NAME, "cpu_count": os.cpu_count(),
           "records": [asdict(r) for r in records]}
    if extra:
        doc.update(extra)
    return json.dumps(doc, indent=2, sort_keys=True)


def compare_backends(bits_list=(512, 1024, 2048), reps=5, rng=None):
    """Time one full-length modexp on the compiled and pure-Python kernels."""
    from pmkrsa.primegen import OSEntropy

    rng = rng or OSEntropy()
    rows = []
    for bits in bits_list:
        N = rng.randbits(bits) | (1 << (bits - 1)) | 1
        x, e = rng.randbelow(N), rng.randbits(bits)
        ctx = mont_new(N)
        times = {}
        for name, kern in (("cython", _backend.compiled_kernels), ("python", _backend.python_kernels)):
            if kern is None:
                continue
            times[name] = timed(lambda: kern.mont_pow(x, e, N, ctx.n_prime, ctx.r2, ctx.k), reps)
        row = {"bits": bits, **{f"{k}_s": v for k, v in times.items()}}
        if len(times) == 2:
            row["speedup"] = times["python"] / times["cython"]
        rows.append(row)
    return rows
