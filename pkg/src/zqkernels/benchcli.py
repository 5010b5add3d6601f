"""Benchmark harness: optimized kernels against naive ``%``-reduction baselines.

Every optimized output is checked against the naive variant on the same
inputs before any timing is taken; a mismatch aborts the run with exit
code 3.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import statistics
import sys
import time
from dataclasses import asdict, dataclass, fields
from typing import Callable

import numpy as np

from . import eltwise, ntt, ring
from .errors import ZqError
from .modarith import is_prime

KERNELS = ("fwd_ntt", "inv_ntt", "eltwise_mult", "eltwise_fma", "eltwise_add", "poly_mult")
VARIANTS = ("naive", "optimized_64", "optimized_52", "float")
DEFAULT_SIZES = (1024, 4096, 16384)
DEFAULT_Q_BITS = (50,)
DEFAULT_REPS = 10
DEFAULT_SEED = 0
COLUMNS = ("kernel", "n", "q_bits", "variant", "median_ns", "speedup_vs_naive")

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_VERIFY = 3

TIMING_NOTE = "monotonic perf_counter_ns; median of reps after 1 warm-up call; no CPU pinning; single thread"


@dataclass
class BenchRecord:
    kernel: str
    n: int
    q_bits: int
    variant: str
    median_ns: float
    speedup_vs_naive: float


@dataclass
class BenchConfig:
    kernels: tuple[str, ...] = KERNELS
    sizes: tuple[int, ...] = DEFAULT_SIZES
    q_bits: tuple[int, ...] = DEFAULT_Q_BITS
    reps: int = DEFAULT_REPS
    seed: int = DEFAULT_SEED

    def validate(self) -> None:
        bad = [k for k in self.kernels if k not in KERNELS]
        if bad or not self.kernels:
            raise ConfigError(f"unknown kernel(s): {bad}")
        for n in self.sizes:
            if n < 2 or n & (n - 1) or n > 1 << ntt.MAX_LOG_N:
                raise ConfigError(f"n={n} must be a power of two in [2, 2**{ntt.MAX_LOG_N}]")
        if not self.sizes:
            raise ConfigError("no sizes given")
        for b in self.q_bits:
            if not 17 <= b <= 61:
                raise ConfigError(f"q bit-size {b} outside [17, 61]")
        if not self.q_bits:
            raise ConfigError("no modulus sizes given")
        if self.reps < 10:
            raise ConfigError("reps must be >= 10")
        if not 0 <= self.seed < 1 << 64:
            raise ConfigError("seed must be an unsigned 64-bit integer")


class ConfigError(ValueError):
    pass


class VerificationError(RuntimeError):
    pass


def ntt_prime(bits: int, n: int) -> int:
    """Largest prime below ``2**bits`` that is 1 mod ``2n``."""
    step = 2 * n
    q = ((1 << bits) - 1) // step * step + 1
    while q >= 1 << (bits - 1):
        if is_prime(q):
            return q
        q -= step
    raise ConfigError(f"no {bits}-bit prime is 1 mod {step}")


def make_inputs(kernel: str, n: int, q: int, seed: int) -> dict:
    """Deterministic operands for one (kernel, n, q) cell."""
    rng = np.random.default_rng([seed, KERNELS.index(kernel), n, q])
    a = rng.integers(0, q, size=n, dtype=np.uint64)
    b = rng.integers(0, q, size=n, dtype=np.uint64)
    y = int(rng.integers(0, q))
    return {"a": a, "b": b, "y": y}


Runner = Callable[[], np.ndarray]


def _ntt_variants(bits: int, q: int, n: int) -> dict[str, int]:
    out = {"optimized_64": 64}
    if 4 * q < 1 << 52:
        out["optimized_52"] = 52
    return out


def build_runners(kernel: str, n: int, q: int, inputs: dict) -> dict[str, Runner]:
    """Zero-argument callables per legal variant; ``naive`` is always first."""
    a, b, y = inputs["a"], inputs["b"], inputs["y"]
    runners: dict[str, Runner] = {}
    if kernel in ("fwd_ntt", "inv_ntt", "poly_mult"):
        widths = _ntt_variants(q.bit_length(), q, n)
        tables = {w: ntt.new_ntt(n, q, bitshift=w) for w in widths.values()}
        base = tables[64]
        if kernel == "fwd_ntt":
            runners["naive"] = lambda: ntt.naive_forward(base, a)
            for name, w in widths.items():
                runners[name] = lambda t=tables[w]: ntt.forward(t, a).data
        elif kernel == "inv_ntt":
            runners["naive"] = lambda: ntt.naive_inverse(base, a)
            for name, w in widths.items():
                runners[name] = lambda t=tables[w]: ntt.inverse(t, a).data
        else:
            def naive_poly():
                fa = ntt.naive_forward(base, a)
                gb = ntt.naive_forward(base, b)
                return ntt.naive_inverse(base, eltwise.naive_mult(fa, gb, q))

            runners["naive"] = naive_poly
            for name, w in widths.items():
                runners[name] = lambda t=tables[w]: ring.poly_mult_mod(a, b, t).data
    elif kernel == "eltwise_mult":
        runners["naive"] = lambda: eltwise.naive_mult(a, b, q)
        runners["optimized_64"] = lambda: eltwise.eltwise_mult_mod(a, b, q, 1, path="int").data
        if q < eltwise.FLOAT_LIMIT:
            runners["float"] = lambda: eltwise.eltwise_mult_mod(a, b, q, 1, path="float").data
    elif kernel == "eltwise_fma":
        runners["naive"] = lambda: eltwise.naive_fma(a, y, b, q)
        runners["optimized_64"] = lambda: eltwise.eltwise_fma_mod(a, y, b, q, 1, bitshift=64).data
        if q < 1 << 52:
            runners["optimized_52"] = lambda: eltwise.eltwise_fma_mod(a, y, b, q, 1, bitshift=52).data
    elif kernel == "eltwise_add":
        runners["naive"] = lambda: eltwise.naive_add(a, b, q)
        runners["optimized_64"] = lambda: eltwise.eltwise_add_mod(a, b, q).data
    else:
        raise ConfigError(f"unknown kernel {kernel!r}")
    return runners


def time_median_ns(fn: Runner, reps: int) -> float:
    fn()
    samples = []
    for _ in range(reps):
        t0 = time.perf_counter_ns()
        fn()
        samples.append(time.perf_counter_ns() - t0)
    return float(statistics.median(samples))


def run_bench(config: BenchConfig) -> list[BenchRecord]:
    config.validate()
    records = []
    for kernel in config.kernels:
        for bits in config.q_bits:
            for n in config.sizes:
                q = ntt_prime(bits, n)
                inputs = make_inputs(kernel, n, q, config.seed)
                runners = build_runners(kernel, n, q, inputs)
                expected = runners["naive"]()
                for variant, fn in runners.items():
                    got = fn() % np.uint64(q)
                    if not np.array_equal(got, expected):
                        raise VerificationError(
                            f"{kernel} n={n} q_bits={bits} variant={variant} disagrees with naive result"
                        )
                times = {v: time_median_ns(fn, config.reps) for v, fn in runners.items()}
                for variant in VARIANTS:
                    if variant in times:
                        records.append(BenchRecord(
                            kernel=kernel,
                            n=n,
                            q_bits=bits,
                            variant=variant,
                            median_ns=times[variant],
                            speedup_vs_naive=times["naive"] / times[variant],
                        ))
    return records


def emit(records: list[BenchRecord], fmt: str = "csv", stream=None) -> str:
    """Render records as csv, json or an aligned table; also writes to ``stream``."""
    if fmt == "csv":
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(COLUMNS)
        for r in records:
            writer.writerow([getattr(r, c) for c in COLUMNS])
        text = buf.getvalue()
    elif fmt == "json":
        text = json.dumps([asdict(r) for r in records], indent=2) + "\n"
    elif fmt == "table":
        rows = [COLUMNS] + [
            (r.kernel, str(r.n), str(r.q_bits), r.variant, f"{r.median_ns:.0f}", f"{r.speedup_vs_naive:.2f}")
            for r in records
        ]
        widths = [max(len(row[i]) for row in rows) for i in range(len(COLUMNS))]
        lines = ["  ".join(cell.ljust(w) for cell, w in zip(row, widths)).rstrip() for row in rows]
        lines.append(f"# {TIMING_NOTE}")
        text = "\n".join(lines) + "\n"
    else:
        raise ValueError(f"unknown format {fmt!r}")
    if stream is not None:
        stream.write(text)
    return text


def parse_records(text: str, fmt: str) -> list[BenchRecord]:
    """Inverse of :func:`emit` for csv and json."""
    if fmt == "json":
        return [BenchRecord(**obj) for obj in json.loads(text)]
    if fmt == "csv":
        types = {f.name: f.type for f in fields(BenchRecord)}
        conv = {"int": int, "float": float, "str": str}
        return [
            BenchRecord(**{k: conv[types[k]](v) for k, v in row.items()})
            for row in csv.DictReader(io.StringIO(text))
        ]
    raise ValueError(f"cannot parse format {fmt!r}")


def _int_list(text: str) -> list[int]:
    try:
        return [int(v, 0) for v in text.split(",") if v.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {text!r}")


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_CONFIG, f"{self.prog}: error: {message}\n")


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="zqbench", description=__doc__.splitlines()[0])
    p.add_argument("--kernel", action="append", default=None,
                   help=f"kernel name or 'all' (repeatable or comma-separated): {', '.join(KERNELS)}")
    p.add_argument("--n", type=_int_list, action="extend", default=None,
                   help="transform/vector lengths, comma-separated (default 1024,4096,16384)")
    p.add_argument("--q-bits", type=_int_list, action="extend", default=None,
                   help="modulus bit-sizes, comma-separated (default 50)")
    p.add_argument("--reps", type=int, default=DEFAULT_REPS, help="timed repetitions per variant (>= 10)")
    p.add_argument("--seed", type=int, default=DEFAULT_SEED, help="input generation seed")
    p.add_argument("--format", choices=("csv", "json", "table"), default="table")
    p.add_argument("--out", default=None, help="output path (default stdout)")
    return p


def config_from_args(args: argparse.Namespace) -> BenchConfig:
    kernels: list[str] = []
    for item in args.kernel or ["all"]:
        for name in item.split(","):
            name = name.strip()
            kernels.extend(KERNELS if name == "all" else [name])
    return BenchConfig(
        kernels=tuple(dict.fromkeys(kernels)),
        sizes=tuple(args.n or DEFAULT_SIZES),
        q_bits=tuple(args.q_bits or DEFAULT_Q_BITS),
        reps=args.reps,
        seed=args.seed,
    )


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    config = config_from_args(args)
    try:
        config.validate()
        records = run_bench(config)
    except (ConfigError, ZqError) as exc:
        print(f"zqbench: config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except VerificationError as exc:
        print(f"zqbench: verification failed: {exc}", file=sys.stderr)
        return EXIT_VERIFY

    print(f"# {TIMING_NOTE}", file=sys.stderr)
    if args.out is None:
        emit(records, args.format, sys.stdout)
        return EXIT_OK
    try:
        with open(args.out, "w", newline="") as fh:
            emit(records, args.format, fh)
    except OSError as exc:
        print(f"zqbench: cannot write {args.out}: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
