"""Acceptance suite: one test per release criterion, each printing PASS/FAIL."""

import time

import numpy as np
import pytest

from zqkernels import benchcli, eltwise, ntt
from zqkernels.modarith import new_modulus, barrett_reduce_array, precompute_factor
from zqkernels.ring import naive_negacyclic, poly_mult_mod

from conftest import ntt_primes, prev_prime, report, to_obj

BIT_CLASSES = (20, 30, 50, 61)
SIZES = tuple(1 << k for k in range(1, 15))
FWD_PAIRS = [(i, o) for i in ntt.FORWARD_IN_FACTORS for o in ntt.FORWARD_OUT_FACTORS]
INV_PAIRS = [(i, o) for i in ntt.INVERSE_IN_FACTORS for o in ntt.INVERSE_OUT_FACTORS]


def lift(a, q, factor, rng):
    """Add random multiples of q so entries span [0, factor*q) with the same residues."""
    k = rng.integers(0, factor, size=a.shape, dtype=np.uint64)
    out = a + k * np.uint64(q)
    flat, res = out.reshape(-1), a.reshape(-1)
    flat[res == q - 1] = factor * q - 1  # the top of the lazy range
    return out


def test_ntt_round_trip(rng):
    t0 = time.perf_counter()
    configs = failures = 0
    short = []
    for n in SIZES:
        for bits in BIT_CLASSES:
            primes = ntt_primes(bits, n, 3)
            if len(primes) < 3:
                short.append(f"{bits}-bit n={n}: only {len(primes)} exist")
            for q in primes:
                t = ntt.new_ntt(n, q)
                a = rng.integers(0, q, size=(100, n), dtype=np.uint64)
                a[0, :] = q - 1
                a[1, :] = 0
                back = ntt.inverse(t, ntt.forward(t, a, 1, 1), 1, 1).data
                configs += 1
                failures += not np.array_equal(back, a)
    elapsed = time.perf_counter() - t0
    ok = failures == 0 and elapsed < 60
    note = f"; {', '.join(short)}" if short else ""
    report("NTT round trip", ok,
           f"{configs} (n, q) configs x 100 vectors, {failures} mismatches, {elapsed:.1f}s (< 60s){note}")
    assert ok


def test_ntt_oracle_equivalence(rng):
    checks = failures = 0
    for n in (2, 4, 8, 16, 32, 64):
        for bits in BIT_CLASSES:
            for q in ntt_primes(bits, n, 3):
                widths = [52, 64] if 4 * q < 1 << 52 else [64]
                tabs = [ntt.new_ntt(n, q, bitshift=w) for w in widths]
                psi = tabs[0].psi
                a = rng.integers(0, q, size=n, dtype=np.uint64)
                a[0], a[-1] = q - 1, 0
                want_f = ntt.reference_ntt(a, n, q, psi, "forward")
                want_i = ntt.reference_ntt(a, n, q, psi, "inverse")
                for t in tabs:
                    for fin, fout in FWD_PAIRS:
                        got = ntt.forward(t, lift(a, q, fin, rng), fin, fout)
                        checks += 1
                        failures += got.reduced(q).tolist() != want_f or int(got.data.max()) >= fout * q
                    for fin, fout in INV_PAIRS:
                        got = ntt.inverse(t, lift(a, q, fin, rng), fin, fout)
                        checks += 1
                        failures += got.reduced(q).tolist() != want_i or int(got.data.max()) >= fout * q
    report("NTT oracle equivalence", failures == 0,
           f"{checks} transforms (n <= 64, all factor pairs, both beta widths) vs O(n^2) oracle, {failures} mismatches")
    assert failures == 0


def test_ring_oracle_equivalence(rng):
    t0 = time.perf_counter()
    checks = failures = 0
    for n in (2, 4, 8, 16, 32, 64, 128, 256):
        primes = ntt_primes(20, n, 1) + ntt_primes(30, n, 1) + ntt_primes(50, n, 2) + ntt_primes(61, n, 2)
        assert len(primes) >= 5
        for q in primes:
            t = ntt.new_ntt(n, q)
            cases = [rng.integers(0, q, size=(2, n), dtype=np.uint64) for _ in range(3)]
            cases.append(np.full((2, n), q - 1, dtype=np.uint64))
            edge = rng.choice(np.array([0, 1, q - 1], dtype=np.uint64), size=(2, n))
            cases.append(edge)
            for f, g in cases:
                checks += 1
                failures += poly_mult_mod(f, g, t).data.tolist() != naive_negacyclic(f, g, q)
    elapsed = time.perf_counter() - t0
    ok = failures == 0 and elapsed < 30
    report("ring oracle equivalence", ok,
           f"{checks} products (n <= 256, 6 primes per n) vs schoolbook, {failures} mismatches, {elapsed:.1f}s (< 30s)")
    assert ok


ELT_SIZE = 10**6
ELT_PRIMES = (prev_prime(1 << 30), prev_prime(1 << 50), prev_prime(1 << 61))


def sample(q, factor, rng):
    x = rng.integers(0, factor * q, size=ELT_SIZE, dtype=np.uint64)
    x[:3] = [0, q - 1, factor * q - 1]
    rng.shuffle(x)
    return x


def test_eltwise_oracles(rng):
    ran, bad = [], []

    def check(name, got, want):
        ran.append(name)
        if not np.array_equal(to_obj(got), want):
            bad.append(name)

    for q in ELT_PRIMES:
        bits = q.bit_length()
        a, b = sample(q, 1, rng), sample(q, 1, rng)
        check(f"add/{bits}", eltwise.eltwise_add_mod(a, b, q).data, (to_obj(a) + to_obj(b)) % q)
        check(f"neg/{bits}", eltwise.eltwise_neg_mod(a, q).data, (-to_obj(a)) % q)
        for f in eltwise.MULT_FACTORS:
            a, b = sample(q, f, rng), sample(q, f, rng)
            want = to_obj(a) * to_obj(b) % q
            int_out = eltwise.eltwise_mult_mod(a, b, q, f, path="int").data
            check(f"mult-int/{bits}/f{f}", int_out, want)
            if f * q < eltwise.FLOAT_LIMIT:
                flt_out = eltwise.eltwise_mult_mod(a, b, q, f, path="float").data
                check(f"mult-float/{bits}/f{f}", flt_out, want)
                ran.append(f"int==float/{bits}/f{f}")
                if not np.array_equal(int_out, flt_out):
                    bad.append(ran[-1])
        for f in eltwise.FMA_FACTORS:
            a, z = sample(q, f, rng), sample(q, f, rng)
            y = int(rng.integers(0, q))
            want = (to_obj(a) * y + to_obj(z)) % q
            for w in (52, 64):
                if f * q < 1 << w:
                    check(f"fma-{w}/{bits}/f{f}", eltwise.eltwise_fma_mod(a, y, z, q, f, bitshift=w).data, want)
    report("element-wise oracles", not bad,
           f"{len(ran)} checks of 10^6 elements (with 0, q-1, f*q-1) across {len(ELT_PRIMES)} primes, "
           f"failed: {bad or 'none'}")
    assert not bad


@pytest.mark.parametrize("bitshift", [52, 64])
def test_butterfly_range_invariants(bitshift):
    q = 17
    m = new_modulus(q)
    violations = 0
    for wv in range(q):
        w = precompute_factor(wv, q, bitshift)
        for x0 in range(4 * q):
            for x1 in range(4 * q):
                y0, y1 = ntt.harvey_forward_butterfly(x0, x1, w, m)
                violations += y0 >= 4 * q or y1 >= 4 * q
                violations += (y0 - x0 - wv * x1) % q != 0 or (y1 - x0 + wv * x1) % q != 0
        for x0 in range(2 * q):
            for x1 in range(2 * q):
                y0, y1 = ntt.harvey_inverse_butterfly(x0, x1, w, m)
                violations += y0 >= 2 * q or y1 >= 2 * q
                violations += (y0 - x0 - x1) % q != 0 or (y1 - wv * (x0 - x1)) % q != 0
    # the instrumented transforms assert the same bounds at every stage
    rng = np.random.default_rng(bitshift)
    for n in (2, 4, 8):
        t = ntt.new_ntt(n, q, bitshift=bitshift)
        for fin in ntt.FORWARD_IN_FACTORS:
            ntt.forward(t, rng.integers(0, fin * q, size=(500, n), dtype=np.uint64), fin, 4, checked=True)
        for fin in ntt.INVERSE_IN_FACTORS:
            ntt.inverse(t, rng.integers(0, fin * q, size=(500, n), dtype=np.uint64), fin, 2, checked=True)
    report(f"butterfly range invariants (beta=2^{bitshift})", violations == 0,
           f"q=17, all X0, X1, W: {17 * (68 * 68 + 34 * 34)} butterflies, {violations} violations")
    assert violations == 0


def test_beta_agreement(rng):
    checks = failures = 0
    for n in (2, 16, 256, 4096):
        for bits in (20, 30, 50):
            for q in ntt_primes(bits, n, 3):
                t52 = ntt.new_ntt(n, q, bitshift=52)
                t64 = ntt.new_ntt(n, q, bitshift=64)
                a = rng.integers(0, q, size=(8, n), dtype=np.uint64)
                for fin, fout in FWD_PAIRS:
                    x = lift(a, q, fin, rng)
                    checks += 1
                    failures += not np.array_equal(ntt.forward(t52, x, fin, fout).reduced(q),
                                                   ntt.forward(t64, x, fin, fout).reduced(q))
                for fin, fout in INV_PAIRS:
                    x = lift(a, q, fin, rng)
                    checks += 1
                    failures += not np.array_equal(ntt.inverse(t52, x, fin, fout).reduced(q),
                                                   ntt.inverse(t64, x, fin, fout).reduced(q))
                for f in eltwise.FMA_FACTORS:
                    if f * q >= 1 << 52:
                        continue
                    x, z = lift(a, q, f, rng), lift(a[::-1].copy(), q, f, rng)
                    y = int(rng.integers(0, q))
                    checks += 1
                    failures += not np.array_equal(eltwise.eltwise_fma_mod(x, y, z, q, f, bitshift=52).data,
                                                   eltwise.eltwise_fma_mod(x, y, z, q, f, bitshift=64).data)
    report("beta=2^52 / 2^64 agreement", failures == 0,
           f"{checks} transform/FMA comparisons over 20/30/50-bit primes, {failures} disagreements")
    assert failures == 0


BARRETT_SAMPLES = 10**7
BARRETT_CHUNK = 10**6


@pytest.mark.parametrize("bits", [20, 30, 50, 61, 62])
def test_barrett_exactness(bits, rng):
    q = prev_prime(1 << bits)
    m = new_modulus(q)
    mismatches = 0
    for start in range(0, BARRETT_SAMPLES, BARRETT_CHUNK):
        hi = rng.integers(0, 1 << (m.bits - 1), size=BARRETT_CHUNK, dtype=np.uint64)
        lo = rng.integers(0, 1 << 64, size=BARRETT_CHUNK, dtype=np.uint64)
        if start == 0:
            # top of the envelope and exact multiples of q
            top = (1 << m.L) - 1
            edges = [top, top - top % q, top - top % q - 1, q, q - 1, 0]
            hi[: len(edges)] = [e >> 64 for e in edges]
            lo[: len(edges)] = [e & ((1 << 64) - 1) for e in edges]
        got = barrett_reduce_array(hi, lo, m)
        want = ((to_obj(hi) << 64) | to_obj(lo)) % q
        mismatches += int(np.count_nonzero(to_obj(got) != want))
    report(f"Barrett exactness ({bits}-bit q)", mismatches == 0,
           f"{BARRETT_SAMPLES} inputs below 2^{m.L}, {mismatches} mismatches")
    assert mismatches == 0


def test_benchmark_structure():
    config = benchcli.BenchConfig()
    records = benchcli.run_bench(config)  # raises VerificationError on any mismatch
    seen = {(r.kernel, r.n, r.variant) for r in records}
    expected = set()
    for kernel in config.kernels:
        for n in config.sizes:
            q = benchcli.ntt_prime(config.q_bits[0], n)
            inputs = benchcli.make_inputs(kernel, n, q, config.seed)
            expected |= {(kernel, n, v) for v in benchcli.build_runners(kernel, n, q, inputs)}
    complete = seen == expected and len(records) == len(expected)
    fast = {r.variant: r.speedup_vs_naive for r in records
            if r.kernel == "fwd_ntt" and r.n == 16384 and r.variant.startswith("optimized")}
    ok = complete and bool(fast) and all(s >= 1.5 for s in fast.values())
    speeds = ", ".join(f"{v} {s:.2f}x" for v, s in sorted(fast.items()))
    report("benchmark structure", ok,
           f"{len(records)} records, all verified, coverage {'complete' if complete else 'INCOMPLETE'}; "
           f"fwd_ntt n=16384 50-bit: {speeds} (need >= 1.5x)")
    assert ok
