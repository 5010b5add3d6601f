"""Negacyclic NTT over Z_q with Harvey lazy-reduction butterflies.

The forward transform is radix-2 Cooley-Tukey and leaves its output in
bit-reversed order; the inverse is Gentleman-Sande and restores standard
order. Both consume powers of the 2n-th root ``psi`` directly, so no
separate pre/post twisting passes are needed for negacyclic products.

Lazy contracts: the forward transform accepts inputs below 1q, 2q or 4q and
can leave its output in [0, 4q); the inverse accepts inputs below 1q or 2q
and can leave its output in [0, 2q).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from numba import njit

from . import _word
from ._word import U64
from .errors import (
    BoundError,
    CongruenceError,
    InvalidLengthError,
    LengthMismatchError,
    ModFactorError,
    RootNotPrimitiveError,
)
from .modarith import Modulus, MultiplyFactor, inv_mod, new_modulus, precompute_factor

MAX_LOG_N = 20
FORWARD_IN_FACTORS = (1, 2, 4)
FORWARD_OUT_FACTORS = (1, 4)
INVERSE_IN_FACTORS = (1, 2)
INVERSE_OUT_FACTORS = (1, 2)


def bit_reverse(i: int, log2n: int) -> int:
    if not 0 <= i < 1 << log2n:
        raise ValueError(f"index {i} does not fit in {log2n} bits")
    r = 0
    for _ in range(log2n):
        r = (r << 1) | (i & 1)
        i >>= 1
    return r


def _bit_reverse_indices(n: int) -> np.ndarray:
    log2n = n.bit_length() - 1
    idx = np.arange(n, dtype=np.int64)
    rev = np.zeros(n, dtype=np.int64)
    for _ in range(log2n):
        rev = (rev << 1) | (idx & 1)
        idx >>= 1
    return rev


def bit_reverse_permute(v):
    """Return ``v`` with element ``i`` moved to ``bit_reverse(i)``.

    Works along the last axis for arrays; lists come back as lists.
    """
    arr = np.asarray(v)
    n = arr.shape[-1]
    if n & (n - 1):
        raise InvalidLengthError(f"length {n} is not a power of two")
    out = arr[..., _bit_reverse_indices(n)]
    return out.tolist() if isinstance(v, list) else out


@dataclass
class CoeffVec:
    """Residues with every element below ``bound_factor * q``.

    ``data`` is a uint64 array whose last axis has the transform length;
    leading axes batch independent vectors.
    """

    data: np.ndarray
    bound_factor: int = 1

    def __post_init__(self):
        self.data = np.asarray(self.data, dtype=np.uint64)

    def __len__(self):
        return self.data.shape[-1]

    def reduced(self, q: int) -> np.ndarray:
        return self.data % np.uint64(q)


@dataclass(frozen=True, eq=False)
class NttTables:
    n: int
    m: Modulus
    psi: int
    psi_rev: np.ndarray
    psi_precon_rev: np.ndarray
    psi_inv_rev: np.ndarray
    psi_inv_precon_rev: np.ndarray
    n_inv: MultiplyFactor
    bitshift: int

    @property
    def q(self) -> int:
        return self.m.q

    @property
    def beta(self) -> int:
        return 1 << self.bitshift


def _is_primitive_2n_root(w: int, n: int, q: int) -> bool:
    # the group order 2n is a power of two, so w**n == -1 pins the order
    return 0 < w < q and pow(w, n, q) == q - 1


def minimal_primitive_root(n: int, q: int) -> int:
    """Smallest primitive ``2n``-th root of unity mod prime ``q``."""
    order = 2 * n
    if (q - 1) % order:
        raise CongruenceError(f"q={q} is not 1 mod {order}")
    exp = (q - 1) // order
    for g in range(2, q):
        root = pow(g, exp, q)
        if _is_primitive_2n_root(root, n, q):
            break
    else:  # pragma: no cover - a prime q = 1 mod 2n always has one
        raise RootNotPrimitiveError(f"no primitive {order}-th root mod {q}")
    # the primitive roots are exactly the odd powers of any one of them
    best, sq, cur = root, root * root % q, root
    for _ in range(n - 1):
        cur = cur * sq % q
        best = min(best, cur)
    return best


def _powers_bit_reversed(w: int, n: int, q: int) -> list[int]:
    powers = [1] * n
    for i in range(1, n):
        powers[i] = powers[i - 1] * w % q
    rev = _bit_reverse_indices(n)
    return [powers[r] for r in rev]


def new_ntt(n: int, q: int | Modulus, root: int | None = None, bitshift: int | None = None) -> NttTables:
    """Precompute root tables for length-``n`` transforms mod ``q``.

    ``bitshift`` picks the accumulator width (52 or 64). By default 52 is used
    whenever ``4q < 2**52``.
    """
    n = int(n)
    if n < 2 or n & (n - 1) or n > 1 << MAX_LOG_N:
        raise InvalidLengthError(f"n={n} must be a power of two in [2, 2**{MAX_LOG_N}]")
    m = q if isinstance(q, Modulus) else new_modulus(q)
    q = m.q
    if (q - 1) % (2 * n):
        raise CongruenceError(f"q={q} is not 1 mod {2 * n}")
    if 4 * q >= 1 << 64:
        raise BoundError(f"q={q} too large for lazy butterflies (need 4q < 2**64)")

    if bitshift is None:
        bitshift = 52 if 4 * q < 1 << 52 else 64
    elif bitshift not in (52, 64):
        raise ValueError(f"bitshift must be 52 or 64, got {bitshift}")
    elif 4 * q >= 1 << bitshift:
        raise BoundError(f"q={q} too large for beta=2**{bitshift}")

    if root is None:
        psi = minimal_primitive_root(n, q)
    else:
        psi = int(root)
        if not _is_primitive_2n_root(psi, n, q):
            raise RootNotPrimitiveError(f"{psi} is not a primitive {2 * n}-th root of unity mod {q}")

    fwd = _powers_bit_reversed(psi, n, q)
    inv = _powers_bit_reversed(inv_mod(psi, q), n, q)

    def precon(ws):
        return np.array([(w << bitshift) // q for w in ws], dtype=np.uint64)

    arrays = {
        "psi_rev": np.array(fwd, dtype=np.uint64),
        "psi_precon_rev": precon(fwd),
        "psi_inv_rev": np.array(inv, dtype=np.uint64),
        "psi_inv_precon_rev": precon(inv),
    }
    for a in arrays.values():
        a.setflags(write=False)
    return NttTables(
        n=n,
        m=m,
        psi=psi,
        n_inv=precompute_factor(inv_mod(n, q), q, bitshift),
        bitshift=bitshift,
        **arrays,
    )


# --- scalar butterflies ----------------------------------------------------


def harvey_forward_butterfly(x0: int, x1: int, w: MultiplyFactor, m: Modulus) -> tuple[int, int]:
    """Harvey CT butterfly: ``(x0 + w*x1, x0 - w*x1)`` mod q, lazily in [0, 4q)."""
    q = m.q
    if not (0 <= x0 < 4 * q and 0 <= x1 < 4 * q):
        raise BoundError("forward butterfly inputs must be < 4q")
    if 4 * q >= w.beta:
        raise BoundError("forward butterfly needs q < beta/4")
    y0, y1 = _word.fwd_butterfly(
        U64(x0), U64(x1), U64(w.operand), U64(w.precon), U64(q),
        U64((1 << 64) - q), U64(2 * q), w.bitshift, False,
    )
    return int(y0), int(y1)


def harvey_inverse_butterfly(x0: int, x1: int, w: MultiplyFactor, m: Modulus) -> tuple[int, int]:
    """Harvey GS butterfly: ``(x0 + x1, w*(x0 - x1))`` mod q, lazily in [0, 2q)."""
    q = m.q
    if not (0 <= x0 < 2 * q and 0 <= x1 < 2 * q):
        raise BoundError("inverse butterfly inputs must be < 2q")
    if 4 * q >= w.beta:
        raise BoundError("inverse butterfly needs q < beta/4")
    y0, y1 = _word.inv_butterfly(
        U64(x0), U64(x1), U64(w.operand), U64(w.precon), U64(q),
        U64((1 << 64) - q), U64(2 * q), w.bitshift, False,
    )
    return int(y0), int(y1)


# --- jitted transforms -----------------------------------------------------


@njit(cache=True)
def _forward_rows(a, psi_rev, psi_precon, q, bitshift, input_lt_mod, output_factor, checked):
    rows, n = a.shape
    neg_q = U64(0) - q
    twice_q = q + q
    four_q = twice_q + twice_q
    for r in range(rows):
        row = a[r]
        t = n
        m = 1
        while m < n:
            t >>= 1
            first = input_lt_mod and m == 1
            for i in range(m):
                j1 = 2 * i * t
                w = psi_rev[m + i]
                wp = psi_precon[m + i]
                for j in range(j1, j1 + t):
                    x0 = row[j]
                    x1 = row[j + t]
                    if checked and (x0 >= four_q or x1 >= four_q):
                        raise AssertionError("forward butterfly input >= 4q")
                    y0, y1 = _word.fwd_butterfly(x0, x1, w, wp, q, neg_q, twice_q, bitshift, first)
                    if checked and (y0 >= four_q or y1 >= four_q):
                        raise AssertionError("forward butterfly output >= 4q")
                    row[j] = y0
                    row[j + t] = y1
            m <<= 1
        if output_factor == 1:
            for j in range(n):
                row[j] = _word.small_mod(row[j], q, 4)


@njit(cache=True)
def _inverse_rows(a, psi_inv_rev, psi_inv_precon, n_inv, n_inv_precon, q, bitshift,
                  input_lt_mod, output_factor, checked):
    rows, n = a.shape
    neg_q = U64(0) - q
    twice_q = q + q
    for r in range(rows):
        row = a[r]
        t = 1
        m = n
        while m > 1:
            j1 = 0
            h = m >> 1
            first = input_lt_mod and m == n
            for i in range(h):
                w = psi_inv_rev[h + i]
                wp = psi_inv_precon[h + i]
                for j in range(j1, j1 + t):
                    x0 = row[j]
                    x1 = row[j + t]
                    if checked and (x0 >= twice_q or x1 >= twice_q):
                        raise AssertionError("inverse butterfly input >= 2q")
                    y0, y1 = _word.inv_butterfly(x0, x1, w, wp, q, neg_q, twice_q, bitshift, first)
                    if checked and (y0 >= twice_q or y1 >= twice_q):
                        raise AssertionError("inverse butterfly output >= 2q")
                    row[j] = y0
                    row[j + t] = y1
                j1 += 2 * t
            t <<= 1
            m >>= 1
        for j in range(n):
            y = _word.harvey_mul(row[j], n_inv, n_inv_precon, q, neg_q, bitshift)
            if output_factor == 1:
                y = _word.sub_min(y, q)
            row[j] = y


def _prepare(tables: NttTables, x, in_factor: int, allowed_in, out_factor: int, allowed_out, out):
    if in_factor not in allowed_in:
        raise ModFactorError(f"input_mod_factor must be one of {allowed_in}, got {in_factor}")
    if out_factor not in allowed_out:
        raise ModFactorError(f"output_mod_factor must be one of {allowed_out}, got {out_factor}")
    data = x.data if isinstance(x, CoeffVec) else np.asarray(x, dtype=np.uint64)
    if data.dtype != np.uint64:
        data = data.astype(np.uint64)
    if data.shape[-1] != tables.n:
        raise LengthMismatchError(f"expected length {tables.n}, got {data.shape[-1]}")
    if data.size and int(data.max()) >= in_factor * tables.q:
        raise BoundError(f"input element >= {in_factor}q")
    if out is None:
        buf = data.copy()
    else:
        buf = out.data if isinstance(out, CoeffVec) else out
        if buf.shape != data.shape or buf.dtype != np.uint64:
            raise LengthMismatchError("output buffer must match input shape and be uint64")
        if buf is not data:
            np.copyto(buf, data)
    rows = buf.reshape(-1, tables.n)
    if not np.shares_memory(rows, buf):  # pragma: no cover - non-contiguous out
        raise ValueError("output buffer must be contiguous")
    return buf, rows


def forward(tables: NttTables, x, input_mod_factor: int = 1, output_mod_factor: int = 1,
            out=None, checked: bool = False) -> CoeffVec:
    """Forward negacyclic NTT; result is in bit-reversed order.

    ``out`` may be a distinct uint64 buffer or the input array itself for an
    in-place transform. ``checked`` asserts every butterfly's operands stay
    below 4q.
    """
    buf, rows = _prepare(tables, x, input_mod_factor, FORWARD_IN_FACTORS,
                         output_mod_factor, FORWARD_OUT_FACTORS, out)
    _forward_rows(rows, tables.psi_rev, tables.psi_precon_rev, U64(tables.q), tables.bitshift,
                  input_mod_factor == 1, output_mod_factor, checked)
    return _result(out, buf, output_mod_factor)


def inverse(tables: NttTables, x, input_mod_factor: int = 1, output_mod_factor: int = 1,
            out=None, checked: bool = False) -> CoeffVec:
    """Inverse negacyclic NTT from bit-reversed input, including the 1/n scaling."""
    buf, rows = _prepare(tables, x, input_mod_factor, INVERSE_IN_FACTORS,
                         output_mod_factor, INVERSE_OUT_FACTORS, out)
    _inverse_rows(rows, tables.psi_inv_rev, tables.psi_inv_precon_rev,
                  U64(tables.n_inv.operand), U64(tables.n_inv.precon), U64(tables.q),
                  tables.bitshift, input_mod_factor == 1, output_mod_factor, checked)
    return _result(out, buf, output_mod_factor)


def _result(out, buf: np.ndarray, factor: int) -> CoeffVec:
    if isinstance(out, CoeffVec):
        out.bound_factor = factor
        return out
    return CoeffVec(buf, factor)


# --- reference paths -------------------------------------------------------


def reference_ntt(a, n: int, q: int, psi: int, direction: str = "forward") -> list[int]:
    """O(n^2) negacyclic transform straight from the definitions.

    Forward evaluates ``sum_j a_j psi^j omega^(ij)`` with ``omega = psi^2`` and
    returns it bit-reversed; inverse takes bit-reversed input and undoes it.
    """
    a = [int(v) % q for v in a]
    if len(a) != n:
        raise LengthMismatchError(f"expected length {n}, got {len(a)}")
    omega = psi * psi % q
    if direction == "forward":
        twisted = [a[j] * pow(psi, j, q) % q for j in range(n)]
        out = [sum(twisted[j] * pow(omega, i * j, q) for j in range(n)) % q for i in range(n)]
        return bit_reverse_permute(out)
    if direction == "inverse":
        std = bit_reverse_permute(a)
        omega_inv = inv_mod(omega, q)
        psi_inv = inv_mod(psi, q)
        n_inv = inv_mod(n, q)
        out = []
        for i in range(n):
            s = sum(std[j] * pow(omega_inv, i * j, q) for j in range(n)) % q
            out.append(s * n_inv * pow(psi_inv, i, q) % q)
        return out
    raise ValueError(f"direction must be 'forward' or 'inverse', got {direction!r}")


@njit(cache=True)
def _naive_forward_rows(a, psi_rev, q):
    rows, n = a.shape
    for r in range(rows):
        row = a[r]
        t = n
        m = 1
        while m < n:
            t >>= 1
            for i in range(m):
                j1 = 2 * i * t
                w = psi_rev[m + i]
                for j in range(j1, j1 + t):
                    x0 = row[j]
                    wx1 = _word.naive_mul_mod(w, row[j + t], q)
                    row[j] = (x0 + wx1) % q
                    row[j + t] = (x0 + q - wx1) % q
            m <<= 1


@njit(cache=True)
def _naive_inverse_rows(a, psi_inv_rev, n_inv, q):
    rows, n = a.shape
    for r in range(rows):
        row = a[r]
        t = 1
        m = n
        while m > 1:
            j1 = 0
            h = m >> 1
            for i in range(h):
                w = psi_inv_rev[h + i]
                for j in range(j1, j1 + t):
                    x0 = row[j]
                    x1 = row[j + t]
                    row[j] = (x0 + x1) % q
                    row[j + t] = _word.naive_mul_mod((x0 + q - x1) % q, w, q)
                j1 += 2 * t
            t <<= 1
            m >>= 1
        for j in range(n):
            row[j] = _word.naive_mul_mod(row[j], n_inv, q)


def naive_forward(tables: NttTables, x) -> np.ndarray:
    """Same loop nest as :func:`forward`, eager ``%`` after every butterfly."""
    buf = np.array(x, dtype=np.uint64)
    if buf.size and int(buf.max()) >= tables.q:
        raise BoundError("naive transforms take inputs < q")
    _naive_forward_rows(buf.reshape(-1, tables.n), tables.psi_rev, U64(tables.q))
    return buf


def naive_inverse(tables: NttTables, x) -> np.ndarray:
    buf = np.array(x, dtype=np.uint64)
    if buf.size and int(buf.max()) >= tables.q:
        raise BoundError("naive transforms take inputs < q")
    _naive_inverse_rows(buf.reshape(-1, tables.n), tables.psi_inv_rev,
                        U64(tables.n_inv.operand), U64(tables.q))
    return buf
