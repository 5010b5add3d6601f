"""Scalar modular arithmetic over a word-sized prime.

The scalar functions take and return Python ints and dispatch into the same
jitted word routines used by the vector kernels, so exhaustive scalar tests
exercise the exact instruction sequences the transforms run.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

import numpy as np
from numba import njit

from . import _word
from ._word import U64
from .errors import BoundError, InvalidModulusError, NonInvertibleError

MAX_MODULUS = 1 << 62
BITSHIFTS = (52, 64)
SMALL_MOD_FACTORS = (1, 2, 4, 8)

_MR_BASES = (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37)


def is_prime(n: int) -> bool:
    """Deterministic Miller-Rabin, exact for all n < 3.3e24."""
    if n < 2:
        return False
    for p in _MR_BASES:
        if n % p == 0:
            return n == p
    d, s = n - 1, 0
    while d % 2 == 0:
        d //= 2
        s += 1
    for a in _MR_BASES:
        x = pow(a, d, n)
        if x in (1, n - 1):
            continue
        for _ in range(s - 1):
            x = x * x % n
            if x == n - 1:
                break
        else:
            return False
    return True


@dataclass(frozen=True)
class Modulus:
    """A prime modulus with its Barrett constant.

    ``barrett_k = floor(2**L / q)`` with ``L = 63 + bits``; since
    ``q >= 2**(bits-1)`` the constant fits in one word.
    """

    q: int
    bits: int
    barrett_k: int
    L: int


def new_modulus(q: int) -> Modulus:
    return _new_modulus(int(q))


@lru_cache(maxsize=256)
def _new_modulus(q: int) -> Modulus:
    if not 2 <= q < MAX_MODULUS:
        raise InvalidModulusError(f"modulus {q} outside [2, 2**62)")
    if not is_prime(q):
        raise InvalidModulusError(f"modulus {q} is not prime")
    bits = q.bit_length()
    L = 63 + bits
    k = (1 << L) // q
    if k >= 1 << 64:
        # only q = 2 lands here: floor(2**65 / 2) == 2**64
        raise InvalidModulusError(f"Barrett constant for q={q} does not fit in 64 bits")
    return Modulus(q=q, bits=bits, barrett_k=k, L=L)


@dataclass(frozen=True)
class MultiplyFactor:
    """Operand ``W`` with precon ``floor(W * beta / q)``."""

    operand: int
    precon: int
    bitshift: int

    @property
    def beta(self) -> int:
        return 1 << self.bitshift


def _check_bitshift(bitshift: int) -> None:
    if bitshift not in BITSHIFTS:
        raise ValueError(f"bitshift must be 52 or 64, got {bitshift}")


def precompute_factor(w: int, q: int | Modulus, bitshift: int = 64) -> MultiplyFactor:
    _check_bitshift(bitshift)
    q = q.q if isinstance(q, Modulus) else int(q)
    if not 0 <= w < q:
        raise BoundError(f"operand {w} not in [0, {q})")
    if 4 * q >= 1 << bitshift:
        raise BoundError(f"q={q} too large for beta=2**{bitshift} (need 4q < beta)")
    return MultiplyFactor(operand=int(w), precon=(int(w) << bitshift) // q, bitshift=bitshift)


def naive_mul_mod(a: int, b: int, q: int) -> int:
    """``(a * b) % q`` through a full-width product."""
    return (int(a) * int(b)) % int(q)


def barrett_reduce(d: int, m: Modulus) -> int:
    """``d mod q`` for ``0 <= d < 2**(63 + bits)`` without division."""
    d = int(d)
    if not 0 <= d < 1 << m.L:
        raise BoundError(f"d outside [0, 2**{m.L})")
    r = _word.barrett_word(U64(d >> 64), U64(d & 0xFFFFFFFFFFFFFFFF), U64(m.q), m.bits, U64(m.barrett_k))
    return int(r)


@njit(cache=True)
def _mul_mod_word(a, b, q, bits, k):
    hi, lo = _word.mul_wide(a, b)
    return _word.barrett_word(hi, lo, q, bits, k)


def mul_mod(a: int, b: int, m: Modulus) -> int:
    if not (0 <= a < m.q and 0 <= b < m.q):
        raise BoundError("mul_mod operands must be < q")
    return int(_mul_mod_word(U64(a), U64(b), U64(m.q), m.bits, U64(m.barrett_k)))


def small_mod(x: int, q: int, factor: int = 2) -> int:
    """Reduce ``x < factor * q`` with log2(factor) conditional subtractions."""
    if factor not in SMALL_MOD_FACTORS:
        raise ValueError(f"factor must be one of {SMALL_MOD_FACTORS}")
    if not 0 <= x < factor * q or factor * q >= 1 << 63:
        raise BoundError(f"small_mod needs x < {factor}q < 2**63")
    return int(_word.small_mod(U64(x), U64(q), factor))


def mul_hi(a: int, b: int, bitshift: int = 64) -> int:
    _check_bitshift(bitshift)
    return int(_word.mul_hi(U64(a), U64(b), bitshift))


def mul_lo(a: int, b: int, bitshift: int = 64) -> int:
    _check_bitshift(bitshift)
    return int(_word.mul_lo(U64(a), U64(b), bitshift))


def mul_lo_add(acc: int, a: int, b: int, bitshift: int = 64) -> int:
    """``acc`` plus the low ``bitshift`` bits of ``a * b``, wrapping at 2**64.

    The 52-bit form keeps the full 64-bit accumulator, as the hardware
    multiply-add it models does; callers needing a 52-bit result mask it.
    """
    _check_bitshift(bitshift)
    return int(_word.mul_lo_add(U64(acc), U64(a), U64(b), bitshift))


def pow_mod(base: int, exp: int, q: int) -> int:
    if exp < 0:
        raise ValueError("negative exponent; use inv_mod")
    result, base = 1, int(base) % q
    while exp:
        if exp & 1:
            result = result * base % q
        base = base * base % q
        exp >>= 1
    return result % q


def inv_mod(x: int, q: int) -> int:
    x = int(x) % q
    if x == 0:
        raise NonInvertibleError(f"0 has no inverse mod {q}")
    return pow_mod(x, q - 2, q)


# --- array forms -----------------------------------------------------------


@njit(cache=True)
def _barrett_array(d_hi, d_lo, q, bits, k, out):
    for i in range(d_lo.size):
        out[i] = _word.barrett_word(d_hi[i], d_lo[i], q, bits, k)


def barrett_reduce_array(d_hi: np.ndarray, d_lo: np.ndarray, m: Modulus) -> np.ndarray:
    """Vector form of :func:`barrett_reduce` on 128-bit values split in words."""
    d_hi = np.ascontiguousarray(d_hi, dtype=np.uint64).ravel()
    d_lo = np.ascontiguousarray(d_lo, dtype=np.uint64).ravel()
    if d_hi.shape != d_lo.shape:
        raise ValueError("hi/lo word arrays differ in shape")
    if d_hi.size and int(d_hi.max()) >= 1 << (m.L - 64):
        raise BoundError(f"d outside [0, 2**{m.L})")
    out = np.empty_like(d_lo)
    _barrett_array(d_hi, d_lo, U64(m.q), m.bits, U64(m.barrett_k), out)
    return out


@njit(cache=True)
def _mul_mod_array(a, b, q, bits, k, out):
    for i in range(a.size):
        out[i] = _mul_mod_word(a[i], b[i], q, bits, k)


def mul_mod_array(a: np.ndarray, b: np.ndarray, m: Modulus) -> np.ndarray:
    a = np.ascontiguousarray(a, dtype=np.uint64)
    b = np.ascontiguousarray(b, dtype=np.uint64)
    out = np.empty_like(a)
    _mul_mod_array(a.ravel(), b.ravel(), U64(m.q), m.bits, U64(m.barrett_k), out.ravel())
    return out
