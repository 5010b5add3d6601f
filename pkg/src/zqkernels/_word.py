"""Jitted 64-bit word primitives.

Everything here operates on ``np.uint64`` with wrapping arithmetic. Mixing
uint64 with Python ints inside numba promotes to float64, so every constant
is spelled as a ``np.uint64``.
"""

import numpy as np
from numba import njit, types
from numba.extending import intrinsic

U64 = np.uint64

ZERO = U64(0)
ONE = U64(1)
SH12 = U64(12)
SH32 = U64(32)
SH52 = U64(52)
SH63 = U64(63)
MASK32 = U64(0xFFFFFFFF)
MASK52 = U64((1 << 52) - 1)


@intrinsic
def fma(typingctx, a, b, c):
    """Single-rounding ``a * b + c`` on float64."""
    sig = types.float64(types.float64, types.float64, types.float64)

    def codegen(context, builder, signature, args):
        return builder.fma(*args)

    return sig, codegen


@njit(cache=True, inline="always")
def mul_wide(a, b):
    # schoolbook on 32-bit limbs; returns (hi, lo) of the 128-bit product
    al = a & MASK32
    ah = a >> SH32
    bl = b & MASK32
    bh = b >> SH32
    ll = al * bl
    lh = al * bh
    hl = ah * bl
    hh = ah * bh
    mid = (ll >> SH32) + (lh & MASK32) + (hl & MASK32)
    hi = hh + (lh >> SH32) + (hl >> SH32) + (mid >> SH32)
    lo = (mid << SH32) | (ll & MASK32)
    return hi, lo


@njit(cache=True, inline="always")
def mul_hi64(a, b):
    return mul_wide(a, b)[0]


@njit(cache=True, inline="always")
def mul_hi(a, b, bitshift):
    if bitshift == 64:
        return mul_wide(a, b)[0]
    # 52-bit multiplier: operands are truncated to their low 52 bits
    hi, lo = mul_wide(a & MASK52, b & MASK52)
    return (hi << SH12) | (lo >> SH52)


@njit(cache=True, inline="always")
def mul_lo(a, b, bitshift):
    if bitshift == 64:
        return a * b
    return ((a & MASK52) * (b & MASK52)) & MASK52


@njit(cache=True, inline="always")
def mul_lo_add(acc, a, b, bitshift):
    # the 52-bit form adds into a full 64-bit accumulator; callers mask
    return acc + mul_lo(a, b, bitshift)


@njit(cache=True, inline="always")
def sub_min(x, s):
    """``x - s`` if that does not wrap, else ``x`` (branchless for x < 2s)."""
    return min(x, x - s)


@njit(cache=True, inline="always")
def small_mod(x, q, factor):
    if factor >= 8:
        x = sub_min(x, q << U64(2))
    if factor >= 4:
        x = sub_min(x, q << ONE)
    if factor >= 2:
        x = sub_min(x, q)
    return x


@njit(cache=True, inline="always")
def barrett_word(d_hi, d_lo, q, bits, k):
    c1 = (d_lo >> U64(bits - 1)) | ((d_hi << U64(1)) << U64(64 - bits))
    c3 = mul_wide(c1, k)[0]
    c4 = d_lo - c3 * q
    # the quotient estimate can be short by 2, so c4 < 3q
    return small_mod(c4, q, 4)


@njit(cache=True, inline="always")
def harvey_mul(x, w, wp, q, neg_q, bitshift):
    """``w * x mod q`` in [0, 2q) from the precomputed quotient ``wp``."""
    qt = mul_hi(wp, x, bitshift)
    r = mul_lo_add(mul_lo(w, x, bitshift), qt, neg_q, bitshift)
    if bitshift == 52:
        r &= MASK52
    return r


@njit(cache=True, inline="always")
def fwd_butterfly(x0, x1, w, wp, q, neg_q, twice_q, bitshift, input_lt_mod):
    if not input_lt_mod:
        x0 = sub_min(x0, twice_q)
    qt = mul_hi(wp, x1, bitshift)
    w_x1 = mul_lo(w, x1, bitshift)
    t = mul_lo_add(w_x1, qt, neg_q, bitshift)
    if bitshift == 52:
        t &= MASK52
    y1 = x0 + (twice_q - t)
    y0 = x0 + t
    return y0, y1


@njit(cache=True, inline="always")
def inv_butterfly(x0, x1, w, wp, q, neg_q, twice_q, bitshift, input_lt_mod):
    x1_minus_2q = x1 - twice_q
    t = x0 - x1_minus_2q
    if input_lt_mod:
        y0 = x0 + x1
    else:
        y0 = x0 + x1_minus_2q
        # add 2q back where the difference went negative
        y0 += twice_q & (ZERO - (y0 >> SH63))
    if bitshift == 52:
        t &= MASK52
    qt = mul_hi(wp, t, bitshift)
    q_p = mul_lo(qt, neg_q, bitshift)
    y1 = mul_lo_add(q_p, w, t, bitshift)
    if bitshift == 52:
        y1 &= MASK52
    return y0, y1


@njit(cache=True, inline="always")
def urem128(hi, lo, v):
    """``(hi * 2**64 + lo) % v`` by normalized two-digit long division."""
    b = U64(1) << SH32
    u1 = hi % v
    s = U64(0)
    while (v << s) >> SH63 == ZERO:
        s += ONE
    vn = v << s
    vn1 = vn >> SH32
    vn0 = vn & MASK32
    un32 = u1 << s
    if s > ZERO:
        un32 |= lo >> (U64(64) - s)
    un10 = lo << s
    un1 = un10 >> SH32
    un0 = un10 & MASK32

    q1 = un32 // vn1
    rhat = un32 - q1 * vn1
    while q1 >= b or q1 * vn0 > b * rhat + un1:
        q1 -= ONE
        rhat += vn1
        if rhat >= b:
            break
    un21 = un32 * b + un1 - q1 * vn

    q0 = un21 // vn1
    rhat = un21 - q0 * vn1
    while q0 >= b or q0 * vn0 > b * rhat + un0:
        q0 -= ONE
        rhat += vn1
        if rhat >= b:
            break
    return (un21 * b + un0 - q0 * vn) >> s


@njit(cache=True, inline="always")
def naive_mul_mod(a, b, q):
    hi, lo = mul_wide(a, b)
    return urem128(hi, lo, q)
