"""Element-wise modular kernels with lazy input contracts.

Inputs may be any uint64 array (or :class:`~zqkernels.ntt.CoeffVec`); the
last axis is not special here, kernels run over the flattened data and keep
the input shape.
"""

from __future__ import annotations

from fractions import Fraction

import numpy as np
from numba import njit

from . import _word
from ._word import U64
from .errors import BoundError, LengthMismatchError, ModFactorError
from .modarith import Modulus, new_modulus
from .ntt import CoeffVec

MULT_FACTORS = (1, 2, 4)
FMA_FACTORS = (1, 2, 4, 8)
FLOAT_LIMIT = 1 << 52


def _modulus(m) -> Modulus:
    return m if isinstance(m, Modulus) else new_modulus(m)


def _array(x) -> np.ndarray:
    data = x.data if isinstance(x, CoeffVec) else x
    return np.ascontiguousarray(data, dtype=np.uint64)


def _check_below(x: np.ndarray, limit: int, what: str) -> None:
    if x.size and int(x.max()) >= limit:
        raise BoundError(f"{what} element >= {limit}")


def _same_shape(a: np.ndarray, b: np.ndarray) -> None:
    if a.shape != b.shape:
        raise LengthMismatchError(f"operand shapes differ: {a.shape} vs {b.shape}")


# --- addition / negation ---------------------------------------------------


@njit(cache=True)
def _add_mod(a, b, q, out):
    for i in range(a.size):
        out[i] = _word.sub_min(a[i] + b[i], q)


@njit(cache=True)
def _neg_mod(a, q, out):
    for i in range(a.size):
        x = a[i]
        # all-ones mask when x != 0, so 0 stays 0 instead of becoming q
        nonzero = _word.ZERO - ((x | (_word.ZERO - x)) >> _word.SH63)
        out[i] = (q - x) & nonzero


def eltwise_add_mod(a, b, m) -> CoeffVec:
    m = _modulus(m)
    a, b = _array(a), _array(b)
    _same_shape(a, b)
    if m.q >= 1 << 63:  # pragma: no cover - Modulus already caps q below 2**62
        raise BoundError("addition needs q < 2**63")
    _check_below(a, m.q, "operand1")
    _check_below(b, m.q, "operand2")
    out = np.empty_like(a)
    _add_mod(a.ravel(), b.ravel(), U64(m.q), out.ravel())
    return CoeffVec(out, 1)


def eltwise_neg_mod(a, m) -> CoeffVec:
    """``(q - a_i) mod q``; zero maps to zero."""
    m = _modulus(m)
    a = _array(a)
    _check_below(a, m.q, "operand")
    out = np.empty_like(a)
    _neg_mod(a.ravel(), U64(m.q), out.ravel())
    return CoeffVec(out, 1)


# --- vector-vector multiply ------------------------------------------------


@njit(cache=True)
def _mult_mod_int(a, b, q, bits, k, factor, out):
    for i in range(a.size):
        x = _word.small_mod(a[i], q, factor)
        y = _word.small_mod(b[i], q, factor)
        hi, lo = _word.mul_wide(x, y)
        out[i] = _word.barrett_word(hi, lo, q, bits, k)


@njit(cache=True)
def _mult_mod_float(a, b, q, u, factor, out):
    qf = np.float64(q)
    for i in range(a.size):
        # unreduced inputs near 2**52 push the quotient estimate several q off
        x = np.float64(_word.small_mod(a[i], q, factor))
        y = np.float64(_word.small_mod(b[i], q, factor))
        h = x * y
        l = _word.fma(x, y, -h)  # rounding error; h + l == x * y
        c = np.floor(h * u)  # ~ floor(x * y / q)
        d = _word.fma(-c, qf, h)
        g = d + l  # exactly x*y - c*q, in [-2q, 2q) for q < 2**52
        if g < 0.0:
            g += qf
        if g < 0.0:
            g += qf
        if g >= qf:
            g -= qf
        out[i] = U64(g)


def reciprocal_round_up(q: int) -> float:
    """Smallest float64 ``u`` with ``u >= 1/q``."""
    u = 1.0 / q
    if Fraction(u) < Fraction(1, q):
        u = float(np.nextafter(u, np.inf))
    return u


def mult_path(q: int, input_mod_factor: int) -> str:
    """Kernel chosen by :func:`eltwise_mult_mod` for these parameters."""
    return "float" if input_mod_factor * q < FLOAT_LIMIT else "int"


def eltwise_mult_mod(a, b, m, input_mod_factor: int = 1, path: str | None = None) -> CoeffVec:
    """``(a_i * b_i) mod q`` for inputs below ``input_mod_factor * q``.

    ``path`` forces the ``"int"`` (Barrett) or ``"float"`` kernel; by default
    the float kernel runs whenever ``input_mod_factor * q < 2**52``.
    """
    m = _modulus(m)
    if input_mod_factor not in MULT_FACTORS:
        raise ModFactorError(f"input_mod_factor must be one of {MULT_FACTORS}")
    a, b = _array(a), _array(b)
    _same_shape(a, b)
    bound = input_mod_factor * m.q
    _check_below(a, bound, "operand1")
    _check_below(b, bound, "operand2")
    path = path or mult_path(m.q, input_mod_factor)
    out = np.empty_like(a)
    if path == "int":
        if bound >= 1 << 63:
            raise BoundError("integer path needs input_mod_factor * q < 2**63")
        _mult_mod_int(a.ravel(), b.ravel(), U64(m.q), m.bits, U64(m.barrett_k),
                      input_mod_factor, out.ravel())
    elif path == "float":
        if bound >= FLOAT_LIMIT:
            raise BoundError("float path needs input_mod_factor * q < 2**52")
        _mult_mod_float(a.ravel(), b.ravel(), U64(m.q), reciprocal_round_up(m.q),
                        input_mod_factor, out.ravel())
    else:
        raise ValueError(f"unknown path {path!r}")
    return CoeffVec(out, 1)


# --- vector-scalar fused multiply-add --------------------------------------


@njit(cache=True)
def _fma_mod(a, y, y_barr, z, has_z, q, factor, bitshift, out):
    for i in range(a.size):
        x = _word.small_mod(a[i], q, factor)
        xy = x * y
        r = _word.mul_hi(x, y_barr, bitshift)
        r = _word.sub_min(xy - r * q, q)
        if has_z:
            r = _word.sub_min(r + _word.small_mod(z[i], q, factor), q)
        out[i] = r


def fma_bitshift(q: int, input_mod_factor: int) -> int:
    return 52 if input_mod_factor * q < 1 << 52 else 64


def eltwise_fma_mod(a, y: int, z, m, input_mod_factor: int = 1, bitshift: int | None = None) -> CoeffVec:
    """``(a_i * y + z_i) mod q`` with a scalar ``y``; ``z`` may be ``None``.

    The quotient of ``a_i * y`` is estimated from ``floor(y * 2**bitshift / q)``;
    52 is used when ``input_mod_factor * q < 2**52`` unless overridden.
    """
    m = _modulus(m)
    if input_mod_factor not in FMA_FACTORS:
        raise ModFactorError(f"input_mod_factor must be one of {FMA_FACTORS}")
    if m.q >= 1 << 61:
        raise BoundError("fused multiply-add needs q < 2**61")
    y = int(y)
    if not 0 <= y < m.q:
        raise BoundError(f"scalar {y} not in [0, q)")
    bound = input_mod_factor * m.q
    if bitshift is None:
        bitshift = fma_bitshift(m.q, input_mod_factor)
    elif bitshift not in (52, 64):
        raise ValueError("bitshift must be 52 or 64")
    if bound >= 1 << bitshift:
        raise BoundError(f"input_mod_factor * q must be < 2**{bitshift}")

    a = _array(a)
    _check_below(a, bound, "operand")
    if z is None:
        z_arr, has_z = np.zeros(1, dtype=np.uint64), False
    else:
        z_arr, has_z = _array(z), True
        _same_shape(a, z_arr)
        _check_below(z_arr, bound, "addend")
    out = np.empty_like(a)
    _fma_mod(a.ravel(), U64(y), U64((y << bitshift) // m.q), z_arr.ravel(), has_z,
             U64(m.q), input_mod_factor, bitshift, out.ravel())
    return CoeffVec(out, 1)


# --- naive baselines -------------------------------------------------------


@njit(cache=True)
def _naive_add(a, b, q, out):
    for i in range(a.size):
        out[i] = (a[i] + b[i]) % q


@njit(cache=True)
def _naive_mult(a, b, q, out):
    for i in range(a.size):
        out[i] = _word.naive_mul_mod(a[i], b[i], q)


@njit(cache=True)
def _naive_fma(a, y, z, q, out):
    for i in range(a.size):
        out[i] = (_word.naive_mul_mod(a[i], y, q) + z[i] % q) % q


def naive_add(a, b, q: int) -> np.ndarray:
    a, b = _array(a), _array(b)
    out = np.empty_like(a)
    _naive_add(a.ravel(), b.ravel(), U64(q), out.ravel())
    return out


def naive_mult(a, b, q: int) -> np.ndarray:
    a, b = _array(a), _array(b)
    out = np.empty_like(a)
    _naive_mult(a.ravel(), b.ravel(), U64(q), out.ravel())
    return out


def naive_fma(a, y: int, z, q: int) -> np.ndarray:
    a = _array(a)
    z = np.zeros_like(a) if z is None else _array(z)
    out = np.empty_like(a)
    _naive_fma(a.ravel(), U64(y), z.ravel(), U64(q), out.ravel())
    return out
