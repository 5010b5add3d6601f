"""Finite-field kernels over word-sized primes.

Negacyclic NTT with Harvey lazy butterflies, Barrett reduction and
element-wise modular vector operations with lazy input ranges.
"""

from .eltwise import eltwise_add_mod, eltwise_fma_mod, eltwise_mult_mod, eltwise_neg_mod
from .errors import (
    BoundError,
    CongruenceError,
    InvalidLengthError,
    InvalidModulusError,
    LengthMismatchError,
    ModFactorError,
    NonInvertibleError,
    RootNotPrimitiveError,
    ZqError,
)
from .modarith import (
    Modulus,
    MultiplyFactor,
    barrett_reduce,
    inv_mod,
    mul_hi,
    mul_lo,
    mul_lo_add,
    mul_mod,
    naive_mul_mod,
    new_modulus,
    pow_mod,
    precompute_factor,
    small_mod,
)
from .ntt import (
    CoeffVec,
    NttTables,
    bit_reverse,
    bit_reverse_permute,
    forward,
    harvey_forward_butterfly,
    harvey_inverse_butterfly,
    inverse,
    new_ntt,
    reference_ntt,
)
from .ring import naive_negacyclic, poly_mult_mod

__version__ = "0.1.0"
