"""Multiplication in Z_q[X]/(X^n + 1)."""

from __future__ import annotations

import numpy as np

from .eltwise import eltwise_mult_mod
from .errors import BoundError, LengthMismatchError
from .ntt import CoeffVec, NttTables, forward, inverse


def poly_mult_mod(f, g, tables: NttTables) -> CoeffVec:
    """Negacyclic product ``f * g`` with coefficients in [0, q).

    Runs the lazy pipeline: forward transforms left in [0, 4q), an
    element-wise multiply that accepts 4q inputs, then one inverse
    transform reduced to [0, q). ``f`` and ``g`` may carry leading batch axes.
    """
    fa = f.data if isinstance(f, CoeffVec) else np.asarray(f, dtype=np.uint64)
    ga = g.data if isinstance(g, CoeffVec) else np.asarray(g, dtype=np.uint64)
    if fa.shape != ga.shape:
        raise LengthMismatchError(f"operand shapes differ: {fa.shape} vs {ga.shape}")
    f_hat = forward(tables, fa, 1, 4)
    g_hat = forward(tables, ga, 1, 4)
    prod = eltwise_mult_mod(f_hat, g_hat, tables.m, 4)
    return inverse(tables, prod, 1, 1, out=prod)


def naive_negacyclic(f, g, q: int) -> list[int]:
    """Schoolbook product mod ``X^n + 1``; terms that wrap past ``X^n`` flip sign."""
    f = [int(v) for v in f]
    g = [int(v) for v in g]
    n = len(f)
    if len(g) != n:
        raise LengthMismatchError(f"lengths differ: {n} vs {len(g)}")
    if any(not 0 <= v < q for v in f + g):
        raise BoundError(f"coefficients must lie in [0, {q})")
    out = []
    for i in range(n):
        acc = sum(f[j] * g[i - j] for j in range(i + 1))
        acc -= sum(f[j] * g[n + i - j] for j in range(i + 1, n))
        out.append(acc % q)
    return out
