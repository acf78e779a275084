"""Shanks baby-step/giant-step discrete logarithm in GF(q^n)*."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .field import FieldElement, FieldError, FieldParams, is_primitive


@dataclass(frozen=True)
class DlogTable:
    base: FieldElement
    K: int
    baby_steps: dict[int, int]
    giant: FieldElement  # base^(-K)

    @property
    def field(self) -> FieldParams:
        return self.base.field

    def log(self, u: FieldElement) -> int:
        return log(self, u)


def build_table(g: FieldElement, params: FieldParams | None = None,
                check: bool = True) -> DlogTable:
    params = params or g.field
    if g.is_zero() or (check and not is_primitive(g, params)):
        raise FieldError(f"g = {g} is not a primitive root")
    N = params.group_order
    K = math.isqrt(N - 1) + 1 if N > 1 else 1
    steps = {}
    mul = params.mul_coeffs
    p = params.p
    cur = params.one.coeffs
    for j in range(K):
        code = 0
        for c in reversed(cur):
            code = code * p + c
        steps[code] = j
        cur = mul(cur, g.coeffs)
    giant = (g**K).inverse()
    return DlogTable(g, K, steps, giant)


def log(table: DlogTable, u: FieldElement) -> int:
    """Exponent e in [0, N) with base^e = u."""
    if u.is_zero():
        raise FieldError("log of zero is undefined")
    params = table.field
    p = params.p
    mul = params.mul_coeffs
    steps = table.baby_steps
    giant = table.giant.coeffs
    cur = u.coeffs
    for i in range(table.K):
        code = 0
        for c in reversed(cur):
            code = code * p + c
        j = steps.get(code)
        if j is not None:
            return (i * table.K + j) % params.group_order
        cur = mul(cur, giant)
    raise FieldError(f"{u} is not a power of the table base")


def log_many(table: DlogTable, elements) -> np.ndarray:
    """Logarithms of many elements at once, by the same baby-step/giant-step search.

    Multiplying by the giant step is GF(p)-linear, so each giant step is one
    integer matrix product over every pending element.  Falls back to
    :func:`log` when the products could overflow int64.
    """
    elements = list(elements)
    params = table.field
    p, d = params.p, params.degree
    if any(u.is_zero() for u in elements):
        raise FieldError("log of zero is undefined")
    if d * (p - 1) ** 2 >= 2**62:
        return np.array([log(table, u) for u in elements], dtype=np.int64)
    # row j of the map: coefficients of x^j * giant
    xj = [params.element([0] * j + [1]) for j in range(d)]
    step = np.array([(e * table.giant).coeffs for e in xj], dtype=np.int64)
    weights = p ** np.arange(d, dtype=np.int64)
    codes = np.fromiter(table.baby_steps.keys(), dtype=np.int64, count=len(table.baby_steps))
    exps = np.fromiter(table.baby_steps.values(), dtype=np.int64, count=codes.size)
    order = np.argsort(codes)
    codes, exps = codes[order], exps[order]

    V = np.array([u.coeffs for u in elements], dtype=np.int64).reshape(len(elements), d)
    out = np.full(len(elements), -1, dtype=np.int64)
    pending = np.arange(len(elements))
    for i in range(table.K):
        c = V @ weights
        pos = np.minimum(np.searchsorted(codes, c), codes.size - 1)
        hit = codes[pos] == c
        out[pending[hit]] = (i * table.K + exps[pos[hit]]) % params.group_order
        keep = ~hit
        pending, V = pending[keep], V[keep]
        if not pending.size:
            return out
        V = (V @ step) % p
    raise FieldError("an element is not a power of the table base")
