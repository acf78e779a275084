"""Row-index sets selecting partial Fourier matrices.

``build_full`` takes logarithms of the affine line {t - alpha : t in GF(q)},
``build_quotient`` folds them modulo (q^n - 1)/(p^b - 1), and ``build_amub``
adjoins row 0 for the quadratic case.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from typing import Literal

from .dlog import build_table
from .field import (FieldElement, FieldError, FieldParams, format_poly,
                    generates_over_subfield, make_field)

Variant = Literal["full", "quotient", "amub"]


@dataclass(frozen=True)
class IndexSet:
    N: int
    indices: tuple[int, ...]
    variant: Variant
    params: FieldParams = field(repr=False)
    g: FieldElement = field(repr=False)
    alpha: FieldElement = field(repr=False)
    b: int | None = None

    def __post_init__(self):
        idx = self.indices
        if len(set(idx)) != len(idx):
            raise ValueError("indices are not distinct")
        if any(not 0 <= m < self.N for m in idx):
            raise ValueError(f"indices out of range [0, {self.N})")
        if list(idx) != sorted(idx):
            raise ValueError("indices must be sorted")

    @property
    def q(self) -> int:
        return self.params.q

    @property
    def n(self) -> int:
        return self.params.n

    def to_record(self) -> dict:
        rec = {
            "variant": self.variant,
            "p": self.params.p,
            "a": self.params.a,
            "n": self.params.n,
            "b": self.b,
            "modulus": format_poly(self.params.modulus),
            "g": format_poly(self.g.coeffs),
            "alpha": format_poly(self.alpha.coeffs),
            "N": self.N,
            "indices": list(self.indices),
        }
        if self.b is None:
            del rec["b"]
        return rec

    def dumps(self) -> str:
        return json.dumps(self.to_record(), indent=2) + "\n"

    @classmethod
    def from_record(cls, rec: dict) -> IndexSet:
        params = make_field(int(rec["p"]), int(rec["a"]), int(rec["n"]), rec["modulus"])
        ix = cls(N=int(rec["N"]), indices=tuple(int(m) for m in rec["indices"]),
                 variant=rec["variant"], params=params,
                 g=params.element(rec["g"]), alpha=params.element(rec["alpha"]),
                 b=rec.get("b"))
        if ix.variant not in ("full", "quotient", "amub"):
            raise ValueError(f"unknown variant {ix.variant!r}")
        return ix

    @classmethod
    def loads(cls, text: str) -> IndexSet:
        return cls.from_record(json.loads(text))


@dataclass(frozen=True)
class AmubPartition:
    q: int
    blocks: tuple[tuple[int, ...], ...]


def _check_inputs(params: FieldParams, g: FieldElement, alpha: FieldElement | None):
    if params.n < 2:
        raise FieldError("the construction needs n > 1")
    alpha = params.x if alpha is None else alpha
    if not generates_over_subfield(alpha):
        raise FieldError(f"alpha = {alpha} does not generate GF(q^n) over GF(q)")
    return alpha


def line_logs(params: FieldParams, g: FieldElement, alpha: FieldElement) -> list[int]:
    """log_g(t - alpha) for t running over GF(q), in subfield enumeration order."""
    table = build_table(g, params)
    return [table.log(t - alpha) for t in params.subfield(g)]


def build_full(params: FieldParams, g: FieldElement,
               alpha: FieldElement | None = None) -> IndexSet:
    alpha = _check_inputs(params, g, alpha)
    logs = line_logs(params, g, alpha)
    return IndexSet(params.group_order, tuple(sorted(logs)), "full", params, g, alpha)


def build_quotient(params: FieldParams, g: FieldElement,
                   alpha: FieldElement | None = None, b: int = 1) -> IndexSet:
    if b < 1 or params.a % b:
        raise FieldError(f"b={b} must divide a={params.a}")
    alpha = _check_inputs(params, g, alpha)
    N = params.group_order // (params.p**b - 1)
    reduced = {m % N for m in line_logs(params, g, alpha)}
    # distinct by construction; a collision means a bug upstream
    assert len(reduced) == params.q, "quotient indices collided"
    return IndexSet(N, tuple(sorted(reduced)), "quotient", params, g, alpha, b)


def amub_partition(q: int) -> AmubPartition:
    blocks = tuple(tuple(j + k * (q - 1) for k in range(q + 1)) for j in range(q - 1))
    return AmubPartition(q, blocks)


def build_amub(params: FieldParams, g: FieldElement,
               alpha: FieldElement | None = None) -> tuple[IndexSet, AmubPartition]:
    if params.n != 2:
        raise FieldError("the AMUB construction needs n = 2")
    alpha = _check_inputs(params, g, alpha)
    logs = line_logs(params, g, alpha)
    ix = IndexSet(params.group_order, tuple(sorted({0, *logs})), "amub", params, g, alpha)
    return ix, amub_partition(params.q)


def full_logs(ix: IndexSet) -> list[int]:
    """Un-reduced logarithms behind ``ix`` (the full-variant index set)."""
    if ix.variant == "full":
        return list(ix.indices)
    if ix.variant == "amub":
        return [m for m in ix.indices if m != 0]
    return sorted(line_logs(ix.params, ix.g, ix.alpha))
