"""Additive and multiplicative characters of GF(q).

``psi_a(x) = e(Tr(a x) / p)`` and ``chi_j(g^k) = e(j k / (q - 1))`` with ``chi_j(0) = 0``,
where g is the canonical generator of the field context. Together these realise every
character of GF(q) exactly once.
"""
import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from fq.decomp import field
from fq.decomp.exceptions import BadArgument
from fq.decomp.field import Elements, FieldCtx, FieldElement


@lru_cache(maxsize=64)
def unit_roots(m: int) -> np.ndarray:
    roots = np.exp(2j * np.pi * np.arange(m) / m)
    roots.setflags(write=False)
    return roots


@dataclass(frozen=True)
class AdditiveCharacter:
    a: FieldElement

    @property
    def trivial(self) -> bool:
        return self.a == 0

    def __str__(self) -> str:
        return f"psi_{self.a}"


@dataclass(frozen=True)
class MultiplicativeCharacter:
    j: int

    def is_trivial(self, ctx: FieldCtx) -> bool:
        return self.j % (ctx.q - 1) == 0

    def __str__(self) -> str:
        return f"chi_{self.j}"


def canonical_additive(ctx: FieldCtx) -> AdditiveCharacter:
    return AdditiveCharacter(1)


def quadratic_character(ctx: FieldCtx) -> MultiplicativeCharacter:
    if ctx.p == 2:
        raise BadArgument(f"{ctx} has no quadratic character")
    return MultiplicativeCharacter((ctx.q - 1) // 2)


def _ret(values: np.ndarray):
    if values.ndim == 0:
        return complex(values)
    return values


def eval_additive(ctx: FieldCtx, chi: AdditiveCharacter, x: Elements):
    t = np.asarray(field.trace(ctx, field.mul(ctx, chi.a, x)), dtype=np.int64)
    return _ret(unit_roots(ctx.p)[t])


def eval_multiplicative(ctx: FieldCtx, chi: MultiplicativeCharacter, x: Elements):
    x = np.asarray(x, dtype=np.int64)
    m = ctx.q - 1
    logs = (ctx.dlog_table[x] * (chi.j % m)) % m
    return _ret(np.where(x != 0, unit_roots(m)[logs], 0j))


def additive_table(ctx: FieldCtx, chi: AdditiveCharacter) -> np.ndarray:
    """Values of chi at every field element, indexed by element."""
    return eval_additive(ctx, chi, ctx.elements())


def multiplicative_table(ctx: FieldCtx, chi: MultiplicativeCharacter) -> np.ndarray:
    return eval_multiplicative(ctx, chi, ctx.elements())


def complete_sum(ctx: FieldCtx, table: np.ndarray, values: np.ndarray) -> complex:
    """Sum a character table over a list of field values (e.g. f(x) for every x)."""
    return complex(table[np.asarray(values, dtype=np.int64)].sum())


def weil_bound(q: int, degree: int) -> float:
    return (degree - 1) * math.sqrt(q)
