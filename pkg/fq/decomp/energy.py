"""Representation counts and additive, multiplicative and cross energies.

Every energy is an exact integer built from an O(|U||V|) representation table. The
quartic enumerators (``*_bruteforce``) are literal restatements of the definitions and
exist as oracles for the suites and tests.
"""
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Callable, Dict, Optional, Tuple

import numpy as np

from fq.decomp import field, ratfunc
from fq.decomp.events import DecompLogger
from fq.decomp.exceptions import BadArgument
from fq.decomp.field import FieldCtx
from fq.decomp.ratfunc import RationalFunction
from fq.decomp.sets import FSubset, inverse_set

logger = DecompLogger("Energy")

# pair cells per chunk when a representation table is built
CHUNK_CELLS = 1 << 22

BRUTEFORCE_LIMIT = 64


@dataclass(frozen=True, eq=False)
class RepCounts:
    """r(x) for every field element x, as a dense table of length q."""

    table: np.ndarray

    @property
    def counts(self) -> Dict[int, int]:
        support = np.flatnonzero(self.table)
        return {int(x): int(self.table[x]) for x in support}

    @property
    def total(self) -> int:
        return int(self.table.sum())

    @property
    def support(self) -> np.ndarray:
        return np.flatnonzero(self.table)

    def __getitem__(self, x: int) -> int:
        return int(self.table[x])

    def square_sum(self) -> int:
        return int(np.dot(self.table, self.table))


@dataclass(frozen=True)
class EnergyReport:
    value: int
    kind: str
    operands: Tuple[str, ...]

    def __int__(self) -> int:
        return self.value

    def __str__(self) -> str:
        return f"{self.kind} energy of ({', '.join(self.operands)}) = {self.value}"


def _describe(U: FSubset) -> str:
    return f"|{len(U)}|"


def _tabulate(
    q: int,
    left: np.ndarray,
    right: np.ndarray,
    op: Callable[[np.ndarray, np.ndarray], np.ndarray],
    workers: int = 1,
) -> np.ndarray:
    """bincount of op(l, r) over left x right, chunked over ``left``.

    Chunks are merged by integer addition, so the result does not depend on ``workers``.
    """
    table = np.zeros(q, dtype=np.int64)
    if left.size == 0 or right.size == 0:
        return table
    rows = max(1, CHUNK_CELLS // right.size)
    chunks = [left[i : i + rows] for i in range(0, left.size, rows)]

    def count(chunk: np.ndarray) -> np.ndarray:
        values = np.asarray(op(chunk[:, None], right[None, :]), dtype=np.int64)
        return np.bincount(values.ravel(), minlength=q)

    if workers > 1 and len(chunks) > 1:
        with ThreadPoolExecutor(max_workers=workers) as executor:
            for part in executor.map(count, chunks):
                table += part
    else:
        for chunk in chunks:
            table += count(chunk)
    return table


def rep_sum(ctx: FieldCtx, U: FSubset, V: FSubset, workers: int = 1) -> RepCounts:
    """r_{U,V}(x) = #{(u, v) : u + v = x}."""
    return RepCounts(_tabulate(ctx.q, U.elems, V.elems, lambda a, b: field.add(ctx, a, b), workers))


def rep_diff(ctx: FieldCtx, U: FSubset, V: FSubset, workers: int = 1) -> RepCounts:
    """r_{U,-V}(x) = #{(u, v) : u - v = x}."""
    return RepCounts(_tabulate(ctx.q, U.elems, V.elems, lambda a, b: field.sub(ctx, a, b), workers))


def rep_prod(ctx: FieldCtx, U: FSubset, V: FSubset, workers: int = 1) -> RepCounts:
    return RepCounts(_tabulate(ctx.q, U.elems, V.elems, lambda a, b: field.mul(ctx, a, b), workers))


def rep_f(ctx: FieldCtx, f: RationalFunction, U: FSubset, V: Optional[FSubset] = None) -> RepCounts:
    """r_{U,V}(f; x) = #{(u, v) : f(u) + f(v) = x}, pole points skipped.

    Values are taken with multiplicity, so colliding u's are counted separately.
    """
    fu, poles = ratfunc.evaluate_many(ctx, f, U.elems)
    fu = fu[~poles]
    if V is None:
        fv = fu
    else:
        fv, vpoles = ratfunc.evaluate_many(ctx, f, V.elems)
        fv = fv[~vpoles]
    return RepCounts(_tabulate(ctx.q, fu, fv, lambda a, b: field.add(ctx, a, b)))


def additive_energy(ctx: FieldCtx, U: FSubset, workers: int = 1) -> EnergyReport:
    """E(U) = #{u1 + u2 = u3 + u4} = sum_x r_{U,-U}(x)^2."""
    value = rep_diff(ctx, U, U, workers).square_sum()
    return EnergyReport(value, "additive", (_describe(U),))


def cross_energy(ctx: FieldCtx, B: FSubset, C: FSubset, workers: int = 1) -> EnergyReport:
    """E(B, C) = #{b1 + c1 = b2 + c2}."""
    value = rep_sum(ctx, B, C, workers).square_sum()
    return EnergyReport(value, "cross", (_describe(B), _describe(C)))


def multiplicative_energy(ctx: FieldCtx, U: FSubset, workers: int = 1) -> EnergyReport:
    """E^x(U) = #{u1 u2 = u3 u4}; quadruples containing 0 are counted by the equation as written."""
    value = rep_prod(ctx, U, U, workers).square_sum()
    return EnergyReport(value, "multiplicative", (_describe(U),))


def f_energy(ctx: FieldCtx, f: RationalFunction, U: FSubset, workers: int = 1) -> EnergyReport:
    """E(f(U)), the additive energy of the image set."""
    value = additive_energy(ctx, ratfunc.apply_to_set(ctx, f, U), workers).value
    return EnergyReport(value, "f-energy", (str(f), _describe(U)))


def inverse_energy(ctx: FieldCtx, U: FSubset, workers: int = 1) -> EnergyReport:
    """E(U^{-1}); zero is dropped from U first."""
    value = additive_energy(ctx, inverse_set(ctx, U), workers).value
    return EnergyReport(value, "inverse", (_describe(U),))


def sumset(ctx: FieldCtx, U: FSubset, V: FSubset) -> FSubset:
    return FSubset(U.params, rep_sum(ctx, U, V).support)


def product_set(ctx: FieldCtx, U: FSubset, V: FSubset) -> FSubset:
    return FSubset(U.params, rep_prod(ctx, U, V).support)


# quartic oracles


def _guard(*subsets: FSubset):
    for U in subsets:
        if len(U) > BRUTEFORCE_LIMIT:
            raise BadArgument(f"brute-force energy is limited to {BRUTEFORCE_LIMIT} elements, got {len(U)}")


def _quadruples(table: np.ndarray) -> int:
    return int((table[:, :, None, None] == table[None, None, :, :]).sum())


def additive_energy_bruteforce(ctx: FieldCtx, U: FSubset) -> int:
    _guard(U)
    u = U.elems
    return _quadruples(np.asarray(field.add(ctx, u[:, None], u[None, :])))


def multiplicative_energy_bruteforce(ctx: FieldCtx, U: FSubset) -> int:
    _guard(U)
    u = U.elems
    return _quadruples(np.asarray(field.mul(ctx, u[:, None], u[None, :])))


def cross_energy_bruteforce(ctx: FieldCtx, B: FSubset, C: FSubset) -> int:
    _guard(B, C)
    return _quadruples(np.asarray(field.add(ctx, B.elems[:, None], C.elems[None, :])))
