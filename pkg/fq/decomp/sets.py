"""Field subsets and the structured families the experiments are run on."""
import math
from typing import Iterable, Iterator, List, Sequence, Union

import numpy as np

from fq.decomp import field
from fq.decomp.events import DecompLogger
from fq.decomp.exceptions import BadArgument, BadLambda, DecompRuntimeError, NotPrimeField
from fq.decomp.field import FieldCtx, FieldElement, FieldParams

logger = DecompLogger("Sets")

# RandomState accepts 32-bit seeds only
SEED_LIMIT = 2**32


class FSubset:
    """A sorted, deduplicated set of element indices of one field."""

    __slots__ = ("params", "elems")

    def __init__(self, params: FieldParams, elems: Union[Iterable[int], np.ndarray] = ()):
        arr = np.unique(np.asarray(list(elems) if not isinstance(elems, np.ndarray) else elems, dtype=np.int64))
        if arr.size and (arr[0] < 0 or arr[-1] >= params.q):
            raise BadArgument(f"elements must lie in [0, {params.q}) for {params}")
        arr.setflags(write=False)
        self.params = params
        self.elems = arr

    @classmethod
    def of(cls, ctx: FieldCtx, elems: Union[Iterable[int], np.ndarray] = ()) -> "FSubset":
        return cls(ctx.params, elems)

    def __len__(self) -> int:
        return int(self.elems.size)

    def __iter__(self) -> Iterator[int]:
        return (int(x) for x in self.elems)

    def __contains__(self, x) -> bool:
        i = np.searchsorted(self.elems, x)
        return bool(i < self.elems.size and self.elems[i] == x)

    def __eq__(self, other) -> bool:
        if not isinstance(other, FSubset):
            return NotImplemented
        return self.params == other.params and np.array_equal(self.elems, other.elems)

    __hash__ = None  # type: ignore[assignment]

    def __repr__(self) -> str:
        shown = ", ".join(str(x) for x in self.elems[:12])
        more = ", ..." if len(self) > 12 else ""
        return f"FSubset({self.params}, [{shown}{more}], size={len(self)})"

    def tolist(self) -> List[int]:
        return [int(x) for x in self.elems]

    def _check(self, other: "FSubset"):
        if self.params != other.params:
            raise BadArgument(f"cannot combine subsets of {self.params} and {other.params}")

    def union(self, other: "FSubset") -> "FSubset":
        self._check(other)
        return FSubset(self.params, np.union1d(self.elems, other.elems))

    def intersection(self, other: "FSubset") -> "FSubset":
        self._check(other)
        return FSubset(self.params, np.intersect1d(self.elems, other.elems))

    def difference(self, other: "FSubset") -> "FSubset":
        self._check(other)
        return FSubset(self.params, np.setdiff1d(self.elems, other.elems))

    def isdisjoint(self, other: "FSubset") -> bool:
        return len(self.intersection(other)) == 0

    def without_zero(self) -> "FSubset":
        return FSubset(self.params, self.elems[self.elems != 0])


def union_all(params: FieldParams, parts: Sequence[FSubset]) -> FSubset:
    if not parts:
        return FSubset(params)
    return FSubset(params, np.concatenate([part.elems for part in parts]))


def _require_prime_field(ctx: FieldCtx, what: str):
    if ctx.n != 1:
        raise NotPrimeField(f"{what} is only defined over prime fields, not {ctx}")


def _require_seed(seed: int):
    if not 0 <= seed < SEED_LIMIT:
        raise BadArgument(f"seed must lie in [0, 2**32), got {seed}")


def whole_field(ctx: FieldCtx) -> FSubset:
    return FSubset.of(ctx, ctx.elements())


def interval(ctx: FieldCtx, start: int, length: int) -> FSubset:
    _require_prime_field(ctx, "interval")
    if length < 0:
        raise BadArgument(f"interval length must be >= 0, got {length}")
    return FSubset.of(ctx, (start + np.arange(length, dtype=np.int64)) % ctx.p)


def geometric_progression(ctx: FieldCtx, base: FieldElement, length: int) -> FSubset:
    """{base, base^2, ..., base^length}."""
    if length < 0:
        raise BadArgument(f"progression length must be >= 0, got {length}")
    if length == 0:
        return FSubset.of(ctx)
    if base == 0:
        return FSubset.of(ctx, [0])
    m = ctx.q - 1
    exps = (int(ctx.dlog_table[base]) * np.arange(1, length + 1, dtype=np.int64)) % m
    return FSubset.of(ctx, ctx.exp_table[exps])


def mult_subgroup(ctx: FieldCtx, d: int) -> FSubset:
    m = ctx.q - 1
    if d < 1 or m % d:
        raise BadArgument(f"subgroup order {d} does not divide q - 1 = {m}")
    return FSubset.of(ctx, ctx.exp_table[np.arange(d, dtype=np.int64) * (m // d)])


def add_subspace(ctx: FieldCtx, basis: Sequence[FieldElement]) -> FSubset:
    """All GF(p)-linear combinations of ``basis``."""
    span = np.zeros(1, dtype=np.int64)
    for b in basis:
        multiples = np.array([field.scale(ctx, c, b) for c in range(ctx.p)], dtype=np.int64)
        span = np.unique(field.add(ctx, span[:, None], multiples[None, :]))
    return FSubset.of(ctx, span)


def subfield(ctx: FieldCtx, d: int) -> FSubset:
    return FSubset.of(ctx, field.subfield(ctx, d))


def random_subset(ctx: FieldCtx, size: int, seed: int) -> FSubset:
    """Uniform subset without replacement.

    Uses numpy's legacy ``RandomState`` (MT19937), whose stream is frozen across numpy
    releases and platforms: the output for fixed (q, size, seed) never changes.
    """
    if not 0 <= size <= ctx.q:
        raise BadArgument(f"cannot draw {size} distinct elements from {ctx}")
    _require_seed(seed)
    rng = np.random.RandomState(seed)
    return FSubset.of(ctx, rng.permutation(ctx.q)[:size])


def random_nonzero_subset(ctx: FieldCtx, size: int, seed: int) -> FSubset:
    if not 0 <= size < ctx.q:
        raise BadArgument(f"cannot draw {size} distinct nonzero elements from {ctx}")
    _require_seed(seed)
    rng = np.random.RandomState(seed)
    return FSubset.of(ctx, 1 + rng.permutation(ctx.q - 1)[:size])


def inverse_set(ctx: FieldCtx, U: FSubset) -> FSubset:
    nonzero = U.elems[U.elems != 0]
    return FSubset.of(ctx, field.inv(ctx, nonzero) if nonzero.size else nonzero)


def garaev_set(ctx: FieldCtx, lam: int) -> FSubset:
    """Intersection of the best length-lam window with the inverses of {1, ..., lam}.

    Every cyclic window {s, ..., s + lam - 1} is scanned and the fullest one is kept
    (smallest start on ties). Each element of J^{-1} lies in exactly lam windows, so the
    best window holds at least ceil(lam^2 / p) of them.
    """
    _require_prime_field(ctx, "garaev_set")
    p = ctx.p
    if not 1 <= lam < p:
        raise BadLambda(f"lambda must satisfy 1 <= lambda < {p}, got {lam}")
    inverses = field.inv(ctx, np.arange(1, lam + 1, dtype=np.int64))
    hits = np.zeros(p, dtype=np.int64)
    hits[inverses] = 1
    running = np.concatenate([[0], np.cumsum(np.concatenate([hits, hits]))])
    starts = np.arange(p)
    counts = running[starts + lam] - running[starts]
    best = int(np.argmax(counts))
    window = (best + np.arange(lam, dtype=np.int64)) % p
    result = FSubset.of(ctx, np.intersect1d(window, inverses))
    floor = math.ceil(lam * lam / p)
    if len(result) < floor:
        raise DecompRuntimeError(f"window count {len(result)} below the averaging floor {floor}")
    logger.debug(f"garaev_set p={p} lambda={lam}: window start {best}, size {len(result)}")
    return result


def ap_gp_union(ctx: FieldCtx, start: int, step: int, base: FieldElement, length: int) -> FSubset:
    """An arithmetic progression together with a geometric progression of the same length."""
    _require_prime_field(ctx, "ap_gp_union")
    ap = FSubset.of(ctx, (start + step * np.arange(length, dtype=np.int64)) % ctx.p)
    return ap.union(geometric_progression(ctx, base, length))
