"""Low-energy decomposition: the threshold M(Z), dyadic extraction and the partition loop.

``partition`` splits A into S and T with E(S) <= A^3 / M(A) by repeatedly removing a
subset Q whose image f(Q) has small additive energy. Each Q comes from ``extract_subset``,
a constructive dyadic pigeonhole argument: the popular sum class, the rich columns, and
(when the columns are too few) the rich rows among them.

Logarithms are natural with a floor of ``ThresholdParams.log_floor``.
"""
import math
from dataclasses import dataclass
from typing import List, Optional, Tuple

import numpy as np

from fq.decomp import energy, field, ratfunc
from fq.decomp.events import DecompLogger
from fq.decomp.exceptions import (
    BadArgument,
    DecompRuntimeError,
    ExceptionalFunction,
    SetTooSmall,
)
from fq.decomp.field import FieldCtx
from fq.decomp.ratfunc import RationalFunction
from fq.decomp.sets import FSubset, union_all

logger = DecompLogger("Decompose")


@dataclass(frozen=True)
class ThresholdParams:
    """Knobs of the threshold and the dyadic bucketing.

    ``m_override`` replaces M(A) in the partition threshold. M(A) <= 1 for every field
    small enough to tabulate, so a non-trivial partition needs an explicit M.
    """

    log_floor: float = 1.0
    dyadic_base: int = 2
    m_override: Optional[float] = None

    def __post_init__(self):
        if self.log_floor < 1:
            raise BadArgument(f"log_floor must be >= 1, got {self.log_floor}")
        if self.dyadic_base < 2:
            raise BadArgument(f"dyadic_base must be >= 2, got {self.dyadic_base}")
        if self.m_override is not None and self.m_override <= 0:
            raise BadArgument(f"m_override must be positive, got {self.m_override}")

    def log(self, z: float) -> float:
        return max(math.log(z), self.log_floor)


DEFAULT_PARAMS = ThresholdParams()


@dataclass(frozen=True, eq=False)
class ExtractionTrace:
    rho: int
    S_set: FSubset
    P_size: int
    case: str
    s_or_t: int
    U_set: FSubset
    certified_u: int
    a_energy: int
    u_f_energy: int
    u_floor: float
    f_energy_rhs: float

    @property
    def S_size(self) -> int:
        return len(self.S_set)


@dataclass(frozen=True, eq=False)
class IterationRecord:
    index: int
    v_size: int
    v_energy: int
    q_size: int
    q_f_energy: int
    guarded: bool
    trace: Optional[ExtractionTrace] = None


@dataclass(frozen=True, eq=False)
class DecompositionResult:
    A: FSubset
    S_final: FSubset
    T_final: FSubset
    pieces: List[FSubset]
    iterations: List[IterationRecord]
    threshold: float
    trivial_flag: bool
    m_value: float
    s_energy: int
    t_f_energy: int
    aggregate_bound: float

    @property
    def c1(self) -> float:
        """E(S) M(A) / A^3."""
        return self.s_energy * self.m_value / len(self.A) ** 3 if len(self.A) else 0.0

    @property
    def c2(self) -> float:
        """E(f(T)) M(A) / A^3."""
        return self.t_f_energy * self.m_value / len(self.A) ** 3 if len(self.A) else 0.0

    def is_valid(self) -> bool:
        """S and T disjoint with union A, and T the disjoint union of the pieces."""
        if not self.S_final.isdisjoint(self.T_final):
            return False
        if self.S_final.union(self.T_final) != self.A:
            return False
        return sum(len(Q) for Q in self.pieces) == len(self.T_final)


def m_of_z(Z: float, q: float, params: ThresholdParams = DEFAULT_PARAMS) -> float:
    """M(Z) = min{ q^(1/2) / (Z^(1/2) L^(11/4)), Z^(4/5) / (q^(2/5) L^(31/10)) }, L = max(ln Z, 1)."""
    if Z <= 1:
        raise BadArgument(f"M(Z) needs Z > 1, got {Z}")
    if q < 2:
        raise BadArgument(f"M(Z) needs q >= 2, got {q}")
    L = params.log(Z)
    first = math.sqrt(q) / (math.sqrt(Z) * L**2.75)
    second = Z**0.8 / (q**0.4 * L**3.1)
    return min(first, second)


def effective_m(Z: float, q: float, params: ThresholdParams = DEFAULT_PARAMS) -> float:
    """``params.m_override`` when set, else M(Z)."""
    if params.m_override is not None:
        return params.m_override
    return m_of_z(Z, q, params)


def _levels(values: np.ndarray, base: int) -> np.ndarray:
    """floor(log_base v) for positive integers v."""
    levels = np.floor(np.log(values) / math.log(base)).astype(np.int64)
    levels += (base ** (levels + 1) <= values).astype(np.int64)
    levels -= (base**levels > values).astype(np.int64)
    return levels


def _popular_class(values: np.ndarray, base: int, weight_power: int) -> Tuple[int, np.ndarray]:
    """Dyadic class maximising (base^level)^weight_power * #class; smaller level on ties.

    Only positive values are bucketed. Returns the class floor and a mask of members.
    """
    positive = values > 0
    levels = np.full(values.shape, -1, dtype=np.int64)
    levels[positive] = _levels(values[positive], base)
    best_level, best_score = -1, -1
    for level in np.unique(levels[positive]):
        level = int(level)
        score = (base**level) ** weight_power * int((levels == level).sum())
        if score > best_score:
            best_level, best_score = level, score
    return base**best_level, levels == best_level


def extract_subset(
    ctx: FieldCtx,
    A: FSubset,
    f: RationalFunction,
    params: ThresholdParams = DEFAULT_PARAMS,
    check_function: bool = True,
) -> ExtractionTrace:
    """Find U inside A and u with r_{S,-A}(x) >= u on U, for a popular sum class S.

    The returned trace also carries E(f(U)) next to the size floor and energy ceiling the
    construction aims for (implied constants set to 1, reported only).
    """
    a_size = len(A)
    if a_size < 2:
        raise SetTooSmall(f"extraction needs |A| >= 2, got {a_size}")
    if check_function:
        report = ratfunc.is_exceptional(ctx, f)
        if report:
            raise ExceptionalFunction(report.witness)
    base = params.dyadic_base
    L = params.log(a_size)
    elems = A.elems

    # popular sums
    r = energy.rep_sum(ctx, A, A).table
    a_energy = int(np.dot(r, r))
    rho, in_S = _popular_class(r, base, 2)
    S = FSubset(A.params, np.flatnonzero(in_S))

    # point set P: pairs (x, y) of A with x + y in S, rows indexed by x
    sums = np.asarray(field.add(ctx, elems[:, None], elems[None, :]), dtype=np.int64)
    P = in_S[sums]
    row_counts = P.sum(axis=1)
    s, in_V = _popular_class(row_counts, base, 1)
    V_size = int(in_V.sum())

    if V_size >= s / math.sqrt(L):
        case, u, members = "I", s, in_V
    else:
        col_counts = P[in_V].sum(axis=0)
        t, in_W = _popular_class(col_counts, base, 1)
        case, u, members = "II", t, in_W
    U = FSubset(A.params, elems[members])

    # r_{S,-A}(x) = #{y in A : x + y in S}, recounted for every x in U
    U_sums = np.asarray(field.add(ctx, U.elems[:, None], elems[None, :]), dtype=np.int64)
    richness = in_S[U_sums].sum(axis=1)
    if U.elems.size and int(richness.min()) < u:
        raise DecompRuntimeError(f"extraction certificate failed: min richness {int(richness.min())} < {u}")

    u_size = len(U)
    u_f_energy = energy.f_energy(ctx, f, U).value
    u_floor = math.sqrt(a_energy) / (math.sqrt(a_size) * L**1.75)
    f_energy_rhs = (a_size * u_size**6 * L**5.5 / ctx.q + a_size * u_size**3 * ctx.q * L**6) / a_energy
    logger.debug(
        f"extract |A|={a_size}: rho={rho} |S|={len(S)} |P|={int(P.sum())} case {case} "
        f"u={u} |U|={u_size}"
    )
    return ExtractionTrace(
        rho=int(rho),
        S_set=S,
        P_size=int(P.sum()),
        case=case,
        s_or_t=int(u),
        U_set=U,
        certified_u=int(u),
        a_energy=a_energy,
        u_f_energy=u_f_energy,
        u_floor=u_floor,
        f_energy_rhs=f_energy_rhs,
    )


def partition(
    ctx: FieldCtx,
    A: FSubset,
    f: RationalFunction,
    params: ThresholdParams = DEFAULT_PARAMS,
    keep_traces: bool = False,
) -> DecompositionResult:
    """Split A into S with E(S) <= A^3 / M and T, the disjoint union of extracted pieces.

    Returns the trivial partition (S = A, T empty) when M <= 1 or |A| < 2. Every
    iteration removes at least one element, so at most |A| iterations run.
    """
    report = ratfunc.is_exceptional(ctx, f)
    if report:
        raise ExceptionalFunction(report.witness)
    a_size = len(A)
    empty = FSubset(A.params)
    if a_size < 2:
        m_value = params.m_override or 1.0
    else:
        m_value = effective_m(a_size, ctx.q, params)
    threshold = a_size**3 / m_value

    if a_size < 2 or m_value <= 1:
        s_energy = energy.additive_energy(ctx, A).value
        logger.info(f"partition of {a_size} elements is trivial (M={m_value:.4g})")
        return DecompositionResult(A, A, empty, [], [], threshold, True, m_value, s_energy, 0, 0.0)

    V = A
    pieces: List[FSubset] = []
    iterations: List[IterationRecord] = []
    while True:
        v_energy = energy.additive_energy(ctx, V).value
        if v_energy <= threshold:
            break
        if len(iterations) >= a_size:
            raise DecompRuntimeError(f"partition exceeded {a_size} iterations")
        trace = extract_subset(ctx, V, f, params, check_function=False) if len(V) >= 2 else None
        Q = trace.U_set if trace is not None else empty
        guarded = len(Q) == 0 or len(Q) == len(V)
        if guarded:
            Q = FSubset(A.params, V.elems[:1])
            logger.debug(f"progress guard moved element {int(V.elems[0])} (|V|={len(V)})")
        q_f_energy = energy.f_energy(ctx, f, Q).value
        iterations.append(
            IterationRecord(
                index=len(iterations),
                v_size=len(V),
                v_energy=v_energy,
                q_size=len(Q),
                q_f_energy=q_f_energy,
                guarded=guarded,
                trace=trace if keep_traces else None,
            )
        )
        pieces.append(Q)
        V = V.difference(Q)

    T = union_all(A.params, pieces)
    t_f_energy = energy.f_energy(ctx, f, T).value
    aggregate = sum(rec.q_f_energy**0.25 for rec in iterations) ** 4
    logger.info(
        f"partition of {a_size} elements: |S|={len(V)} |T|={len(T)} after {len(iterations)} iteration(s)"
    )
    return DecompositionResult(
        A, V, T, pieces, iterations, threshold, False, m_value, v_energy, t_f_energy, aggregate
    )
