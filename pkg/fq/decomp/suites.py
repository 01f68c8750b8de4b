"""Verification suites.

A suite expands the experiment config into independent instances, each with its own
seed drawn up front from a per-suite stream, so instances can run on a thread pool and
still produce identical records. Hard records state exact identities and inequalities;
report-only records measure implied constants and always pass.
"""
import math
import time
import zlib
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, replace
from functools import partial
from typing import Callable, Dict, Iterator, List, Optional, Sequence

import numpy as np
import sympy

from fq.decomp import characters, charsums, decompose, energy, field, ratfunc, sets
from fq.decomp.characters import AdditiveCharacter, MultiplicativeCharacter
from fq.decomp.config import SUITE_NAMES, ExperimentConfig
from fq.decomp.events import DecompLogger
from fq.decomp.exceptions import BadArgument, ConfigError
from fq.decomp.field import FieldCtx
from fq.decomp.ratfunc import RationalFunction
from fq.decomp.results import VerificationRecord, failures, record, sort_records
from fq.decomp.sets import FSubset
from fq.decomp.setspec import parse_set_spec

logger = DecompLogger("Suites")

# absolute slack for floating comparisons against sums of m unit-modulus terms
TOLERANCE = 1e-9
AXIOM_CUBE_LIMIT = 128


@dataclass(frozen=True)
class Instance:
    name: str
    check: Callable[[], List[VerificationRecord]]


SuiteBuilder = Callable[[ExperimentConfig], Iterator[Instance]]
SUITES: Dict[str, SuiteBuilder] = {}


def suite(name: str):
    def register(builder: SuiteBuilder) -> SuiteBuilder:
        SUITES[name] = builder
        return builder

    return register


def suite_rng(config: ExperimentConfig, name: str) -> np.random.RandomState:
    """Independent stream per suite, fixed by (seed, suite name)."""
    return np.random.RandomState([config.seed, zlib.crc32(name.encode())])


def field_of(q: int) -> FieldCtx:
    ((p, n),) = sympy.factorint(q).items()
    return field.build_field(int(p), int(n))


def _seeds(rng: np.random.RandomState, count: int) -> List[int]:
    return [int(s) for s in rng.randint(0, 2**31 - 1, size=count)]


def _function(ctx: FieldCtx, config: ExperimentConfig) -> RationalFunction:
    return ratfunc.parse_ratfunc(ctx, config.function)


def _params(config: ExperimentConfig) -> decompose.ThresholdParams:
    return decompose.ThresholdParams(m_override=config.m_override)


def _psi(ctx: FieldCtx, config: ExperimentConfig) -> AdditiveCharacter:
    return AdditiveCharacter(config.psi % ctx.q)


def _chi(ctx: FieldCtx, config: ExperimentConfig) -> MultiplicativeCharacter:
    return MultiplicativeCharacter(config.chi % (ctx.q - 1))


def _sizes(rng: np.random.RandomState, low: int, high: int, count: int) -> List[int]:
    return [int(s) for s in rng.randint(low, high + 1, size=count)]


# harness-level lemma checks


def verify_lemma_prodsum(
    ctx: FieldCtx, W: FSubset, X: FSubset, Y: FSubset, Z: FSubset, f: RationalFunction, instance: str = "prodsum"
) -> VerificationRecord:
    """J = #{f(w + x) = y + z} against its main term WXYZ/q; the discrepancy is scaled by sqrt(WXYZq)."""
    r_wx = energy.rep_sum(ctx, W, X).table
    r_yz = energy.rep_sum(ctx, Y, Z).table
    s = np.flatnonzero(r_wx)
    values, poles = ratfunc.evaluate_many(ctx, f, s)
    J = int(np.dot(r_wx[s][~poles], r_yz[values[~poles]])) if s.size else 0
    mass = len(W) * len(X) * len(Y) * len(Z)
    main = mass / ctx.q
    return record("lemmas", instance, abs(J - main), math.sqrt(mass * ctx.q))


def verify_lemma_rich(
    ctx: FieldCtx,
    A: FSubset,
    S: FSubset,
    U: FSubset,
    u: int,
    f: RationalFunction,
    tau: Optional[float] = None,
    instance: str = "rich",
) -> VerificationRecord:
    """#{x : r_U(f; x) >= tau} against ASUq / (u^2 tau^2), once r_{S,-A} >= u is confirmed on U."""
    if u <= 0:
        raise BadArgument(f"richness u must be positive, got {u}")
    if len(U):
        richness = energy.rep_diff(ctx, S, A).table[U.elems]
        if int(richness.min()) < u:
            raise BadArgument(f"r_(S,-A) drops to {int(richness.min())} < u = {u} on U")
    floor = 2 * max(f.degree, 1) * len(A) * len(S) * len(U) / (u * ctx.q)
    if tau is None:
        tau = max(floor, 1.0)
    elif tau < floor:
        raise BadArgument(f"tau = {tau} is below 2kASU/(uq) = {floor}")
    count = int((energy.rep_f(ctx, f, U).table >= tau).sum())
    rhs = len(A) * len(S) * len(U) * ctx.q / (u * u * tau * tau)
    return record("lemmas", instance, count, rhs)


def verify_union_energy(ctx: FieldCtx, family: Sequence[FSubset], instance: str = "union") -> VerificationRecord:
    """E(union)^(1/4) <= sum E(A_i)^(1/4), with exact integer energies."""
    for i, first in enumerate(family):
        for second in family[i + 1 :]:
            if not first.isdisjoint(second):
                raise BadArgument("union-energy family must be pairwise disjoint")
    union = sets.union_all(ctx.params, list(family))
    lhs = energy.additive_energy(ctx, union).value ** 0.25
    rhs = sum(energy.additive_energy(ctx, part).value ** 0.25 for part in family)
    return record("lemmas", instance, lhs, rhs, passed=lhs <= rhs * (1 + 1e-12), hard=True)


# suites


@suite("field-axioms")
def field_axioms(config: ExperimentConfig) -> Iterator[Instance]:
    for q in config.fields:
        yield Instance(f"q={q:04d}", partial(_axiom_records, q))


def _axiom_records(q: int) -> List[VerificationRecord]:
    ctx = field_of(q)
    rec = partial(record, "field-axioms", hard=True)
    x = ctx.elements()
    # exhaustive triples up to AXIOM_CUBE_LIMIT elements, an even stride above it
    t = x if ctx.q <= AXIOM_CUBE_LIMIT else x[:: -(-ctx.q // AXIOM_CUBE_LIMIT)]
    a, b, c = t[:, None, None], t[None, :, None], t[None, None, :]
    u, v = x[:, None], x[None, :]
    nz = ctx.nonzero()
    violations = {
        "add-assoc": field.add(ctx, field.add(ctx, a, b), c) != field.add(ctx, a, field.add(ctx, b, c)),
        "mul-assoc": field.mul(ctx, field.mul(ctx, a, b), c) != field.mul(ctx, a, field.mul(ctx, b, c)),
        "distributive": field.mul(ctx, a, field.add(ctx, b, c)) != field.add(ctx, field.mul(ctx, a, b), field.mul(ctx, a, c)),
        "add-commute": field.add(ctx, u, v) != field.add(ctx, v, u),
        "mul-commute": field.mul(ctx, u, v) != field.mul(ctx, v, u),
        "add-inverse": field.add(ctx, x, field.neg(ctx, x)) != 0,
        "mul-inverse": field.mul(ctx, nz, field.inv(ctx, nz)) != 1,
        "trace-linear": field.trace(ctx, field.add(ctx, u, v)) != (field.trace(ctx, u) + field.trace(ctx, v)) % ctx.p,
        "frobenius-add": field.frobenius(ctx, field.add(ctx, u, v)) != field.add(ctx, field.frobenius(ctx, u), field.frobenius(ctx, v)),
        "frobenius-mul": field.frobenius(ctx, field.mul(ctx, u, v)) != field.mul(ctx, field.frobenius(ctx, u), field.frobenius(ctx, v)),
    }
    out = []
    for name, bad in violations.items():
        bad = np.asarray(bad)
        out.append(rec(f"q={q:04d}/{name}", int(bad.sum()), bad.size, passed=not bad.any()))

    order = np.arange(ctx.q - 1)
    generator_ok = (
        np.unique(ctx.exp_table).size == ctx.q - 1
        and np.array_equal(ctx.dlog_table[ctx.exp_table], order)
        and field.power(ctx, ctx.generator, ctx.q - 1) == 1
        and not np.any(ctx.exp_table[1:] == 1)
    )
    out.append(rec(f"q={q:04d}/generator", 0 if generator_ok else 1, 1, passed=generator_ok))

    balance = np.bincount(ctx.trace_table, minlength=ctx.p)
    out.append(rec(f"q={q:04d}/trace-balance", int(balance.max()), ctx.q // ctx.p, passed=bool(np.all(balance == ctx.q // ctx.p))))

    fixed = x[np.asarray(field.frobenius(ctx, x)) == x]
    fixed_ok = np.array_equal(fixed, np.arange(ctx.p))
    out.append(rec(f"q={q:04d}/frobenius-fixed", fixed.size, ctx.p, passed=fixed_ok))
    return out


@suite("characters")
def character_checks(config: ExperimentConfig) -> Iterator[Instance]:
    for q in config.fields:
        yield Instance(f"q={q:04d}", partial(_orthogonality_records, q))
    rng = suite_rng(config, "characters")
    for p in config.primes:
        for trial, seed in enumerate(_seeds(rng, config.trials)):
            yield Instance(f"weil/p={p}/{trial:03d}", partial(_weil_record, p, trial, seed))


def _orthogonality_records(q: int) -> List[VerificationRecord]:
    ctx = field_of(q)
    rec = partial(record, "characters", hard=True)
    x = ctx.elements()
    tag = f"q={q:04d}"

    traces = ctx.trace_table[np.asarray(field.mul(ctx, x[:, None], x[None, :]), dtype=np.int64)]
    additive = characters.unit_roots(ctx.p)[traces]
    add_err = float(np.abs(additive[1:].sum(axis=1)).max()) if ctx.q > 1 else 0.0

    m = ctx.q - 1
    js = np.arange(1, m)
    if js.size:
        mult = characters.unit_roots(m)[(js[:, None] * np.arange(m)[None, :]) % m]
        mult_err = float(np.abs(mult.sum(axis=1)).max())
    else:
        mult_err = 0.0

    psi = AdditiveCharacter(1)
    chi = MultiplicativeCharacter(1)
    u, v = x[:, None], x[None, :]
    hom_add = np.abs(
        characters.eval_additive(ctx, psi, field.add(ctx, u, v))
        - characters.eval_additive(ctx, psi, u) * characters.eval_additive(ctx, psi, v)
    ).max()
    nz = ctx.nonzero()
    hom_mul = np.abs(
        characters.eval_multiplicative(ctx, chi, field.mul(ctx, nz[:, None], nz[None, :]))
        - characters.eval_multiplicative(ctx, chi, nz[:, None]) * characters.eval_multiplicative(ctx, chi, nz[None, :])
    ).max()
    slack = TOLERANCE * ctx.q
    return [
        rec(f"{tag}/additive-orthogonality", add_err, slack, passed=add_err <= slack),
        rec(f"{tag}/multiplicative-orthogonality", mult_err, slack, passed=mult_err <= slack),
        rec(f"{tag}/additive-homomorphism", float(hom_add), 1e-10, passed=hom_add <= 1e-10),
        rec(f"{tag}/multiplicative-homomorphism", float(hom_mul), 1e-10, passed=hom_mul <= 1e-10),
    ]


def _weil_record(p: int, trial: int, seed: int) -> List[VerificationRecord]:
    ctx = field.build_field(p)
    rng = np.random.RandomState(seed)
    degrees = [k for k in range(2, 6) if k % p]
    if not degrees:
        return []
    k = degrees[rng.randint(len(degrees))]
    coeffs = list(rng.randint(0, p, size=k)) + [int(rng.randint(1, p))]
    f = ratfunc.from_coeffs(ctx, coeffs)
    values, _ = ratfunc.evaluate_many(ctx, f, ctx.elements())
    total = abs(characters.complete_sum(ctx, characters.additive_table(ctx, AdditiveCharacter(1)), values))
    bound = characters.weil_bound(ctx.q, k)
    return [
        record(
            "characters",
            f"weil/p={p}/{trial:03d}/k={k}",
            total,
            bound,
            passed=total <= bound + TOLERANCE * ctx.q,
            hard=True,
        )
    ]


@suite("energy-oracle")
def energy_oracle(config: ExperimentConfig) -> Iterator[Instance]:
    rng = suite_rng(config, "energy-oracle")
    for p in config.primes:
        for trial, seed in enumerate(_seeds(rng, config.trials)):
            yield Instance(f"p={p}/{trial:03d}", partial(_energy_records, p, trial, seed))
    big = [p for p in config.primes if p >= 41]
    if big:
        for n in range(1, 21):
            yield Instance(f"ap/n={n:02d}", partial(_progression_record, max(big), n))


def _energy_records(p: int, trial: int, seed: int) -> List[VerificationRecord]:
    ctx = field.build_field(p)
    rng = np.random.RandomState(seed)
    rec = partial(record, "energy-oracle", hard=True)
    top = min(energy.BRUTEFORCE_LIMIT, 40, p)
    U = sets.random_subset(ctx, int(rng.randint(1, top + 1)), int(rng.randint(2**31 - 1)))
    V = sets.random_subset(ctx, int(rng.randint(1, top + 1)), int(rng.randint(2**31 - 1)))
    tag = f"p={p}/{trial:03d}"

    fast = energy.additive_energy(ctx, U).value
    slow = energy.additive_energy_bruteforce(ctx, U)
    fast_x = energy.multiplicative_energy(ctx, U).value
    slow_x = energy.multiplicative_energy_bruteforce(ctx, U)
    via_sums = energy.rep_sum(ctx, U, U).square_sum()
    sumset = len(energy.sumset(ctx, U, U))
    e_v = energy.additive_energy(ctx, V).value
    cross = energy.cross_energy(ctx, U, V).value
    return [
        rec(f"{tag}/additive-oracle", fast, slow, passed=fast == slow),
        rec(f"{tag}/multiplicative-oracle", fast_x, slow_x, passed=fast_x == slow_x),
        rec(f"{tag}/sum-diff-identity", via_sums, fast, passed=via_sums == fast),
        rec(f"{tag}/sumset-lower-bound", fast, len(U) ** 4 / sumset, passed=fast * sumset >= len(U) ** 4),
        rec(f"{tag}/cross-cauchy-schwarz", cross, math.sqrt(fast * e_v), passed=cross * cross <= fast * e_v),
    ]


def _progression_record(p: int, n: int) -> List[VerificationRecord]:
    ctx = field.build_field(p)
    value = energy.additive_energy(ctx, sets.interval(ctx, 0, n)).value
    closed = (2 * n**3 + n) // 3
    return [record("energy-oracle", f"ap/p={p}/n={n:02d}", value, closed, passed=value == closed, hard=True)]


@suite("ratfunc")
def ratfunc_checks(config: ExperimentConfig) -> Iterator[Instance]:
    for p in (3, 5, 7):
        yield Instance(f"exceptional/p={p}", partial(_exceptional_records, p))
    for q in config.fields:
        if not sympy.isprime(q):
            yield Instance(f"linearized/q={q:04d}", partial(_linearized_record, q))
    rng = suite_rng(config, "ratfunc")
    for q in config.fields:
        for trial, seed in enumerate(_seeds(rng, config.trials)):
            yield Instance(f"fiber/q={q:04d}/{trial:03d}", partial(_fiber_records, q, trial, seed))


def _exceptional_records(p: int) -> List[VerificationRecord]:
    ctx = field.build_field(p)
    rec = partial(record, "ratfunc")
    tag = f"exceptional/p={p}"
    out = []

    coeffs = [0] * (p + 1)
    coeffs[0], coeffs[1], coeffs[p] = 1, 2 % p, 1
    f = ratfunc.from_coeffs(ctx, coeffs)
    report = ratfunc.is_exceptional(ctx, f)
    expected = 3 % p
    out.append(
        rec(f"{tag}/artin-schreier", -1 if report.witness is None else report.witness, expected,
            passed=bool(report) and report.witness == expected, hard=True)
    )
    if report:
        xs = ctx.elements()
        values, poles = ratfunc.evaluate_many(ctx, f, xs)
        shifted = field.sub(ctx, values[~poles], field.mul(ctx, report.witness, xs[~poles]))
        total = abs(characters.complete_sum(ctx, characters.additive_table(ctx, AdditiveCharacter(1)), shifted))
        points = int((~poles).sum())
        out.append(
            rec(f"{tag}/degenerate-sum", total, points, passed=abs(total - points) <= TOLERANCE * points, hard=True)
        )

    square = ratfunc.is_exceptional(ctx, ratfunc.monomial(ctx, 2))
    out.append(rec(f"{tag}/square", int(bool(square)), 0, passed=not square, hard=True))
    inverse = ratfunc.is_exceptional(ctx, ratfunc.inversion(ctx))
    # over GF(3), 1/x = x on the nonzero elements
    out.append(rec(f"{tag}/inverse", int(bool(inverse)), 0, passed=not inverse or p == 3, hard=p != 3))
    return out


def _linearized_record(q: int) -> List[VerificationRecord]:
    ctx = field_of(q)
    lin = None
    for a in list(range(1, ctx.q)) + [0]:
        candidate = ratfunc.linearized(ctx, [a, 1])
        if candidate.is_permutation:
            lin = candidate
            break
    flagged = lin is not None and bool(ratfunc.is_exceptional(ctx, lin.f))
    return [record("ratfunc", f"linearized/q={q:04d}", int(flagged), 1, passed=flagged, hard=True)]


def _random_function(ctx: FieldCtx, rng: np.random.RandomState, max_degree: int = 5) -> RationalFunction:
    num_deg = int(rng.randint(0, max_degree + 1))
    den_deg = int(rng.randint(0, max_degree + 1))
    num = list(rng.randint(0, ctx.q, size=num_deg)) + [int(rng.randint(1, ctx.q))]
    den = list(rng.randint(0, ctx.q, size=den_deg)) + [int(rng.randint(1, ctx.q))]
    return ratfunc.from_coeffs(ctx, num, den)


def _fiber_records(q: int, trial: int, seed: int) -> List[VerificationRecord]:
    ctx = field_of(q)
    rng = np.random.RandomState(seed)
    rec = partial(record, "ratfunc", hard=True)
    tag = f"fiber/q={q:04d}/{trial:03d}"
    g = ratfunc.Polynomial(tuple(int(c) for c in rng.randint(0, ctx.q, size=int(rng.randint(1, 6)))))
    h = ratfunc.Polynomial(tuple(int(c) for c in rng.randint(0, ctx.q, size=int(rng.randint(1, 6)))) + (1,))
    f = ratfunc.normalize(ctx, g, h)
    out = [rec(f"{tag}/normalize-idempotent", 0, 1, passed=ratfunc.normalize(ctx, f.num, f.den) == f)]

    xs = ctx.elements()
    h_vals = np.asarray(ratfunc.poly_eval(ctx, h, xs))
    ok = h_vals != 0
    direct = field.div(ctx, np.asarray(ratfunc.poly_eval(ctx, g, xs))[ok], h_vals[ok])
    values, poles = ratfunc.evaluate_many(ctx, f, xs[ok])
    agree = not poles.any() and np.array_equal(values, np.asarray(direct))
    out.append(rec(f"{tag}/eval-agrees", 0 if agree else 1, 1, passed=agree))

    if f.degree >= 1:
        fiber = int(ratfunc.fiber_sizes(ctx, f).max())
        out.append(rec(f"{tag}/fiber-bound", fiber, f.degree, passed=fiber <= f.degree))
    return out


def _random_sized_set(ctx: FieldCtx, rng: np.random.RandomState, size: int, nonzero: bool = False) -> FSubset:
    seed = int(rng.randint(2**31 - 1))
    if nonzero:
        return sets.random_nonzero_subset(ctx, min(size, ctx.q - 1), seed)
    return sets.random_subset(ctx, min(size, ctx.q), seed)


@suite("extraction")
def extraction(config: ExperimentConfig) -> Iterator[Instance]:
    rng = suite_rng(config, "extraction")
    for p in config.primes:
        for trial, seed in enumerate(_seeds(rng, config.trials)):
            yield Instance(f"p={p}/{trial:03d}", partial(_extraction_records, config, p, trial, seed))


def _extraction_records(config: ExperimentConfig, p: int, trial: int, seed: int) -> List[VerificationRecord]:
    ctx = field.build_field(p)
    rng = np.random.RandomState(seed)
    f = _function(ctx, config)
    params = _params(config)
    A = _random_sized_set(ctx, rng, max(2, math.ceil(p**0.55)))
    trace = decompose.extract_subset(ctx, A, f, params)
    rec = partial(record, "extraction")
    tag = f"p={p}/{trial:03d}"

    richness = energy.rep_diff(ctx, trace.S_set, A).table[trace.U_set.elems]
    certified = bool(np.all(richness >= trace.certified_u))
    rho = trace.rho
    rho_ok = 1 <= rho <= len(A) and (rho & (rho - 1)) == 0
    inside = trace.U_set.difference(A)
    return [
        rec(f"{tag}/certificate", int(richness.min()) if richness.size else 0, trace.certified_u, passed=certified, hard=True),
        rec(f"{tag}/rho-dyadic", rho, len(A), passed=rho_ok, hard=True),
        rec(f"{tag}/U-inside-A", len(inside), 0, passed=len(inside) == 0, hard=True),
        rec(f"{tag}/U-size", len(trace.U_set), trace.u_floor),
        rec(f"{tag}/f-energy", trace.u_f_energy, trace.f_energy_rhs),
    ]


@suite("partition")
def partition_checks(config: ExperimentConfig) -> Iterator[Instance]:
    rng = suite_rng(config, "partition")
    for p in config.primes:
        for trial, seed in enumerate(_seeds(rng, config.trials)):
            yield Instance(f"p={p}/{trial:03d}", partial(_partition_random, config, p, trial, seed))
        if p > 64:
            yield Instance(f"p={p}/ap-gp", partial(_partition_structured, config, p))
    yield Instance("whole-field", partial(_partition_whole_field, config))


def _partition_records(
    ctx: FieldCtx, A: FSubset, f: RationalFunction, params: decompose.ThresholdParams, tag: str
) -> List[VerificationRecord]:
    result = decompose.partition(ctx, A, f, params)
    rec = partial(record, "partition")
    iterations = len(result.iterations)
    out = [
        rec(f"{tag}/valid", int(not result.is_valid()), 0, passed=result.is_valid(), hard=True),
        rec(f"{tag}/iterations", iterations, len(A), passed=iterations <= len(A), hard=True),
        rec(
            f"{tag}/aggregate",
            result.t_f_energy,
            result.aggregate_bound,
            passed=result.t_f_energy <= result.aggregate_bound * (1 + 1e-12),
            hard=True,
        ),
    ]
    if not result.trivial_flag:
        out.append(
            rec(f"{tag}/threshold", result.s_energy, result.threshold,
                passed=result.s_energy <= result.threshold, hard=True)
        )
    out.append(rec(f"{tag}/c1", result.c1, 1.0))
    out.append(rec(f"{tag}/c2", result.c2, 1.0))
    return out


def _partition_random(config: ExperimentConfig, p: int, trial: int, seed: int) -> List[VerificationRecord]:
    ctx = field.build_field(p)
    rng = np.random.RandomState(seed)
    A = _random_sized_set(ctx, rng, max(2, math.ceil(p**0.55)))
    return _partition_records(ctx, A, _function(ctx, config), _params(config), f"p={p}/{trial:03d}")


def _partition_structured(config: ExperimentConfig, p: int) -> List[VerificationRecord]:
    ctx = field.build_field(p)
    A = sets.interval(ctx, 1, 32).union(sets.geometric_progression(ctx, 3, 32))
    return _partition_records(ctx, A, _function(ctx, config), _params(config), f"p={p}/ap-gp")


def _partition_whole_field(config: ExperimentConfig) -> List[VerificationRecord]:
    ctx = field.build_field(11)
    params = decompose.ThresholdParams(m_override=2.0)
    return _partition_records(ctx, sets.whole_field(ctx), ratfunc.inversion(ctx), params, "whole-field/p=11")


@suite("charsum-bounds")
def charsum_bounds(config: ExperimentConfig) -> Iterator[Instance]:
    rng = suite_rng(config, "charsum-bounds")
    for p in config.primes:
        for trial, seed in enumerate(_seeds(rng, config.trials)):
            yield Instance(f"p={p}/{trial:03d}", partial(_charsum_records, config, p, trial, seed))
        yield Instance(f"p={p}/lower-bound", partial(_lower_bound_record, p))
        yield Instance(f"p={p}/convolution", partial(_convolution_record, config, p))


def _charsum_records(config: ExperimentConfig, p: int, trial: int, seed: int) -> List[VerificationRecord]:
    ctx = field.build_field(p)
    rng = np.random.RandomState(seed)
    psi, chi = _psi(ctx, config), _chi(ctx, config)
    A, B, C = (_random_sized_set(ctx, rng, int(rng.randint(1, 25)), nonzero=True) for _ in range(3))
    rec = partial(record, "charsum-bounds")
    tag = f"p={p}/{trial:03d}"
    terms = len(A) * len(B) * len(C)
    slack = TOLERANCE * max(terms, 1)
    out = []

    S = charsums.sum_S(ctx, A, B, C, psi)
    naive = charsums.sum_S_naive(ctx, A, B, C, psi)
    out.append(rec(f"{tag}/S-fast-path", abs(S.value - naive), slack, passed=abs(S.value - naive) <= slack, hard=True))
    if not psi.trivial:
        bilin1 = S.bound("bilin1")
        out.append(
            rec(f"{tag}/S-bilinear", S.magnitude, bilin1.value, passed=S.magnitude <= bilin1.value + slack, hard=True)
        )
        cs, l41 = S.bound("lemma41_cs"), S.bound("lemma41")
        chain = S.magnitude <= cs.value + slack and cs.value <= l41.value * (1 + 1e-12)
        out.append(rec(f"{tag}/S-energy-chain", S.magnitude, l41.value, passed=chain, hard=True))

    T = charsums.sum_T(ctx, A, B, C, chi, workers=config.threads)
    out.append(rec(f"{tag}/T-bilinear", T.magnitude, T.bound("bilin2").value))
    out.append(rec(f"{tag}/T-energy", T.magnitude, T.bound("lemma42").value))

    mixed = charsums.sum_mixed(ctx, A, B, C, chi, psi)
    out.append(rec(f"{tag}/mixed", mixed.magnitude, mixed.bound("thm14").value))

    alpha, beta, gamma = (charsums.WeightVector.ones(X) for X in (A, B, C))
    K = charsums.kloosterman_K(ctx, alpha, beta, gamma, psi, bounds=len(C) > 1)
    K_naive = charsums.kloosterman_K_naive(ctx, alpha, beta, gamma, psi)
    k_slack = TOLERANCE * max(abs(K_naive), 1.0)
    out.append(rec(f"{tag}/K-fast-path", abs(K.value - K_naive), k_slack, passed=abs(K.value - K_naive) <= k_slack, hard=True))
    if len(C) > 1:
        out.append(rec(f"{tag}/K-bound", K.magnitude, K.bound("thm15").value))

    if p <= 257:
        degenerate = charsums.degenerate_pairs(ctx, B, C)
        out.append(rec(f"{tag}/degenerate-pairs", degenerate.max_count, 2, passed=degenerate.max_count <= 2, hard=True))
        out.append(rec(f"{tag}/degenerate-antidiagonal", degenerate.antidiagonal_count, len(B)))

    if len(B) > 1:
        witness = charsums.witness_thm12(ctx, A, B, chi, psi, _params(config))
        out.append(rec(f"{tag}/thm12-witness", witness.minimum, witness.bound))
    return out


def _lower_bound_record(p: int) -> List[VerificationRecord]:
    ctx = field.build_field(p)
    A = sets.interval(ctx, 0, math.isqrt(p) // 10 + 1)
    S = charsums.sum_S(ctx, A, A, A, AdditiveCharacter(1), bounds=False)
    floor = 0.98 * len(A) ** 3
    return [record("charsum-bounds", f"p={p}/lower-bound", S.magnitude, floor, passed=S.magnitude >= floor, hard=True)]


def _convolution_record(config: ExperimentConfig, p: int) -> List[VerificationRecord]:
    ctx = field.build_field(p)
    A = sets.random_subset(ctx, min(20, p), config.seed)
    size = len(charsums.convolution_set(ctx, A, A, A))
    return [record("charsum-bounds", f"p={p}/convolution", size, charsums.pvz_floor(p, len(A)))]


@suite("lemmas")
def lemma_checks(config: ExperimentConfig) -> Iterator[Instance]:
    rng = suite_rng(config, "lemmas")
    for p in config.primes:
        for trial, seed in enumerate(_seeds(rng, config.trials)):
            yield Instance(f"p={p}/{trial:03d}", partial(_lemma_records, config, p, trial, seed))


def _lemma_records(config: ExperimentConfig, p: int, trial: int, seed: int) -> List[VerificationRecord]:
    ctx = field.build_field(p)
    rng = np.random.RandomState(seed)
    f = _function(ctx, config)
    tag = f"p={p}/{trial:03d}"
    W, X, Y, Z = (_random_sized_set(ctx, rng, int(rng.randint(1, 31))) for _ in range(4))
    out = [verify_lemma_prodsum(ctx, W, X, Y, Z, f, instance=f"{tag}/prodsum")]

    A = _random_sized_set(ctx, rng, max(2, math.ceil(p**0.55)), nonzero=True)
    trace = decompose.extract_subset(ctx, A, f, _params(config))
    out.append(verify_lemma_rich(ctx, A, trace.S_set, trace.U_set, trace.certified_u, f, instance=f"{tag}/rich"))

    pool = sets.random_subset(ctx, min(p, int(rng.randint(2, 61))), int(rng.randint(2**31 - 1)))
    parts = int(rng.randint(1, 6))
    cuts = np.array_split(pool.elems[rng.permutation(len(pool))], parts)
    family = [FSubset(ctx.params, cut) for cut in cuts if cut.size]
    out.append(verify_union_energy(ctx, family, instance=f"{tag}/union"))

    U, V = (_random_sized_set(ctx, rng, int(rng.randint(1, 41))) for _ in range(2))
    mixed = charsums.lemma21_sum(ctx, U, V, _chi(ctx, config), _psi(ctx, config), f)
    entry = mixed.bound("lemma21")
    out.append(record("lemmas", f"{tag}/mixed-sumset", mixed.magnitude, entry.value))
    return out


@suite("constructions")
def constructions(config: ExperimentConfig) -> Iterator[Instance]:
    for p in config.primes:
        for k in (1, 2, 3):
            lam = k * (p // 10)
            if 1 <= lam < p:
                yield Instance(f"garaev/p={p}/{lam:04d}", partial(_garaev_records, p, lam))
        yield Instance(f"ap-gp/p={p}", partial(_ap_gp_record, p))
    rng = suite_rng(config, "constructions")
    for q in config.fields:
        ((_, n),) = sympy.factorint(q).items()
        if n >= 2:
            seed = _seeds(rng, 1)[0]
            yield Instance(f"subgroup/q={q:04d}", partial(_subgroup_record, config, q, seed))
            yield Instance(f"linearized/q={q:04d}", partial(_linearized_split_records, q, seed))
            if n % 2 == 0:
                yield Instance(f"tightness/q={q:04d}", partial(_tightness_records, q))


def _garaev_records(p: int, lam: int) -> List[VerificationRecord]:
    ctx = field.build_field(p)
    A = sets.garaev_set(ctx, lam)
    rec = partial(record, "constructions")
    tag = f"garaev/p={p}/{lam:04d}"
    sumset = len(energy.sumset(ctx, A, A))
    e = energy.additive_energy(ctx, A).value
    size = len(A)
    out = [
        rec(f"{tag}/size", size, lam * lam // p, passed=size >= lam * lam // p, hard=True),
        rec(f"{tag}/sumset", sumset, 2 * lam - 1, passed=sumset <= 2 * lam - 1, hard=True),
    ]
    if size:
        out.append(rec(f"{tag}/energy", e, size**4 / sumset, passed=e * sumset >= size**4, hard=True))
        out.append(rec(f"{tag}/inverse-energy", energy.inverse_energy(ctx, A).value, size**3))
    return out


def _ap_gp_record(p: int) -> List[VerificationRecord]:
    ctx = field.build_field(p)
    length = max(1, math.isqrt(p))
    U = sets.ap_gp_union(ctx, 1, 1, ctx.generator, length)
    cube = len(U) ** 3
    return [
        record("constructions", f"ap-gp/p={p}/additive", energy.additive_energy(ctx, U).value, cube),
        record("constructions", f"ap-gp/p={p}/multiplicative", energy.multiplicative_energy(ctx, U).value, cube),
    ]


def _subgroup_record(config: ExperimentConfig, q: int, seed: int) -> List[VerificationRecord]:
    ctx = field_of(q)
    rng = np.random.RandomState(seed)
    C = sets.add_subspace(ctx, [1])
    A = _random_sized_set(ctx, rng, int(rng.randint(1, ctx.q + 1)))
    B = _random_sized_set(ctx, rng, int(rng.randint(1, ctx.q + 1)))
    psi = AdditiveCharacter(max(1, config.psi % ctx.q))
    S = charsums.sum_S(ctx, A, B, C, psi, bounds=False)
    bound = len(A) * ctx.q
    return [
        record(
            "constructions",
            f"subgroup/q={q:04d}",
            S.magnitude,
            bound,
            passed=S.magnitude <= bound + TOLERANCE * S.terms,
            hard=True,
        )
    ]


def _linearized_split_records(q: int, seed: int) -> List[VerificationRecord]:
    """Linearized permutations keep one of E(S), E(f(T)) large for every split of A."""
    ctx = field_of(q)
    rng = np.random.RandomState(seed)
    lin = next(
        (c for c in (ratfunc.linearized(ctx, [a, 1]) for a in list(range(1, ctx.q)) + [0]) if c.is_permutation)
    )
    A = _random_sized_set(ctx, rng, max(2, ctx.q // 2))
    mask = rng.randint(0, 2, size=len(A)).astype(bool)
    S, T = FSubset(ctx.params, A.elems[mask]), FSubset(ctx.params, A.elems[~mask])
    e_a = energy.additive_energy(ctx, A).value
    e_s = energy.additive_energy(ctx, S).value
    e_t = energy.additive_energy(ctx, T).value
    e_ft = energy.f_energy(ctx, lin.f, T).value
    rec = partial(record, "constructions", hard=True)
    return [
        rec(f"linearized/q={q:04d}/image-energy", e_ft, e_t, passed=e_ft == e_t),
        rec(f"linearized/q={q:04d}/large-part", max(e_s, e_ft), e_a / 16, passed=16 * max(e_s, e_ft) >= e_a),
    ]


def _tightness_records(q: int) -> List[VerificationRecord]:
    """q = r^2, A = B = C = GF(r), psi trivial on GF(r): |S_psi| = A sqrt(BCq)."""
    ctx = field_of(q)
    r_set = sets.subfield(ctx, ctx.n // 2)
    x = ctx.elements()[1:]
    traces = ctx.trace_table[np.asarray(field.mul(ctx, x[:, None], r_set.elems[None, :]), dtype=np.int64)]
    a = int(x[np.argmax(np.all(traces == 0, axis=1))])
    S = charsums.sum_S(ctx, r_set, r_set, r_set, AdditiveCharacter(a), bounds=False)
    r = len(r_set)
    bound = r * math.sqrt(r * r * q)
    out = [
        record(
            "constructions",
            f"tightness/q={q:04d}/S",
            S.magnitude,
            bound,
            passed=abs(S.magnitude - bound) <= TOLERANCE * S.terms,
            hard=True,
        )
    ]
    chi = MultiplicativeCharacter(r - 1)
    T = charsums.sum_T(ctx, r_set.without_zero(), r_set, r_set, chi, bounds=False)
    out.append(record("constructions", f"tightness/q={q:04d}/T", T.magnitude, (r - 1) * math.sqrt(r * r * q)))
    return out


# runner


def _run_instance(instance: Instance, timing: bool) -> List[VerificationRecord]:
    start = time.perf_counter()
    records = instance.check()
    if not timing:
        return records
    elapsed = (time.perf_counter() - start) * 1000.0
    share = elapsed / max(len(records), 1)
    return [replace(r, runtime_ms=share) for r in records]


def run_suite(name: str, config: ExperimentConfig) -> List[VerificationRecord]:
    """Run one named suite and return its records sorted by instance."""
    if name not in SUITES:
        raise ConfigError(f"unknown suite '{name}' (known: {', '.join(SUITE_NAMES)})", key="suites")
    instances = list(SUITES[name](config))
    run = partial(_run_instance, timing=config.timing)
    if config.threads > 1 and len(instances) > 1:
        with ThreadPoolExecutor(max_workers=config.threads) as executor:
            batches = list(executor.map(run, instances))
    else:
        batches = [run(instance) for instance in instances]
    records = sort_records(r for batch in batches for r in batch)
    failed = failures(records)
    ratios = [r.ratio for r in records if not r.hard and r.ratio is not None]
    worst = f", max report ratio {max(ratios):.4g}" if ratios else ""
    logger.info(f"Suite {name}: {len(records)} record(s), {len(failed)} hard failure(s){worst}")
    return records


def run_suites(config: ExperimentConfig) -> List[VerificationRecord]:
    records: List[VerificationRecord] = []
    for name in config.suites:
        records.extend(run_suite(name, config))
    return sort_records(records)


def set_records(config: ExperimentConfig) -> List[VerificationRecord]:
    """Report-only measurements of the config's named sets in GF(p^n) under its function."""
    ctx = field.build_field(config.p, config.n)
    f = _function(ctx, config)
    params = _params(config)
    rec = partial(record, "sets")
    out: List[VerificationRecord] = []
    for name in sorted(config.sets):
        U = parse_set_spec(ctx, config.sets[name])
        size = len(U)
        cube = float(size**3)
        out.append(rec(f"{name}/additive-energy", energy.additive_energy(ctx, U, config.threads).value, cube))
        out.append(rec(f"{name}/multiplicative-energy", energy.multiplicative_energy(ctx, U, config.threads).value, cube))
        out.append(rec(f"{name}/f-energy", energy.f_energy(ctx, f, U, config.threads).value, cube))
        if size >= 2 and 0 not in U:
            S = charsums.sum_S(ctx, U, U, U, _psi(ctx, config))
            out.append(rec(f"{name}/S-bilinear", S.magnitude, S.bound("bilin1").value))
        if size >= 2:
            result = decompose.partition(ctx, U, f, params)
            out.append(rec(f"{name}/partition-c1", result.c1, 1.0))
            out.append(rec(f"{name}/partition-c2", result.c2, 1.0))
    return out


def run_experiment(config: ExperimentConfig) -> List[VerificationRecord]:
    """The config's suites followed by its named-set measurements, as one sorted list."""
    records = run_suites(config)
    if config.sets:
        records.extend(set_records(config))
        logger.info(f"Measured {len(config.sets)} named set(s) in GF({config.p}^{config.n})")
    return sort_records(records)
