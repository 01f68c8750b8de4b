"""Triple character sums, the Kloosterman bilinear form and the bounds they are measured against.

Every sum has a literal evaluator (``*_naive``: one vectorised row per outer element,
rows accumulated in sorted set order) and, where one exists, a faster exact path that
the tests pin against it. Bounds are evaluated with every implied constant set to 1;
callers read the ratios.
"""
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Dict, Mapping, Optional, Tuple

import numpy as np

from fq.decomp import characters, energy, field, ratfunc
from fq.decomp.characters import AdditiveCharacter, MultiplicativeCharacter
from fq.decomp.decompose import DEFAULT_PARAMS, DecompositionResult, ThresholdParams, effective_m, partition
from fq.decomp.events import DecompLogger
from fq.decomp.exceptions import BadArgument, EmptyC
from fq.decomp.field import FieldCtx
from fq.decomp.ratfunc import RationalFunction
from fq.decomp.sets import FSubset

logger = DecompLogger("CharSums")

CHUNK_CELLS = 1 << 22


@dataclass(frozen=True, eq=False)
class WeightVector:
    """Complex weights aligned with ``domain.elems``."""

    domain: FSubset
    values: np.ndarray

    def __post_init__(self):
        values = np.asarray(self.values, dtype=np.complex128)
        if values.shape != (len(self.domain),):
            raise BadArgument(f"{values.size} weights for a set of {len(self.domain)} elements")
        object.__setattr__(self, "values", values)

    @classmethod
    def ones(cls, domain: FSubset) -> "WeightVector":
        return cls(domain, np.ones(len(domain)))

    @classmethod
    def from_mapping(cls, domain: FSubset, entries: Mapping[int, complex]) -> "WeightVector":
        values = np.zeros(len(domain), dtype=np.complex128)
        for x, w in entries.items():
            if x not in domain:
                raise BadArgument(f"weight on {x} lies outside the declared set")
            values[np.searchsorted(domain.elems, x)] = w
        return cls(domain, values)

    @property
    def entries(self) -> Dict[int, complex]:
        return {int(x): complex(w) for x, w in zip(self.domain.elems, self.values) if w != 0}


@dataclass(frozen=True)
class BoundEntry:
    name: str
    value: float
    ratio: float


@dataclass(frozen=True)
class SumResult:
    value: complex
    terms: int
    bound_report: Tuple[BoundEntry, ...] = ()

    @property
    def magnitude(self) -> float:
        return abs(self.value)

    def bound(self, name: str) -> BoundEntry:
        for entry in self.bound_report:
            if entry.name == name:
                return entry
        raise KeyError(name)


def _ratio(lhs: float, rhs: float) -> float:
    if rhs > 0:
        return lhs / rhs
    return 0.0 if lhs == 0 else math.inf


def _report(magnitude: float, bounds: Mapping[str, float], names) -> Tuple[BoundEntry, ...]:
    return tuple(BoundEntry(n, bounds[n], _ratio(magnitude, bounds[n])) for n in names if n in bounds)


def weight_norms(w: WeightVector, sigma: float) -> float:
    """||w||_sigma = (sum |w|^sigma)^(1/sigma); sigma = inf gives the max modulus."""
    moduli = np.abs(w.values)
    if math.isinf(sigma):
        return float(moduli.max()) if moduli.size else 0.0
    if sigma <= 0:
        raise BadArgument(f"norm exponent must be positive, got {sigma}")
    return float((moduli**sigma).sum() ** (1.0 / sigma))


def bound_evaluators(
    q: int,
    sizes: Mapping[str, int],
    energies: Optional[Mapping[str, int]] = None,
    norms: Optional[Mapping[str, float]] = None,
    params: ThresholdParams = DEFAULT_PARAMS,
) -> Dict[str, float]:
    """Right-hand sides of the triple-sum bounds, keyed by name.

    ``sizes`` holds A, B, C; ``energies`` may hold B, C (additive), BC (cross), B_inv, C_inv
    (energies of the inverse sets); ``norms`` may hold alpha1, alpha2, beta1, beta2,
    gamma_inf. Entries whose inputs are missing are left out.
    """
    A, B, C = sizes["A"], sizes["B"], sizes["C"]
    energies = energies or {}
    out = {
        "bilin1": A * math.sqrt(B * C * q),
        "bilin2": A * math.sqrt(B * C * q),
        "thm14": math.sqrt(A * B * C * q) + math.sqrt(A) * B * C * q**0.25,
        "subgroup": float(A * q),
    }
    if "BC" in energies:
        out["lemma41_cs"] = math.sqrt(A * energies["BC"] * q)
    if "B" in energies and "C" in energies:
        out["lemma41"] = math.sqrt(A) * energies["B"] ** 0.25 * energies["C"] ** 0.25 * math.sqrt(q)
    if "B_inv" in energies and "C_inv" in energies:
        out["lemma42"] = (
            math.sqrt(A) * energies["B_inv"] ** 0.25 * energies["C_inv"] ** 0.25 * math.sqrt(q)
            + math.sqrt(A) * B * C
        )
    if B > 1:
        m_b = effective_m(B, q, params)
        out["thm12"] = math.sqrt(A) * B**1.5 * math.sqrt(q) / math.sqrt(m_b)
        if C > 1:
            m_max = max(m_b, effective_m(C, q, params))
            out["thm13"] = math.sqrt(A) * (B * C) ** 0.75 * math.sqrt(q) / m_max**0.25
    if norms and C > 1:
        out["thm15"] = (
            (norms["alpha1"] * norms["beta2"] + norms["alpha2"] * norms["beta1"])
            * norms["gamma_inf"] ** 2
            * math.sqrt(q)
            * C**1.5
            / math.sqrt(effective_m(C, q, params))
        )
    return out


# triple sums


def _triple_sum(
    ctx: FieldCtx, A: FSubset, B: FSubset, C: FSubset, table: np.ndarray, workers: int = 1
) -> complex:
    """sum over (a, b, c) of table[ab + ac + bc], one row of the outer loop per a."""
    b, c = B.elems, C.elems
    bc = np.asarray(field.mul(ctx, b[:, None], c[None, :]), dtype=np.int64)

    def row(a: int) -> complex:
        ab = np.asarray(field.mul(ctx, a, b), dtype=np.int64)
        ac = np.asarray(field.mul(ctx, a, c), dtype=np.int64)
        x = field.add(ctx, field.add(ctx, ab[:, None], ac[None, :]), bc)
        return complex(table[np.asarray(x, dtype=np.int64)].sum())

    if b.size == 0 or c.size == 0:
        return 0j
    if workers > 1 and len(A) > 1:
        with ThreadPoolExecutor(max_workers=workers) as executor:
            rows = list(executor.map(row, A.tolist()))
    else:
        rows = [row(a) for a in A.tolist()]
    return complex(np.sum(np.array(rows, dtype=np.complex128)))


def _character_hat(ctx: FieldCtx, table: np.ndarray, C: FSubset, ys: np.ndarray) -> np.ndarray:
    """C_hat(y) = sum_c table[c y], for each y in ``ys``."""
    out = np.zeros(ys.size, dtype=np.complex128)
    if C.elems.size == 0:
        return out
    rows = max(1, CHUNK_CELLS // C.elems.size)
    for i in range(0, ys.size, rows):
        prod = np.asarray(field.mul(ctx, ys[i : i + rows, None], C.elems[None, :]), dtype=np.int64)
        out[i : i + rows] = table[prod].sum(axis=1)
    return out


def sum_S_naive(ctx: FieldCtx, A: FSubset, B: FSubset, C: FSubset, psi: AdditiveCharacter, workers: int = 1) -> complex:
    return _triple_sum(ctx, A, B, C, characters.additive_table(ctx, psi), workers)


def sum_S(
    ctx: FieldCtx,
    A: FSubset,
    B: FSubset,
    C: FSubset,
    psi: AdditiveCharacter,
    bounds: bool = True,
) -> SumResult:
    """S_psi(A, B, C) = sum psi(ab + ac + bc), as sum_{a,b} psi(ab) C_hat(a + b)."""
    table = characters.additive_table(ctx, psi)
    a, b = A.elems, B.elems
    ab = np.asarray(field.mul(ctx, a[:, None], b[None, :]), dtype=np.int64)
    apb = np.asarray(field.add(ctx, a[:, None], b[None, :]), dtype=np.int64)
    ys, inverse = np.unique(apb, return_inverse=True)
    c_hat = _character_hat(ctx, table, C, ys)
    value = complex((table[ab].ravel() * c_hat[inverse.ravel()]).sum()) if ab.size else 0j
    report: Tuple[BoundEntry, ...] = ()
    if bounds:
        energies = {
            "B": energy.additive_energy(ctx, B).value,
            "C": energy.additive_energy(ctx, C).value,
            "BC": energy.cross_energy(ctx, B, C).value,
        }
        rhs = bound_evaluators(ctx.q, {"A": len(A), "B": len(B), "C": len(C)}, energies)
        report = _report(abs(value), rhs, ("bilin1", "lemma41_cs", "lemma41", "subgroup"))
    return SumResult(value, len(A) * len(B) * len(C), report)


def sum_T(
    ctx: FieldCtx,
    A: FSubset,
    B: FSubset,
    C: FSubset,
    chi: MultiplicativeCharacter,
    bounds: bool = True,
    workers: int = 1,
) -> SumResult:
    """T_chi(A, B, C) = sum chi(ab + ac + bc), with chi(0) = 0."""
    value = _triple_sum(ctx, A, B, C, characters.multiplicative_table(ctx, chi), workers)
    report: Tuple[BoundEntry, ...] = ()
    if bounds:
        energies = {
            "B_inv": energy.inverse_energy(ctx, B).value,
            "C_inv": energy.inverse_energy(ctx, C).value,
        }
        rhs = bound_evaluators(ctx.q, {"A": len(A), "B": len(B), "C": len(C)}, energies)
        report = _report(abs(value), rhs, ("bilin2", "lemma42"))
    return SumResult(value, len(A) * len(B) * len(C), report)


def sum_mixed(
    ctx: FieldCtx,
    A: FSubset,
    B: FSubset,
    C: FSubset,
    chi: MultiplicativeCharacter,
    psi: AdditiveCharacter,
    bounds: bool = True,
    workers: int = 1,
) -> SumResult:
    """sum chi(ab + ac + bc) psi(ab + ac + bc).

    chi(0) = 0 holds for the trivial chi too, so with chi trivial this equals S_psi only
    when ab + ac + bc never vanishes.
    """
    table = characters.multiplicative_table(ctx, chi) * characters.additive_table(ctx, psi)
    value = _triple_sum(ctx, A, B, C, table, workers)
    report: Tuple[BoundEntry, ...] = ()
    if bounds:
        rhs = bound_evaluators(ctx.q, {"A": len(A), "B": len(B), "C": len(C)})
        report = _report(abs(value), rhs, ("thm14",))
    return SumResult(value, len(A) * len(B) * len(C), report)


def sum_T_naive(ctx: FieldCtx, A: FSubset, B: FSubset, C: FSubset, chi: MultiplicativeCharacter) -> complex:
    return _triple_sum(ctx, A, B, C, characters.multiplicative_table(ctx, chi))


# Kloosterman bilinear form


def _check_C(C: FSubset):
    if len(C) == 0:
        raise EmptyC("the Kloosterman form needs a nonempty C")
    if 0 in C:
        raise BadArgument("C must avoid 0 (c^-1 appears in the phase)")


def kloosterman_K(
    ctx: FieldCtx,
    alpha: WeightVector,
    beta: WeightVector,
    gamma: WeightVector,
    psi: AdditiveCharacter,
    bounds: bool = True,
) -> SumResult:
    """K = sum_{a,b} alpha_a beta_b |sum_c gamma_c psi(ac + b/c)|^2.

    The sets A, B, C are the domains of the weight vectors.
    """
    A, B, C = alpha.domain, beta.domain, gamma.domain
    _check_C(C)
    table = characters.additive_table(ctx, psi)
    c_inv = np.asarray(field.inv(ctx, C.elems), dtype=np.int64)
    E = table[np.asarray(field.mul(ctx, A.elems[:, None], C.elems[None, :]), dtype=np.int64)]
    F = table[np.asarray(field.mul(ctx, B.elems[:, None], c_inv[None, :]), dtype=np.int64)]
    inner = (E * gamma.values[None, :]) @ F.T
    value = complex(alpha.values @ (np.abs(inner) ** 2) @ beta.values)
    report: Tuple[BoundEntry, ...] = ()
    if bounds:
        norms = {
            "alpha1": weight_norms(alpha, 1),
            "alpha2": weight_norms(alpha, 2),
            "beta1": weight_norms(beta, 1),
            "beta2": weight_norms(beta, 2),
            "gamma_inf": weight_norms(gamma, math.inf),
        }
        rhs = bound_evaluators(ctx.q, {"A": len(A), "B": len(B), "C": len(C)}, norms=norms)
        report = _report(abs(value), rhs, ("thm15",))
    return SumResult(value, len(A) * len(B) * len(C), report)


def kloosterman_K_naive(
    ctx: FieldCtx, alpha: WeightVector, beta: WeightVector, gamma: WeightVector, psi: AdditiveCharacter
) -> complex:
    _check_C(gamma.domain)
    table = characters.additive_table(ctx, psi)
    cs = gamma.domain.elems
    c_inv = np.asarray(field.inv(ctx, cs), dtype=np.int64)
    total = 0j
    for a, wa in zip(alpha.domain.tolist(), alpha.values):
        for b, wb in zip(beta.domain.tolist(), beta.values):
            phase = field.add(ctx, field.mul(ctx, a, cs), field.mul(ctx, b, c_inv))
            inner = complex((gamma.values * table[np.asarray(phase, dtype=np.int64)]).sum())
            total += wa * wb * abs(inner) ** 2
    return total


# convolution set and the constructive halves


def convolution_set(ctx: FieldCtx, A: FSubset, B: FSubset, C: FSubset) -> FSubset:
    """{ab + ac + bc : a in A, b in B, c in C}."""
    hit = np.zeros(ctx.q, dtype=bool)
    b, c = B.elems, C.elems
    if b.size and c.size:
        bc = np.asarray(field.mul(ctx, b[:, None], c[None, :]), dtype=np.int64)
        for a in A.tolist():
            ab = np.asarray(field.mul(ctx, a, b), dtype=np.int64)
            ac = np.asarray(field.mul(ctx, a, c), dtype=np.int64)
            hit[np.asarray(field.add(ctx, field.add(ctx, ab[:, None], ac[None, :]), bc), dtype=np.int64)] = True
    return FSubset(A.params, np.flatnonzero(hit))


def pvz_floor(p: int, size: int) -> float:
    """min{p, A^(3/2)}, the lower-bound shape for |C(A, A, A)|."""
    return min(float(p), size**1.5)


@dataclass(frozen=True, eq=False)
class LargePart:
    W: FSubset
    from_S: bool
    decomposition: DecompositionResult


def large_part(ctx: FieldCtx, B: FSubset, params: ThresholdParams = DEFAULT_PARAMS) -> LargePart:
    """Decompose B (zero dropped) with f = X^-1 and keep the larger half, S on ties."""
    result = partition(ctx, B.without_zero(), ratfunc.inversion(ctx), params)
    from_S = len(result.S_final) >= len(result.T_final)
    return LargePart(result.S_final if from_S else result.T_final, from_S, result)


@dataclass(frozen=True)
class WitnessReport:
    W1: FSubset
    W2: FSubset
    s_value: complex
    t_value: complex
    bound_name: str
    bound: float

    @property
    def minimum(self) -> float:
        return min(abs(self.s_value), abs(self.t_value))

    @property
    def ratio(self) -> float:
        return _ratio(self.minimum, self.bound)


def witness_thm12(
    ctx: FieldCtx,
    A: FSubset,
    B: FSubset,
    chi: MultiplicativeCharacter,
    psi: AdditiveCharacter,
    params: ThresholdParams = DEFAULT_PARAMS,
) -> WitnessReport:
    """min{|S_psi(A, W, W)|, |T_chi(A, W, W)|} for the large part W of B."""
    W = large_part(ctx, B, params).W
    s = sum_S(ctx, A, W, W, psi, bounds=False).value
    t = sum_T(ctx, A, W, W, chi, bounds=False).value
    rhs = bound_evaluators(ctx.q, {"A": len(A), "B": len(B), "C": len(B)}, params=params)
    return WitnessReport(W, W, s, t, "thm12", rhs.get("thm12", math.inf))


def witness_thm13(
    ctx: FieldCtx,
    A: FSubset,
    B: FSubset,
    C: FSubset,
    chi: MultiplicativeCharacter,
    psi: AdditiveCharacter,
    params: ThresholdParams = DEFAULT_PARAMS,
) -> WitnessReport:
    W1 = large_part(ctx, B, params).W
    W2 = large_part(ctx, C, params).W
    s = sum_S(ctx, A, W1, W2, psi, bounds=False).value
    t = sum_T(ctx, A, W1, W2, chi, bounds=False).value
    rhs = bound_evaluators(ctx.q, {"A": len(A), "B": len(B), "C": len(C)}, params=params)
    return WitnessReport(W1, W2, s, t, "thm13", rhs.get("thm13", math.inf))


# mixed sums over a sumset and the degeneracy count


def lemma21_sum(
    ctx: FieldCtx,
    U: FSubset,
    V: FSubset,
    chi: MultiplicativeCharacter,
    psi: AdditiveCharacter,
    f: RationalFunction,
) -> SumResult:
    """sum_{u,v} chi(u + v) psi(f(u + v)), pole points contributing 0; compared with sqrt(UVq)."""
    r = energy.rep_sum(ctx, U, V).table
    xs = np.flatnonzero(r)
    values, poles = ratfunc.evaluate_many(ctx, f, xs)
    chi_vals = characters.eval_multiplicative(ctx, chi, xs)
    psi_vals = np.where(poles, 0, characters.eval_additive(ctx, psi, values))
    value = complex((r[xs] * chi_vals * psi_vals).sum()) if xs.size else 0j
    rhs = math.sqrt(len(U) * len(V) * ctx.q)
    return SumResult(value, len(U) * len(V), (BoundEntry("lemma21", rhs, _ratio(abs(value), rhs)),))


@dataclass(frozen=True)
class DegeneracyReport:
    max_count: int
    antidiagonal_count: int
    pairs: int


def degenerate_pairs(ctx: FieldCtx, B: FSubset, C: FSubset) -> DegeneracyReport:
    """For each (b2, c2), #{(b1, c1) : b1 + c1 = b2 + c2 and 1/b1 + 1/c1 = 1/b2 + 1/c2}.

    ``max_count`` is taken over pairs with b2 + c2 != 0; pairs on the anti-diagonal
    b2 = -c2 coincide with every (b, -b) and are reported separately.
    """
    if 0 in B or 0 in C:
        raise BadArgument("degeneracy counts need B and C inside the nonzero elements")
    b, c = B.elems, C.elems
    if b.size == 0 or c.size == 0:
        return DegeneracyReport(0, 0, 0)
    s = np.asarray(field.add(ctx, b[:, None], c[None, :]), dtype=np.int64).ravel()
    t = np.asarray(
        field.add(ctx, field.inv(ctx, b)[:, None], field.inv(ctx, c)[None, :]), dtype=np.int64
    ).ravel()
    _, inverse, counts = np.unique(s * ctx.q + t, return_inverse=True, return_counts=True)
    per_pair = counts[inverse.ravel()]
    regular = s != 0
    max_count = int(per_pair[regular].max()) if regular.any() else 0
    anti = int(per_pair[~regular].max()) if (~regular).any() else 0
    return DegeneracyReport(max_count, anti, int(s.size))
