"""Rational functions f = g/h over GF(q).

Polynomials are tuples of element indices, low degree first, without trailing zeros; the
zero polynomial is the empty tuple. A ``RationalFunction`` is always in canonical form:
numerator and denominator coprime, denominator monic.

Poles never raise. ``evaluate`` returns the ``POLE`` marker, the vectorised helpers
return a pole mask, and every sum or image set skips pole points.

Exceptionality is decided by the trace criterion: f is flagged when some lambda makes
x -> Tr(f(x) - lambda x) constant on the non-pole points. For polynomials this is exactly
the shape g(X)^p - g(X) + lambda X + mu (additive Hilbert 90). For rational functions with
poles it is the operative definition used throughout the package.
"""
from dataclasses import dataclass
from typing import Optional, Sequence, Tuple

import numpy as np

from fq.decomp import field
from fq.decomp.events import DecompLogger
from fq.decomp.exceptions import (
    ConfigError,
    DecompRuntimeError,
    DegenerateFunction,
    ZeroDenominator,
)
from fq.decomp.field import Elements, FieldCtx, FieldElement
from fq.decomp.sets import FSubset

logger = DecompLogger("RatFunc")

# lambdas scanned per vectorised block in is_exceptional
_SCAN_BLOCK = 256


class _Pole:
    _instance = None

    def __new__(cls):
        if cls._instance is None:
            cls._instance = super().__new__(cls)
        return cls._instance

    def __repr__(self) -> str:
        return "POLE"

    def __bool__(self) -> bool:
        return False


POLE = _Pole()


@dataclass(frozen=True)
class Polynomial:
    coeffs: Tuple[int, ...] = ()

    def __post_init__(self):
        coeffs = tuple(int(c) for c in self.coeffs)
        while coeffs and coeffs[-1] == 0:
            coeffs = coeffs[:-1]
        object.__setattr__(self, "coeffs", coeffs)

    @property
    def degree(self) -> int:
        """Degree, with -1 for the zero polynomial."""
        return len(self.coeffs) - 1

    @property
    def is_zero(self) -> bool:
        return not self.coeffs

    @property
    def lead(self) -> int:
        return self.coeffs[-1] if self.coeffs else 0

    def __str__(self) -> str:
        return ",".join(str(c) for c in self.coeffs) or "0"


ONE = Polynomial((1,))
X = Polynomial((0, 1))


@dataclass(frozen=True)
class RationalFunction:
    num: Polynomial
    den: Polynomial = ONE

    @property
    def degree(self) -> int:
        return max(self.num.degree, self.den.degree)

    @property
    def is_polynomial(self) -> bool:
        return self.den == ONE

    def __str__(self) -> str:
        if self.is_polynomial:
            return str(self.num)
        return f"{self.num}/{self.den}"


@dataclass(frozen=True)
class ExceptionalityReport:
    exceptional: bool
    witness: Optional[FieldElement] = None

    def __bool__(self) -> bool:
        return self.exceptional


@dataclass(frozen=True)
class Linearized:
    f: RationalFunction
    is_permutation: bool


# polynomial arithmetic over the tabulated field


def poly_add(ctx: FieldCtx, f: Polynomial, g: Polynomial) -> Polynomial:
    size = max(len(f.coeffs), len(g.coeffs))
    a = list(f.coeffs) + [0] * (size - len(f.coeffs))
    b = list(g.coeffs) + [0] * (size - len(g.coeffs))
    return Polynomial(tuple(field.add(ctx, x, y) for x, y in zip(a, b)))


def poly_neg(ctx: FieldCtx, f: Polynomial) -> Polynomial:
    return Polynomial(tuple(field.neg(ctx, c) for c in f.coeffs))


def poly_sub(ctx: FieldCtx, f: Polynomial, g: Polynomial) -> Polynomial:
    return poly_add(ctx, f, poly_neg(ctx, g))


def poly_scale(ctx: FieldCtx, f: Polynomial, c: FieldElement) -> Polynomial:
    return Polynomial(tuple(field.mul(ctx, c, a) for a in f.coeffs))


def poly_mul(ctx: FieldCtx, f: Polynomial, g: Polynomial) -> Polynomial:
    if f.is_zero or g.is_zero:
        return Polynomial()
    out = [0] * (len(f.coeffs) + len(g.coeffs) - 1)
    for i, a in enumerate(f.coeffs):
        if a:
            for j, b in enumerate(g.coeffs):
                out[i + j] = field.add(ctx, out[i + j], field.mul(ctx, a, b))
    return Polynomial(tuple(out))


def poly_divmod(ctx: FieldCtx, f: Polynomial, g: Polynomial) -> Tuple[Polynomial, Polynomial]:
    if g.is_zero:
        raise ZeroDenominator("polynomial division by zero")
    rem = list(f.coeffs)
    quot = [0] * max(len(rem) - len(g.coeffs) + 1, 0)
    lead_inv = field.inv(ctx, g.lead)
    for k in range(len(rem) - len(g.coeffs), -1, -1):
        c = field.mul(ctx, rem[k + len(g.coeffs) - 1], lead_inv)
        quot[k] = c
        if c:
            for j, b in enumerate(g.coeffs):
                rem[k + j] = field.sub(ctx, rem[k + j], field.mul(ctx, c, b))
    return Polynomial(tuple(quot)), Polynomial(tuple(rem))


def poly_monic(ctx: FieldCtx, f: Polynomial) -> Polynomial:
    if f.is_zero:
        return f
    return poly_scale(ctx, f, field.inv(ctx, f.lead))


def poly_gcd(ctx: FieldCtx, f: Polynomial, g: Polynomial) -> Polynomial:
    while not g.is_zero:
        f, g = g, poly_divmod(ctx, f, g)[1]
    return poly_monic(ctx, f)


def poly_eval(ctx: FieldCtx, f: Polynomial, x: Elements) -> Elements:
    """Horner evaluation, vectorised over ``x``."""
    x = np.asarray(x, dtype=np.int64)
    acc = np.zeros_like(x)
    for c in reversed(f.coeffs):
        acc = np.asarray(field.add(ctx, field.mul(ctx, acc, x), c), dtype=np.int64)
    return int(acc) if acc.ndim == 0 else acc


# rational functions


def normalize(ctx: FieldCtx, g: Polynomial, h: Polynomial) -> RationalFunction:
    """Cancel gcd(g, h) and scale the denominator monic."""
    if h.is_zero:
        raise ZeroDenominator("rational function with zero denominator")
    if g.is_zero:
        return RationalFunction(Polynomial(), ONE)
    d = poly_gcd(ctx, g, h)
    g, _ = poly_divmod(ctx, g, d)
    h, _ = poly_divmod(ctx, h, d)
    lead_inv = field.inv(ctx, h.lead)
    return RationalFunction(poly_scale(ctx, g, lead_inv), poly_scale(ctx, h, lead_inv))


def from_coeffs(ctx: FieldCtx, num: Sequence[int], den: Sequence[int] = (1,)) -> RationalFunction:
    return normalize(ctx, Polynomial(tuple(num)), Polynomial(tuple(den)))


def inversion(ctx: FieldCtx) -> RationalFunction:
    """f(X) = X^{-1}."""
    return RationalFunction(ONE, X)


def identity(ctx: FieldCtx) -> RationalFunction:
    return RationalFunction(X, ONE)


def monomial(ctx: FieldCtx, k: int) -> RationalFunction:
    if k >= 0:
        return RationalFunction(Polynomial((0,) * k + (1,)), ONE)
    return RationalFunction(ONE, Polynomial((0,) * (-k) + (1,)))


def evaluate_many(ctx: FieldCtx, f: RationalFunction, xs: Elements) -> Tuple[np.ndarray, np.ndarray]:
    """Values of f at ``xs`` and the pole mask; values at poles are 0 and must be skipped."""
    xs = np.asarray(xs, dtype=np.int64)
    num = np.asarray(poly_eval(ctx, f.num, xs), dtype=np.int64)
    if f.is_polynomial:
        return num, np.zeros(xs.shape, dtype=bool)
    den = np.asarray(poly_eval(ctx, f.den, xs), dtype=np.int64)
    poles = den == 0
    safe = np.where(poles, 1, den)
    values = np.asarray(field.mul(ctx, num, field.inv(ctx, safe)), dtype=np.int64)
    return np.where(poles, 0, values), poles


def evaluate(ctx: FieldCtx, f: RationalFunction, x: FieldElement):
    """f(x), or ``POLE`` when the denominator vanishes at x."""
    values, poles = evaluate_many(ctx, f, x)
    if bool(poles):
        return POLE
    return int(values)


def is_exceptional(ctx: FieldCtx, f: RationalFunction) -> ExceptionalityReport:
    """Scan every lambda for Tr(f(x) - lambda x) constant over the non-pole points.

    The smallest such lambda is returned as the witness. O(q^2) work, in blocks.
    """
    xs = ctx.elements()
    values, poles = evaluate_many(ctx, f, xs)
    xs, values = xs[~poles], values[~poles]
    if xs.size == 0:
        raise DegenerateFunction(f"{f} has no non-pole points in {ctx}")
    tr_f = ctx.trace_table[values]
    for start in range(0, ctx.q, _SCAN_BLOCK):
        lams = np.arange(start, min(start + _SCAN_BLOCK, ctx.q), dtype=np.int64)
        tr_lin = ctx.trace_table[np.asarray(field.mul(ctx, lams[:, None], xs[None, :]), dtype=np.int64)]
        diff = (tr_f[None, :] - tr_lin) % ctx.p
        constant = np.all(diff == diff[:, :1], axis=1)
        if constant.any():
            witness = int(lams[np.argmax(constant)])
            logger.debug(f"{f} is exceptional over {ctx} with lambda={witness}")
            return ExceptionalityReport(True, witness)
    return ExceptionalityReport(False, None)


def apply_to_set(ctx: FieldCtx, f: RationalFunction, U: FSubset) -> FSubset:
    """{f(u) : u in U, u not a pole}."""
    values, poles = evaluate_many(ctx, f, U.elems)
    image = FSubset(U.params, values[~poles])
    drop = int((~poles).sum()) - len(image)
    if drop:
        logger.debug(f"image of {len(U)} points under {f} lost {drop} to collisions")
    return image


def image_drop(ctx: FieldCtx, f: RationalFunction, U: FSubset) -> int:
    """|U minus poles| - |f(U)|; at most (deg f - 1) per image value."""
    _, poles = evaluate_many(ctx, f, U.elems)
    return int((~poles).sum()) - len(apply_to_set(ctx, f, U))


def fiber_sizes(ctx: FieldCtx, f: RationalFunction) -> np.ndarray:
    """#{x : f(x) = c} for every c, poles excluded."""
    values, poles = evaluate_many(ctx, f, ctx.elements())
    return np.bincount(values[~poles], minlength=ctx.q)


def linearized(ctx: FieldCtx, coeffs: Sequence[FieldElement]) -> Linearized:
    """f(X) = sum_i coeffs[i] X^(p^i), checked additive on every pair of elements."""
    num = [0] * (ctx.p ** (len(coeffs) - 1) + 1) if coeffs else [0]
    for i, a in enumerate(coeffs):
        num[ctx.p**i] = int(a)
    f = normalize(ctx, Polynomial(tuple(num)), ONE)
    xs = ctx.elements()
    values, _ = evaluate_many(ctx, f, xs)
    sums = np.asarray(field.add(ctx, xs[:, None], xs[None, :]), dtype=np.int64)
    lhs = np.asarray(field.add(ctx, values[:, None], values[None, :]), dtype=np.int64)
    if not np.array_equal(lhs, values[sums]):
        raise DecompRuntimeError(f"linearized polynomial {f} is not additive over {ctx}")
    return Linearized(f, bool(np.unique(values).size == ctx.q))


def _parse_poly(ctx: FieldCtx, text: str) -> Polynomial:
    coeffs = []
    for token in text.split(","):
        token = token.strip()
        try:
            c = int(token)
        except ValueError:
            raise ConfigError(f"bad coefficient '{token}' in '{text}'", key="function")
        if abs(c) >= ctx.q:
            raise ConfigError(f"coefficient {c} is not an element of {ctx}", key="function")
        coeffs.append(field.neg(ctx, -c) if c < 0 else c)
    return Polynomial(tuple(coeffs))


def parse_ratfunc(ctx: FieldCtx, text: str) -> RationalFunction:
    """Parse ``"g0,g1,.../h0,h1,..."`` (coefficients low degree first); ``"/..."`` is optional.

    ``"0,1"`` is X and ``"1/0,1"`` is X^{-1}. Negative coefficients denote additive inverses.
    """
    num_text, _, den_text = text.strip().partition("/")
    num = _parse_poly(ctx, num_text)
    den = _parse_poly(ctx, den_text) if den_text else ONE
    if den.is_zero:
        raise ConfigError(f"zero denominator in '{text}'", key="function")
    return normalize(ctx, num, den)
