"""Tabulated arithmetic for GF(p) and GF(p^n).

An element is a bare integer index in ``[0, q)``: the base-p digits of the index are the
coefficients (low degree first) of its residue polynomial modulo ``FieldParams.modulus``.
Elements carry no reference to their field, so every operation takes the ``FieldCtx``
explicitly; mixing indices from two different contexts is not detected.

All operations accept a scalar index or a numpy integer array of indices. Scalars come
back as ``int``, arrays come back as ``np.ndarray``.

In extension fields ``mul`` reads the product off the exp/log tables. Those tables are
built by repeated polynomial multiplication by the generator modulo the modulus, so a
table product equals the residue of the polynomial product.
"""
import itertools
from dataclasses import dataclass
from functools import lru_cache
from typing import List, Optional, Sequence, Tuple, Union

import numpy as np
import sympy

from fq.decomp.events import DecompLogger
from fq.decomp.exceptions import (
    BadArgument,
    ConfigError,
    DecompRuntimeError,
    DivisionByZero,
    FieldTooLarge,
    NonPrime,
)

logger = DecompLogger("Field")

MAX_FIELD_SIZE = 2**20

FieldElement = int
Elements = Union[int, np.ndarray]

_X = sympy.Symbol("X")


@dataclass(frozen=True)
class FieldParams:
    p: int
    n: int = 1
    # monic, low degree first, length n + 1; None for prime fields
    modulus: Optional[Tuple[int, ...]] = None

    def __post_init__(self):
        if not isinstance(self.p, int) or self.p < 2 or not sympy.isprime(self.p):
            raise NonPrime(self.p)
        if self.n < 1:
            raise ConfigError(f"extension degree must be >= 1, got {self.n}", key="n")
        if self.q > MAX_FIELD_SIZE:
            raise FieldTooLarge(self.q, MAX_FIELD_SIZE)
        if self.n == 1:
            if self.modulus is not None:
                raise ConfigError("prime fields take no modulus", key="modulus")
            return
        m = self.modulus
        if m is None or len(m) != self.n + 1 or m[-1] != 1:
            raise ConfigError(f"modulus must be monic of degree {self.n}", key="modulus")
        if any(not 0 <= c < self.p for c in m):
            raise ConfigError(f"modulus coefficients must lie in [0, {self.p})", key="modulus")
        if not _is_irreducible(m, self.p):
            raise ConfigError(f"modulus {format_poly(m)} is reducible over GF({self.p})", key="modulus")

    @property
    def q(self) -> int:
        return self.p**self.n

    def __str__(self) -> str:
        if self.n == 1:
            return f"GF({self.p})"
        return f"GF({self.p}^{self.n})"


@dataclass(frozen=True, eq=False)
class FieldCtx:
    """A fully tabulated finite field. Immutable and safe to share between threads."""

    params: FieldParams
    generator: FieldElement
    exp_table: np.ndarray  # exp_table[k] = generator**k, k in [0, q-1)
    dlog_table: np.ndarray  # inverse of exp_table; -1 at index 0
    trace_table: np.ndarray  # Tr_{GF(q)/GF(p)}
    digits: Optional[np.ndarray]  # (q, n) coefficient vectors; None for prime fields
    weights: np.ndarray  # p**j, j < n

    @property
    def p(self) -> int:
        return self.params.p

    @property
    def n(self) -> int:
        return self.params.n

    @property
    def q(self) -> int:
        return self.params.q

    def elements(self) -> np.ndarray:
        return np.arange(self.q, dtype=np.int64)

    def nonzero(self) -> np.ndarray:
        return np.arange(1, self.q, dtype=np.int64)

    def __str__(self) -> str:
        return str(self.params)

    def __repr__(self) -> str:
        return f"FieldCtx({self.params}, generator={self.generator})"


# GF(p)[X] helpers used while building tables; coefficient lists are low degree first.


def format_poly(coeffs: Sequence[int], var: str = "X") -> str:
    terms = []
    for k in range(len(coeffs) - 1, -1, -1):
        c = coeffs[k]
        if c == 0:
            continue
        mono = "" if k == 0 else (var if k == 1 else f"{var}^{k}")
        if k == 0:
            terms.append(str(c))
        else:
            terms.append(mono if c == 1 else f"{c}{mono}")
    return " + ".join(terms) if terms else "0"


def _is_irreducible(coeffs: Sequence[int], p: int) -> bool:
    poly = sympy.Poly(list(reversed(coeffs)), _X, modulus=p)
    return bool(poly.is_irreducible)


def smallest_irreducible(p: int, n: int) -> Tuple[int, ...]:
    """Lexicographically smallest monic irreducible of degree n, compared low degree first."""
    for tail in itertools.product(range(p), repeat=n):
        if n > 1 and tail[0] == 0:
            continue
        coeffs = tuple(tail) + (1,)
        if _is_irreducible(coeffs, p):
            return coeffs
    raise DecompRuntimeError(f"no irreducible polynomial of degree {n} over GF({p})")


def _pmulmod(a: Sequence[int], b: Sequence[int], m: Sequence[int], p: int) -> List[int]:
    n = len(m) - 1
    prod = [0] * (2 * n - 1)
    for i, ai in enumerate(a):
        if ai:
            for j, bj in enumerate(b):
                prod[i + j] = (prod[i + j] + ai * bj) % p
    for k in range(len(prod) - 1, n - 1, -1):
        c = prod[k]
        if c:
            for j in range(n + 1):
                prod[k - n + j] = (prod[k - n + j] - c * m[j]) % p
    return prod[:n]


def _ppowmod(a: Sequence[int], e: int, m: Sequence[int], p: int) -> List[int]:
    n = len(m) - 1
    result = [1] + [0] * (n - 1)
    base = list(a)
    while e:
        if e & 1:
            result = _pmulmod(result, base, m, p)
        base = _pmulmod(base, base, m, p)
        e >>= 1
    return result


def _has_full_order(order_test, q: int) -> bool:
    return all(not order_test((q - 1) // r) for r in sympy.primefactors(q - 1))


@lru_cache(maxsize=32)
def build_field(p: int, n: int = 1) -> FieldCtx:
    """Tabulate GF(p^n): canonical modulus, canonical generator, exp/dlog/trace tables."""
    if not isinstance(p, int) or p < 2 or not sympy.isprime(p):
        raise NonPrime(p)
    if n < 1:
        raise ConfigError(f"extension degree must be >= 1, got {n}", key="n")
    if p**n > MAX_FIELD_SIZE:
        raise FieldTooLarge(p**n, MAX_FIELD_SIZE)
    q = p**n
    weights = p ** np.arange(n, dtype=np.int64)

    if n == 1:
        params = FieldParams(p, 1)
        generator = next(
            g for g in range(1, p) if _has_full_order(lambda e, g=g: pow(g, e, p) == 1, q)
        )
        exp_table = np.empty(q - 1, dtype=np.int64)
        acc = 1
        for k in range(q - 1):
            exp_table[k] = acc
            acc = acc * generator % p
        trace_table = np.arange(q, dtype=np.int64)
        digits = None
    else:
        modulus = smallest_irreducible(p, n)
        params = FieldParams(p, n, modulus)
        digits = ((np.arange(q, dtype=np.int64)[:, None] // weights[None, :]) % p).astype(np.int16)
        one = [1] + [0] * (n - 1)

        def vec(idx: int) -> List[int]:
            return [int(c) for c in digits[idx]]

        generator = next(
            g
            for g in range(1, q)
            if _has_full_order(lambda e, g=g: _ppowmod(vec(g), e, modulus, p) == one, q)
        )
        # column j of mul_g is generator * X^j
        g_vec = vec(generator)
        mul_g = np.array(
            [_pmulmod(g_vec, [int(i == j) for i in range(n)], modulus, p) for j in range(n)],
            dtype=np.int64,
        ).T
        times_g = ((digits.astype(np.int64) @ mul_g.T) % p) @ weights
        exp_table = np.empty(q - 1, dtype=np.int64)
        acc = 1
        for k in range(q - 1):
            exp_table[k] = acc
            acc = times_g[acc]

        basis_trace = []
        for j in range(n):
            y = [int(i == j) for i in range(n)]
            total = list(y)
            for _ in range(n - 1):
                y = _ppowmod(y, p, modulus, p)
                total = [(s + t) % p for s, t in zip(total, y)]
            if any(total[1:]):
                raise DecompRuntimeError(f"trace of X^{j} left GF({p}) in {params}")
            basis_trace.append(total[0])
        trace_table = (digits.astype(np.int64) @ np.array(basis_trace, dtype=np.int64)) % p

    dlog_table = np.full(q, -1, dtype=np.int64)
    dlog_table[exp_table] = np.arange(q - 1, dtype=np.int64)
    for table in (exp_table, dlog_table, trace_table, weights) + ((digits,) if digits is not None else ()):
        table.setflags(write=False)

    modulus_text = "" if n == 1 else f" modulus {format_poly(params.modulus)}"
    logger.info(f"Built {params}{modulus_text} generator {generator}")
    return FieldCtx(params, generator, exp_table, dlog_table, trace_table, digits, weights)


def _ret(value):
    if isinstance(value, np.ndarray) and value.ndim == 0:
        return int(value)
    if isinstance(value, np.integer):
        return int(value)
    return value


def _arr(a: Elements) -> np.ndarray:
    return np.asarray(a, dtype=np.int64)


def add(ctx: FieldCtx, a: Elements, b: Elements) -> Elements:
    a, b = _arr(a), _arr(b)
    if ctx.n == 1:
        return _ret((a + b) % ctx.p)
    return _ret(((ctx.digits[a] + ctx.digits[b]) % ctx.p) @ ctx.weights)


def neg(ctx: FieldCtx, a: Elements) -> Elements:
    a = _arr(a)
    if ctx.n == 1:
        return _ret((-a) % ctx.p)
    return _ret(((ctx.p - ctx.digits[a]) % ctx.p) @ ctx.weights)


def sub(ctx: FieldCtx, a: Elements, b: Elements) -> Elements:
    return add(ctx, a, neg(ctx, b))


def scale(ctx: FieldCtx, c: int, a: Elements) -> Elements:
    """Multiply by the prime-field scalar ``c`` (an integer, reduced mod p)."""
    a = _arr(a)
    c %= ctx.p
    if ctx.n == 1:
        return _ret((c * a) % ctx.p)
    return _ret(((ctx.digits[a].astype(np.int64) * c) % ctx.p) @ ctx.weights)


def mul(ctx: FieldCtx, a: Elements, b: Elements) -> Elements:
    a, b = _arr(a), _arr(b)
    if ctx.n == 1:
        return _ret((a * b) % ctx.p)
    nonzero = (a != 0) & (b != 0)
    logs = (ctx.dlog_table[a] + ctx.dlog_table[b]) % (ctx.q - 1)
    return _ret(np.where(nonzero, ctx.exp_table[logs], 0))


def dlog(ctx: FieldCtx, a: Elements) -> Elements:
    a = _arr(a)
    if np.any(a == 0):
        raise DivisionByZero(f"discrete logarithm of 0 in {ctx}")
    return _ret(ctx.dlog_table[a])


def inv(ctx: FieldCtx, a: Elements) -> Elements:
    a = _arr(a)
    if np.any(a == 0):
        raise DivisionByZero(f"inverse of 0 in {ctx}")
    return _ret(ctx.exp_table[(ctx.q - 1 - ctx.dlog_table[a]) % (ctx.q - 1)])


def div(ctx: FieldCtx, a: Elements, b: Elements) -> Elements:
    return mul(ctx, a, inv(ctx, b))


def power(ctx: FieldCtx, a: Elements, k: int) -> Elements:
    a = _arr(a)
    if k < 0:
        return power(ctx, inv(ctx, a), -k)
    if k == 0:
        return _ret(np.ones_like(a))
    logs = (ctx.dlog_table[a] * (k % (ctx.q - 1))) % (ctx.q - 1)
    return _ret(np.where(a != 0, ctx.exp_table[logs], 0))


def frobenius(ctx: FieldCtx, a: Elements) -> Elements:
    return power(ctx, a, ctx.p)


def trace(ctx: FieldCtx, a: Elements) -> Elements:
    return _ret(ctx.trace_table[_arr(a)])


def subfield(ctx: FieldCtx, d: int) -> np.ndarray:
    """Indices of GF(p^d) inside GF(p^n): the fixed points of x -> x^(p^d)."""
    if d < 1 or ctx.n % d:
        raise BadArgument(f"GF({ctx.p}^{d}) is not a subfield of {ctx}")
    xs = ctx.elements()
    return xs[power(ctx, xs, ctx.p**d) == xs]


def to_coeffs(ctx: FieldCtx, a: FieldElement) -> List[int]:
    if ctx.n == 1:
        return [int(a)]
    return [int(c) for c in ctx.digits[a]]


def from_coeffs(ctx: FieldCtx, coeffs: Sequence[int]) -> FieldElement:
    if len(coeffs) > ctx.n:
        raise BadArgument(f"{len(coeffs)} coefficients do not fit {ctx}")
    return int(sum((int(c) % ctx.p) * ctx.p**j for j, c in enumerate(coeffs)))


def format_element(ctx: FieldCtx, a: FieldElement) -> str:
    if ctx.n == 1:
        return str(int(a))
    return format_poly(to_coeffs(ctx, a), var="a")
