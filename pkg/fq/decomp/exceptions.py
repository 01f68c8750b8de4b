"""Error hierarchy for fq-decomp.

Runtime failures (arithmetic, algorithm preconditions, broken invariants) derive from
``DecompRuntimeError``; anything caused by user input derives from ``ConfigError``.
"""


class DecompError(Exception):
    """Base class for every error raised by the package."""

    def __init__(self, msg: str = ""):
        super().__init__(msg)
        self.msg = msg

    def __str__(self) -> str:
        return self.msg


class DecompRuntimeError(DecompError):
    pass


class ConfigError(DecompError, ValueError):
    """Rejected configuration, set spec or function spec.

    ``key`` names the offending config key when there is one.
    """

    def __init__(self, msg: str, key: str = ""):
        super().__init__(f"config key '{key}': {msg}" if key else msg)
        self.key = key


# field-core


class NonPrime(ConfigError):
    def __init__(self, p: int):
        super().__init__(f"characteristic {p} is not prime", key="p")
        self.p = p


class FieldTooLarge(ConfigError):
    def __init__(self, q: int, limit: int):
        super().__init__(f"field size q={q} exceeds the table limit {limit}", key="n")
        self.q = q


class NotPrimeField(DecompRuntimeError):
    pass


class DivisionByZero(DecompRuntimeError, ZeroDivisionError):
    pass


# rational functions


class ZeroDenominator(DecompRuntimeError, ZeroDivisionError):
    pass


class DegenerateFunction(DecompRuntimeError):
    pass


class ExceptionalFunction(DecompRuntimeError):
    def __init__(self, witness: int):
        super().__init__(
            f"function has the excluded shape g^p - g + lambda*X + mu (lambda={witness})"
        )
        self.witness = witness


# algorithms


class BadArgument(DecompRuntimeError, ValueError):
    pass


class BadLambda(BadArgument):
    pass


class SetTooSmall(DecompRuntimeError):
    pass


class EmptyC(DecompRuntimeError):
    pass


class VerificationFailure(DecompRuntimeError):
    """A hard-assertion suite observed a violated identity or inequality."""

    def __init__(self, failures):
        names = ", ".join(f"{r.suite}/{r.instance}" for r in failures[:5])
        more = f" (+{len(failures) - 5} more)" if len(failures) > 5 else ""
        super().__init__(f"{len(failures)} hard check(s) failed: {names}{more}")
        self.failures = list(failures)
