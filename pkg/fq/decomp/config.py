import json
import os
from dataclasses import dataclass, field, fields as dataclass_fields, replace
from functools import lru_cache
from typing import Any, ClassVar, Dict, List, Optional, Tuple

import jsonschema
from jsonschema.exceptions import best_match
from mashumaro import DataClassDictMixin
from mashumaro.jsonschema import build_json_schema
import sympy

from fq.decomp.events import DecompLogger
from fq.decomp.exceptions import ConfigError
from fq.decomp.sets import SEED_LIMIT
from fq.include import decomp as include

logger = DecompLogger("Config")

SUITE_NAMES = (
    "field-axioms",
    "characters",
    "energy-oracle",
    "ratfunc",
    "extraction",
    "partition",
    "charsum-bounds",
    "lemmas",
    "constructions",
)

STOCK_FIELDS = [2, 3, 4, 5, 7, 8, 9, 16, 25, 27, 49, 101, 121]


@dataclass
class ExperimentConfig(DataClassDictMixin):
    p: int = 1009
    n: int = 1
    sets: Dict[str, str] = field(default_factory=lambda: {"A": "rand:40,1"})
    function: str = "1/0,1"
    chi: int = 1
    psi: int = 1
    suites: List[str] = field(default_factory=lambda: list(SUITE_NAMES))
    trials: int = 20
    seed: int = 0
    output: Optional[str] = None
    timing: bool = False
    threads: int = 1
    primes: List[int] = field(default_factory=lambda: [101, 257, 1009])
    fields: List[int] = field(default_factory=lambda: list(STOCK_FIELDS))
    m_override: Optional[float] = None

    _ALIASES: ClassVar[Dict[str, str]] = {
        "prime": "p",
        "degree": "n",
        "out": "output",
        "suite": "suites",
        "m": "m_override",
    }
    _ENV: ClassVar[Dict[str, Tuple[str, type]]] = {
        "FQ_DECOMP_SEED": ("seed", int),
        "FQ_DECOMP_OUTPUT": ("output", str),
        "FQ_DECOMP_THREADS": ("threads", int),
    }

    def __post_init__(self):
        if self.n < 1:
            raise ConfigError(f"extension degree must be >= 1, got {self.n}", key="n")
        if self.trials < 0:
            raise ConfigError(f"trials must be >= 0, got {self.trials}", key="trials")
        if not 0 <= self.seed < SEED_LIMIT:
            raise ConfigError(f"seed must lie in [0, 2**32), got {self.seed}", key="seed")
        if self.threads < 1:
            raise ConfigError(f"threads must be >= 1, got {self.threads}", key="threads")
        for name in self.suites:
            if name not in SUITE_NAMES:
                raise ConfigError(f"unknown suite '{name}'", key="suites")
        for p in self.primes:
            if not sympy.isprime(p):
                raise ConfigError(f"{p} is not prime", key="primes")
        for q in self.fields:
            if q < 2 or len(sympy.factorint(q)) != 1:
                raise ConfigError(f"{q} is not a prime power", key="fields")
        if self.m_override is not None and self.m_override <= 0:
            raise ConfigError(f"must be positive, got {self.m_override}", key="m_override")

    @classmethod
    def translate_aliases(cls, data: Dict[str, Any]) -> Dict[str, Any]:
        out: Dict[str, Any] = {}
        for key, value in data.items():
            canonical = cls._ALIASES.get(key, key)
            if canonical in out:
                raise ConfigError(f"given twice (as '{key}' and an alias)", key=canonical)
            out[canonical] = value
        if isinstance(out.get("suites"), str):
            out["suites"] = [out["suites"]]
        return out

    @classmethod
    def apply_env(cls, data: Dict[str, Any]) -> Dict[str, Any]:
        out = dict(data)
        for var, (key, kind) in cls._ENV.items():
            raw = os.getenv(var)
            if raw is None or raw == "":
                continue
            try:
                out[key] = kind(raw)
            except ValueError:
                raise ConfigError(f"environment variable {var}={raw!r} is not a valid {kind.__name__}", key=key)
        return out

    @classmethod
    def json_schema(cls) -> Dict[str, Any]:
        return _schema()

    @classmethod
    def validate(cls, data: Dict[str, Any]):
        known = {f.name for f in dataclass_fields(cls)}
        for key in data:
            if key not in known:
                raise ConfigError("unknown key", key=key)
        error = best_match(jsonschema.Draft202012Validator(cls.json_schema()).iter_errors(data))
        if error is not None:
            path = ".".join(str(part) for part in error.absolute_path) or "<root>"
            raise ConfigError(error.message, key=path)

    @classmethod
    def parse(cls, data: Dict[str, Any]) -> "ExperimentConfig":
        """aliases, then environment overrides, then schema validation, then the dataclass."""
        if not isinstance(data, dict):
            raise ConfigError(f"expected a JSON object, got {type(data).__name__}")
        data = cls.apply_env(cls.translate_aliases(data))
        cls.validate(data)
        return cls.from_dict(data)

    @classmethod
    def load(cls, path: str) -> "ExperimentConfig":
        try:
            with open(path, encoding="utf-8") as fh:
                data = json.load(fh)
        except FileNotFoundError:
            raise ConfigError(f"config file {path} not found")
        except json.JSONDecodeError as exc:
            raise ConfigError(f"{path} is not valid JSON: {exc}")
        config = cls.parse(data)
        logger.info(f"Loaded experiment config {path} (suites: {', '.join(config.suites)})")
        return config

    @classmethod
    def shipped(cls, name: str = "default") -> "ExperimentConfig":
        """One of the configs bundled with the package (``default``, ``acceptance``)."""
        return cls.load(os.path.join(include.PACKAGE_PATH, f"{name}.json"))

    def with_overrides(self, **changes) -> "ExperimentConfig":
        return replace(self, **{k: v for k, v in changes.items() if v is not None})


@lru_cache(maxsize=1)
def _schema() -> Dict[str, Any]:
    return build_json_schema(ExperimentConfig).to_dict()
