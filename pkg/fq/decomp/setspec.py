"""The set-spec mini-language used by the CLI and experiment configs.

    interval:start,len   gp:base,len        msub:d          asub:b1;b2;...
    rand:size,seed       garaev:lambda      all             sub:d
    apgp:start,step,base,len
    inv(<spec>)          union(<spec>,<spec>,...)           image(<ratfn>,<spec>)

Whitespace is ignored. Inside ``union`` and ``image`` arguments are split at top-level
commas followed by a keyword, so coefficient lists and numeric arguments keep their commas.
"""
import re
from typing import Callable, Dict, List

from fq.decomp import ratfunc, sets
from fq.decomp.exceptions import ConfigError, DecompRuntimeError
from fq.decomp.field import FieldCtx
from fq.decomp.sets import FSubset

_KEYWORD = re.compile(r"[a-z]")


def _ints(args: str, count: int, name: str, sep: str = ",") -> List[int]:
    parts = args.split(sep) if args else []
    if count >= 0 and len(parts) != count:
        raise ConfigError(f"'{name}' takes {count} argument(s), got '{args}'", key="sets")
    try:
        return [int(a) for a in parts]
    except ValueError:
        raise ConfigError(f"non-integer argument in '{name}:{args}'", key="sets")


def _split_top_level(text: str) -> List[str]:
    parts, depth, start = [], 0, 0
    for i, ch in enumerate(text):
        if ch == "(":
            depth += 1
        elif ch == ")":
            depth -= 1
            if depth < 0:
                raise ConfigError(f"unbalanced parentheses in '{text}'", key="sets")
        elif ch == "," and depth == 0 and _KEYWORD.match(text[i + 1 : i + 2]):
            parts.append(text[start:i])
            start = i + 1
    if depth:
        raise ConfigError(f"unbalanced parentheses in '{text}'", key="sets")
    parts.append(text[start:])
    return parts


def _atom_builders(ctx: FieldCtx) -> Dict[str, Callable[[str], FSubset]]:
    return {
        "interval": lambda a: sets.interval(ctx, *_ints(a, 2, "interval")),
        "gp": lambda a: sets.geometric_progression(ctx, *_ints(a, 2, "gp")),
        "msub": lambda a: sets.mult_subgroup(ctx, *_ints(a, 1, "msub")),
        "asub": lambda a: sets.add_subspace(ctx, _ints(a, -1, "asub", sep=";")),
        "rand": lambda a: sets.random_subset(ctx, *_ints(a, 2, "rand")),
        "garaev": lambda a: sets.garaev_set(ctx, *_ints(a, 1, "garaev")),
        "sub": lambda a: sets.subfield(ctx, *_ints(a, 1, "sub")),
        "apgp": lambda a: sets.ap_gp_union(ctx, *_ints(a, 4, "apgp")),
    }


def parse_set_spec(ctx: FieldCtx, spec: str) -> FSubset:
    """Build the subset of ``ctx`` described by ``spec``.

    Malformed specs raise ``ConfigError`` (key ``sets``); generator preconditions that fail
    (a subgroup order not dividing q - 1, say) are re-raised as ``ConfigError`` too.
    """
    text = re.sub(r"\s+", "", spec)
    if not text:
        raise ConfigError("empty set spec", key="sets")
    try:
        return _parse(ctx, text)
    except ConfigError:
        raise
    except DecompRuntimeError as exc:
        raise ConfigError(f"'{spec}': {exc.msg}", key="sets")


def _parse(ctx: FieldCtx, text: str) -> FSubset:
    if text == "all":
        return sets.whole_field(ctx)
    call = re.fullmatch(r"([a-z]+)\((.*)\)", text)
    if call:
        name, inner = call.groups()
        if name == "inv":
            return sets.inverse_set(ctx, _parse(ctx, inner))
        if name == "union":
            return sets.union_all(ctx.params, [_parse(ctx, part) for part in _split_top_level(inner)])
        if name == "image":
            parts = _split_top_level(inner)
            if len(parts) != 2:
                raise ConfigError(f"image takes (ratfn, spec), got '{inner}'", key="sets")
            fn_text, set_text = parts
            f = ratfunc.parse_ratfunc(ctx, fn_text)
            return ratfunc.apply_to_set(ctx, f, _parse(ctx, set_text))
        raise ConfigError(f"unknown set constructor '{name}(...)'", key="sets")
    name, sep, args = text.partition(":")
    builders = _atom_builders(ctx)
    if name not in builders or not sep:
        raise ConfigError(f"unknown set spec '{text}'", key="sets")
    return builders[name](args)
