"""The ``fq-decomp`` command line.

Exit codes: 0 on success, 1 when a hard check fails or the computation is rejected,
2 for configuration errors (bad config file, set spec, function spec or field).
"""
import sys
from contextlib import contextmanager
from typing import Optional, Tuple

import agate
import click

from fq.decomp import charsums, decompose, energy, field, ratfunc, suites
from fq.decomp.__version__ import version
from fq.decomp.characters import AdditiveCharacter, MultiplicativeCharacter
from fq.decomp.config import SUITE_NAMES, ExperimentConfig
from fq.decomp.events import DecompLogger, stderr_handler
from fq.decomp.exceptions import ConfigError, DecompError, VerificationFailure
from fq.decomp.results import emit_csv, failures, format_float, print_summary
from fq.decomp.setspec import parse_set_spec

logger = DecompLogger("CLI")

DEFAULTS = ExperimentConfig()


class ConfigUsageError(click.ClickException):
    exit_code = 2


@contextmanager
def exception_handler(command: str):
    try:
        yield
    except ConfigError as exc:
        logger.debug(f"{command}: configuration error: {exc}")
        raise ConfigUsageError(str(exc))
    except VerificationFailure as exc:
        logger.debug(f"{command}: {len(exc.failures)} hard check(s) failed")
        raise click.ClickException(str(exc))
    except DecompError as exc:
        logger.debug(f"{command}: {type(exc).__name__}: {exc}")
        raise click.ClickException(str(exc))


def field_options(command):
    command = click.option("--n", "n", type=int, default=DEFAULTS.n, show_default=True, help="Extension degree.")(command)
    command = click.option("--p", "p", type=int, default=DEFAULTS.p, show_default=True, help="Characteristic.")(command)
    return command


def _print_rows(rows, column_names):
    text = agate.Text()
    table = agate.Table(rows, column_names, [text] * len(column_names))
    table.print_table(max_rows=None, max_columns=None, output=sys.stdout, max_column_width=60)


@click.group()
@click.option("-v", "--verbose", count=True, help="-v for progress, -vv for per-iteration detail.")
@click.version_option(version, prog_name="fq-decomp")
@click.pass_context
def cli(ctx: click.Context, verbose: int):
    """Low-energy decompositions and triple character sums over finite fields."""
    ctx.with_resource(stderr_handler(verbose).applicationbound())


@cli.command("field")
@field_options
def field_command(p: int, n: int):
    """Build GF(p^n) and print its parameters."""
    with exception_handler("field"):
        ctx = field.build_field(p, n)
        modulus = "-" if ctx.params.modulus is None else field.format_poly(ctx.params.modulus)
        _print_rows(
            [
                ("field", str(ctx)),
                ("q", str(ctx.q)),
                ("modulus", modulus),
                ("generator", field.format_element(ctx, ctx.generator)),
                ("generator index", str(ctx.generator)),
            ],
            ("property", "value"),
        )


@cli.command("energy")
@field_options
@click.option("--set", "spec", required=True, help="Set spec, e.g. interval:0,10 or rand:40,1.")
@click.option("--threads", type=int, default=1, show_default=True)
def energy_command(p: int, n: int, spec: str, threads: int):
    """Sizes and energies of one set."""
    with exception_handler("energy"):
        ctx = field.build_field(p, n)
        U = parse_set_spec(ctx, spec)
        rows = [
            ("size", len(U)),
            ("E(U)", energy.additive_energy(ctx, U, threads).value),
            ("E^x(U)", energy.multiplicative_energy(ctx, U, threads).value),
            ("E(U^-1)", energy.inverse_energy(ctx, U, threads).value),
            ("|U+U|", len(energy.sumset(ctx, U, U))),
            ("|U.U|", len(energy.product_set(ctx, U, U))),
        ]
        _print_rows([(name, str(value)) for name, value in rows], ("quantity", "value"))


@cli.command("decompose")
@field_options
@click.option("--set", "spec", required=True, help="Set spec for A.")
@click.option("--fn", "function", default=DEFAULTS.function, show_default=True, help="Rational function num/den.")
@click.option("--m", "m_override", type=float, default=None, help="Use this M instead of M(|A|).")
def decompose_command(p: int, n: int, spec: str, function: str, m_override: Optional[float]):
    """Split A into S (small energy) and T (small f-energy)."""
    with exception_handler("decompose"):
        ctx = field.build_field(p, n)
        A = parse_set_spec(ctx, spec)
        f = ratfunc.parse_ratfunc(ctx, function)
        params = decompose.ThresholdParams(m_override=m_override)
        result = decompose.partition(ctx, A, f, params)
        _print_rows(
            [
                ("|A|", str(len(A))),
                ("M", format_float(result.m_value)),
                ("threshold", format_float(result.threshold)),
                ("trivial", str(result.trivial_flag).lower()),
                ("|S|", str(len(result.S_final))),
                ("|T|", str(len(result.T_final))),
                ("E(S)", str(result.s_energy)),
                ("E(f(T))", str(result.t_f_energy)),
                ("aggregate bound", format_float(result.aggregate_bound)),
                ("c1", format_float(result.c1)),
                ("c2", format_float(result.c2)),
            ],
            ("quantity", "value"),
        )
        if result.iterations:
            _print_rows(
                [
                    (str(r.index), str(r.v_size), str(r.v_energy), str(r.q_size), str(r.q_f_energy), str(r.guarded).lower())
                    for r in result.iterations
                ],
                ("iteration", "|V|", "E(V)", "|Q|", "E(f(Q))", "guarded"),
            )


@cli.command("charsum")
@field_options
@click.option("--kind", type=click.Choice(["S", "T", "mixed", "K"]), required=True)
@click.option("--sets", "specs", required=True, nargs=3, help="Set specs for A, B and C.")
@click.option("--chi", type=int, default=DEFAULTS.chi, show_default=True, help="Multiplicative character index j.")
@click.option("--psi", type=int, default=DEFAULTS.psi, show_default=True, help="Additive character index a.")
@click.option("--threads", type=int, default=1, show_default=True)
def charsum_command(p: int, n: int, kind: str, specs: Tuple[str, str, str], chi: int, psi: int, threads: int):
    """Evaluate one triple sum (or the Kloosterman form) with its bounds."""
    with exception_handler("charsum"):
        ctx = field.build_field(p, n)
        A, B, C = (parse_set_spec(ctx, spec) for spec in specs)
        additive = AdditiveCharacter(psi % ctx.q)
        multiplicative = MultiplicativeCharacter(chi % (ctx.q - 1))
        if kind == "S":
            result = charsums.sum_S(ctx, A, B, C, additive)
        elif kind == "T":
            result = charsums.sum_T(ctx, A, B, C, multiplicative, workers=threads)
        elif kind == "mixed":
            result = charsums.sum_mixed(ctx, A, B, C, multiplicative, additive, workers=threads)
        else:
            weights = [charsums.WeightVector.ones(X) for X in (A, B, C)]
            result = charsums.kloosterman_K(ctx, *weights, additive)
        click.echo(f"{kind} = {result.value.real:.12g} {result.value.imag:+.12g}i  |{kind}| = {result.magnitude:.12g}")
        if result.bound_report:
            _print_rows(
                [(b.name, format_float(b.value), format_float(b.ratio)) for b in result.bound_report],
                ("bound", "value", "ratio"),
            )


def _run_and_emit(config: ExperimentConfig, records):
    if config.output:
        emit_csv(records, config.output, timing=config.timing)
        print_summary(records, sys.stdout)
    else:
        emit_csv(records, sys.stdout, timing=config.timing)
    failed = failures(records)
    if failed:
        raise VerificationFailure(failed)


@cli.command("verify")
@click.option("--suite", "suite_names", multiple=True, type=click.Choice(SUITE_NAMES), help="Repeatable; all by default.")
@click.option("--config", "config_path", type=click.Path(dir_okay=False), default=None, help="Base experiment config.")
@click.option("--trials", type=int, default=None)
@click.option("--seed", type=int, default=None)
@click.option("--threads", type=int, default=None)
@click.option("--output", "-o", default=None, help="CSV path; stdout when omitted.")
@click.option("--timing/--no-timing", default=None)
def verify_command(suite_names, config_path, trials, seed, threads, output, timing):
    """Run verification suites and write their records as CSV."""
    with exception_handler("verify"):
        config = ExperimentConfig.load(config_path) if config_path else ExperimentConfig.shipped("default")
        config = config.with_overrides(
            suites=list(suite_names) or None,
            trials=trials,
            seed=seed,
            threads=threads,
            output=output,
            timing=timing,
        )
        _run_and_emit(config, suites.run_suites(config))


@cli.command("experiment")
@click.option("--config", "config_path", type=click.Path(dir_okay=False), required=True)
def experiment_command(config_path: str):
    """Run everything an experiment config asks for."""
    with exception_handler("experiment"):
        config = ExperimentConfig.load(config_path)
        _run_and_emit(config, suites.run_experiment(config))


def main():
    cli(prog_name="fq-decomp")


if __name__ == "__main__":
    main()
