#!/usr/bin/env python3
"""
Counterfactual-communication Fisher laboratory
Command-line entry point
"""
import sys
from pathlib import Path
from typing import Annotated, List, Optional

import typer

# Add project root to Python path
project_root = Path(__file__).parent
sys.path.insert(0, str(project_root))

from config import LOG_LEVEL, RunConfig, load_run_config, parse_int_range
from constants import EXIT_NUMERICAL, EXIT_OK, EXIT_USAGE
from errors import CfcLabError, ConfigurationError
from lab import create_lab
from src.circuits import BitProcess
from utils.export import key_value_rows, to_csv, to_json, to_table, write_output
from utils.logging_setup import setup_logging


# typer.BadParameter derives from the UsageError of the click that typer runs on
UsageError = typer.BadParameter.__base__

app = typer.Typer(
    name="cfc-lab",
    help="Fisher-information analysis of counterfactual-communication protocols.",
    add_completion=False,
    no_args_is_help=True,
)

FormatOption = Annotated[Optional[str], typer.Option("--format", "-f", help="json, csv or table")]
OutputOption = Annotated[Optional[Path], typer.Option("--output", "-o", help="write the report to this file")]
GridOption = Annotated[Optional[str], typer.Option("--grid", help="θ grid, e.g. 1e-2,5e-3,2.5e-3")]
SeedOption = Annotated[Optional[int], typer.Option("--seed", help="seed for generated messages")]
ConfigOption = Annotated[Optional[Path], typer.Option("--config", help="YAML file mirroring the flags")]
ThreadsOption = Annotated[Optional[int], typer.Option("--threads", min=1, help="parallelism cap")]
EpsilonOption = Annotated[Optional[float], typer.Option("--epsilon", help="0-bit error target")]
LogLevelOption = Annotated[Optional[str], typer.Option("--log-level", help="DEBUG, INFO, WARNING, ...")]


def _settings(command: str, command_flags: dict, **flags) -> RunConfig:
    config = load_run_config(
        flags.pop("config"),
        command=command,
        command_overrides=command_flags,
        output_format=flags.pop("output_format"),
        **flags,
    )
    setup_logging(config.log_level or LOG_LEVEL)
    return config


def _emit(config: RunConfig, document, rows: List[dict], columns: List[str], title: str) -> None:
    if config.output_format == "json":
        text = to_json(document)
    elif config.output_format == "csv":
        text = to_csv(rows, columns)
    else:
        text = to_table(rows, columns, title)
    write_output(text, config.output)


SUMMARY_FIELDS = [
    "protocol", "method", "bit", "n_outer", "m_inner", "f_ref", "epsilon", "p_success", "n_gamma",
    "d_vio_raw", "d_vio", "post_selected", "success_probability", "bob_detection_probability",
    "discard_probability", "regime_valid",
]
SITE_FIELDS = ["site", "fisher_zero", "fisher_one", "flux_zero", "flux_one", "contribution", "flux_gap", "converged"]
TABLE_SITE_LIMIT = 64


@app.command()
def reduced(
    bit: Annotated[Optional[int], typer.Option("--bit", min=0, max=1, help="0: mirrors, 1: detectors")] = None,
    theta1: Annotated[Optional[float], typer.Option("--theta1", help="tagging angle at the first entry")] = None,
    theta2: Annotated[Optional[float], typer.Option("--theta2", help="tagging angle at the second entry")] = None,
    postselect: Annotated[Optional[bool], typer.Option("--postselect/--no-postselect", help="condition on D0/D1")] = None,
    published_table: Annotated[
        bool, typer.Option("--published-table", "--paper-table", help="check every published value")
    ] = False,
    violation: Annotated[bool, typer.Option("--violation", help="report D_vio instead of the bins")] = False,
    output_format: FormatOption = None,
    output: OutputOption = None,
    grid: GridOption = None,
    epsilon: EpsilonOption = None,
    config: ConfigOption = None,
    threads: ThreadsOption = None,
    log_level: LogLevelOption = None,
) -> int:
    """Doubly nested interferometer: bins, per-site Fisher information, published values."""
    settings = _settings(
        "reduced",
        dict(bit=bit, theta1=theta1, theta2=theta2, postselect=postselect, published_table=published_table or None),
        config=config, output_format=output_format, output=output, grid=grid, epsilon=epsilon,
        threads=threads, log_level=log_level,
    )
    options = settings.reduced
    lab = create_lab(settings)

    if options.published_table:
        table = lab.published_table()
        rows = [c.model_dump() for c in table.checks]
        _emit(settings, table, rows, ["quantity", "expected", "observed", "tolerance", "passed"], "Published values")
        return EXIT_OK if table.passed else EXIT_NUMERICAL

    if violation:
        report = lab.violation_reduced()
        _emit_violation(settings, report)
        return EXIT_OK

    run = lab.reduced(BitProcess(options.bit), options.theta1, options.theta2, options.postselect)
    rows = [{"record": "bin", **b.model_dump()} for b in run.bins]
    rows += [{"record": "site", **s.model_dump()} for s in run.sites]
    columns = ["record", "bin", "role", "polarization", "p", "site", "fisher_at_point", "fisher_limit", "residual"]
    if run.post_selected:
        columns += ["unconditioned_at_point", "unconditioned_limit"]
    _emit(settings, run, rows, columns, f"Reduced protocol, bit {run.bit.value}")
    return EXIT_OK


def _emit_violation(settings: RunConfig, report) -> None:
    summary = report.model_dump(mode="json")
    if settings.output_format == "table":
        text = to_table(key_value_rows(summary, skip=("sites", "keep")), ["field", "value"], "Violation")
        if 0 < len(report.sites) <= TABLE_SITE_LIMIT:
            text += to_table([s.model_dump() for s in report.sites], SITE_FIELDS, "Sites")
        write_output(text, settings.output)
    elif settings.output_format == "csv":
        write_output(to_csv([{k: summary[k] for k in SUMMARY_FIELDS}], SUMMARY_FIELDS), settings.output)
    else:
        write_output(to_json(report), settings.output)


@app.command()
def full(
    n_outer: Annotated[Optional[int], typer.Option("-N", "--n-outer", min=2, help="outer beam splitters")] = None,
    m_inner: Annotated[Optional[int], typer.Option("-M", "--m-inner", min=2, help="inner beam splitters")] = None,
    mode: Annotated[Optional[str], typer.Option("--mode", help="sum, closed_form, asymptotic or simulate")] = None,
    method: Annotated[Optional[str], typer.Option("--method", help="simulation: auto, fisher or flux")] = None,
    bit: Annotated[Optional[int], typer.Option("--bit", min=0, max=1, help="simulated bit process")] = None,
    postselect: Annotated[Optional[bool], typer.Option("--postselect/--no-postselect", help="condition on D0/D1")] = None,
    output_format: FormatOption = None,
    output: OutputOption = None,
    grid: GridOption = None,
    epsilon: EpsilonOption = None,
    config: ConfigOption = None,
    threads: ThreadsOption = None,
    log_level: LogLevelOption = None,
) -> int:
    """Full N×M protocol: double sum, asymptote or simulation."""
    settings = _settings(
        "full",
        dict(n_outer=n_outer, m_inner=m_inner, mode=mode, method=method, bit=bit, postselect=postselect),
        config=config, output_format=output_format, output=output, grid=grid, epsilon=epsilon,
        threads=threads, log_level=log_level,
    )
    options = settings.full
    if options.n_outer is None or options.m_inner is None:
        raise ConfigurationError("the full protocol needs -N and -M")
    lab = create_lab(settings)
    report = lab.full(options.n_outer, options.m_inner, options.mode, BitProcess(options.bit), options.method, options.postselect)
    _emit_violation(settings, report)
    return EXIT_OK


@app.command()
def classical(
    length: Annotated[Optional[int], typer.Option("--length", "--len", min=1, help="message length")] = None,
    message: Annotated[Optional[str], typer.Option("--message", help="explicit bit string, e.g. 0000")] = None,
    seed: SeedOption = None,
    output_format: FormatOption = None,
    output: OutputOption = None,
    config: ConfigOption = None,
    log_level: LogLevelOption = None,
) -> int:
    """Ball-and-pipe protocol with post-selection on empty minutes."""
    settings = _settings(
        "classical",
        dict(length=length, message=message),
        config=config, output_format=output_format, output=output, seed=seed, log_level=log_level,
    )
    options = settings.classical
    transcript = create_lab(settings).classical(options.length, settings.seed, options.message)
    summary = {
        "minutes": len(transcript.minutes),
        "kept": len(transcript.kept_minutes),
        "discard_count": transcript.discard_count,
        "discard_fraction": transcript.discard_fraction,
        "crossing_count": transcript.crossing_count,
        "kept_counterfactual": transcript.kept_counterfactual,
        "seed": settings.seed,
    }
    columns = ["minute", "parity", "bit", "sent", "received", "kept"]
    if settings.output_format == "json":
        write_output(to_json({**summary, "transcript": transcript.rows()}), settings.output)
    elif settings.output_format == "csv":
        write_output(to_csv(transcript.rows(), columns), settings.output)
    else:
        write_output(to_table(key_value_rows(summary), ["field", "value"], "Classical protocol"), settings.output)
    return EXIT_OK if transcript.kept_counterfactual else EXIT_NUMERICAL


@app.command()
def sweep(
    n_values: Annotated[Optional[str], typer.Option("--n-values", "-N", help="e.g. 2..8 or 5,10,20")] = None,
    m_values: Annotated[Optional[str], typer.Option("--m-values", "-M", help="e.g. 2..64 or 2..64:2")] = None,
    output_format: FormatOption = None,
    output: OutputOption = None,
    config: ConfigOption = None,
    threads: ThreadsOption = None,
    log_level: LogLevelOption = None,
) -> int:
    """Double sum against the asymptote over a grid of (N, M)."""
    settings = _settings(
        "sweep",
        dict(n_values=n_values, m_values=m_values),
        config=config, output_format=output_format or ("csv" if config is None else None), output=output, threads=threads, log_level=log_level,
    )
    options = settings.sweep
    rows = create_lab(settings).sweep(parse_int_range(options.n_values), parse_int_range(options.m_values))
    columns = ["n_outer", "m_inner", "d_sum", "d_asym", "relative_gap"]
    _emit(settings, [r.model_dump() for r in rows], [r.model_dump() for r in rows], columns, "Sweep")
    return EXIT_OK


def main(argv: Optional[List[str]] = None) -> int:
    """Runs one sub-command and maps failures onto the exit-code contract."""
    try:
        code = app(args=argv, prog_name="cfc-lab", standalone_mode=False)
    except UsageError as e:
        e.show(file=sys.stderr)
        return EXIT_USAGE
    except typer.Abort:
        return EXIT_USAGE
    except ConfigurationError as e:
        typer.echo(f"error: {e}", err=True)
        return EXIT_USAGE
    except CfcLabError as e:
        typer.echo(f"error: {e}", err=True)
        return EXIT_NUMERICAL
    return code if isinstance(code, int) else EXIT_OK


if __name__ == "__main__":
    exit_code = main()
    sys.exit(exit_code)
