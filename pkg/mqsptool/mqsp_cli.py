"""
Command-line front end

Every subcommand resolves a configuration (defaults, then --config, then flags),
validates it and hands it to the Controller. Exit codes: 0 success, 1 usage or
IO error, 2 certified failure, 3 inconclusive.
"""

import functools
import logging
from typing import Any, Callable, Optional, Sequence

import click

from mqsptool.config_generator import create_blank_config, generate_configuration_from_cli, save_config
from mqsptool.config_loader import load_config_file, merge_config
from mqsptool.constants import EXIT_USAGE, VERSION
from mqsptool.mqsp_controller import Controller
from mqsptool.validate_inputs import SEARCH_COMMANDS, validate_inputs

logger = logging.getLogger("mqsp_logger")


def _display(message: str) -> None:
    click.echo(message, err=True)


def init_logging() -> None:
    """The logger only writes to the run log file; nothing reaches stdout"""
    logger.setLevel(logging.DEBUG)
    logger.propagate = False


def run_options(func: Callable[..., Any]) -> Callable[..., Any]:
    """Options shared by every subcommand"""

    @click.option("--config", "config_path", type=click.Path(dir_okay=False), help="YAML/JSON configuration file.")
    @click.option("--save-config", "save_config_path", type=click.Path(dir_okay=False), help="Save the config.")
    @click.option("--out", "out_path", type=click.Path(dir_okay=False), help="Report file (default: stdout).")
    @click.option("--output-dir", type=click.Path(file_okay=False), help="Directory for logs and records.")
    @click.option("--run-id", help="Name of the run log and survey records.")
    @functools.wraps(func)
    def wrapper(*args: Any, **kwargs: Any) -> Any:
        return func(*args, **kwargs)

    return wrapper


def input_options(func: Callable[..., Any]) -> Callable[..., Any]:
    @click.option("--in", "in_path", type=click.Path(dir_okay=False), help="Input JSON document.")
    @click.option("--tol", type=float, help="Unitarity tolerance of the sampled checks.")
    @click.option("--backend", type=click.Choice(["float", "exact", "auto"]), help="Coefficient arithmetic.")
    @functools.wraps(func)
    def wrapper(*args: Any, **kwargs: Any) -> Any:
        return func(*args, **kwargs)

    return wrapper


def search_options(func: Callable[..., Any]) -> Callable[..., Any]:
    @click.option("--seed", type=int, help="Random seed (required unless the config file sets RANDOM_SEED).")
    @click.option("--da", type=click.IntRange(min=1), help="Degree bound in a.")
    @click.option("--db", type=click.IntRange(min=1), help="Degree bound in b.")
    @click.option("--grid-n", type=click.IntRange(min=1), help="Quadrature parameter N (2N+1 roots of unity).")
    @click.option("--restarts", type=click.IntRange(min=1), help="Random restarts of the descent.")
    @click.option("--tol", type=float, help="Match tolerance of the permutation decomposition.")
    @click.option("--workers", type=click.IntRange(min=1), help="Worker processes.")
    @functools.wraps(func)
    def wrapper(*args: Any, **kwargs: Any) -> Any:
        return func(*args, **kwargs)

    return wrapper


def _resolve_config(command: str, options: dict[str, Any], tol_key: str) -> dict[str, Any]:
    """Defaults, then the configuration file, then the command-line flags"""

    base = create_blank_config()
    seed_in_file = False
    if options.get("config_path"):
        loaded = load_config_file(options["config_path"], _display)
        if loaded is None:
            raise click.ClickException("could not read the configuration file")
        seed_in_file = loaded.get("RANDOM_SEED") is not None
        base = merge_config(base, loaded)

    if command in SEARCH_COMMANDS and options.get("seed") is None and not seed_in_file:
        raise click.UsageError(f"'{command}' is randomized and needs an explicit --seed")

    config = generate_configuration_from_cli(options, base, tol_key)
    if not validate_inputs(config, command, _display):
        raise click.ClickException("invalid configuration")

    if options.get("save_config_path"):
        written = save_config(config, options["save_config_path"])
        _display(f"Configuration saved to {written}")
    return config


def _execute(
    ctx: click.Context,
    command: str,
    options: dict[str, Any],
    tol_key: str = "UNITARY",
    degrees: Optional[tuple[int, int]] = None,
) -> None:
    config = _resolve_config(command, options, tol_key)
    controller = Controller(config, _display, degrees)
    ctx.exit(controller.run_command(command))


@click.group()
@click.version_option(VERSION, prog_name="mqsp")
def cli() -> None:
    """Synthesis, decomposition and certification of (multivariate) QSP products."""
    init_logging()


@cli.command("synth-uni")
@run_options
@input_options
@click.pass_context
def synth_uni(ctx: click.Context, **options: Any) -> None:
    """Product E0 (t E1) ... (t Ed) of a unitary sequence, or the X-rotation product of {"phis": [...]}."""
    _execute(ctx, "synth-uni", options)


@cli.command("decomp-uni")
@run_options
@input_options
@click.pass_context
def decomp_uni(ctx: click.Context, **options: Any) -> None:
    """Primitive-projector decomposition of an SU(2)-valued Laurent polynomial."""
    _execute(ctx, "decomp-uni", options)


@cli.command("synth-hom")
@run_options
@input_options
@click.pass_context
def synth_hom(ctx: click.Context, **options: Any) -> None:
    """Homogeneous product; with "n" in the document, the non-commuting product."""
    _execute(ctx, "synth-hom", options)


@cli.command("decomp-hom")
@run_options
@input_options
@click.pass_context
def decomp_hom(ctx: click.Context, **options: Any) -> None:
    """Unitary sequence of a homogeneous bivariate polynomial."""
    _execute(ctx, "decomp-hom", options)


@cli.command("synth-alt")
@run_options
@input_options
@click.pass_context
def synth_alt(ctx: click.Context, **options: Any) -> None:
    """Alternating product of a unitary sequence with an assignment word over {a, b}."""
    _execute(ctx, "synth-alt", options)


@cli.command("certify")
@run_options
@click.option("--in", "in_path", type=click.Path(dir_okay=False), help="Input polynomial document.")
@click.option("--tol", type=float, help="Corner obstruction tolerance.")
@click.option("--backend", type=click.Choice(["float", "exact", "auto"]), help="Coefficient arithmetic.")
@click.option("--da", type=click.IntRange(min=0), help="Degree bound in a (default: degree of the input).")
@click.option("--db", type=click.IntRange(min=0), help="Degree bound in b (default: degree of the input).")
@click.pass_context
def certify_command(ctx: click.Context, **options: Any) -> None:
    """Decides whether a bivariate polynomial is an alternating product."""
    degrees = None
    if options.get("da") is not None or options.get("db") is not None:
        if options.get("da") is None or options.get("db") is None:
            raise click.UsageError("--da and --db go together")
        degrees = (int(options["da"]), int(options["db"]))
    _execute(ctx, "certify", options, tol_key="CORNER", degrees=degrees)


@cli.command("verify-f22")
@run_options
@click.pass_context
def verify_f22(ctx: click.Context, **options: Any) -> None:
    """Checks the degree (2, 2) counterexample identities in exact arithmetic."""
    _execute(ctx, "verify-f22", options)


@cli.command("solve-family")
@run_options
@click.option("--alpha0", help="Complex parameter, e.g. 1+1i.")
@click.option("--k", type=float, help="Real parameter.")
@click.option("--workers", type=click.IntRange(min=1), help="Worker processes.")
@click.pass_context
def solve_family_command(ctx: click.Context, **options: Any) -> None:
    """Multi-start Newton solve of the one-parameter counterexample family."""
    _execute(ctx, "solve-family", options)


@cli.command("search")
@run_options
@search_options
@click.pass_context
def search_command(ctx: click.Context, **options: Any) -> None:
    """Gradient search for SU(2)-valued (P, Q) with the given degree bounds."""
    _execute(ctx, "search", options, tol_key="SEARCH_MATCH")


@cli.command("survey")
@run_options
@search_options
@click.option("--samples", type=click.IntRange(min=1), help="Number of independent samples.")
@click.pass_context
def survey_command(ctx: click.Context, **options: Any) -> None:
    """Runs the search over many samples and tallies the decomposability verdicts."""
    _execute(ctx, "survey", options, tol_key="SEARCH_MATCH")


def run(argv: Optional[Sequence[str]] = None) -> int:
    """Runs the command line and returns the exit code instead of exiting"""

    try:
        code = cli.main(args=list(argv) if argv is not None else None, prog_name="mqsp", standalone_mode=False)
    except click.ClickException as err:
        err.show()
        return EXIT_USAGE
    except click.Abort:
        _display("Aborted!")
        return EXIT_USAGE
    return int(code) if isinstance(code, int) else 0


def main() -> None:
    raise SystemExit(run())
