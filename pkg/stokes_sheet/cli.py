"""CLI for the stokes-sheet simulator.

Supports both human-readable output and JSON output for scripts and CI.
"""

import json
import logging
import sys
from pathlib import Path

from rich.console import Console
from rich.logging import RichHandler
from rich.panel import Panel

from .config import COMMANDS, ConfigError, Settings, load_config
from .equilibria import ConvergenceError
from .evolution import BreakdownError
from .pipeline import PipelineConfig, PipelineResult, StokesSheetPipeline
from .solver import SolveError

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_BREAKDOWN = 3
EXIT_VALIDATION = 4


def _option(args: list[str], *names: str) -> str | None:
    """Value following the first of ``names`` present in args."""
    for name in names:
        if name in args:
            idx = args.index(name) + 1
            if idx >= len(args) or args[idx].startswith("--"):
                raise ConfigError(f"{name} needs a value")
            return args[idx]
    return None


def _setup_logging(level: str, verbose: bool):
    logging.basicConfig(
        level=logging.DEBUG if verbose else level,
        format="%(message)s",
        handlers=[RichHandler(console=Console(stderr=True), show_path=False)],
        force=True,
    )


def main(argv: list[str] | None = None) -> int:
    """Main CLI entrypoint; returns the process exit code."""
    args = list(sys.argv[1:] if argv is None else argv)
    json_mode = "--json" in args

    # Create console (quiet in JSON mode)
    console = Console(quiet=json_mode)

    if not args or "--help" in args or "-h" in args:
        _print_help(console)
        return EXIT_OK if args else EXIT_CONFIG

    command = args[0]
    if command not in COMMANDS:
        return _fail(console, json_mode, f"unknown command {command!r}", EXIT_CONFIG)

    try:
        settings = Settings.from_env()
        _setup_logging(settings.log_level, "--verbose" in args or "-v" in args)
        config = load_config(_option(args, "--config"))
        out = _option(args, "--out")
        workers = _option(args, "--workers")
        resume = _option(args, "--resume")
        if resume and command != "simulate":
            raise ConfigError("--resume only applies to simulate")
        if workers is not None and (not workers.isdigit() or int(workers) < 1):
            raise ConfigError("--workers needs a positive integer")
    except ConfigError as exc:
        return _fail(console, json_mode, str(exc), EXIT_CONFIG)

    problems = config.problems(command)
    if problems:
        return _fail(console, json_mode, "; ".join(problems), EXIT_CONFIG)

    # Print banner (only in human mode)
    if not json_mode:
        console.print(
            Panel.fit(
                f"[bold blue]stokes-sheet {command}[/bold blue]\n"
                "[dim]Periodic two-phase Stokes interface[/dim]",
                border_style="blue",
            )
        )

    pipeline = StokesSheetPipeline(PipelineConfig(
        run=config,
        out_dir=Path(out or config.output.directory or settings.out_dir),
        workers=int(workers) if workers else settings.workers,
        quiet_mode=json_mode,
        resume=Path(resume) if resume else None,
    ))

    try:
        result = pipeline.run(command)
    except BreakdownError as exc:
        return _fail(console, json_mode, f"numerical breakdown: {exc} (partial output kept)", EXIT_BREAKDOWN)
    except (SolveError, ConvergenceError) as exc:
        return _fail(console, json_mode, f"numerical failure: {exc}", EXIT_BREAKDOWN)
    except ValueError as exc:
        return _fail(console, json_mode, str(exc), EXIT_CONFIG)

    code = EXIT_OK if result.ok else (EXIT_VALIDATION if command == "validate" else EXIT_BREAKDOWN)
    if json_mode:
        print(json.dumps(_result_to_dict(result, code), indent=2, default=str))
    elif result.ok:
        console.print(f"\n[bold green]{command} complete![/bold green]")
        console.print(f"[dim]Output in: {pipeline.out_dir.absolute()}[/dim]\n")
    else:
        console.print(f"\n[bold red]{command} finished with failures[/bold red]\n")
    return code


def _fail(console: Console, json_mode: bool, message: str, code: int) -> int:
    if json_mode:
        print(json.dumps({"success": False, "error": message, "exit_code": code}, indent=2))
    else:
        console.print(f"[red]Error: {message}[/red]")
    return code


def _result_to_dict(result: PipelineResult, code: int) -> dict:
    """Convert PipelineResult to JSON-serializable dict."""
    return {
        "success": result.ok,
        "command": result.command,
        "exit_code": code,
        "files": [str(path) for path in result.files],
        "summary": result.summary,
    }


def _print_help(console: Console):
    """Print CLI help."""
    help_text = """
[bold]Usage:[/bold] stokes-sheet COMMAND [OPTIONS]

[bold]Commands:[/bold]
  simulate            Evolve the interface and write a time series and snapshots
  spectrum            Flat-state eigenvalues, analytic against numeric
  branch              Continue a finger branch from (ℓ², 0)
  fields              Velocity and pressure on a bulk grid
  validate            Run the built-in oracle suite
  sweep               Simulate over values of one fluid parameter

[bold]Options:[/bold]
  --config PATH       TOML run configuration (defaults apply when omitted)
  --out DIR           Output directory (overrides STOKES_SHEET_OUT_DIR)
  --resume PATH       Resume simulate from a snapshot CSV and its JSON sidecar
  --workers N         Threads for Jacobian columns and sweeps
  --json              Print a JSON result instead of tables
  -v, --verbose       Debug logging
  -h, --help          Show this help message

[bold]Exit codes:[/bold]
  0 ok, 2 configuration error, 3 numerical breakdown, 4 validation failure

[bold]Examples:[/bold]
  stokes-sheet spectrum --config runs/flat.toml
  stokes-sheet simulate --config runs/relax.toml --out output/relax
  stokes-sheet simulate --config runs/relax.toml --resume output/relax/snapshots/f_000010.csv

[bold]Environment Variables:[/bold]
  STOKES_SHEET_OUT_DIR     Output directory (default ./output)
  STOKES_SHEET_LOG_LEVEL   Log level (default WARNING)
  STOKES_SHEET_WORKERS     Thread count
"""
    console.print(help_text)


if __name__ == "__main__":
    sys.exit(main())
