"""Command orchestrator: runs the numerics, writes outputs and prints summaries."""

import logging
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Optional

import numpy as np
from rich.console import Console
from rich.progress import Progress, SpinnerColumn, TextColumn
from rich.table import Table

from .config import RunConfig
from .equilibria import continue_branch, flat_spectrum
from .evolution import BreakdownError, EvolutionState, simulate
from .profile import grid
from .potentials import FieldEvaluator
from .solver import SolveError, solve_density
from .validation import render_report, run_validation
from .writers import (
    BRANCH_COLUMNS,
    FIELDS_COLUMNS,
    SPECTRUM_COLUMNS,
    LocalWriter,
    read_snapshot,
)

logger = logging.getLogger(__name__)


@dataclass
class PipelineConfig:
    """Configuration for one command run."""

    run: RunConfig
    out_dir: Path = Path("./output")
    workers: Optional[int] = None
    quiet_mode: bool = False  # Suppress console output (for JSON mode)
    resume: Optional[Path] = None


@dataclass
class PipelineResult:
    """Files and headline numbers of one command run."""

    command: str
    files: list[Path] = field(default_factory=list)
    summary: dict[str, Any] = field(default_factory=dict)
    ok: bool = True


class StokesSheetPipeline:
    """
    Runs the stokes-sheet commands:

    1. simulate: evolve an interface and record its diagnostics
    2. spectrum: flat-state eigenvalues, analytic against numeric
    3. branch: continue a finger branch from its bifurcation point
    4. fields: velocity and pressure on a bulk grid
    5. validate: the built-in oracle suite
    6. sweep: simulate over values of one fluid parameter
    """

    def __init__(self, config: PipelineConfig):
        self.config = config
        self.run_config = config.run
        self.console = Console(quiet=config.quiet_mode)
        self.out_dir = Path(config.out_dir)

    def _progress(self) -> Progress:
        return Progress(
            SpinnerColumn(),
            TextColumn("[progress.description]{task.description}"),
            console=self.console,
        )

    def _metadata(self, command: str, **extra) -> dict[str, Any]:
        return {
            "command": command,
            "params": self.run_config.fluids.model_dump(),
            "n": self.run_config.grid.n,
            **extra,
        }

    def simulate(self) -> PipelineResult:
        """Integrate the configured initial profile; partial output is kept on breakdown.

        Raises:
            BreakdownError: After the partial trajectory has been written.
        """
        run = self.run_config
        stepper = run.stepper
        writer = LocalWriter(self.out_dir)
        start = None
        if self.config.resume:
            start, scheme = read_snapshot(self.config.resume, params=run.fluids)
            if scheme != stepper.scheme:
                logger.warning("resuming a %s run with scheme %s", scheme, stepper.scheme)
        f0 = start.profile if start else run.initial_profile()

        breakdown = None
        with self._progress() as progress:
            task = progress.add_task(f"Simulating to t = {stepper.t_end:g} ({stepper.scheme}, n = {f0.n})...", total=None)
            try:
                trajectory = simulate(f0, stepper, run.fluids, start=start)
            except BreakdownError as exc:
                breakdown = exc
                trajectory = exc.trajectory
            progress.update(task, description="Writing trajectory...")
            files = self._write_trajectory(writer, trajectory, breakdown)
            progress.update(task, description=f"[green]Done: {len(trajectory)} recorded states[/green]")

        last = trajectory[-1]
        summary = {
            "t": last.t,
            "states": len(trajectory),
            "amp_max": last.diagnostics.amp_max,
            "slope_max": last.diagnostics.slope_max,
            "mean_drift": abs(last.diagnostics.mean - trajectory[0].diagnostics.mean),
        }
        if breakdown:
            summary["breakdown"] = breakdown.reason
        self._print_summary("Simulation", summary)
        if breakdown:
            raise breakdown
        return PipelineResult("simulate", files, summary)

    def _write_trajectory(
        self,
        writer: LocalWriter,
        trajectory: list[EvolutionState],
        breakdown: BreakdownError | None,
    ) -> list[Path]:
        stepper = self.run_config.stepper
        files = [writer.write_timeseries(trajectory, stepper.modes)]
        if self.run_config.output.snapshots:
            for index, state in enumerate(trajectory):
                files.append(writer.write_snapshot(state, index, stepper.scheme))
        files.append(writer.write_sidecar("timeseries", self._metadata(
            "simulate",
            stepper=stepper.model_dump(),
            initial=self.run_config.initial.model_dump(),
            breakdown=breakdown.reason if breakdown else None,
        )))
        return files

    def spectrum(self) -> PipelineResult:
        run = self.run_config
        n = run.spectrum.n or run.grid.n
        with self._progress() as progress:
            task = progress.add_task(f"Assembling the flat-state Jacobian (n = {n})...", total=None)
            report = flat_spectrum(run.fluids, run.spectrum.K, n=n, workers=self.config.workers)
            progress.update(task, description="[green]Done: spectrum[/green]")

        writer = LocalWriter(self.out_dir)
        rows = [
            (k, analytic, numeric.real, numeric.imag)
            for k, (analytic, numeric) in enumerate(zip(report.analytic, report.matched), start=1)
        ]
        files = [
            writer.write_table("spectrum", SPECTRUM_COLUMNS, rows),
            writer.write_sidecar("spectrum", self._metadata(
                "spectrum", K=run.spectrum.K, theta0=report.theta0, classification=report.classification
            )),
        ]

        table = Table(title="Flat-state spectrum")
        table.add_column("k", style="cyan")
        table.add_column("analytic", style="magenta")
        table.add_column("numeric", style="green")
        for k, analytic, re, im in rows:
            table.add_row(str(k), f"{analytic:.10g}", f"{re:.10g}" + (f" {im:+.2g}i" if im else ""))
        self.console.print(table)

        summary = {
            "theta0": report.theta0,
            "classification": report.classification,
            "lambda_1": float(report.analytic[0]),
            "max_rel_error": float(np.max(np.abs(report.matched - report.analytic) / np.abs(report.analytic))),
        }
        self._print_summary("Spectrum", summary)
        return PipelineResult("spectrum", files, summary)

    def branch(self) -> PipelineResult:
        run = self.run_config
        cfg = run.branch
        with self._progress() as progress:
            task = progress.add_task(f"Continuing branch ℓ = {cfg.ell} to s = {cfg.s_max:g}...", total=None)
            points = continue_branch(
                cfg.ell,
                cfg.s_max,
                cfg.ds,
                n=cfg.n,
                slope_cap=cfg.slope_cap,
                params=run.fluids if cfg.stability else None,
                stability_n=cfg.stability_n,
                workers=self.config.workers,
            )
            progress.update(task, description=f"[green]Done: {len(points)} branch points[/green]")

        writer = LocalWriter(self.out_dir)
        rows = [
            (p.ell, p.s, p.lam, p.amplitude, p.slope_max, np.nan if p.stability is None else p.stability)
            for p in points
        ]
        files = [
            writer.write_table("branch", BRANCH_COLUMNS, rows),
            writer.write_sidecar("branch", self._metadata(
                "branch", branch=cfg.model_dump(), regimes=[p.regime for p in points],
                residuals=[p.residual for p in points],
            )),
        ]
        last = points[-1]
        summary = {
            "points": len(points),
            "s_last": last.s,
            "lambda_last": last.lam,
            "amplitude_last": last.amplitude,
            "slope_last": last.slope_max,
        }
        self._print_summary(f"Branch ℓ = {cfg.ell}", summary)
        return PipelineResult("branch", files, summary)

    def fields(self) -> PipelineResult:
        run = self.run_config
        cfg = run.fields
        f = run.initial_profile()
        with self._progress() as progress:
            task = progress.add_task("Solving for the traction density...", total=None)
            beta = solve_density(f, run.fluids)
            evaluator = FieldEvaluator(f, (beta.beta1, beta.beta2), run.fluids, refine=cfg.refine)
            progress.update(task, description="Evaluating bulk fields...")
            x1, x2 = np.meshgrid(grid(cfg.x1_points), np.linspace(cfg.x2_min, cfg.x2_max, cfg.x2_points), indexing="ij")
            x1, x2 = x1.ravel(), x2.ravel()
            on_interface = np.abs(evaluator.gap(x1, x2)) < 1e-12
            v1 = np.full(x1.size, np.nan)
            v2 = np.full(x1.size, np.nan)
            q = np.full(x1.size, np.nan)
            side = np.zeros(x1.size)
            if np.any(~on_interface):
                off = ~on_interface
                v1[off], v2[off], q[off], side[off] = evaluator.fields(x1[off], x2[off])
            if np.any(on_interface):
                logger.warning("%d grid point(s) lie on the interface and are written as NaN", int(on_interface.sum()))
            progress.update(task, description=f"[green]Done: {x1.size} points[/green]")

        writer = LocalWriter(self.out_dir)
        files = [
            writer.write_table("fields", FIELDS_COLUMNS, np.column_stack([x1, x2, v1, v2, q, side])),
            writer.write_sidecar("fields", self._metadata(
                "fields", fields=cfg.model_dump(), initial=run.initial.model_dump(),
                residual=beta.residual, condition=beta.condition,
            )),
        ]
        summary = {
            "points": int(x1.size),
            "max_speed": float(np.nanmax(np.hypot(v1, v2))) if np.any(~on_interface) else 0.0,
            "condition": beta.condition,
        }
        self._print_summary("Bulk fields", summary)
        return PipelineResult("fields", files, summary)

    def validate(self) -> PipelineResult:
        run = self.run_config
        with self._progress() as progress:
            task = progress.add_task("Running oracle checks...", total=None)
            checks = run_validation(
                run.fluids,
                n=run.grid.n,
                workers=self.config.workers,
                progress=lambda name: progress.update(task, description=f"Checked: {name}"),
            )
            progress.update(task, description=f"[green]Done: {len(checks)} checks[/green]")

        self.out_dir.mkdir(parents=True, exist_ok=True)
        report_path = self.out_dir / "validation.md"
        report_path.write_text(render_report(checks, run.fluids, run.grid.n))

        table = Table(title="Validation")
        table.add_column("Check", style="cyan")
        table.add_column("Error", style="magenta")
        table.add_column("Tolerance", style="yellow")
        table.add_column("Outcome")
        for check in checks:
            outcome = "[green]pass[/green]" if check.passed else "[red]FAIL[/red]"
            table.add_row(check.name, f"{check.error:.3e}", f"{check.tolerance:.1e}", outcome)
        self.console.print(table)

        passed = all(check.passed for check in checks)
        summary = {
            "checks": len(checks),
            "failed": [check.name for check in checks if not check.passed],
        }
        return PipelineResult("validate", [report_path], summary, ok=passed)

    def sweep(self) -> PipelineResult:
        """Simulate once per value of the swept parameter, each into its own directory."""
        run = self.run_config
        parameter = run.sweep.parameter

        def one(value: float) -> tuple[float, PipelineResult]:
            fluids = run.fluids.model_copy(update={parameter: value})
            fluids = type(fluids).model_validate(fluids.model_dump())
            child = StokesSheetPipeline(PipelineConfig(
                run=run.model_copy(update={"fluids": fluids}),
                out_dir=self.out_dir / f"{parameter}={value:g}",
                quiet_mode=True,
            ))
            try:
                return value, child.simulate()
            except (BreakdownError, SolveError) as exc:
                logger.warning("sweep %s=%g stopped: %s", parameter, value, exc)
                return value, PipelineResult("simulate", summary={"breakdown": str(exc)}, ok=False)

        with self._progress() as progress:
            task = progress.add_task(f"Sweeping {parameter} over {len(run.sweep.values)} values...", total=None)
            with ThreadPoolExecutor(max_workers=self.config.workers) as pool:
                outcomes = list(pool.map(one, run.sweep.values))
            progress.update(task, description=f"[green]Done: {len(outcomes)} runs[/green]")

        table = Table(title=f"Sweep over {parameter}")
        table.add_column(parameter, style="cyan")
        table.add_column("t", style="magenta")
        table.add_column("amp_max", style="green")
        table.add_column("status", style="yellow")
        for value, result in outcomes:
            table.add_row(
                f"{value:g}",
                f"{result.summary.get('t', float('nan')):.4g}",
                f"{result.summary.get('amp_max', float('nan')):.4g}",
                "ok" if result.ok else result.summary.get("breakdown", "failed")[:40],
            )
        self.console.print(table)

        files = [path for _, result in outcomes for path in result.files]
        summary = {"runs": len(outcomes), "failed": [value for value, result in outcomes if not result.ok]}
        return PipelineResult("sweep", files, summary, ok=not summary["failed"])

    def run(self, command: str) -> PipelineResult:
        handlers = {
            "simulate": self.simulate,
            "spectrum": self.spectrum,
            "branch": self.branch,
            "fields": self.fields,
            "validate": self.validate,
            "sweep": self.sweep,
        }
        if command not in handlers:
            raise ValueError(f"unknown command {command!r}")
        return handlers[command]()

    def _print_summary(self, title: str, summary: dict[str, Any]):
        """Print a two-column table of headline numbers."""
        table = Table(title=title)
        table.add_column("Quantity", style="cyan")
        table.add_column("Value", style="green")
        for key, value in summary.items():
            table.add_row(key, f"{value:.6g}" if isinstance(value, float) else str(value))
        self.console.print(table)
