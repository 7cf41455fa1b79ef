#!/usr/bin/env python3
"""
SHE Lab CLI - numerical laboratory for the stochastic heat equation

Drives experiments described by a TOML config:
- analyze: kernel gate, class membership, ergodicity and mixing verdicts
- simulate: ensemble solve plus Poincare, ergodicity and covariance-decay statistics
- islands: intermittency islands of the parabolic Anderson model
- report: show the artifacts of a finished run
"""

from dotenv import load_dotenv

# Load environment variables from .env file
load_dotenv()

import functools
import logging
from pathlib import Path
from typing import Optional

import anyio
import typer
from rich.console import Console
from rich.logging import RichHandler
from rich.panel import Panel
from rich.progress import BarColumn, MofNCompleteColumn, Progress, SpinnerColumn, TextColumn
from rich.table import Table

from common.errors import SheLabError
from config import Settings, load_config, resolve_output, resolve_threads
from pipelines import (
    EXIT_ERROR,
    AnalyzePipeline,
    BasePipeline,
    IslandsPipeline,
    PipelineResult,
    SimulatePipeline,
)
from storage import FileSystemStorage

# Initialize Typer app and Rich console
app = typer.Typer(
    name="shelab",
    help="SHE Lab CLI - Kernel analysis and Monte Carlo experiments for the stochastic heat equation",
    add_completion=False
)
console = Console()

CONFIG_OPTION = typer.Option(..., "--config", "-c", help="Experiment config (TOML)")
SEED_OPTION = typer.Option(None, "--seed", help="Seed (overrides solver.seed)")
OUT_OPTION = typer.Option(None, "--out", "-o", help="Output directory (overrides config and SHELAB_OUT)")
THREADS_OPTION = typer.Option(None, "--threads", "-t", help="Worker threads (overrides SHELAB_THREADS)")
UNSAFE_OPTION = typer.Option(False, "--unsafe-skip-gate", help="Run even if the kernel fails the gate")


def run_async(fn, *args):
    """Run async function synchronously."""
    return anyio.run(functools.partial(fn, *args))


@app.callback()
def configure(
    verbose: bool = typer.Option(False, "--verbose", "-v", help="Debug logging")
):
    """Set up logging through rich."""
    logging.basicConfig(
        level=logging.DEBUG if verbose else logging.WARNING,
        format="%(message)s",
        datefmt="[%X]",
        handlers=[RichHandler(console=console, rich_tracebacks=verbose)],
        force=True,
    )


def build_pipeline(cls, config_path: Path, seed: Optional[int], out: Optional[str],
                   threads: Optional[int], unsafe: bool, progress=None) -> BasePipeline:
    settings = Settings.from_env()
    config = load_config(config_path, seed)
    return cls(
        config,
        output_dir=resolve_output(out, config, settings),
        threads=resolve_threads(threads, settings),
        unsafe=unsafe,
        progress=progress,
    )


def execute(cls, title: str, config_path: Path, seed: Optional[int], out: Optional[str],
            threads: Optional[int], unsafe: bool) -> PipelineResult:
    """Run a pipeline under a progress bar and exit with its code on failure."""
    try:
        with Progress(
            SpinnerColumn(),
            TextColumn("[progress.description]{task.description}"),
            BarColumn(),
            MofNCompleteColumn(),
            console=console
        ) as progress:
            task = progress.add_task(f"{title}...", total=None)

            def on_block(done: int, total: int) -> None:
                progress.update(task, completed=done, total=total)

            pipeline = build_pipeline(cls, config_path, seed, out, threads, unsafe, on_block)
            console.print(Panel(
                f"[bold blue]{title}[/bold blue]\n\n"
                f"Config: {config_path}\n"
                f"Kernel: {pipeline.config.kernel.label()}\n"
                f"Seed: {pipeline.config.seed}\n"
                f"Threads: {pipeline.threads}\n"
                f"Config hash: {pipeline.config.config_hash[:16]}",
                title="SHE Lab"
            ))
            result = run_async(pipeline.run)
            progress.update(task, completed=True)

    except SheLabError as e:
        console.print(f"[red]Error:[/red] {e}")
        raise typer.Exit(EXIT_ERROR)

    for warning in result.warnings:
        console.print(f"[yellow]Warning:[/yellow] {warning}")
    if not result.success:
        console.print(f"[red]Error:[/red] {result.error}")
        if isinstance(result.data, dict) and "replicas" in result.data:
            replicas = result.data["replicas"]
            console.print(f"Blow-up at step {result.data['step']} in {len(replicas)} replicas: {replicas[:20]}")
        if result.artifacts:
            console.print(f"Artifacts written: {', '.join(result.artifacts)}")
        raise typer.Exit(result.exit_code)

    console.print(f"\n[bold green]✓ {title} complete[/bold green]")
    console.print(f"Artifacts in {pipeline.storage.base_path}: {', '.join(result.artifacts)}\n")
    return result


# =============================================================================
# Analysis Commands
# =============================================================================

@app.command()
def analyze(
    config: Path = CONFIG_OPTION,
    seed: Optional[int] = SEED_OPTION,
    out: Optional[str] = OUT_OPTION,
    threads: Optional[int] = THREADS_OPTION,
    unsafe: bool = UNSAFE_OPTION,
):
    """
    Analyze the configured kernel and write report.json.

    Exits with code 2 when the kernel fails Dalang's condition or G_p.
    """
    result = execute(AnalyzePipeline, "Kernel analysis", config, seed, out, threads, unsafe)
    print_report(result.data.to_dict())


# =============================================================================
# Simulation Commands
# =============================================================================

@app.command()
def simulate(
    config: Path = CONFIG_OPTION,
    seed: Optional[int] = SEED_OPTION,
    out: Optional[str] = OUT_OPTION,
    threads: Optional[int] = THREADS_OPTION,
    unsafe: bool = UNSAFE_OPTION,
):
    """
    Solve the ensemble and compute the configured statistics.

    Outputs depend only on the config and the seed, never on --threads.
    """
    result = execute(SimulatePipeline, "Simulation", config, seed, out, threads, unsafe)
    print_summary(result.data)


@app.command()
def islands(
    config: Path = CONFIG_OPTION,
    seed: Optional[int] = SEED_OPTION,
    out: Optional[str] = OUT_OPTION,
    threads: Optional[int] = THREADS_OPTION,
    unsafe: bool = UNSAFE_OPTION,
):
    """
    Scan intermittency islands of the parabolic Anderson model.

    The config must use linear sigma and space-time white noise in d = 1.
    """
    result = execute(IslandsPipeline, "Island scan", config, seed, out, threads, unsafe)
    print_islands(result.data.to_dict())


# =============================================================================
# Utility Commands
# =============================================================================

@app.command()
def report(
    out: str = typer.Argument(..., help="Output directory of a finished run"),
):
    """
    Show the artifacts of a finished run.
    """
    if not Path(out).is_dir():
        console.print(f"[red]Error:[/red] Directory not found: {out}")
        raise typer.Exit(EXIT_ERROR)

    storage = FileSystemStorage(out)

    async def _load():
        summaries = {}
        for name in SUMMARY_FILES:
            if await storage.exists(name):
                result = await storage.read_json(name)
                if not result.success:
                    raise SheLabError(f"{name}: {result.error}")
                summaries[name] = result.data

        listing = await storage.list()
        artifacts = []
        for name in listing.data or []:
            if name.startswith("logs/"):
                continue
            meta = await storage.get_metadata(name)
            if meta.success:
                artifacts.append((name, meta.data["size"], meta.etag))

        entries = []
        for name in await storage.list_logs():
            result = await storage.read_json(name)
            if result.success:
                entries.append(result.data)
        return summaries, artifacts, entries

    try:
        summaries, artifacts, entries = run_async(_load)
    except SheLabError as e:
        console.print(f"[red]Error:[/red] {e}")
        raise typer.Exit(EXIT_ERROR)

    if not summaries:
        console.print(f"[yellow]No artifacts found in {out}.[/yellow]")
        return

    for name, data in summaries.items():
        SUMMARY_FILES[name](data)

    table = Table(title="Artifacts")
    table.add_column("File", style="cyan")
    table.add_column("Bytes", justify="right")
    table.add_column("ETag", style="dim")
    for name, size, etag in artifacts:
        table.add_row(name, str(size), etag or "")
    console.print(table)

    if entries:
        table = Table(title="Runs")
        table.add_column("Operation", style="cyan")
        table.add_column("When", style="dim")
        table.add_column("Exit", style="green")
        table.add_column("Seconds")
        for entry in entries:
            details = entry.get("details", {})
            table.add_row(
                entry.get("operation", ""),
                entry.get("timestamp", "")[:19],
                str(details.get("exit_code", "")),
                str(details.get("seconds", "")),
            )
        console.print(table)


# =============================================================================
# Rendering
# =============================================================================

def _fmt(value) -> str:
    if value is None:
        return "-"
    if isinstance(value, float):
        return f"{value:.4g}"
    return str(value)


def print_report(data: dict) -> None:
    table = Table(title="Kernel Report")
    table.add_column("Metric", style="cyan")
    table.add_column("Value", style="green")

    kernel = data.get("kernel", {})
    table.add_row("Kernel", ", ".join(f"{k}={v}" for k, v in kernel.items() if k != "samples"))
    for key in ("dalang_ok", "gp_ok", "fp_ok", "h_minus1_norm", "classification", "mixing_ok", "p"):
        table.add_row(key, _fmt(data.get(key)))
    for delta, lam in data.get("lambda_table", []):
        table.add_row(f"Lambda_h({delta:g})", _fmt(lam))
    atom = data.get("atom")
    if atom:
        table.add_row("atom at 0", f"{atom['decision']} ({_fmt(atom['extrapolated_atom'])})")
    malliavin = data.get("malliavin")
    if malliavin:
        table.add_row("Malliavin bound", f"{_fmt(malliavin['value'])} (lambda0 {_fmt(malliavin['lambda0'])})")
        table.add_row("kappa(t)", _fmt(malliavin["kappa_at_t"]))
        table.add_row("H(t; gamma)", f"{_fmt(malliavin['H_series'][-1])} <= {_fmt(malliavin['H_geometric'])}")
    console.print(table)
    for warning in data.get("warnings", []):
        console.print(f"[yellow]Warning:[/yellow] {warning}")


def print_summary(data: dict) -> None:
    summary = data["summary"]
    table = Table(title=f"Ensemble ({summary['replicas']} replicas, seed {summary['seed']})")
    table.add_column("t", style="cyan")
    table.add_column("Mean", style="green")
    table.add_column("Variance", style="green")
    for row in summary["snapshots"]:
        table.add_row(_fmt(row["t"]), _fmt(row["mean"]), _fmt(row["variance"]))
    console.print(table)

    for check in data.get("poincare", []):
        status = "[green]pass[/green]" if check["passed"] else "[red]fail[/red]"
        band = "[green]in band[/green]" if check.get("within_band") else "[red]out of band[/red]"
        console.print(f"Poincare {check['rows'][0]['g_family']}: C={_fmt(check['constant'])} {status}, {band}")
    if "ergodicity" in data:
        console.print(f"Ergodicity test: [bold]{data['ergodicity']['verdict']}[/bold]")
    for curve in data.get("mixing", []):
        console.print(f"Covariance decay {curve['g_family']}: log-log slope {_fmt(curve['slope'])}")


def print_islands(data: dict) -> None:
    scan = data["scan"]
    if "rows" in scan:
        table = Table(title=f"Island dimensions at t={scan['t']:g}")
        table.add_column("alpha", style="cyan")
        table.add_column("N", style="cyan")
        table.add_column("median dim", style="green")
        table.add_column("theory", style="yellow")
        table.add_column("zero", style="dim")
        for row in scan["rows"]:
            table.add_row(_fmt(row["alpha"]), _fmt(row["N"]), _fmt(row["median_dim"]),
                          _fmt(row["theory_dim"]), str(row["zero_measure_count"]))
        console.print(table)
    sup = data.get("sup_growth")
    if sup:
        medians = ", ".join(_fmt(r["median"]) for r in sup["rows"])
        console.print(f"Sup growth medians: {medians} (theory {_fmt(sup['rows'][0]['theory'])})")
    tail = data.get("tail")
    if tail:
        console.print(f"Tail slope: {_fmt(tail['slope'])} (theory {_fmt(tail['theory'])})")
    if data.get("nonpositive_replicas"):
        console.print(f"[yellow]Warning:[/yellow] {data['nonpositive_replicas']} replicas went nonpositive")


SUMMARY_FILES = {
    "report.json": print_report,
    "summary.json": print_summary,
    "islands_summary.json": print_islands,
}


# =============================================================================
# Main Entry Point
# =============================================================================

def main():
    """Main entry point."""
    app()


if __name__ == "__main__":
    main()
