"""
Utility functions for the LVR toolkit.
Includes console logging, file helpers and rich summary tables.
"""

import json
import math
from pathlib import Path
from typing import Any, Iterable, Optional
from rich.console import Console
from rich.panel import Panel
from rich.table import Table

# stdout is reserved for machine-readable output
console = Console(stderr=True)

_verbose = False


def setup_logging(verbose: bool = False):
    """
    Configure rich console logging.

    Args:
        verbose: Enable verbose debug output
    """
    global _verbose
    _verbose = verbose
    if verbose:
        console.print("[dim]Verbose logging enabled[/dim]")


def log_success(message: str):
    """Log a completed step."""
    console.print(f"[green]✓ {message}[/green]")


def log_warning(message: str):
    """Log warning message."""
    console.print(f"[yellow]⚠ {message}[/yellow]")


def log_error(message: str):
    """Log a failure."""
    console.print(f"[red]✗ {message}[/red]")


def log_debug(message: str):
    """Log debug message (only when verbose)."""
    if _verbose:
        console.print(f"[dim]{message}[/dim]")


def encode_float(value: float) -> Any:
    """JSON-safe float: infinities become the strings "inf" / "-inf"."""
    if math.isinf(value):
        return "inf" if value > 0 else "-inf"
    return float(value)


def write_json(path: Path, payload: Any):
    """
    Write a JSON document deterministically (sorted keys, trailing newline).

    Args:
        path: Destination file
        payload: JSON-serialisable object
    """
    path.parent.mkdir(parents=True, exist_ok=True)
    text = json.dumps(payload, indent=2, sort_keys=True, allow_nan=False)
    path.write_text(text + "\n", encoding="utf-8")


def format_float(value: float) -> str:
    """Round-trip-safe text form of a float for CSV output."""
    if math.isinf(value):
        return "inf" if value > 0 else "-inf"
    return repr(float(value))


def print_run_panel(title: str, settings: dict):
    """
    Print the run configuration the way the CLI summarises it.

    Args:
        title: Panel title
        settings: Ordered mapping of setting name to value
    """
    body = "\n".join(f"[bold]{key}:[/bold] {value}" for key, value in settings.items())
    console.print(Panel(body, title=title, border_style="cyan"))


def print_betti_table(grid: Iterable[float], curves: dict[int, list[int]], every: int = 10):
    """
    Print a sampled view of Betti curves.

    Args:
        grid: Scale values
        curves: Homology dimension -> counts per grid value
        every: Print one row per `every` grid values
    """
    table = Table(title="Betti numbers by scale", border_style="blue")
    table.add_column("scale", style="cyan", justify="right")
    dims = sorted(curves)
    for dim in dims:
        table.add_column(f"β{dim}", justify="right")

    for index, theta in enumerate(grid):
        if index % every and index != len(curves[dims[0]]) - 1:
            continue
        table.add_row(f"{theta:.4f}", *(str(curves[dim][index]) for dim in dims))

    console.print(table)


def print_complexity_record(record: dict):
    """Pretty print a complexity record."""
    table = Table(title="Topological complexity", show_header=False, border_style="blue")
    table.add_column("Key", style="cyan")
    table.add_column("Value", style="white")

    table.add_row("Mode", str(record.get("mode")))
    table.add_row("H0 total", str(record.get("h0_total")))
    table.add_row("H1 total", str(record.get("h1_total")))
    table.add_row("Combined", str(record.get("combined")), style="bold green")

    console.print(table)


def print_selection_report(report: dict):
    """
    Print one row per (measure, subgroup) bar of a selection report.

    Args:
        report: The JSON-ready report produced by the selection harness
    """
    table = Table(title="Closest vs farthest accuracy gap", border_style="cyan")
    table.add_column("Measure", style="cyan")
    table.add_column("Subgroup")
    table.add_column("Datasets", justify="right")
    table.add_column("Mean gap", justify="right")
    table.add_column("95% CI", justify="right")

    for bar in report.get("bars", []):
        lower, upper = bar["ci"]
        table.add_row(
            bar["measure"],
            bar["subgroup"],
            str(bar["n_datasets"]),
            f"{bar['mean_gap']:+.4f}",
            f"[{lower:+.4f}, {upper:+.4f}]",
        )

    console.print(table)


def resolve_threads(threads: Optional[int]) -> int:
    """Clamp a requested worker count to at least one."""
    if threads is None:
        return 1
    return max(1, int(threads))
