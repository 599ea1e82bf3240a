"""
Stage Tracker - Track wall time and output sizes per pipeline stage.
Timings are printed to the console only and never reach an artifact.
"""

import time
from contextlib import contextmanager
from dataclasses import dataclass
from typing import Iterator, List
from rich.table import Table

from .utils import console


@dataclass
class StageUsage:
    """Timing and item count for a single pipeline stage."""
    stage: str
    seconds: float
    items: int
    unit: str


class StageTracker:
    """
    Track how long each stage of a run takes and how much it produced.

    Usage:
        tracker = StageTracker()

        with tracker.stage("graph", unit="edges") as stage:
            graph = build_graph(...)
            stage.items = len(graph)

        tracker.print_summary()
    """

    def __init__(self):
        self.stages: List[StageUsage] = []
        self.start_time = time.perf_counter()

    @contextmanager
    def stage(self, name: str, unit: str = "") -> Iterator[StageUsage]:
        """Time the enclosed block; set `.items` on the yielded entry."""
        usage = StageUsage(stage=name, seconds=0.0, items=0, unit=unit)
        begin = time.perf_counter()
        try:
            yield usage
        finally:
            usage.seconds = time.perf_counter() - begin
            self.stages.append(usage)

    def get_summary(self) -> dict:
        """Totals across all recorded stages."""
        return {
            "stages": len(self.stages),
            "stage_seconds": round(sum(s.seconds for s in self.stages), 6),
            "duration_seconds": time.perf_counter() - self.start_time,
        }

    def print_summary(self):
        """Print a per-stage table to the console."""
        if not self.stages:
            console.print("[dim]No stages recorded yet[/dim]")
            return

        summary = self.get_summary()
        table = Table(title="⏱ Pipeline Stages", border_style="cyan")
        table.add_column("Stage", style="bold cyan")
        table.add_column("Output", justify="right")
        table.add_column("Time", justify="right")

        for usage in self.stages:
            output = f"{usage.items:,} {usage.unit}".strip() if usage.unit else f"{usage.items:,}"
            table.add_row(usage.stage, output, f"{usage.seconds:.2f}s")

        table.add_row("─" * 10, "─" * 10, "─" * 8)
        table.add_row("Total", "", f"{summary['duration_seconds']:.2f}s", style="bold green")
        console.print(table)
