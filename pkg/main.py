#!/usr/bin/env python3
"""
LVR Toolkit - Persistent homology of decision boundaries
Main entry point with CLI interface.

Usage:
    python main.py generate --shape two-circles --out two_circles.csv
    python main.py persistence two_circles.csv --mode locally-scaled --out-dir output/two_circles
    python main.py complexity --table mnist --pair 0v4
    python main.py select --table mnist --dataset 0v4
"""

import functools
import json
import sys
from pathlib import Path
from typing import Optional

import click

# Add project root to path for imports
sys.path.insert(0, str(Path(__file__).parent))

from config import Config
from src.complexes import LabeledCechParams, labeled_cech_cloud, ORIENTATIONS
from src.complexity import (
    MEASURES,
    TABLE_DOMAINS,
    TABLE_KINDS,
    ComplexityTable,
    ManifoldConditionInputs,
    SampleBoundInputs,
    complexity,
    manifold_conditions,
    sample_bound,
    sample_bound_value,
)
from src.errors import LVRError, ValidationError
from src.neighborhood import MODES
from src.persistence import CONVENTIONS, ENGINES, ScaleGrid
from src.pipeline import PipelineSettings, run_pipeline
from src.pointcloud import SHAPES, DistanceOracle, SyntheticSpec, generate, load_cloud, load_distance_matrix, save_cloud
from src.render import evenly_spaced, render_snapshots
from src.selection import SUBGROUPS, AccuracyMatrix, ModelCatalog, rank_models, selection_report
from src.stage_tracker import StageTracker
from src.utils import (
    console,
    log_error,
    log_success,
    log_warning,
    print_betti_table,
    print_complexity_record,
    print_run_panel,
    print_selection_report,
    resolve_threads,
    setup_logging,
    write_json,
)


def print_banner():
    """Print the application banner."""
    banner = """
╔═══════════════════════════════════════════════════════════════════╗
║                                                                   ║
║   🔷 LVR Toolkit - Decision Boundary Topology                     ║
║                                                                   ║
║   Labeled Vietoris-Rips persistence + complexity-based selection  ║
║                                                                   ║
╚═══════════════════════════════════════════════════════════════════╝
    """
    console.print(banner, style="bold blue")


def handle_errors(command):
    """Map package errors to exit codes: 2 for bad input, 1 for anything else."""

    @functools.wraps(command)
    def wrapper(*args, **kwargs):
        ctx = click.get_current_context()
        try:
            return command(*args, **kwargs)
        except LVRError as exc:
            _report(ctx, exc)
            ctx.exit(2 if exc.input_error else 1)
        except (click.exceptions.Exit, click.ClickException, click.Abort):
            raise
        except KeyboardInterrupt:
            console.print("\n[yellow]Interrupted by user[/yellow]")
            ctx.exit(130)
        except Exception as exc:
            _report(ctx, exc)
            if ctx.obj and ctx.obj.get("verbose"):
                console.print_exception()
            ctx.exit(1)

    return wrapper


def _report(ctx: click.Context, exc: BaseException):
    if ctx.obj and ctx.obj.get("error_json"):
        click.echo(json.dumps({"error": type(exc).__name__, "message": str(exc)}), err=True)
    else:
        log_error(f"{type(exc).__name__}: {exc}")


def _emit_json(payload, out: Optional[str]):
    """Write JSON to a file, or to stdout when no path is given."""
    if out:
        write_json(Path(out), payload)
        log_success(f"Wrote {out}")
    else:
        click.echo(json.dumps(payload, indent=2, sort_keys=True, allow_nan=False))


def _grid(mode: str, start: Optional[float], stop: Optional[float], steps: Optional[int]) -> ScaleGrid:
    default_start, default_stop, default_steps = Config.grid_for(mode)
    return ScaleGrid(
        default_start if start is None else start,
        default_stop if stop is None else stop,
        default_steps if steps is None else steps,
    )


def _load_inputs(cloud_path: str, header: Optional[bool], distances: Optional[str]):
    cloud = load_cloud(cloud_path, header=header)
    oracle = None
    if distances:
        oracle = load_distance_matrix(distances)
        if oracle.n != cloud.n:
            raise ValidationError("distances", f"matrix is {oracle.n}x{oracle.n} but the cloud has {cloud.n} points")
    return cloud, oracle


def pipeline_options(command):
    """Options shared by every command that builds a labeled VR filtration."""
    options = [
        click.option("--mode", type=click.Choice(MODES), default="plain", show_default=True,
                     help="Edge value: raw distance or locally scaled"),
        click.option("--k", "k", type=int, default=Config.K_NEIGHBORS, show_default=True,
                     help="Neighbor rank for local scales"),
        click.option("--cap", type=int, default=Config.NEIGHBOR_CAP, show_default=True,
                     help="Cross-class candidates per point"),
        click.option("--grid-start", type=float, default=None, help="First scale (mode default)"),
        click.option("--grid-stop", type=float, default=None, help="Last scale (mode default)"),
        click.option("--steps", type=int, default=None, help="Grid points (default: 100)"),
        click.option("--max-dim", type=int, default=Config.MAX_DIM, show_default=True,
                     help="Largest simplex dimension"),
        click.option("--header/--no-header", default=None, help="Force CSV header handling (default: detect)"),
        click.option("--distances", type=click.Path(exists=True, dir_okay=False), default=None,
                     help="Precomputed n x n distance matrix CSV"),
    ]
    for option in reversed(options):
        command = option(command)
    return command


@click.group()
@click.option("--verbose", "-v", is_flag=True, default=Config.VERBOSE, help="Show debug output and stage timings")
@click.option("--threads", "-t", type=int, default=Config.THREADS, show_default=True,
              help="Worker cap (results never depend on it)")
@click.option("--error-json", is_flag=True, default=False, help="Report errors as JSON on stderr")
@click.pass_context
def main(ctx: click.Context, verbose: bool, threads: int, error_json: bool):
    """
    Estimate the persistent homology of classifier decision boundaries.

    Commands read labeled point clouds (CSV: coordinates then a 0/1 label)
    and write deterministic CSV / JSON / SVG artifacts. Status goes to
    stderr; stdout carries machine-readable output only.
    """
    if not Config.validate():
        ctx.exit(2)
    ctx.ensure_object(dict)
    ctx.obj.update(verbose=verbose, threads=resolve_threads(threads), error_json=error_json)
    setup_logging(verbose)


@main.command("generate")
@click.option("--shape", type=click.Choice(SHAPES), default=None, help="Use the shipped spec for this shape")
@click.option("--spec", "spec_path", type=click.Path(exists=True, dir_okay=False), default=None,
              help="JSON spec file")
@click.option("--seed", type=int, default=None, help="Override the spec's seed")
@click.option("--out", required=True, type=click.Path(dir_okay=False), help="Output CSV")
@handle_errors
def cmd_generate(shape: Optional[str], spec_path: Optional[str], seed: Optional[int], out: str):
    """Draw a synthetic labeled cloud and write it as CSV."""
    if not shape and not spec_path:
        raise ValidationError("spec", "pass --shape or --spec")
    path = Path(spec_path) if spec_path else Config.get_spec_path(shape)
    spec = SyntheticSpec.from_json(path)
    if seed is not None:
        spec = SyntheticSpec(spec.shape, seed, spec.params)

    cloud = generate(spec)
    save_cloud(cloud, out)
    beta0, beta1 = spec.ground_truth()
    log_success(f"Wrote {cloud.n} points ({spec.shape}, seed {spec.seed}) to {out}")
    console.print(f"Ground-truth decision boundary: (β0, β1) = ({beta0}, {beta1})")


@main.command("persistence")
@click.argument("cloud_path", type=click.Path(exists=True, dir_okay=False))
@pipeline_options
@click.option("--max-hom-dim", type=int, default=Config.MAX_HOM_DIM, show_default=True)
@click.option("--convention", type=click.Choice(CONVENTIONS), default=Config.CONVENTION, show_default=True)
@click.option("--engine", type=click.Choice(ENGINES), default=Config.ENGINE, show_default=True)
@click.option("--out-dir", type=click.Path(file_okay=False), default=None, help="Artifact directory")
@click.option("--export-graph", is_flag=True, default=False, help="Also write graph.csv")
@click.option("--export-filtration", is_flag=True, default=False, help="Also write filtration.csv")
@click.pass_context
@handle_errors
def cmd_persistence(ctx, cloud_path, mode, k, cap, grid_start, grid_stop, steps, max_dim, header, distances,
                    max_hom_dim, convention, engine, out_dir, export_graph, export_filtration):
    """Persistence diagram and Betti curves of a labeled cloud."""
    print_banner()
    grid = _grid(mode, grid_start, grid_stop, steps)
    settings = PipelineSettings(mode=mode, k=k, cap=cap, max_dim=max_dim, max_hom_dim=max_hom_dim,
                                convention=convention, engine=engine)
    cloud, oracle = _load_inputs(cloud_path, header, distances)
    if not out_dir:
        Config.ensure_directories()
    out = Path(out_dir) if out_dir else Config.OUTPUT_DIR / Path(cloud_path).stem

    print_run_panel("Configuration", {
        "Cloud": f"{cloud_path} ({cloud.n} points, d={cloud.dim})",
        "Mode": mode,
        "Grid": f"{grid.start} → {grid.stop} × {grid.steps}",
        "k / cap": f"{k} / {cap}",
        "Max dim": max_dim,
        "Convention": convention,
        "Engine": engine,
        "Output": out,
    })

    tracker = StageTracker()
    result = run_pipeline(cloud, settings, grid, oracle=oracle, threads=ctx.obj["threads"], tracker=tracker)
    curves = result.curves()

    out.mkdir(parents=True, exist_ok=True)
    write_json(out / "diagram.json", result.diagram.to_json())
    for curve in curves:
        with open(out / f"betti_h{curve.dim}.csv", "w", encoding="utf-8", newline="") as f:
            curve.to_csv(f)
    if export_graph and result.graph is not None:
        with open(out / "graph.csv", "w", encoding="utf-8", newline="") as f:
            result.graph.to_csv(f)
    if export_filtration:
        with open(out / "filtration.csv", "w", encoding="utf-8", newline="") as f:
            result.filtration.to_csv(f)

    if curves:
        print_betti_table(grid.values.tolist(), {c.dim: c.counts.tolist() for c in curves})
    if ctx.obj["verbose"]:
        tracker.print_summary()
    log_success(f"Wrote {len(result.diagram)} persistence pairs to {out}")


@main.command("complexity")
@click.argument("cloud_path", required=False, type=click.Path(exists=True, dir_okay=False))
@pipeline_options
@click.option("--engine", type=click.Choice(ENGINES), default=Config.ENGINE, show_default=True)
@click.option("--table", "domain", type=click.Choice(TABLE_DOMAINS), default=None,
              help="Table-passthrough: read the shipped complexity table instead of computing")
@click.option("--kind", type=click.Choice(TABLE_KINDS), default="data", show_default=True)
@click.option("--pair", default=None, help="Class pair id for table-passthrough, e.g. 0v4")
@click.option("--out", type=click.Path(dir_okay=False), default=None, help="Output JSON (default: stdout)")
@click.pass_context
@handle_errors
def cmd_complexity(ctx, cloud_path, mode, k, cap, grid_start, grid_stop, steps, max_dim, header, distances,
                   engine, domain, kind, pair, out):
    """Total-lifetime complexity (Σ β0, Σ β1, combined) of a cloud."""
    if domain:
        if not pair:
            raise ValidationError("pair", "table-passthrough needs --pair")
        record = ComplexityTable.shipped(domain, kind, Config.TABLES_DIR).record(pair)
    else:
        if not cloud_path:
            raise ValidationError("cloud", "pass a cloud CSV or --table/--pair")
        grid = _grid(mode, grid_start, grid_stop, steps)
        cloud, oracle = _load_inputs(cloud_path, header, distances)
        tracker = StageTracker()
        record = complexity(cloud, mode=mode, grid=grid, k=k, cap=cap, max_dim=max_dim, engine=engine,
                            oracle=oracle, threads=ctx.obj["threads"], tracker=tracker)
        if ctx.obj["verbose"]:
            tracker.print_summary()

    print_complexity_record(record.to_dict())
    _emit_json(record.to_dict(), out)


@main.command("select")
@click.option("--catalog", "catalog_path", type=click.Path(exists=True, dir_okay=False), default=None,
              help="Catalog CSV (model_id, h0_total, h1_total)")
@click.option("--table", "domain", type=click.Choice(TABLE_DOMAINS), default=None,
              help="Use the shipped model table of a domain as the catalog")
@click.option("--accuracy", "accuracy_path", type=click.Path(exists=True, dir_okay=False), default=None,
              help="Accuracy CSV (model_id, dataset_id, accuracy)")
@click.option("--dataset", default=None, help="Rank models for one dataset id")
@click.option("--score", type=float, default=None, help="Dataset score (default: from the data table)")
@click.option("--report", is_flag=True, default=False, help="Full measure x subgroup gap report")
@click.option("--measure", type=click.Choice(MEASURES), default="combined", show_default=True)
@click.option("--m", "m", type=int, default=Config.SELECT_M, show_default=True)
@click.option("--subgroup", type=click.Choice(SUBGROUPS), default="all", show_default=True)
@click.option("--exclude-self", is_flag=True, default=False, help="Leave out the dataset's own model")
@click.option("--out", type=click.Path(dir_okay=False), default=None, help="Output JSON (default: stdout)")
@handle_errors
def cmd_select(catalog_path, domain, accuracy_path, dataset, score, report, measure, m, subgroup, exclude_self, out):
    """Pick pre-trained models by closeness in topological complexity."""
    if bool(catalog_path) == bool(domain):
        raise ValidationError("catalog", "pass exactly one of --catalog or --table")
    if domain:
        catalog = ModelCatalog.from_table(ComplexityTable.shipped(domain, "model", Config.TABLES_DIR))
        datasets = ModelCatalog.from_table(ComplexityTable.shipped(domain, "data", Config.TABLES_DIR))
    else:
        catalog = ModelCatalog.load(catalog_path)
        datasets = catalog
    accuracy = AccuracyMatrix.load(accuracy_path) if accuracy_path else None

    if report:
        if accuracy is None:
            raise ValidationError("accuracy", "the gap report needs --accuracy")
        payload = selection_report(catalog, accuracy, datasets, m=m, exclude_self=exclude_self)
        print_selection_report(payload)
        _emit_json(payload, out)
        return

    if not dataset:
        raise ValidationError("dataset", "pass --dataset (or --report)")
    if score is None:
        known = datasets.scores(measure)
        if dataset not in known:
            raise ValidationError("dataset", f"no {measure} score for {dataset}; pass --score")
        score = known[dataset]

    ranking = rank_models(catalog.scores(measure), score, m, subgroup, exclude=dataset if exclude_self else None)
    payload = {
        "dataset_id": dataset,
        "measure": measure,
        "score": score,
        "subgroup": subgroup,
        "closest": [{"model_id": mid, "distance": ranking.distances[mid]} for mid in ranking.closest],
        "farthest": [{"model_id": mid, "distance": ranking.distances[mid]} for mid in ranking.farthest],
        "shortfall": ranking.shortfall,
    }
    if accuracy is not None:
        for entry in payload["closest"] + payload["farthest"]:
            key = (entry["model_id"], dataset)
            entry["accuracy"] = accuracy.get(*key) if key in accuracy else None
    if ranking.shortfall:
        log_warning(f"only {len(ranking.distances)} model(s) available for m={m}")
    console.print(f"Closest to {dataset} ({measure} {score:g}): {', '.join(ranking.closest)}")
    _emit_json(payload, out)


@main.command("render")
@click.argument("cloud_path", type=click.Path(exists=True, dir_okay=False))
@pipeline_options
@click.option("--theta", "thetas", type=float, multiple=True, help="Scale to draw (repeatable)")
@click.option("--frames", type=int, default=Config.RENDER_FRAMES, show_default=True,
              help="Evenly spaced scales over the grid when no --theta is given")
@click.option("--out-dir", required=True, type=click.Path(file_okay=False), help="SVG directory")
@click.pass_context
@handle_errors
def cmd_render(ctx, cloud_path, mode, k, cap, grid_start, grid_stop, steps, max_dim, header, distances,
               thetas, frames, out_dir):
    """SVG snapshots of the complex at chosen scales (2-D clouds)."""
    cloud, oracle = _load_inputs(cloud_path, header, distances)
    if cloud.dim != 2:
        raise ValidationError("cloud", f"rendering needs 2-D points, got dimension {cloud.dim}")
    grid = _grid(mode, grid_start, grid_stop, steps)
    scales = list(thetas) if thetas else evenly_spaced(grid.start, grid.stop, frames)
    settings = PipelineSettings(mode=mode, k=k, cap=cap, max_dim=min(max_dim, 2), max_hom_dim=0)
    result = run_pipeline(cloud, settings, grid, oracle=oracle, threads=ctx.obj["threads"])
    paths = render_snapshots(cloud, result.filtration_up_to(max(scales)), scales, Path(out_dir))
    log_success(f"Wrote {len(paths)} SVG snapshots to {out_dir}")


@main.command("cech")
@click.argument("cloud_path", type=click.Path(exists=True, dir_okay=False))
@click.option("--epsilon", type=float, required=True, help="Ball radius")
@click.option("--gamma", type=float, default=float("inf"), help="Reference proximity (default: unbounded)")
@click.option("--orientation", type=click.Choice(ORIENTATIONS), default="0-on-1", show_default=True)
@click.option("--max-dim", type=int, default=Config.MAX_DIM, show_default=True)
@click.option("--header/--no-header", default=None)
@click.option("--out", type=click.Path(dir_okay=False), default=None, help="Output JSON (default: stdout)")
@handle_errors
def cmd_cech(cloud_path, epsilon, gamma, orientation, max_dim, header, out):
    """Desk-scale labeled Čech complex of a small cloud."""
    cloud = load_cloud(cloud_path, header=header)
    simplices = labeled_cech_cloud(cloud, LabeledCechParams(epsilon, gamma), orientation, max_dim)
    console.print(f"{len(simplices)} simplices ({orientation}, ε={epsilon:g})")
    _emit_json({"orientation": orientation, "epsilon": epsilon, "simplices": [list(s) for s in simplices]}, out)


@main.command("sample-bound")
@click.option("--q", type=float, required=True, help="Mixing probability of the first class")
@click.option("--alpha-x", type=float, required=True, help="Mass lower bound, first class")
@click.option("--alpha-y", type=float, required=True, help="Mass lower bound, second class")
@click.option("--l-a", type=int, required=True, help="Covering sets for the first class")
@click.option("--l-b", type=int, required=True, help="Covering sets for the second class")
@click.option("--delta", type=float, required=True, help="Failure probability")
@handle_errors
def cmd_sample_bound(q, alpha_x, alpha_y, l_a, l_b, delta):
    """Samples sufficient for homology recovery with probability > 1 - delta."""
    inputs = SampleBoundInputs(q=q, alpha_x=alpha_x, alpha_y=alpha_y, l_a=l_a, l_b=l_b, delta=delta)
    console.print(f"Bound before rounding: {sample_bound_value(inputs):.6f}")
    click.echo(sample_bound(inputs))


@main.command("manifold-check")
@click.option("--tau", type=float, required=True, help="Reach (inverse condition number)")
@click.option("--r", "r", type=float, required=True, help="First density radius")
@click.option("--s", "s", type=float, required=True, help="Second density radius")
@handle_errors
def cmd_manifold_check(tau, r, s):
    """Check r < (√9 − √8)τ and report the printed ε window."""
    report = manifold_conditions(ManifoldConditionInputs(tau=tau, r=r, s=s))
    if not report.r_ok:
        log_warning(f"r = {r:g} is not below {report.r_limit:.6f}")
    _emit_json(report.to_dict(), None)


if __name__ == "__main__":
    main()
