"""Main CLI entry point for the DDC tools."""

import functools
import logging
import sys
from pathlib import Path

import click
from rich.logging import RichHandler

from ddc_tools import __version__
from ddc_tools.core.data import generate as generate_dataset
from ddc_tools.core.data import load_spec, preset_spec, read_points, write_points
from ddc_tools.core.display import (
    console,
    create_progress_bar,
    display_bench_table,
    display_evaluation,
    display_merge_levels,
    display_run_summary,
    print_error,
    print_info,
    print_success,
    print_warning,
)
from ddc_tools.core.evaluation import evaluate_labelings
from ddc_tools.core.exceptions import ConfigurationError, DataIOError, DDCError
from ddc_tools.core.validation import validate_output_directory
from ddc_tools.engine.bench import (
    SCALABILITY_COLUMNS,
    TABLE_COLUMNS,
    bench_presets,
    preset_configs,
    scalability_config,
    scalability_node_counts,
    scalability_sweep,
    write_bench_csv,
    write_resolved_configs,
)
from ddc_tools.engine.config import resolve_run_config
from ddc_tools.engine.constants import (
    DEFAULT_BENCH_REPETITIONS,
    DEFAULT_OUTPUT_DIR,
    DEFAULT_SCALABILITY_MAX_NODES,
    Artifacts,
)
from ddc_tools.engine.experiment import ExperimentRunner

EXIT_CONFIG_ERROR = 2
EXIT_RUNTIME_ERROR = 3


def handle_ddc_errors(func):
    """Decorator mapping library errors to messages and exit codes."""

    @functools.wraps(func)
    def wrapper(*args, **kwargs):
        try:
            return func(*args, **kwargs)
        except ConfigurationError as e:
            print_error(e.user_message)
            sys.exit(EXIT_CONFIG_ERROR)
        except DDCError as e:
            logging.getLogger(__name__).debug("command failed: %s", e.message)
            print_error(e.user_message)
            sys.exit(EXIT_RUNTIME_ERROR)

    return wrapper


def _setup_logging(verbose: bool) -> None:
    logging.basicConfig(
        level=logging.DEBUG if verbose else logging.WARNING,
        format="%(message)s",
        datefmt="[%X]",
        handlers=[RichHandler(console=console, rich_tracebacks=True, show_path=False)],
        force=True,
    )


@click.group()
@click.version_option(version=__version__)
@click.option("--verbose", "-v", is_flag=True, help="Log per-node and per-level progress")
@click.pass_context
def main(ctx, verbose):
    """DDC - Dynamic Distributed Clustering of 2D spatial data.

    Generate datasets, run the distributed clustering simulator,
    benchmark it and evaluate assignments against ground truth."""
    ctx.ensure_object(dict)
    ctx.obj["verbose"] = verbose
    _setup_logging(verbose)


@main.command()
@click.option("--preset", help="Bundled dataset preset (t1-t6, scale)")
@click.option("--spec", "spec_path", type=click.Path(path_type=Path), help="Dataset spec JSON file")
@click.option("--seed", type=int, default=None, help="Override the spec seed")
@click.option("--points", "total_points", type=int, help="Rescale every shape to reach about this many points")
@click.option(
    "--out",
    type=click.Path(path_type=Path),
    default=Artifacts.POINTS,
    show_default=True,
    help="Output point CSV (x,y,label)",
)
@handle_ddc_errors
def generate(preset, spec_path, seed, total_points, out):
    """Generate a labelled synthetic dataset."""
    if bool(preset) == bool(spec_path):
        raise ConfigurationError("Pass exactly one of --preset or --spec")

    spec = preset_spec(preset) if preset else load_spec(spec_path)
    if seed is not None:
        spec = spec.with_seed(seed)
    if total_points is not None:
        spec = spec.scaled(total_points)

    dataset = generate_dataset(spec)
    if out.parent != Path("."):
        validate_output_directory(out.parent)
    write_points(out, dataset)

    noise = dataset.truth.noise_count if dataset.truth is not None else 0
    print_success(
        f"Wrote {len(dataset)} points ({spec.expected_clusters} clusters, {noise} noise) to {out}"
    )
    if dataset.truth is not None and dataset.truth.n_clusters:
        sizes = ", ".join(str(size) for size in dataset.truth.cluster_sizes())
        print_info(f"Cluster sizes: {sizes}")


@main.command()
@click.option("--preset", help="Bundled preset supplying the dataset and default parameters")
@click.option("--config", "config_path", type=click.Path(path_type=Path), help="Run config JSON file")
@click.option("--dataset", help="Point CSV or dataset spec JSON (instead of the preset dataset)")
@click.option("--nodes", "n_nodes", type=int, help="Number of leaf nodes")
@click.option("--degree", type=int, help="Aggregation tree degree")
@click.option("--backend", help="Local clustering backend: dbscan or kmeans")
@click.option("--eps", type=float, help="DBSCAN radius")
@click.option("--minpts", "min_pts", type=int, help="DBSCAN minimum neighbourhood size")
@click.option("--k", type=int, help="K-Means clusters per node (default: expected + 1)")
@click.option("--lambda", "lambda_norm", type=float, help="Contour concavity parameter in [0, 1]")
@click.option("--policy", help="Merge predicate: polygon_overlap or boundary_proximity")
@click.option("--partition", help="Partition strategy: spatial_grid, random or round_robin")
@click.option("--seed", type=int, help="Seed for generation, partitioning and K-Means")
@click.option("--threads", type=int, help="Worker threads for node tasks")
@click.option("--out", type=click.Path(path_type=Path), help="Output directory for run artifacts")
@click.pass_context
@handle_ddc_errors
def run(ctx, preset, config_path, dataset, out, **flags):
    """Run DDC on a dataset and write contours, assignments and a report."""
    overrides = dict(flags, dataset=dataset)
    config = resolve_run_config(preset=preset, config_path=config_path, overrides=overrides)
    out_dir = Path(out or config.out or DEFAULT_OUTPUT_DIR)

    runner = ExperimentRunner(config)
    outcome = runner.run()
    paths = runner.write_artifacts(outcome, out_dir)

    display_run_summary(outcome.report, outcome.config.n_nodes, outcome.config.degree)
    if ctx.obj.get("verbose"):
        display_merge_levels(outcome.model.level_summary())
    expected = outcome.report.n_clusters_expected
    if expected is not None and expected != outcome.report.n_clusters_found:
        print_warning(f"Found {outcome.report.n_clusters_found} clusters, expected {expected}")
    print_success(f"Artifacts written to {out_dir} ({len(paths)} files)")


@main.command()
@click.option(
    "--presets",
    default="t1,t2,t3,t4,t5,t6",
    show_default=True,
    help="Comma-separated presets for the execution-time table",
)
@click.option("--reps", type=int, default=DEFAULT_BENCH_REPETITIONS, show_default=True)
@click.option("--scalability", is_flag=True, help="Run the node-count sweep instead")
@click.option("--max-nodes", type=int, default=DEFAULT_SCALABILITY_MAX_NODES, show_default=True)
@click.option("--config", "config_path", type=click.Path(path_type=Path), help="Run config JSON file")
@click.option("--dataset", help="Dataset of the sweep (default: the scale preset)")
@click.option("--nodes", "n_nodes", type=int, help="Number of leaf nodes of the table runs")
@click.option("--degree", type=int, help="Aggregation tree degree")
@click.option("--backend", help="Local clustering backend of the sweep")
@click.option("--eps", type=float, help="DBSCAN radius")
@click.option("--minpts", "min_pts", type=int, help="DBSCAN minimum neighbourhood size")
@click.option("--k", type=int, help="K-Means clusters per node")
@click.option("--lambda", "lambda_norm", type=float, help="Contour concavity parameter in [0, 1]")
@click.option("--policy", help="Merge predicate: polygon_overlap or boundary_proximity")
@click.option("--partition", help="Partition strategy")
@click.option("--seed", type=int, help="Seed for generation, partitioning and K-Means")
@click.option(
    "--out",
    type=click.Path(path_type=Path),
    help=f"CSV file for the bench rows [default: {Artifacts.BENCH} or {Artifacts.SCALABILITY}]",
)
@handle_ddc_errors
def bench(presets, reps, scalability, max_nodes, config_path, out, **flags):
    """Time DDC runs (medians in ms, simulated parallel makespans).

    The resolved configuration is written next to the CSV.
    """
    overrides = {k: v for k, v in flags.items() if v is not None}
    out = out or Path(Artifacts.SCALABILITY if scalability else Artifacts.BENCH)
    if out.parent != Path("."):
        validate_output_directory(out.parent)
    if scalability:
        counts = scalability_node_counts(max_nodes)
        base = scalability_config(config_path, overrides)
        print_info(f"Scalability sweep over {counts} nodes, {reps} repetitions each")
        rows = []
        with create_progress_bar() as progress:
            task = progress.add_task("Sweeping node counts...", total=len(counts))
            for n_nodes in counts:
                rows.extend(scalability_sweep([n_nodes], reps, base=base))
                progress.advance(task)
        columns = SCALABILITY_COLUMNS
        resolved = base.to_dict()
        display_bench_table(rows, columns, title="Scalability (ms)")
    else:
        if "dataset" in overrides:
            raise ConfigurationError("--dataset applies to the --scalability sweep only")
        names = [name.strip() for name in presets.split(",") if name.strip()]
        if not names:
            raise ConfigurationError("No presets given")
        configs = {name: preset_configs(name, config_path, overrides) for name in names}
        rows = []
        with create_progress_bar() as progress:
            task = progress.add_task("Benchmarking...", total=len(names))
            for name in names:
                rows.extend(bench_presets([name], reps, config_path=config_path, overrides=overrides))
                progress.advance(task)
        columns = TABLE_COLUMNS
        resolved = {
            name: {backend: config.to_dict() for backend, config in pair.items()}
            for name, pair in configs.items()
        }
        display_bench_table(rows, columns)

    write_bench_csv(out, rows, columns)
    write_resolved_configs(out.parent / Artifacts.RESOLVED_CONFIG, resolved)
    print_success(f"Bench rows written to {out}")


@main.command()
@click.argument("assignments", type=click.Path(path_type=Path))
@click.argument("truth", type=click.Path(path_type=Path))
@click.option("--report", "report_path", type=click.Path(path_type=Path), help="Write the report as JSON")
@handle_ddc_errors
def evaluate(assignments, truth, report_path):
    """Compare an ASSIGNMENTS CSV with a ground-truth TRUTH CSV."""
    predicted = read_points(assignments)
    expected = read_points(truth)
    for path, dataset in ((assignments, predicted), (truth, expected)):
        if dataset.truth is None:
            raise DataIOError(f"{path} has no label column")

    report = evaluate_labelings(expected.truth, predicted.truth, name=predicted.name)
    display_evaluation(report)

    if report_path is not None:
        try:
            report_path.write_text(report.to_json() + "\n", encoding="utf-8")
        except OSError as e:
            raise DataIOError(f"Failed to write report to {report_path}: {e}") from e
        print_success(f"Report written to {report_path}")


if __name__ == "__main__":
    main()
