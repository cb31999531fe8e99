"""Rich console output for the ddc CLI."""

from typing import Dict, List, Sequence

from rich.console import Console
from rich.panel import Panel
from rich.progress import BarColumn, Progress, SpinnerColumn, TextColumn
from rich.table import Table

from .evaluation import EvalReport

console = Console()


def _fmt_optional(value, spec: str = "") -> str:
    return "?" if value is None else format(value, spec)


def display_run_summary(report: EvalReport, n_nodes: int, degree: int):
    """Summary panel of one DDC run.

    Args:
        report: Report of the run
        n_nodes: Leaf node count
        degree: Tree degree
    """
    expected = report.n_clusters_expected
    if expected is None:
        clusters = f"{report.n_clusters_found}"
    elif expected == report.n_clusters_found:
        clusters = f"[green]{report.n_clusters_found}[/green] (expected {expected})"
    else:
        clusters = f"[red]{report.n_clusters_found}[/red] (expected {expected})"

    shared = 0.0
    if report.dataset_bytes:
        shared = report.bytes_exchanged / report.dataset_bytes * 100

    panel_content = f"""
[bold white]{report.dataset}[/bold white]  {report.size} points, {n_nodes} nodes, degree {degree}

[cyan]Global clusters:[/cyan] {clusters}
[cyan]ARI (noise excluded):[/cyan] {_fmt_optional(report.ari, ".4f")}
[cyan]Reduction ratio:[/cyan] {report.reduction_ratio * 100:.2f}% ({report.contour_vertices} contour vertices)
[cyan]Bytes exchanged:[/cyan] {report.bytes_exchanged} ({shared:.2f}% of the dataset)

[blue]Local makespan:[/blue] {report.leaf_makespan * 1000:.1f} ms
[blue]Merge time:[/blue] {report.merge_time * 1000:.1f} ms
[blue]Makespan:[/blue] {report.makespan * 1000:.1f} ms
"""
    console.print(Panel(panel_content.strip(), title="DDC Run", border_style="blue"))


def display_merge_levels(levels: List[Dict]):
    """Table of the aggregation levels.

    Args:
        levels: Dicts with 'level', 'groups', 'overlaps', 'merges', 'bytes', 'seconds'
    """
    if not levels:
        console.print("[yellow]Single node: no merge levels.[/yellow]")
        return

    table = Table(title="Merge Levels", show_header=True, header_style="bold magenta")
    table.add_column("Level", justify="right", style="cyan")
    table.add_column("Groups", justify="right")
    table.add_column("Overlaps", justify="right", style="yellow")
    table.add_column("Merges", justify="right", style="green")
    table.add_column("Bytes", justify="right", style="blue")
    table.add_column("Time (ms)", justify="right")

    for level in levels:
        table.add_row(
            str(level["level"]),
            str(level["groups"]),
            str(level["overlaps"]),
            str(level["merges"]),
            str(level["bytes"]),
            f"{level['seconds'] * 1000:.1f}",
        )

    table.add_section()
    table.add_row(
        "[bold]TOTAL[/bold]",
        "",
        f"[bold]{sum(lv['overlaps'] for lv in levels)}[/bold]",
        f"[bold]{sum(lv['merges'] for lv in levels)}[/bold]",
        f"[bold]{sum(lv['bytes'] for lv in levels)}[/bold]",
        "",
    )
    console.print(table)


def display_evaluation(report: EvalReport):
    """Table comparing an assignment with its ground truth."""
    table = Table(title="Evaluation", show_header=True, header_style="bold magenta")
    table.add_column("Metric", style="cyan")
    table.add_column("Value", justify="right")
    table.add_row("Points", str(report.size))
    table.add_row("Clusters found", str(report.n_clusters_found))
    table.add_row("Clusters expected", _fmt_optional(report.n_clusters_expected))
    table.add_row("ARI (noise excluded)", _fmt_optional(report.ari, ".4f"))
    console.print(table)


def display_bench_table(rows: List[Dict], columns: Sequence[str], title: str = "Execution Times (ms)"):
    """Benchmark rows as a table.

    Args:
        rows: One dict per row
        columns: Column order
        title: Table title
    """
    if not rows:
        console.print("[yellow]No benchmark rows.[/yellow]")
        return

    table = Table(title=title, show_header=True, header_style="bold magenta")
    for i, column in enumerate(columns):
        table.add_column(column, style="cyan" if i == 0 else "white", justify="left" if i == 0 else "right")
    for row in rows:
        table.add_row(*(str(row[c]) for c in columns))
    console.print(table)


def print_success(message: str):
    """Print a success message."""
    console.print(f"[green]✓[/green] {message}")


def print_error(message: str):
    """Print an error message."""
    console.print(f"[red]✗[/red] {message}", style="bold red")


def print_warning(message: str):
    """Print a warning message."""
    console.print(f"[yellow]⚠[/yellow] {message}", style="yellow")


def print_info(message: str):
    """Print an info message."""
    console.print(f"[blue]ℹ[/blue] {message}")


def create_progress_bar():
    """Progress bar for long benchmark sweeps."""
    return Progress(
        SpinnerColumn(),
        TextColumn("[progress.description]{task.description}"),
        BarColumn(),
        TextColumn("[progress.percentage]{task.percentage:>3.0f}%"),
        console=console,
    )
