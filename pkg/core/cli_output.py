from rich.console import Console
from rich.table import Table


def _status(ok, good="ok", bad="fail"):
    return f"[green]{good}[/green]" if ok else f"[red]{bad}[/red]"


def print_graph_stats_table(stats_rows):
    """
    Print graph statistics using rich.
    stats_rows: list of dicts with keys: source, vertices, edges, components
    """
    console = Console()
    table = Table(show_header=True, header_style="bold magenta")
    table.add_column("SOURCE", style="bold", overflow="fold")
    table.add_column("VERTICES", justify="right")
    table.add_column("EDGES", justify="right")
    table.add_column("COMPONENTS", justify="right")
    table.add_column("CONNECTED", justify="center")

    for row in stats_rows:
        table.add_row(
            row["source"],
            str(row["vertices"]),
            str(row["edges"]),
            str(row["components"]),
            _status(row["components"] == 1, "yes", "no"),
        )
    console.print(table)


def print_bank_table(bank, frame, bounds=None):
    """
    Print the filter bank scales, the frame bounds (A, B) and, for the fast
    backend, the sup error B_j of every band.
    """
    console = Console()
    table = Table(show_header=True, header_style="bold magenta", title=f"A={frame[0]:.4g}  B={frame[1]:.4g}")
    table.add_column("BAND", justify="right")
    table.add_column("KERNEL", style="bold")
    table.add_column("SCALE", justify="right")
    if bounds:
        table.add_column("SUP ERROR", justify="right", style="dim")

    kernels = ["h"] + ["g"] * bank.J
    scales = ["-"] + [f"{t:.6g}" for t in bank.scales]
    for band, (kernel, scale) in enumerate(zip(kernels, scales)):
        cells = [str(band), kernel, scale]
        if bounds:
            cells.append(f"{bounds[band]:.3e}")
        table.add_row(*cells)
    console.print(table)


def print_cg_table(result, tol, relative_error=None):
    """Print a reconstruction summary."""
    console = Console()
    table = Table(show_header=True, header_style="bold magenta")
    table.add_column("METHOD", style="bold")
    table.add_column("ITERATIONS", justify="right")
    table.add_column("RESIDUAL", justify="right")
    table.add_column("TOL", justify="right", style="dim")
    table.add_column("IMAG RESIDUE", justify="right", style="dim")
    table.add_column("REL ERROR", justify="right")
    table.add_column("STATUS", justify="center")
    table.add_row(
        result.method,
        str(result.iterations),
        f"{result.residual:.3e}",
        f"{tol:.1e}",
        f"{result.imag_residue:.3e}",
        "-" if relative_error is None else f"{relative_error:.3e}",
        _status(result.converged, "converged", "not converged"),
    )
    console.print(table)


def print_augment_table(summary_rows):
    """
    Print augmentation counts.
    summary_rows: list of dicts with keys: name, images, thetas, J, outputs
    """
    console = Console()
    table = Table(show_header=True, header_style="bold magenta")
    table.add_column("DATASET", style="bold", overflow="fold")
    table.add_column("IMAGES", justify="right")
    table.add_column("ORDERS", justify="right")
    table.add_column("BANDS", justify="right")
    table.add_column("OUTPUTS", justify="right", style="bold")

    for row in summary_rows:
        table.add_row(
            row["name"],
            f"{row['images']:,}",
            str(row["thetas"]),
            str(row["J"] + 1),
            f"{row['outputs']:,}",
        )
    console.print(table)


def print_bench_table(bench_rows):
    """
    Print benchmark rows.
    bench_rows: list of dicts produced by core.bench.run_bench
    """
    console = Console()
    table = Table(show_header=True, header_style="bold magenta")
    table.add_column("N", justify="right")
    table.add_column("THETA", justify="right")
    table.add_column("M", justify="right")
    table.add_column("SETUP s", justify="right", style="dim")
    table.add_column("EXACT s", justify="right", style="dim")
    table.add_column("FAST s", justify="right", style="dim")
    table.add_column("MATVECS", justify="right")
    table.add_column("MAX ERROR", justify="right")
    table.add_column("BOUND", justify="right", style="dim")
    table.add_column("WTW s", justify="right", style="dim")
    table.add_column("SEQ s", justify="right", style="dim")
    table.add_column("STATUS", justify="center")

    def cell(value, fmt):
        return "-" if value is None else format(value, fmt)

    for row in bench_rows:
        table.add_row(
            str(row["n"]),
            f"{row['theta']:.2f}",
            str(row["M"]),
            cell(row.get("setup_s"), ".3f"),
            cell(row.get("exact_s"), ".4f"),
            cell(row.get("fast_s"), ".4f"),
            cell(row.get("matvecs"), "d"),
            cell(row.get("max_error"), ".2e"),
            cell(row.get("bound"), ".2e"),
            cell(row.get("wtw_s"), ".4f"),
            cell(row.get("sequential_s"), ".4f"),
            _status(not row.get("error"), "ok", row.get("error") or "fail"),
        )
    console.print(table)


def print_validation(result):
    """Print validation errors and warnings."""
    console = Console(stderr=True)
    for err in result.errors:
        console.print(f"[red]error[/red]  {err}")
    for warn in result.warnings:
        console.print(f"[yellow]warning[/yellow]  {warn}")
