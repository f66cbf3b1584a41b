# CLI command definitions for sgfrwt
import importlib.metadata
import logging
import os
import sys
from functools import wraps

import click
import numpy as np
import yaml

from . import exporters
from . import validator
from .bench import BENCH_COLUMNS, run_bench
from .cli_output import (
    print_augment_table,
    print_bank_table,
    print_bench_table,
    print_cg_table,
    print_graph_stats_table,
    print_validation,
)
from .config import _default_config_manager, build_run_config, coerce_setting, get_config_value, load_global_config
from .datasets import (
    augment_dataset,
    augmented_count,
    read_idx,
    read_pgm,
    subsample,
    swiss_roll,
    traditional_augment,
)
from .exact import atom, forward_exact
from .exceptions import (
    DataFormatError,
    DisconnectedGraphError,
    FrameFailureError,
    NotConvergedError,
    SgfrwtError,
    ValidationError,
)
from .fast import build_propagators, forward_fast, make_fourier_approx, reconstruct_cg
from .graph import (
    gaussian_point_cloud_graph,
    graph_stats,
    image_grid_graph,
    laplacian,
    read_edge_list,
    write_edge_list,
)
from .helpers import (
    configure_logging,
    echo_warning,
    parse_float_list,
    parse_int_list,
    provenance_lines,
    theta_tag,
)
from .kernels import frame_bounds, load_bank_file, make_filter_bank
from .spectral import eig_decompose, estimate_r_max, fractional_basis, load_operator, save_operator

logger = logging.getLogger(__name__)


def _package_version():
    try:
        return importlib.metadata.version("sgfrwt")
    except importlib.metadata.PackageNotFoundError:
        return "0.0.0+local"


def handle_exceptions(func):
    """Decorator to handle exceptions consistently across CLI commands with proper exit codes."""

    @wraps(func)
    def wrapper(*args, **kwargs):
        try:
            return func(*args, **kwargs)
        except KeyboardInterrupt:
            click.echo("\nInterrupted by user", err=True)
            sys.exit(130)
        except DisconnectedGraphError as e:
            click.echo(f"Warning: {e.message}", err=True)
            sys.exit(e.exit_code)
        except SgfrwtError as e:
            click.echo(f"Error: {e.message}", err=True)
            sys.exit(e.exit_code)
        except click.ClickException:
            raise
        except Exception as e:
            click.echo(f"Unexpected error: {str(e)}", err=True)
            if os.getenv("DEBUG"):
                import traceback

                traceback.print_exc()
            sys.exit(1)

    return wrapper


class SgfrwtGroup(click.Group):
    """Click group whose usage errors exit with status 1."""

    def make_context(self, *args, **kwargs):
        try:
            return super().make_context(*args, **kwargs)
        except click.UsageError as e:
            e.exit_code = 1
            raise

    def invoke(self, ctx):
        try:
            return super().invoke(ctx)
        except click.UsageError as e:
            e.exit_code = 1
            raise


# ============================================================================
# Shared options
# ============================================================================


def _options(*decorators):
    def apply(func):
        for decorator in reversed(decorators):
            func = decorator(func)
        return func

    return apply


bank_options = _options(
    click.option("--bank", type=click.Path(exists=True, dir_okay=False), default=None, help="key=value bank file"),
    click.option("--J", "J", type=int, default=None, help="Number of wavelet scales"),
    click.option("--K", "K", type=float, default=None, help="Spectrum ratio; lambda_min = r_max / K"),
    click.option("--alpha", type=int, default=None, help="Kernel exponent below x1"),
    click.option("--beta", type=int, default=None, help="Kernel exponent above x2"),
    click.option("--x1", type=float, default=None),
    click.option("--x2", type=float, default=None),
    click.option("--scales", default=None, help="Explicit decreasing scales, comma separated"),
)

graph_options = _options(
    click.option("--sigma", type=float, default=None, help="Gaussian width for point clouds"),
    click.option(
        "--sparsify", type=click.Choice(["dense", "threshold", "knn"]), default=None, help="Point cloud edge rule"
    ),
    click.option("--epsilon", type=float, default=None, help="Weight threshold (threshold mode)"),
    click.option("--knn", type=int, default=None, help="Neighbors per point (knn mode)"),
    click.option("--theta-w", "theta_w", type=float, default=None, help="Gaussian width for image grids"),
    click.option("--k", "k", type=float, default=None, help="Pixel distance cutoff"),
)

fast_options = _options(
    click.option("--M", "--order", "M", type=int, default=None, help="Fourier truncation order"),
    click.option("--extension", type=click.Choice(["even", "periodic"]), default=None),
    click.option("--period-factor", "period_factor", type=float, default=None),
    click.option("--propagator", type=click.Choice(["dense", "expm"]), default=None),
)

theta_option = click.option("--theta", "thetas", type=float, multiple=True, help="Fractional order (repeatable)")


# Pyramid header keys that fix the frame operator it was computed with
BANK_SETTINGS = ("K", "alpha", "beta", "x1", "x2")
APPROX_SETTINGS = ("M", "extension", "period_factor")


def _merge_bank_file(flags):
    """Fill bank options left unset on the command line from ``--bank``."""
    path = flags.pop("bank", None)
    if not path:
        return
    for key, value in load_bank_file(path).items():
        if flags.get(key) is None:
            flags[key] = value


def _pyramid_settings(flags, header, path):
    """
    Fill unset bank and approximation options from a pyramid header.

    A flag that contradicts a recorded bank setting is an error, as is one
    that contradicts the approximation of a fast pyramid. Exact pyramids
    carry no approximation, so there a different value only warns.
    """
    exact = header.get("backend") == "exact"
    for key in BANK_SETTINGS + APPROX_SETTINGS:
        if key not in header:
            continue
        recorded = coerce_setting(key, header[key])
        given = flags.get(key)
        if given is None:
            flags[key] = recorded
        elif coerce_setting(key, given) != recorded:
            message = f"{path} was computed with {key}={header[key]}, got {key}={given}"
            if exact and key in APPROX_SETTINGS:
                echo_warning(message)
            else:
                raise ValidationError(message)


def _run_config(ctx, command, **flags):
    """Build and validate the RunConfig of a command."""
    _merge_bank_file(flags)
    overrides = {key: value for key, value in flags.items() if value is not None}
    if "thetas" in overrides:
        overrides["thetas"] = tuple(overrides["thetas"]) or None
    if isinstance(overrides.get("scales"), str):
        overrides["scales"] = tuple(parse_float_list(overrides["scales"]))
    if ctx.obj.get("threads") is not None:
        overrides.setdefault("threads", ctx.obj["threads"])
    cfg = build_run_config(command, overrides, ctx.obj.get("config_file"))
    result = validator.validate_run_config(cfg)
    if result.has_issues:
        print_validation(result)
    validator.ensure_valid(cfg)
    return cfg


def _provenance(cfg, **extra):
    items = cfg.numeric_items()
    items["command"] = cfg.command
    items.update({key: value for key, value in extra.items() if value is not None})
    return items


def _load_source_graph(cfg, edges, points, image, swiss_roll_n):
    """
    Build the graph named by exactly one source option.

    Returns:
        (graph, source label, point coordinates or None)
    """
    sources = [s for s in (edges, points, image, swiss_roll_n) if s is not None]
    if len(sources) != 1:
        raise click.UsageError("Give exactly one of --edges, --points, --image, --swiss-roll")
    if edges is not None:
        return read_edge_list(edges), edges, None
    if image is not None:
        return image_grid_graph(read_pgm(image), theta_w=cfg.theta_w, k=cfg.k), image, None
    if points is not None:
        coords = exporters.read_points_csv(points)
    else:
        coords = swiss_roll(swiss_roll_n, cfg.seed).points
        points = f"swiss-roll:{swiss_roll_n}"
    graph = gaussian_point_cloud_graph(coords, sigma=cfg.sigma, sparsify=cfg.sparsify, epsilon=cfg.epsilon, knn=cfg.knn)
    return graph, points, coords


def _single_theta(cfg):
    if len(cfg.thetas) != 1:
        raise ValidationError(f"{cfg.command} takes a single --theta, got {len(cfg.thetas)}")
    return cfg.thetas[0]


def _load_operator(graph_path, cache_path, theta):
    """Operator from an FGW1 cache when present, else from the edge list (written back to the cache)."""
    if cache_path and os.path.exists(cache_path):
        op = load_operator(cache_path)
        if not np.isclose(op.theta, theta, rtol=0.0, atol=1e-12):
            raise ValidationError(f"Operator cache {cache_path} holds theta={op.theta}, requested {theta}")
        logger.info("loaded operator cache %s", cache_path)
        return op
    if not graph_path:
        raise click.UsageError("--graph is required unless --operator-cache points to an existing file")
    op = fractional_basis(eig_decompose(laplacian(read_edge_list(graph_path))), theta)
    if cache_path:
        save_operator(op, cache_path)
        logger.info("wrote operator cache %s", cache_path)
    return op


def _bank_r_max(cfg, op, graph_path):
    """Spectral bound for the bank: max r exactly, or a power-iteration estimate on L."""
    if cfg.r_max_mode == "exact":
        return op.r_max_bound
    if not graph_path:
        raise click.UsageError("--r-max-mode estimate needs --graph")
    estimate = estimate_r_max(laplacian(read_edge_list(graph_path)), op.theta, seed=cfg.seed)
    top = float(op.r.max(initial=0.0))
    if estimate < top:
        echo_warning(f"Estimated r_max={estimate:.6g} is below the largest fractional eigenvalue {top:.6g}")
    logger.info("estimated r_max=%.6g (exact %.6g)", estimate, top)
    return estimate


def _make_bank(cfg, op, J=None, scales=None, r_max=None):
    return make_filter_bank(
        r_max or op.r_max_bound,
        J=J or cfg.J,
        K=cfg.K,
        alpha=cfg.alpha,
        beta=cfg.beta,
        x1=cfg.x1,
        x2=cfg.x2,
        scales=scales or cfg.scales,
    )


def _make_fast(cfg, op, bank):
    fa = make_fourier_approx(bank, cfg.M, extension=cfg.extension, period_factor=cfg.period_factor)
    pp = build_propagators(op, fa.period, backend=cfg.propagator)
    return fa, pp


# ============================================================================
# Command group
# ============================================================================


@click.group(
    cls=SgfrwtGroup,
    help="""
sgfrwt - Spectral graph fractional wavelet transforms.

\b
COMMANDS:
  build-graph     Build a graph from points, an image or an edge list
  transform       Exact or fast wavelet coefficients of a signal
  atoms           Export wavelet atoms on a (theta, band) grid
  reconstruct     Conjugate-gradient reconstruction from coefficients
  augment         Wavelet-band augmentation of an IDX image dataset
  bench           Timing and accuracy sweep of the fast transform
  config          Show configuration

\b
Run 'sgfrwt COMMAND --help' for more information on a command.
""",
)
@click.option("--config", "-c", "config_file", default=None, help="key=value override file")
@click.option("--verbose", "-v", count=True, help="More log output (-vv for debug)")
@click.option("--threads", type=int, default=None, help="Worker threads for batch work")
@click.version_option(_package_version(), "--version", "-V", message="%(version)s")
@click.pass_context
def cli(ctx, config_file, verbose, threads):
    """sgfrwt - Spectral graph fractional wavelet transforms."""
    ctx.ensure_object(dict)
    ctx.obj["config_file"] = config_file
    ctx.obj["threads"] = threads
    level = {0: None, 1: "INFO"}.get(verbose, "DEBUG")
    configure_logging(level)


# ============================================================================
# build-graph
# ============================================================================


@cli.command(name="build-graph")
@click.option("--edges", type=click.Path(exists=True, dir_okay=False), default=None, help="Edge-list file")
@click.option("--points", type=click.Path(exists=True, dir_okay=False), default=None, help="Points CSV")
@click.option("--image", type=click.Path(exists=True, dir_okay=False), default=None, help="Binary PGM image")
@click.option("--swiss-roll", "swiss_roll_n", type=int, default=None, help="Sample N Swiss roll points")
@click.option("--points-out", type=click.Path(dir_okay=False), default=None, help="Also write the point coordinates")
@click.option("--seed", type=int, default=None)
@click.option("--output", "-o", required=True, type=click.Path(dir_okay=False), help="Edge-list output")
@graph_options
@click.pass_context
@handle_exceptions
def build_graph_cmd(ctx, edges, points, image, swiss_roll_n, points_out, output, **flags):
    """Build a graph and write it as an edge list."""
    cfg = _run_config(ctx, "build-graph", output=output, **flags)
    graph, source, coords = _load_source_graph(cfg, edges, points, image, swiss_roll_n)
    header = provenance_lines(_provenance(cfg, source=source))
    write_edge_list(graph, output, header=header)
    if points_out and coords is not None:
        exporters.write_points_csv(coords, points_out, _provenance(cfg, source=source))

    n, n_edges, components = graph_stats(graph)
    print_graph_stats_table([{"source": source, "vertices": n, "edges": n_edges, "components": components}])
    click.echo(f"N={n} |E|={n_edges} components={components} connected={'yes' if components == 1 else 'no'}")
    click.echo(f"Wrote {output}")
    if components > 1:
        raise DisconnectedGraphError(components)


# ============================================================================
# transform
# ============================================================================


@cli.command(name="transform")
@click.option("--graph", "graph_path", type=click.Path(dir_okay=False), default=None, help="Edge-list file")
@click.option("--operator-cache", type=click.Path(dir_okay=False), default=None, help="FGW1 operator file")
@click.option("--signal", "signal_path", required=True, type=click.Path(exists=True, dir_okay=False))
@click.option("--backend", type=click.Choice(["exact", "fast"]), default=None)
@click.option("--columns", type=click.Path(dir_okay=False), default=None, help="Also write magnitude/real/phase per band")
@click.option("--report", type=click.Path(dir_okay=False), default=None, help="Bank and bounds report")
@click.option(
    "--r-max-mode", "r_max_mode", type=click.Choice(["exact", "estimate"]), default=None, help="Source of the spectral bound"
)
@click.option("--output", "-o", required=True, type=click.Path(dir_okay=False), help="Pyramid CSV")
@theta_option
@bank_options
@fast_options
@click.pass_context
@handle_exceptions
def transform_cmd(ctx, graph_path, operator_cache, signal_path, columns, report, output, **flags):
    """Compute the wavelet coefficient pyramid of a signal."""
    cfg = _run_config(ctx, "transform", input=signal_path, output=output, **flags)
    theta = _single_theta(cfg)
    op = _load_operator(graph_path, operator_cache, theta)
    bank = _make_bank(cfg, op, r_max=_bank_r_max(cfg, op, graph_path))
    signal = exporters.read_signal_csv(signal_path)
    frame = frame_bounds(bank, int(get_config_value("bank.frame_grid", 1000)))

    blocks = {"bank": {"theta": op.theta, "r_max": bank.r_max, "scales": list(bank.scales), "A": frame[0], "B": frame[1]}}
    bounds = None
    if cfg.backend == "fast":
        fa, pp = _make_fast(cfg, op, bank)
        lower, _ = fa.frame_bounds()
        if not lower > 0:
            raise FrameFailureError(lower)
        pyramid = forward_fast(signal, pp, fa)
        bounds = list(fa.bounds)
        blocks["fast"] = {
            "M": cfg.M,
            "period": fa.period,
            "extension": fa.extension,
            "bounds": bounds,
            "deviation_bound": max(bounds) * float(np.linalg.norm(signal)),
            "matvecs": pp.counter.value,
        }
    else:
        pyramid = forward_exact(signal, op, bank)

    exporters.write_pyramid_csv(pyramid, output, _provenance(cfg, r_max=bank.r_max))
    if columns:
        exporters.write_band_columns(pyramid, columns, _provenance(cfg))
    if report or bounds is not None:
        exporters.write_report(blocks, report or f"{output}.report")
    print_bank_table(bank, frame, bounds)
    click.echo(f"Wrote {pyramid.size} coefficients to {output}")


# ============================================================================
# atoms
# ============================================================================


@cli.command(name="atoms")
@click.option("--edges", type=click.Path(exists=True, dir_okay=False), default=None, help="Edge-list file")
@click.option("--points", type=click.Path(exists=True, dir_okay=False), default=None, help="Points CSV")
@click.option("--image", type=click.Path(exists=True, dir_okay=False), default=None, help="Binary PGM image")
@click.option("--swiss-roll", "swiss_roll_n", type=int, default=None, help="Sample N Swiss roll points")
@click.option("--vertex", required=True, type=int, help="Center vertex")
@click.option("--seed", type=int, default=None)
@click.option("--output", "-o", required=True, type=click.Path(file_okay=False), help="Output directory")
@theta_option
@bank_options
@graph_options
@click.pass_context
@handle_exceptions
def atoms_cmd(ctx, edges, points, image, swiss_roll_n, vertex, output, **flags):
    """Export atoms centered at VERTEX for every requested theta and band."""
    cfg = _run_config(ctx, "atoms", output=output, **flags)
    graph, source, coords = _load_source_graph(cfg, edges, points, image, swiss_roll_n)
    os.makedirs(output, exist_ok=True)
    if coords is not None:
        exporters.write_points_csv(coords, os.path.join(output, "points.csv"), _provenance(cfg, source=source))
    dec = eig_decompose(laplacian(graph))
    written = 0
    for theta in cfg.thetas:
        op = fractional_basis(dec, theta, laplacian=False)
        bank = _make_bank(cfg, op)
        for band in range(bank.J + 1):
            values = atom(op, bank, band, vertex)
            name = f"atom_t{theta_tag(theta)}_j{band}.csv"
            exporters.write_atom_csv(
                values, os.path.join(output, name), _provenance(cfg, theta=theta, band=band, vertex=vertex)
            )
            written += 1
    click.echo(f"Wrote {written} atom files to {output}")


# ============================================================================
# reconstruct
# ============================================================================


@cli.command(name="reconstruct")
@click.option("--pyramid", "pyramid_path", required=True, type=click.Path(exists=True, dir_okay=False))
@click.option("--graph", "graph_path", type=click.Path(dir_okay=False), default=None, help="Edge-list file")
@click.option("--operator-cache", type=click.Path(dir_okay=False), default=None, help="FGW1 operator file")
@click.option("--reference", type=click.Path(exists=True, dir_okay=False), default=None, help="Signal to compare against")
@click.option("--report", type=click.Path(dir_okay=False), default=None)
@click.option("--tol", type=float, default=None)
@click.option("--max-iter", "max_iter", type=int, default=None)
@click.option("--method", "cg_method", type=click.Choice(["cg", "cr"]), default=None)
@click.option("--output", "-o", required=True, type=click.Path(dir_okay=False), help="Signal CSV")
@bank_options
@fast_options
@click.pass_context
@handle_exceptions
def reconstruct_cmd(ctx, pyramid_path, graph_path, operator_cache, reference, report, output, **flags):
    """
    Reconstruct a signal from a pyramid with conjugate gradients.

    The filter bank and Fourier approximation are rebuilt from the settings
    recorded in the pyramid header; options only fill in what is missing.
    """
    pyramid = exporters.read_pyramid_csv(pyramid_path)
    header = exporters.read_provenance(pyramid_path)
    _merge_bank_file(flags)
    _pyramid_settings(flags, header, pyramid_path)
    flags["thetas"] = (pyramid.theta,)
    if "r_max_mode" in header:
        flags["r_max_mode"] = header["r_max_mode"]
    cfg = _run_config(ctx, "reconstruct", input=pyramid_path, output=output, **flags)
    op = _load_operator(graph_path, operator_cache, pyramid.theta)
    try:
        r_max = float(header["r_max"]) if "r_max" in header else None
    except ValueError:
        raise DataFormatError(f"{pyramid_path}: bad r_max={header['r_max']!r}")
    bank = _make_bank(cfg, op, J=pyramid.J, scales=pyramid.scales, r_max=r_max)
    fa, pp = _make_fast(cfg, op, bank)
    result = reconstruct_cg(pyramid, pp, fa, tol=cfg.tol, max_iter=cfg.max_iter, method=cfg.cg_method)

    exporters.write_signal_csv(result.signal, output, _provenance(cfg, theta=pyramid.theta))
    relative_error = None
    if reference:
        ref = exporters.read_signal_csv(reference)
        relative_error = float(np.linalg.norm(result.signal - ref) / max(np.linalg.norm(ref), 1e-300))
    block = {
        "method": result.method,
        "iterations": result.iterations,
        "residual": result.residual,
        "tol": cfg.tol,
        "converged": result.converged,
        "imag_residue": result.imag_residue,
        "matvecs": pp.counter.value,
    }
    if relative_error is not None:
        block["relative_error"] = relative_error
    exporters.write_report({"reconstruct": block, "fast": {"M": cfg.M, "bounds": list(fa.bounds)}}, report or f"{output}.report")
    print_cg_table(result, cfg.tol, relative_error)
    click.echo(f"Wrote {output}")
    if not result.converged:
        raise NotConvergedError(result, cfg.tol)


# ============================================================================
# augment
# ============================================================================


@cli.command(name="augment")
@click.option("--images", required=True, type=click.Path(exists=True, dir_okay=False), help="IDX image file")
@click.option("--labels", type=click.Path(exists=True, dir_okay=False), default=None, help="IDX label file")
@click.option("--count-only", is_flag=True, help="Print the output count without writing images")
@click.option("--subsample", "subsample_count", type=int, default=None, help="Seeded uniform subsample size")
@click.option("--traditional", is_flag=True, help="Add flip, rotation and noise copies first")
@click.option("--mode", type=click.Choice(["magnitude", "real"]), default=None, help="Band image content")
@click.option("--seed", type=int, default=None)
@click.option("--output", "-o", type=click.Path(file_okay=False), default=None, help="Output directory")
@theta_option
@bank_options
@click.option("--theta-w", "theta_w", type=float, default=None, help="Gaussian width for image grids")
@click.option("--k", "k", type=float, default=None, help="Pixel distance cutoff")
@click.pass_context
@handle_exceptions
def augment_cmd(ctx, images, labels, count_only, subsample_count, traditional, output, **flags):
    """Write wavelet band images and a manifest for an IDX dataset."""
    cfg = _run_config(ctx, "augment", input=images, output=output, **flags)
    ds = read_idx(images, labels)
    if subsample_count is not None:
        ds = subsample(ds, subsample_count, cfg.seed)
    if traditional:
        ds = traditional_augment(ds, seed=cfg.seed)
    total = augmented_count(len(ds), len(cfg.thetas), cfg.J)
    summary = [{"name": os.path.basename(images), "images": len(ds), "thetas": len(cfg.thetas), "J": cfg.J, "outputs": total}]

    if count_only:
        print_augment_table(summary)
        click.echo(f"{total} outputs")
        return
    if not output:
        raise click.UsageError("--output is required unless --count-only is given")

    rows = augment_dataset(
        ds,
        cfg.thetas,
        cfg.J,
        output,
        K=cfg.K,
        alpha=cfg.alpha,
        beta=cfg.beta,
        x1=cfg.x1,
        x2=cfg.x2,
        theta_w=cfg.theta_w,
        k=cfg.k,
        mode=cfg.mode,
        threads=cfg.threads,
    )
    exporters.write_manifest(
        rows,
        os.path.join(output, "manifest.csv"),
        _provenance(cfg, subsample=subsample_count, traditional=traditional, mode=cfg.mode),
    )
    print_augment_table(summary)
    click.echo(f"{len(rows)} outputs written to {output}")


# ============================================================================
# bench
# ============================================================================


@cli.command(name="bench")
@click.option("--sizes", default="64,128", help="Graph sizes, comma separated")
@click.option("--orders", default="5,10,20,40", help="Truncation orders, comma separated")
@click.option("--seed", type=int, default=None)
@click.option("--output", "-o", required=True, type=click.Path(dir_okay=False), help="CSV output")
@theta_option
@click.option("--J", "J", type=int, default=None, help="Number of wavelet scales")
@click.option("--K", "K", type=float, default=None)
@click.option("--extension", type=click.Choice(["even", "periodic"]), default=None)
@click.option("--period-factor", "period_factor", type=float, default=None)
@click.option("--propagator", type=click.Choice(["dense", "expm"]), default=None)
@click.pass_context
@handle_exceptions
def bench_cmd(ctx, sizes, orders, output, **flags):
    """Sweep sizes, orders and truncation orders; write timings and errors."""
    cfg = _run_config(ctx, "bench", output=output, **flags)
    try:
        size_list = parse_int_list(sizes)
        order_list = parse_int_list(orders)
    except ValueError as e:
        raise click.UsageError(f"Bad --sizes/--orders list: {e}")
    rows = run_bench(
        sizes=size_list,
        thetas=cfg.thetas,
        orders=order_list,
        J=cfg.J,
        K=cfg.K,
        seed=cfg.seed,
        extension=cfg.extension,
        period_factor=cfg.period_factor,
        propagator=cfg.propagator,
    )
    exporters.write_table_csv(rows, BENCH_COLUMNS, output, _provenance(cfg, sizes=size_list, orders=order_list))
    print_bench_table(rows)
    failed = sum(1 for row in rows if row.get("error"))
    click.echo(f"Wrote {len(rows)} rows to {output}" + (f" ({failed} failed cells)" if failed else ""))


# ============================================================================
# config
# ============================================================================


@cli.group()
def config():
    """
    Configuration management.

    \b
    Commands:
      show [KEY]    Show configuration (all or one dotted key)
      path          Show configuration directory path
    """
    pass


@config.command("show")
@click.argument("key", required=False)
@handle_exceptions
def config_show(key):
    """Show configuration values."""
    if key:
        value = get_config_value(key)
        if value is None:
            click.echo(f"Key '{key}' not found", err=True)
            sys.exit(1)
        click.echo(yaml.dump(value, default_flow_style=False).strip() if isinstance(value, dict) else value)
    else:
        click.echo(yaml.dump(load_global_config(), default_flow_style=False, sort_keys=False))


@config.command("path")
def config_path():
    """Show configuration directory path."""
    click.echo(_default_config_manager.find_config_home())
