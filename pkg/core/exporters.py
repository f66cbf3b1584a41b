# Export functionality for pyramids, signals, atoms, manifests and reports

import csv
import os

import numpy as np

from .exceptions import DataFormatError, ExportError
from .helpers import format_value, parse_float_list, parse_key_value_lines, provenance_lines, split_provenance

PYRAMID_HEADER = ["band", "vertex", "re", "im"]
ATOM_HEADER = ["vertex", "magnitude", "real", "phase"]
MANIFEST_HEADER = ["src_index", "theta", "band", "label", "path"]
POINTS_HEADER = ["x", "y", "z"]


class ExportResult:
    """Container for export operation results."""

    def __init__(self, success=False, files=None, error=None, rows=0):
        self.success = success
        self.files = files or []
        self.error = error
        self.rows = rows


def _open_for_write(path):
    directory = os.path.dirname(os.path.abspath(path))
    try:
        os.makedirs(directory, exist_ok=True)
        return open(path, "w", newline="")
    except OSError as e:
        raise ExportError(f"Cannot write {path}: {e}")


def _write_rows(path, header, rows, provenance=None):
    """Write provenance comment lines, a CSV header and rows."""
    count = 0
    with _open_for_write(path) as f:
        for line in provenance_lines(provenance or {}):
            f.write(line + "\n")
        writer = csv.writer(f, lineterminator="\n")
        if header:
            writer.writerow(header)
        for row in rows:
            writer.writerow(row)
            count += 1
    return ExportResult(success=True, files=[path], rows=count)


def _read_lines(path):
    if not os.path.exists(path):
        raise DataFormatError(f"File not found: {path}")
    with open(path, "r") as f:
        return f.read().splitlines()


def _is_numeric(token):
    try:
        float(token)
        return True
    except ValueError:
        return False


# ============================================================================
# Pyramids
# ============================================================================


def write_pyramid_csv(pyramid, path, provenance=None):
    """
    Write ``band,vertex,re,im`` rows, band-major. The header lines carry
    theta, the scales and any extra provenance items.
    """
    items = dict(provenance or {})
    items.update({"theta": pyramid.theta, "scales": list(pyramid.scales)})
    bands = np.asarray(pyramid.bands, dtype=complex)
    rows = (
        (band, vertex, repr(float(value.real)), repr(float(value.imag)))
        for band in range(bands.shape[0])
        for vertex, value in enumerate(bands[band])
    )
    return _write_rows(path, PYRAMID_HEADER, rows, items)


def read_provenance(path):
    """The ``# key=value`` header of a written file, values as strings."""
    header, _ = split_provenance(_read_lines(path))
    return header


def read_pyramid_csv(path):
    """
    Parse a pyramid CSV back into a CoefficientPyramid.

    Raises:
        DataFormatError: Missing header, malformed rows or missing entries
    """
    from .exact import CoefficientPyramid

    header, body = split_provenance(_read_lines(path))
    rows = list(csv.reader(line for line in body if line.strip()))
    if not rows or [cell.strip() for cell in rows[0]] != PYRAMID_HEADER:
        raise DataFormatError(f"{path}: expected header {','.join(PYRAMID_HEADER)}")
    entries = {}
    try:
        for row in rows[1:]:
            band, vertex = int(row[0]), int(row[1])
            entries[(band, vertex)] = complex(float(row[2]), float(row[3]))
    except (ValueError, IndexError):
        raise DataFormatError(f"{path}: malformed coefficient row {row!r}")
    if not entries:
        raise DataFormatError(f"{path}: no coefficients")
    n_bands = max(b for b, _ in entries) + 1
    n = max(v for _, v in entries) + 1
    if len(entries) != n_bands * n:
        raise DataFormatError(f"{path}: expected {n_bands * n} coefficients, found {len(entries)}")
    bands = np.zeros((n_bands, n), dtype=complex)
    for (band, vertex), value in entries.items():
        bands[band, vertex] = value
    theta = float(header.get("theta", "nan"))
    scales = tuple(parse_float_list(header.get("scales", "")))
    return CoefficientPyramid(theta=theta, scales=scales, bands=bands)


def write_band_columns(pyramid, path, provenance=None):
    """One row per vertex with magnitude, real part and phase of every band."""
    bands = np.asarray(pyramid.bands)
    header = ["vertex"]
    for band in range(bands.shape[0]):
        header += [f"mag_{band}", f"re_{band}", f"phase_{band}"]
    rows = []
    for vertex in range(bands.shape[1]):
        row = [vertex]
        for band in range(bands.shape[0]):
            value = bands[band, vertex]
            row += [repr(float(abs(value))), repr(float(value.real)), repr(float(np.angle(value)))]
        rows.append(row)
    return _write_rows(path, header, rows, provenance)


# ============================================================================
# Signals, atoms and points
# ============================================================================


def write_signal_csv(signal, path, provenance=None):
    """One-column CSV with header ``value``."""
    return _write_rows(path, ["value"], ([repr(float(v))] for v in np.asarray(signal, dtype=float)), provenance)


def read_signal_csv(path):
    """Read a one-column signal; a non-numeric first row is taken as the header."""
    _, body = split_provenance(_read_lines(path))
    lines = [line.strip() for line in body if line.strip()]
    if lines and not _is_numeric(lines[0].split(",")[0]):
        lines = lines[1:]
    try:
        return np.array([float(line.split(",")[0]) for line in lines])
    except ValueError as e:
        raise DataFormatError(f"{path}: bad signal value ({e})")


def write_atom_csv(atom, path, provenance=None):
    """``vertex,magnitude,real,phase`` rows of a complex atom."""
    atom = np.asarray(atom, dtype=complex)
    rows = (
        (vertex, repr(float(abs(v))), repr(float(v.real)), repr(float(np.angle(v))))
        for vertex, v in enumerate(atom)
    )
    return _write_rows(path, ATOM_HEADER, rows, provenance)


def write_points_csv(points, path, provenance=None):
    points = np.asarray(points, dtype=float)
    header = POINTS_HEADER if points.shape[1] == 3 else [f"x{i}" for i in range(points.shape[1])]
    return _write_rows(path, header, ([repr(float(v)) for v in row] for row in points), provenance)


def read_points_csv(path):
    """
    Read an (n, d) point array from CSV; comment lines and a header row are
    skipped.
    """
    _, body = split_provenance(_read_lines(path))
    lines = [line for line in body if line.strip() and not line.lstrip().startswith("#")]
    if lines and not all(_is_numeric(tok) for tok in lines[0].split(",")):
        lines = lines[1:]
    try:
        rows = [[float(tok) for tok in line.split(",")] for line in lines]
    except ValueError as e:
        raise DataFormatError(f"{path}: bad coordinate ({e})")
    if not rows or len({len(r) for r in rows}) != 1:
        raise DataFormatError(f"{path}: points must be a non-empty table with a fixed column count")
    return np.array(rows)


# ============================================================================
# Manifests and reports
# ============================================================================


def write_manifest(rows, path, provenance=None):
    """``src_index,theta,band,label,path`` rows; a missing label is left empty."""
    body = (
        (row.src_index, f"{row.theta:.6g}", row.band, "" if row.label is None else row.label, row.path)
        for row in rows
    )
    return _write_rows(path, MANIFEST_HEADER, body, provenance)


def read_manifest(path):
    """Return manifest rows as dicts of strings."""
    _, body = split_provenance(_read_lines(path))
    reader = csv.DictReader(line for line in body if line.strip())
    if reader.fieldnames != MANIFEST_HEADER:
        raise DataFormatError(f"{path}: expected header {','.join(MANIFEST_HEADER)}")
    return list(reader)


def write_table_csv(rows, columns, path, provenance=None):
    """Write dict rows with a fixed column order (missing cells empty)."""
    body = ([format_value(row[col]) if row.get(col) is not None else "" for col in columns] for row in rows)
    return _write_rows(path, columns, body, provenance)


def format_report(blocks):
    """Render ``[name]`` blocks of ``key=value`` lines."""
    lines = []
    for name, items in blocks.items():
        lines.append(f"[{name}]")
        lines.extend(f"{key}={format_value(value)}" for key, value in items.items())
        lines.append("")
    return "\n".join(lines)


def write_report(blocks, path):
    with _open_for_write(path) as f:
        f.write(format_report(blocks))
    return ExportResult(success=True, files=[path], rows=len(blocks))


def read_report(path):
    """Parse a report back into {block: {key: raw value}}."""
    blocks = {}
    current = None
    pending = []
    for line in _read_lines(path) + ["[]"]:
        stripped = line.strip()
        if stripped.startswith("[") and stripped.endswith("]"):
            if current is not None:
                blocks[current] = parse_key_value_lines(pending, source=path)
            current, pending = stripped[1:-1], []
        elif current is None and stripped:
            raise DataFormatError(f"{path}: key=value line before any [block]")
        else:
            pending.append(line)
    return blocks
