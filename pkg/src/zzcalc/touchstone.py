"""Ingestion of externally produced impedance data.

Two file families are understood:

* Touchstone v1 scattering-parameter files (``.s1p`` .. ``.s4p``), the
  common export format of microwave solvers and network analyzers.  The
  S-matrix is converted to an impedance matrix per frequency point via
  Z = sqrt(Zref) (I + S)(I - S)^(-1) sqrt(Zref).
* A plain CSV impedance table with header
  ``freq_hz,re_z_<i>_<j>,im_z_<i>_<j>,...`` (1-based port indices).

Both produce a :class:`~zzcalc.impedance.TabulatedImpedance`, so the rest
of the package does not care where the response came from.
"""

from __future__ import annotations

import csv
import io
import math
import re

import numpy as np

from .errors import TableError, TouchstoneError
from .impedance import TabulatedImpedance

__all__ = [
    "read_touchstone",
    "read_z_table",
    "write_z_table",
]

_FREQ_UNITS = {"hz": 1.0, "khz": 1e3, "mhz": 1e6, "ghz": 1e9}

_Z_COLUMN = re.compile(r"^(re|im)_z_(\d+)_(\d+)$")


def _complex_from_pair(a: float, b: float, fmt: str) -> complex:
    if fmt == "RI":
        return complex(a, b)
    if fmt == "MA":
        return a * complex(math.cos(math.radians(b)), math.sin(math.radians(b)))
    # DB: magnitude in 20*log10, angle in degrees
    mag = 10.0 ** (a / 20.0)
    return mag * complex(math.cos(math.radians(b)), math.sin(math.radians(b)))


def _parse_option_line(line: str) -> tuple[float, str, float]:
    """(frequency unit multiplier, format, reference impedance)."""
    tokens = line[1:].split()
    unit = 1e9
    fmt = "MA"
    z_ref = 50.0
    k = 0
    while k < len(tokens):
        token = tokens[k].lower()
        if token in _FREQ_UNITS:
            unit = _FREQ_UNITS[token]
        elif token == "s":
            pass
        elif token in ("y", "z", "g", "h"):
            raise TouchstoneError(
                f"only S-parameter files are supported, got {tokens[k]!r}"
            )
        elif token in ("ri", "ma", "db"):
            fmt = token.upper()
        elif token == "r":
            if k + 1 >= len(tokens):
                raise TouchstoneError("option line: R without a value")
            try:
                z_ref = float(tokens[k + 1])
            except ValueError as exc:
                raise TouchstoneError(
                    f"option line: bad reference impedance {tokens[k + 1]!r}"
                ) from exc
            k += 1
        else:
            raise TouchstoneError(f"unsupported option {tokens[k]!r}")
        k += 1
    return unit, fmt, z_ref


def _chunk_points(
    numbers: list[float], n_ports: int
) -> tuple[np.ndarray, np.ndarray] | None:
    """Try to split the token stream into (freq, S-matrix) points; None
    when the stream is inconsistent with this port count."""
    per_point = 1 + 2 * n_ports * n_ports
    if len(numbers) % per_point != 0:
        return None
    n_points = len(numbers) // per_point
    freqs = np.empty(n_points)
    raw = np.empty((n_points, 2 * n_ports * n_ports))
    for p in range(n_points):
        chunk = numbers[p * per_point : (p + 1) * per_point]
        freqs[p] = chunk[0]
        raw[p] = chunk[1:]
    if np.any(np.diff(freqs) <= 0.0):
        return None
    return freqs, raw


def read_touchstone(
    text: str,
    reference_impedance: float | None = None,
    n_ports: int | None = None,
) -> TabulatedImpedance:
    """Parse Touchstone v1 S-parameter content into an impedance provider.

    The reference impedance defaults to the option line's ``R`` entry
    (itself defaulting to 50 ohm); passing ``reference_impedance``
    overrides it.  The port count is normally inferred from the data
    layout; pass ``n_ports`` to force it for the rare grids where two
    layouts both chunk consistently.
    """
    unit = None
    fmt = "MA"
    z_opt = 50.0
    numbers: list[float] = []
    for line_no, raw_line in enumerate(text.splitlines(), start=1):
        line = raw_line.split("!", 1)[0].strip()
        if not line:
            continue
        if line.startswith("#"):
            if unit is not None:
                raise TouchstoneError(
                    f"line {line_no}: second option line not supported"
                )
            unit, fmt, z_opt = _parse_option_line(line)
            continue
        if line.startswith("["):
            raise TouchstoneError(
                f"line {line_no}: Touchstone v2 keywords not supported"
            )
        for token in line.split():
            try:
                numbers.append(float(token))
            except ValueError as exc:
                raise TouchstoneError(
                    f"line {line_no}: bad number {token!r}"
                ) from exc
    if unit is None:
        unit = 1e9  # default option line "# GHz S MA R 50"
    if not numbers:
        raise TouchstoneError("no data points found")

    if n_ports is not None:
        candidates = [n_ports]
    else:
        candidates = [1, 2, 3, 4]
    chunked = None
    for n in candidates:
        chunked = _chunk_points(numbers, n)
        if chunked is not None:
            n_found = n
            break
    if chunked is None:
        raise TouchstoneError(
            "could not lay the data out as a 1-4 port file with a strictly "
            "increasing frequency axis"
        )
    freqs, raw = chunked
    n = n_found
    z_ref = z_opt if reference_impedance is None else float(reference_impedance)
    if z_ref <= 0.0:
        raise TouchstoneError("reference impedance must be positive")

    s_all = np.empty((freqs.size, n, n), dtype=complex)
    for p in range(freqs.size):
        values = [
            _complex_from_pair(raw[p, 2 * k], raw[p, 2 * k + 1], fmt)
            for k in range(n * n)
        ]
        s = np.array(values, dtype=complex).reshape(n, n)
        if n == 2:
            # v1 two-port files store S11 S21 S12 S22 (column-major pair)
            s = s.T
        s_all[p] = s

    eye = np.eye(n)
    entries: dict[tuple[int, int], np.ndarray] = {
        (i, j): np.empty(freqs.size, dtype=complex)
        for i in range(1, n + 1)
        for j in range(i, n + 1)
    }
    for p in range(freqs.size):
        s = s_all[p]
        try:
            z = z_ref * (eye + s) @ np.linalg.inv(eye - s)
        except np.linalg.LinAlgError as exc:
            raise TouchstoneError(
                f"(I - S) singular at {freqs[p] * unit / 1e9:.6g} GHz "
                "(short-circuit-like point has no impedance matrix)"
            ) from exc
        for i in range(1, n + 1):
            for j in range(i, n + 1):
                entries[(i, j)][p] = 0.5 * (z[i - 1, j - 1] + z[j - 1, i - 1])

    return TabulatedImpedance(freqs * unit, entries, port_count=n)


def read_z_table(
    text: str,
    diagonal_fallback_c: tuple[float, ...] | None = None,
) -> TabulatedImpedance:
    """Parse the CSV impedance table format.

    Header ``freq_hz`` plus ``re_z_<i>_<j>``/``im_z_<i>_<j>`` column
    pairs; any entry may be omitted (reciprocal transposes are implied,
    absent off-diagonals read as zero, absent diagonals fall back to the
    capacitances in ``diagonal_fallback_c`` if given).
    """
    reader = csv.reader(io.StringIO(text))
    try:
        header = next(reader)
    except StopIteration:
        raise TableError("empty impedance table") from None
    header = [h.strip().lower() for h in header]
    if not header or header[0] != "freq_hz":
        raise TableError("first column must be freq_hz")
    columns: list[tuple[str, int, int]] = []
    pairs: dict[tuple[int, int], dict[str, int]] = {}
    for col, name in enumerate(header[1:], start=1):
        match = _Z_COLUMN.match(name)
        if not match:
            raise TableError(
                f"column {name!r} does not match re_z_<i>_<j>/im_z_<i>_<j>"
            )
        part, i, j = match.group(1), int(match.group(2)), int(match.group(3))
        if i < 1 or j < 1:
            raise TableError(f"column {name!r}: port indices are 1-based")
        key = (min(i, j), max(i, j))
        slot = pairs.setdefault(key, {})
        if part in slot:
            raise TableError(f"duplicate column for {part}_z_{i}_{j}")
        slot[part] = col
        columns.append((part, i, j))
    for (i, j), slot in pairs.items():
        if "re" not in slot or "im" not in slot:
            raise TableError(
                f"entry ({i}, {j}) needs both re and im columns"
            )

    rows = []
    for line_no, record in enumerate(reader, start=2):
        if not record or all(not cell.strip() for cell in record):
            continue
        if len(record) != len(header):
            raise TableError(
                f"row {line_no}: {len(record)} cells, expected {len(header)}"
            )
        try:
            rows.append([float(cell) for cell in record])
        except ValueError as exc:
            raise TableError(f"row {line_no}: non-numeric cell") from exc
    if not rows:
        raise TableError("impedance table has no data rows")
    data = np.asarray(rows)
    freq_hz = data[:, 0]
    port_count = max(max(i, j) for (i, j) in pairs)
    entries = {
        key: data[:, slot["re"]] + 1j * data[:, slot["im"]]
        for key, slot in pairs.items()
    }
    return TabulatedImpedance(
        freq_hz, entries, port_count, diagonal_fallback_c=diagonal_fallback_c
    )


def write_z_table(provider, freq_hz) -> str:
    """Sample a provider on a frequency grid and render the CSV table.

    Every upper-triangle entry is written; the output round-trips through
    :func:`read_z_table` into an interpolating provider.
    """
    freq_hz = np.asarray(freq_hz, dtype=float)
    if freq_hz.ndim != 1 or freq_hz.size < 4:
        raise ValueError("need a 1-D grid of at least 4 frequencies")
    if np.any(np.diff(freq_hz) <= 0.0):
        raise ValueError("frequency grid must be strictly increasing")
    n = provider.port_count
    buffer = io.StringIO()
    writer = csv.writer(buffer, lineterminator="\n")
    header = ["freq_hz"]
    keys = [(i, j) for i in range(1, n + 1) for j in range(i, n + 1)]
    for i, j in keys:
        header += [f"re_z_{i}_{j}", f"im_z_{i}_{j}"]
    writer.writerow(header)
    for f in freq_hz:
        z = provider.z_matrix(2.0 * math.pi * f)
        record = [f"{f:.6f}"]
        for i, j in keys:
            value = z[i - 1, j - 1]
            record += [f"{value.real:.9e}", f"{value.imag:.9e}"]
        writer.writerow(record)
    return buffer.getvalue()
