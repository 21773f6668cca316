"""Figure rendering for CLI reports.

Everything draws through the Agg backend straight to files, so the CLI
works the same over SSH, in CI and in notebooks.  The figures mirror the
delimited outputs: whatever lands in a CSV can also be rendered next to
it with ``--figures``.
"""

from __future__ import annotations

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np

from .calibrate import ORACLE, SweepRow, SweepSpec, FitResult
from .constants import TWO_PI

__all__ = [
    "sweep_figure",
    "fit_figure",
    "impedance_figure",
]

#: Method key -> (legend label, line style).  The exact reference is
#: drawn fat and dashed underneath the estimates.
_STYLES = {
    "naive": ("Naive", {"color": "tab:red", "lw": 1.2}),
    "zm0": ("ZMethod0", {"color": "tab:orange", "lw": 1.2}),
    "zmk0": ("ZMethodK0", {"color": "tab:green", "lw": 1.2}),
    "zm": ("ZMethod", {"color": "tab:blue", "lw": 1.6}),
    ORACLE: ("Exact", {"color": "black", "lw": 2.2, "ls": "--", "alpha": 0.7}),
}


def _x_axis(rows: list[SweepRow], spec: SweepSpec) -> tuple[np.ndarray, str]:
    values = np.array([row.value for row in rows])
    kind = spec.parameter.split(":", 1)[0]
    if kind in ("bus", "qubit"):
        return values / 1e9, f"{spec.parameter} (GHz)"
    return values, f"{spec.parameter} (file units)"


def sweep_figure(
    rows: list[SweepRow], spec: SweepSpec, path: str, log_scale: bool = False
) -> str:
    """ZZ rate versus the swept parameter, one curve per method, with the
    exchange coupling J in an inset.  Errored points are skipped; returns
    ``path``."""
    good = [row for row in rows if row.error is None]
    if not good:
        raise ValueError("every sweep row errored; nothing to plot")
    x_all, x_label = _x_axis(good, spec)

    fig, ax = plt.subplots(figsize=(7.0, 4.6))
    keys = [k for k in _STYLES if any(k in row.zz for row in good)]
    for key in keys:
        pts = [
            (xv, row.zz[key] / TWO_PI / 1e3)
            for xv, row in zip(x_all, good)
            if key in row.zz
        ]
        xs = np.array([p[0] for p in pts])
        ys = np.array([p[1] for p in pts])
        label, style = _STYLES[key]
        if log_scale:
            ax.plot(xs, np.abs(ys), label=label, **style)
        else:
            ax.plot(xs, ys, label=label, **style)
    if log_scale:
        ax.set_yscale("log")
        ax.set_ylabel(r"$|\omega_{ZZ}|/2\pi$ (kHz)")
    else:
        ax.axhline(0.0, color="0.6", lw=0.6)
        ax.set_ylabel(r"$\omega_{ZZ}/2\pi$ (kHz)")
    ax.set_xlabel(x_label)
    ax.legend(loc="best", fontsize=8)
    ax.grid(alpha=0.25)

    j_pts = [(xv, row.j / TWO_PI / 1e6) for xv, row in zip(x_all, good)
             if row.j is not None]
    if j_pts:
        inset = ax.inset_axes([0.62, 0.12, 0.33, 0.3])
        inset.plot([p[0] for p in j_pts], [p[1] for p in j_pts],
                   color="tab:purple", lw=1.0)
        inset.axhline(0.0, color="0.6", lw=0.5)
        inset.set_ylabel(r"$J/2\pi$ (MHz)", fontsize=7)
        inset.tick_params(labelsize=6)
        inset.grid(alpha=0.2)

    flagged = [xv for xv, row in zip(x_all, good) if row.straddling]
    if flagged and len(flagged) < len(good):
        ax.axvspan(min(flagged), max(flagged), color="tab:blue", alpha=0.06)

    fig.tight_layout()
    fig.savefig(path, dpi=160)
    plt.close(fig)
    return path


def fit_figure(
    measured_khz, predicted_khz, fit: FitResult, path: str
) -> str:
    """Measured-versus-predicted scatter with the least-squares line and
    the identity for reference; returns ``path``."""
    x = np.asarray(measured_khz, dtype=float)
    y = np.asarray(predicted_khz, dtype=float)
    fig, ax = plt.subplots(figsize=(5.2, 5.0))
    ax.scatter(x, y, s=18, color="tab:blue", zorder=3)
    span = np.array([min(x.min(), y.min()), max(x.max(), y.max())])
    pad = 0.05 * (span[1] - span[0] or 1.0)
    grid = np.linspace(span[0] - pad, span[1] + pad, 2)
    ax.plot(grid, grid, color="0.6", lw=0.8, ls=":", label="y = x")
    ax.plot(
        grid,
        fit.slope * grid + fit.intercept,
        color="tab:orange",
        lw=1.4,
        label=fit.describe(),
    )
    ax.set_xlabel("measured ZZ (kHz)")
    ax.set_ylabel("predicted ZZ (kHz)")
    ax.legend(loc="best", fontsize=8)
    ax.grid(alpha=0.25)
    ax.set_aspect("equal", adjustable="box")
    fig.tight_layout()
    fig.savefig(path, dpi=160)
    plt.close(fig)
    return path


def impedance_figure(
    provider,
    f_lo_hz: float,
    f_hi_hz: float,
    path: str,
    pair: tuple[int, int] = (1, 2),
    marks_hz: tuple[float, ...] = (),
    points: int = 600,
) -> str:
    """Reactances of the pair's impedance entries over a band, on a
    symmetric log scale so zeros and poles both show; marks (e.g. qubit
    frequencies) appear as vertical lines.  Returns ``path``."""
    i, j = pair
    freqs = np.linspace(f_lo_hz, f_hi_hz, points)
    curves: dict[str, list[float]] = {"z11": [], "z22": [], "z12": []}
    kept: list[float] = []
    for f in freqs:
        try:
            z = provider.z_matrix(TWO_PI * f)
        except Exception:
            continue  # on-resonance samples just leave a gap
        kept.append(f / 1e9)
        curves["z11"].append(z[i - 1, i - 1].imag)
        curves["z22"].append(z[j - 1, j - 1].imag)
        curves["z12"].append(z[i - 1, j - 1].imag)
    fig, ax = plt.subplots(figsize=(7.0, 4.2))
    ax.plot(kept, curves["z12"], color="tab:blue", lw=1.4,
            label=f"Im Z{i}{j}")
    ax.plot(kept, curves["z11"], color="tab:gray", lw=0.9,
            label=f"Im Z{i}{i}")
    ax.plot(kept, curves["z22"], color="tab:brown", lw=0.9,
            label=f"Im Z{j}{j}")
    ax.set_yscale("symlog", linthresh=1.0)
    ax.axhline(0.0, color="0.6", lw=0.6)
    for f_mark in marks_hz:
        ax.axvline(f_mark / 1e9, color="tab:purple", lw=0.8, ls=":")
    ax.set_xlabel("frequency (GHz)")
    ax.set_ylabel("reactance (ohm)")
    ax.legend(loc="best", fontsize=8)
    ax.grid(alpha=0.25)
    fig.tight_layout()
    fig.savefig(path, dpi=160)
    plt.close(fig)
    return path
