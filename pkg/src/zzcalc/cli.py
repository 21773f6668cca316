"""Command-line front end.

Subcommands map onto the library layers: ``analyze`` reports couplings
for a device, ``sweep`` traces them along one parameter, ``oracle`` runs
the exact diagonalization once, ``calibrate`` solves junction
inductances for target frequencies, ``compare`` scores the perturbative
methods against the exact reference, and ``fit`` regresses predictions
against measured ZZ rates.

Inputs may be netlist files, Touchstone scattering files or impedance
CSV tables; outputs are CSV or JSON on stdout (or ``--out``), with
optional rendered figures via ``--figures``.  Frequencies print in GHz
(6 decimals), J in MHz (4), ZZ in kHz (3), so printed precision always
exceeds the physics tolerances.  Exit codes: 0 success, 1 a computation
failed (no resonance, no convergence, unlabelable spectrum), 2 malformed
input (bad file, bad flags).
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import os
import re
import sys

import numpy as np

from . import __version__
from .calibrate import (
    ORACLE,
    SweepSpec,
    least_squares_fit,
    run_sweep,
    sweep_to_csv,
    sweep_to_json,
    tune_junction,
    tune_oracle_junctions,
)
from .constants import H_PLANCK, TWO_PI, charging_energy
from .dispersive import MethodVariant, QubitDesign, analyze_pairs
from .errors import InputError, NetlistError, PhysicsError
from .impedance import NodalCircuit, find_network_poles
from .netlist import Netlist, capacitive_reduction, parse_netlist
from .oracle import (
    default_segments,
    discretize_lines,
    linear_normal_modes,
    oracle_zz,
    renormalized_linearization,
)
from .touchstone import read_touchstone, read_z_table, write_z_table

__all__ = ["main", "build_parser"]

#: Oracle convergence goal quoted in reports (rad/s; 0.1 kHz).
_ORACLE_TOL = TWO_PI * 100.0

_TOUCHSTONE_EXT = re.compile(r"\.s(\d)p$")


def _fixed(value: float, decimals: int) -> float:
    """Round through the printed representation so JSON numbers carry the
    same (reproducible) precision as the CSV columns."""
    return float(f"{value:.{decimals}f}")


def _ghz(omega: float) -> float:
    return _fixed(omega / TWO_PI / 1e9, 6)


def _mhz(omega: float) -> float:
    return _fixed(omega / TWO_PI / 1e6, 4)


def _khz(omega: float) -> float:
    return _fixed(omega / TWO_PI / 1e3, 3)


def _port_map(entries, scale: float, flag: str) -> dict[int, float]:
    """Parse repeated PORT=VALUE options into {port: value * scale}."""
    out: dict[int, float] = {}
    for entry in entries or []:
        port_s, sep, value_s = entry.partition("=")
        try:
            port = int(port_s)
            value = float(value_s) if sep else float("nan")
        except ValueError:
            port = -1
            value = float("nan")
        if not sep or port < 1 or not math.isfinite(value):
            raise InputError(f"{flag} expects PORT=VALUE, got {entry!r}")
        if value <= 0.0:
            raise InputError(f"{flag} {entry!r}: value must be positive")
        out[port] = value * scale
    return out


def _parse_methods(raw: str) -> list[str]:
    if raw.strip().lower() == "all":
        return [v.value for v in MethodVariant] + [ORACLE]
    keys = [k.strip().lower() for k in raw.split(",") if k.strip()]
    valid = {v.value for v in MethodVariant} | {ORACLE, "oracle"}
    for k in keys:
        if k not in valid:
            raise InputError(
                f"unknown method {k!r}; choose from "
                f"{sorted(v.value for v in MethodVariant)} + ['exact']"
            )
    if not keys:
        raise InputError("no methods requested")
    return keys


def _parse_cosine_order(raw: str) -> int | None:
    if raw == "full":
        return None
    return int(raw)


def _parse_levels(raw: str | None):
    if raw is None or raw == "auto":
        return None
    return int(raw)


class _Source:
    """A loaded impedance source plus whatever circuit detail it has."""

    def __init__(self, provider, netlist: Netlist | None, path: str):
        self.provider = provider
        self.netlist = netlist
        self.path = path


def _read_file(path: str) -> str:
    try:
        with open(path, "r", encoding="utf-8") as handle:
            return handle.read()
    except OSError as exc:
        raise InputError(f"cannot read {path}: {exc.strerror}") from exc


def _load_source(args) -> _Source:
    path = args.device
    fmt = getattr(args, "input_format", "auto")
    if fmt == "auto":
        ext = os.path.splitext(path)[1].lower()
        if _TOUCHSTONE_EXT.fullmatch(ext):
            fmt = "touchstone"
        elif ext == ".csv":
            fmt = "ztable"
        else:
            fmt = "netlist"
    text = _read_file(path)
    eps_eff = getattr(args, "eps_eff", None)
    if fmt == "netlist":
        netlist = parse_netlist(text)
        if eps_eff is not None:
            netlist = netlist.with_eps_eff(eps_eff)
        return _Source(NodalCircuit(netlist), netlist, path)
    if eps_eff is not None:
        raise InputError("--eps-eff only applies to netlist sources")
    if fmt == "touchstone":
        match = _TOUCHSTONE_EXT.search(path.lower())
        n_ports = int(match.group(1)) if match else None
        return _Source(read_touchstone(text, n_ports=n_ports), None, path)
    if fmt == "ztable":
        provider = read_z_table(text)
        c_map = _port_map(getattr(args, "c_shunt", None), 1e-15, "--c-shunt")
        if c_map and all(p in c_map for p in range(1, provider.port_count + 1)):
            fallback = tuple(
                c_map[p] for p in range(1, provider.port_count + 1)
            )
            provider = read_z_table(text, diagonal_fallback_c=fallback)
        return _Source(provider, None, path)
    raise InputError(f"unknown input format {fmt!r}")


def _shunt_capacitances(source: _Source, args) -> dict[int, float]:
    """Total shunt capacitance per port: derived from the capacitor
    network for circuit sources, explicit ``--c-shunt`` otherwise."""
    ports = range(1, source.provider.port_count + 1)
    overrides = _port_map(getattr(args, "c_shunt", None), 1e-15, "--c-shunt")
    if source.netlist is not None:
        c_matrix = capacitive_reduction(
            source.netlist,
            include_lines=getattr(args, "include_line_caps", False),
        )
        return {p: overrides.get(p, c_matrix[p - 1, p - 1]) for p in ports}
    missing = [p for p in ports if p not in overrides]
    if missing:
        raise InputError(
            f"--c-shunt PORT=<fF> required for ports {missing} "
            "(no circuit to derive shunts from)"
        )
    return {p: overrides[p] for p in ports}


def _resolve_designs(
    source: _Source,
    args,
    shunts: dict[int, float],
    tune_variant: MethodVariant,
) -> tuple[dict[int, QubitDesign], dict[int, float], dict[int, float]]:
    """(designs, tuned inductances, target frequencies) for every port."""
    targets = _port_map(getattr(args, "target", None), 1e9, "--target")
    lj_over = _port_map(getattr(args, "lj", None), 1e-9, "--lj")
    file_l = {}
    if source.netlist is not None:
        file_l = {
            p: junction.henries
            for p, junction in enumerate(source.netlist.junctions, start=1)
        }
    designs: dict[int, QubitDesign] = {}
    tuned: dict[int, float] = {}
    for port in range(1, source.provider.port_count + 1):
        if port in targets:
            l_j = tune_junction(
                source.provider,
                port,
                shunts[port],
                TWO_PI * targets[port],
                variant=tune_variant,
            )
            tuned[port] = l_j
        elif port in lj_over:
            l_j = lj_over[port]
        elif port in file_l:
            l_j = file_l[port]
        else:
            raise InputError(
                f"port {port} needs --target or --lj (source carries no "
                "junction inductance)"
            )
        designs[port] = QubitDesign(l_junction=l_j, c_shunt=shunts[port])
    return designs, tuned, targets


def _write_output(text: str, out: str | None) -> None:
    if out in (None, "-"):
        sys.stdout.write(text)
        if not text.endswith("\n"):
            sys.stdout.write("\n")
    else:
        with open(out, "w", encoding="utf-8") as handle:
            handle.write(text)


def _figure_dir(args) -> str | None:
    directory = getattr(args, "figures", None)
    if directory is not None:
        os.makedirs(directory, exist_ok=True)
    return directory


def _qubit_json(params, l_bare: float) -> dict:
    return {
        "f_ghz": _ghz(params.omega),
        "lj_nh": _fixed(l_bare / 1e-9, 6),
        "c_shunt_ff": _fixed(params.c_shunt / 1e-15, 3),
        "ec_mhz": _fixed(params.e_charging / H_PLANCK / 1e6, 4),
        "anharmonicity_mhz": _mhz(params.anharmonicity),
        "flux_weight": _fixed(params.flux_weight, 6),
        "z_char_ohm": _fixed(params.z_char, 3),
        "residual_hz": _fixed(params.residual_hz, 3),
    }


def cmd_analyze(args) -> int:
    source = _load_source(args)
    variant_keys = [
        k for k in _parse_methods(args.methods) if k not in (ORACLE, "oracle")
    ]
    variants = tuple(v for v in MethodVariant if v.value in variant_keys)
    if not variants:
        raise InputError("analyze needs at least one perturbative method")
    tune_variant = (
        MethodVariant.ZMETHOD
        if MethodVariant.ZMETHOD in variants
        else variants[0]
    )
    if source.provider.port_count < 2:
        raise InputError("analyze needs at least two qubit ports")
    shunts = _shunt_capacitances(source, args)
    designs, tuned, targets = _resolve_designs(
        source, args, shunts, tune_variant
    )
    reports = analyze_pairs(source.provider, designs, variants)

    qubits: dict[int, dict] = {}
    for report in reports:
        for port, params, params_sc in (
            (report.port_i, report.qubit_i, report.qubit_i_sc),
            (report.port_j, report.qubit_j, report.qubit_j_sc),
        ):
            if port not in qubits:
                best = params_sc if params_sc is not None else params
                qubits[port] = _qubit_json(best, designs[port].l_junction)

    pairs_json = []
    for report in reports:
        pairs_json.append(
            {
                "ports": [report.port_i, report.port_j],
                "delta_mhz": _mhz(report.detuning),
                "j_mhz": _mhz(report.j),
                "alpha_ij": _fixed(report.couplings.cross_weight_ij, 6),
                "alpha_ji": _fixed(report.couplings.cross_weight_ji, 6),
                "zz_khz": {
                    variant.value: _khz(rate)
                    for variant, rate in sorted(
                        report.zz.items(), key=lambda kv: kv[0].value
                    )
                },
                "straddling": bool(report.straddling),
                "near_boundary": bool(report.near_boundary),
                "warnings": list(report.warnings),
            }
        )

    poles_ghz = None
    f_all = [qubits[p]["f_ghz"] for p in qubits]
    band = (min(f_all) * 0.5e9, max(f_all) * 1.6e9)
    if source.netlist is not None:
        poles_ghz = [
            _fixed(p / 1e9, 6)
            for p in find_network_poles(source.provider, band[0], band[1])
        ]

    if args.export_z is not None:
        grid = np.linspace(band[0], band[1], args.export_points)
        _write_output(write_z_table(source.provider, grid), args.export_z)

    directory = _figure_dir(args)
    if directory is not None:
        from .plotting import impedance_figure

        impedance_figure(
            source.provider,
            band[0],
            band[1],
            os.path.join(directory, "impedance.png"),
            pair=(min(qubits), max(qubits)),
            marks_hz=tuple(f * 1e9 for f in f_all),
        )

    if args.format == "json":
        payload = {
            "source": source.path,
            "methods": [v.value for v in variants],
            "qubits": {str(p): qubits[p] for p in sorted(qubits)},
            "tuned_lj_nh": {
                str(p): _fixed(l / 1e-9, 6) for p, l in sorted(tuned.items())
            },
            "pairs": pairs_json,
        }
        if poles_ghz is not None:
            payload["network_poles_ghz"] = poles_ghz
        _write_output(json.dumps(payload, indent=2), args.out)
    else:
        buffer = io.StringIO()
        writer = csv.writer(buffer, lineterminator="\n")
        writer.writerow(
            [
                "port_i",
                "port_j",
                "f_i_ghz",
                "f_j_ghz",
                "j_mhz",
                "zz_naive_khz",
                "zz_zm0_khz",
                "zz_zmk0_khz",
                "zz_zm_khz",
                "flags",
            ]
        )
        for report, pair_json in zip(reports, pairs_json):
            flags = []
            if report.straddling:
                flags.append("straddling")
            if report.near_boundary:
                flags.append("near-boundary")
            if report.warnings:
                flags.append("near-pole")
            zz = pair_json["zz_khz"]
            writer.writerow(
                [
                    report.port_i,
                    report.port_j,
                    f"{qubits[report.port_i]['f_ghz']:.6f}",
                    f"{qubits[report.port_j]['f_ghz']:.6f}",
                    f"{pair_json['j_mhz']:.4f}",
                ]
                + [
                    ("" if v.value not in zz else f"{zz[v.value]:.3f}")
                    for v in MethodVariant
                ]
                + [";".join(flags)]
            )
        _write_output(buffer.getvalue(), args.out)
    return 0


def _build_sweep_spec(args) -> SweepSpec:
    kind = args.param.split(":", 1)[0]
    scale = 1e9 if kind in ("bus", "qubit") else 1.0
    targets = _port_map(getattr(args, "target", None), 1e9, "--target")
    try:
        return SweepSpec(
            parameter=args.param,
            start=args.start * scale,
            stop=args.stop * scale,
            points=args.points,
            targets=targets,
            pair=tuple(args.pair),
        )
    except ValueError as exc:
        raise InputError(str(exc)) from exc


def _run_sweep_command(args, methods: list[str]):
    source = _load_source(args)
    spec = _build_sweep_spec(args)
    kwargs = {}
    if source.netlist is None:
        shunts = _shunt_capacitances(source, args)
        kwargs["c_shunts"] = shunts
        kwargs["l_junctions"] = _port_map(
            getattr(args, "lj", None), 1e-9, "--lj"
        )
    rows = run_sweep(
        source.netlist if source.netlist is not None else source.provider,
        spec,
        methods=methods,
        oracle_levels=_parse_levels(args.levels),
        cosine_order=_parse_cosine_order(args.cosine_order),
        segments=args.segments,
        mode_budget=args.mode_budget,
        mode_max_hz=None if args.mode_max is None else args.mode_max * 1e9,
        include_line_caps=getattr(args, "include_line_caps", False),
        **kwargs,
    )
    return source, spec, rows


def cmd_sweep(args) -> int:
    methods = _parse_methods(args.methods)
    source, spec, rows = _run_sweep_command(args, methods)
    if args.plot_data is not None:
        _write_output(sweep_to_csv(rows, spec), args.plot_data)
    directory = _figure_dir(args)
    if directory is not None:
        from .plotting import sweep_figure

        sweep_figure(
            rows, spec, os.path.join(directory, "sweep.png"),
            log_scale=args.log_figure,
        )
    if args.format == "json":
        _write_output(sweep_to_json(rows, spec), args.out)
    else:
        _write_output(sweep_to_csv(rows, spec), args.out)
    return 0


def cmd_compare(args) -> int:
    methods = [v.value for v in MethodVariant] + [ORACLE]
    source, spec, rows = _run_sweep_command(args, methods)

    errors: dict[str, list[float]] = {v.value: [] for v in MethodVariant}
    errored = 0
    for row in rows:
        if row.error is not None or ORACLE not in row.zz:
            errored += 1
            continue
        exact = row.zz[ORACLE]
        for key in errors:
            if key in row.zz:
                errors[key].append(abs(row.zz[key] - exact))
    summary = {
        "points": len(rows),
        "errored": errored,
        "median_abs_err_khz": {
            key: (_khz(float(np.median(vals))) if vals else None)
            for key, vals in errors.items()
        },
        "max_abs_err_khz": {
            key: (_khz(float(np.max(vals))) if vals else None)
            for key, vals in errors.items()
        },
    }
    med = summary["median_abs_err_khz"]
    if all(med[k] is not None for k in ("naive", "zm0", "zmk0", "zm")):
        summary["ordering_zm_zmk0_zm0_naive"] = bool(
            med["zm"] <= med["zmk0"] <= med["zm0"] < med["naive"]
        )

    if args.plot_data is not None:
        _write_output(sweep_to_csv(rows, spec), args.plot_data)
    directory = _figure_dir(args)
    if directory is not None:
        from .plotting import sweep_figure

        sweep_figure(
            rows, spec, os.path.join(directory, "compare.png"), log_scale=True
        )

    if args.format == "csv":
        base = sweep_to_csv(rows, spec).splitlines()
        out_lines = [base[0] + ",err_naive_khz,err_zm0_khz,err_zmk0_khz,err_zm_khz"]
        for line, row in zip(base[1:], rows):
            cells = []
            for key in ("naive", "zm0", "zmk0", "zm"):
                if row.error is None and key in row.zz and ORACLE in row.zz:
                    cells.append(f"{abs(row.zz[key] - row.zz[ORACLE]) / TWO_PI / 1e3:.3f}")
                else:
                    cells.append("")
            out_lines.append(line + "," + ",".join(cells))
        _write_output("\n".join(out_lines) + "\n", args.out)
    else:
        payload = json.loads(sweep_to_json(rows, spec))
        payload["summary"] = summary
        _write_output(json.dumps(payload, indent=2), args.out)
    return 0


def cmd_oracle(args) -> int:
    source = _load_source(args)
    if source.netlist is None:
        raise InputError(
            "the exact method needs a circuit netlist (a Hamiltonian to "
            "diagonalize), not a bare impedance response"
        )
    netlist = source.netlist
    pair = tuple(args.pair)
    targets = _port_map(getattr(args, "target", None), 1e9, "--target")
    lj_over = _port_map(getattr(args, "lj", None), 1e-9, "--lj")
    c_matrix = capacitive_reduction(
        netlist, include_lines=args.include_line_caps
    )
    n_ports = len(netlist.junctions)
    shunts = {p: c_matrix[p - 1, p - 1] for p in range(1, n_ports + 1)}
    e_charging = {p: charging_energy(shunts[p]) for p in shunts}
    junction_l = {
        p: lj_over.get(p, junction.henries)
        for p, junction in enumerate(netlist.junctions, start=1)
    }

    analysis_max_hz = max(list(targets.values()) + [1e9])
    lumped = netlist
    segments_used = None
    if netlist.transmission_lines:
        segments_used = args.segments
        if segments_used is None:
            segments_used = default_segments(
                netlist, 1.5 * analysis_max_hz, args.mode_budget
            )
        lumped = discretize_lines(netlist, segments_used)

    levels = _parse_levels(args.levels)
    cosine_order = _parse_cosine_order(args.cosine_order)
    mode_max_hz = None if args.mode_max is None else args.mode_max * 1e9

    if targets:
        junction_l, result = tune_oracle_junctions(
            lumped,
            targets,
            pair,
            junction_l,
            e_charging=e_charging,
            levels=levels,
            cosine_order=cosine_order,
            mode_max_hz=mode_max_hz,
        )
        model = None
    else:
        model = linear_normal_modes(
            lumped,
            junction_l=junction_l,
            levels=levels,
            cosine_order=cosine_order,
            mode_max_hz=mode_max_hz,
            junction_l_linear=renormalized_linearization(
                lumped, junction_l=junction_l, e_charging=e_charging
            ),
        )
        result = oracle_zz(model, convergence_tol=_ORACLE_TOL, pair=pair)

    payload = {
        "source": source.path,
        "pair": list(pair),
        "zz_khz": _khz(result.zz),
        "qubit_freqs_ghz": [_ghz(f) for f in result.qubit_freqs],
        "convergence_bump_hz": (
            None
            if result.convergence_delta is None
            else _fixed(result.convergence_delta / TWO_PI, 3)
        ),
        "converged": bool(result.converged),
        "hilbert_dimension": int(result.dimension),
        "cosine_order": "full" if cosine_order is None else cosine_order,
        "junction_l_nh": {
            str(p): _fixed(l / 1e-9, 6) for p, l in sorted(junction_l.items())
        },
        "min_label_overlap": _fixed(
            min(result.spectrum.overlap_quality.values()), 4
        ),
    }
    if segments_used is not None:
        payload["segments"] = (
            segments_used
            if isinstance(segments_used, int)
            else {name: int(n) for name, n in sorted(segments_used.items())}
        )
    _write_output(json.dumps(payload, indent=2), args.out)
    return 0


def cmd_calibrate(args) -> int:
    source = _load_source(args)
    targets = _port_map(getattr(args, "target", None), 1e9, "--target")
    if not targets:
        raise InputError("calibrate needs at least one --target PORT=GHZ")
    shunts = _shunt_capacitances(source, args)

    results: dict[int, dict] = {}
    if args.oracle:
        if source.netlist is None:
            raise InputError("--oracle calibration needs a netlist source")
        if len(targets) != 2:
            raise InputError(
                "--oracle calibration tunes exactly two targeted ports"
            )
        pair = tuple(sorted(targets))
        netlist = source.netlist
        lumped = netlist
        if netlist.transmission_lines:
            segments = args.segments
            if segments is None:
                segments = default_segments(
                    netlist, 1.5 * max(targets.values()), args.mode_budget
                )
            lumped = discretize_lines(netlist, segments)
        junction_l = {
            p: junction.henries
            for p, junction in enumerate(netlist.junctions, start=1)
        }
        e_charging = {p: charging_energy(c) for p, c in shunts.items()}
        tuned, result = tune_oracle_junctions(
            lumped,
            targets,
            pair,
            junction_l,
            e_charging=e_charging,
            levels=_parse_levels(args.levels),
            cosine_order=_parse_cosine_order(args.cosine_order),
            mode_max_hz=None if args.mode_max is None else args.mode_max * 1e9,
        )
        achieved = dict(zip(pair, result.qubit_freqs))
        for port in pair:
            results[port] = {
                "target_ghz": _fixed(targets[port] / 1e9, 6),
                "lj_nh": _fixed(tuned[port] / 1e-9, 6),
                "achieved_ghz": _ghz(achieved[port]),
                "residual_hz": _fixed(
                    achieved[port] / TWO_PI - targets[port], 1
                ),
            }
        method = "exact"
    else:
        variant = MethodVariant(args.variant)
        from .dispersive import solve_qubit

        for port in sorted(targets):
            l_j = tune_junction(
                source.provider,
                port,
                shunts[port],
                TWO_PI * targets[port],
                variant=variant,
            )
            solved = solve_qubit(
                source.provider, port, l_j, shunts[port], variant
            )
            results[port] = {
                "target_ghz": _fixed(targets[port] / 1e9, 6),
                "lj_nh": _fixed(l_j / 1e-9, 6),
                "achieved_ghz": _ghz(solved.omega),
                "residual_hz": _fixed(
                    solved.omega / TWO_PI - targets[port], 1
                ),
            }
        method = variant.value

    if args.format == "csv":
        buffer = io.StringIO()
        writer = csv.writer(buffer, lineterminator="\n")
        writer.writerow(
            ["port", "target_ghz", "lj_nh", "achieved_ghz", "residual_hz"]
        )
        for port in sorted(results):
            r = results[port]
            writer.writerow(
                [
                    port,
                    f"{r['target_ghz']:.6f}",
                    f"{r['lj_nh']:.6f}",
                    f"{r['achieved_ghz']:.6f}",
                    f"{r['residual_hz']:.1f}",
                ]
            )
        _write_output(buffer.getvalue(), args.out)
    else:
        payload = {
            "source": source.path,
            "method": method,
            "ports": {str(p): results[p] for p in sorted(results)},
        }
        _write_output(json.dumps(payload, indent=2), args.out)
    return 0


def _predict_zz_khz(
    zfile: str,
    f1_hz: float,
    f2_hz: float,
    c_map: dict[int, float],
    cache: dict[str, object],
) -> float:
    if zfile not in cache:
        ext = os.path.splitext(zfile)[1].lower()
        text = _read_file(zfile)
        if _TOUCHSTONE_EXT.fullmatch(ext):
            cache[zfile] = read_touchstone(
                text, n_ports=int(ext[2])
            )
        else:
            fallback = None
            if c_map and 1 in c_map and 2 in c_map:
                fallback = (c_map[1], c_map[2])
            cache[zfile] = read_z_table(text, diagonal_fallback_c=fallback)
    provider = cache[zfile]
    designs = {}
    for port, f_hz in ((1, f1_hz), (2, f2_hz)):
        if port not in c_map:
            raise InputError(
                f"--c-shunt {port}=<fF> required to predict from {zfile}"
            )
        l_j = tune_junction(
            provider, port, c_map[port], TWO_PI * f_hz,
            variant=MethodVariant.ZMETHOD,
        )
        designs[port] = QubitDesign(l_junction=l_j, c_shunt=c_map[port])
    report = analyze_pairs(
        provider, designs, (MethodVariant.ZMETHOD,)
    )[0]
    return report.zz[MethodVariant.ZMETHOD] / TWO_PI / 1e3


def cmd_fit(args) -> int:
    text = _read_file(args.records)
    reader = csv.DictReader(io.StringIO(text))
    if reader.fieldnames is None:
        raise InputError("records file is empty")
    fields = [f.strip().lower() for f in reader.fieldnames]
    reader.fieldnames = fields
    if "pair" not in fields or "measured_zz_khz" not in fields:
        raise InputError(
            "records need at least 'pair' and 'measured_zz_khz' columns"
        )
    have_predicted = "predicted_zz_khz" in fields
    if not have_predicted:
        for needed in ("f1_ghz", "f2_ghz", "zfile"):
            if needed not in fields:
                raise InputError(
                    "records without a predicted_zz_khz column need "
                    "f1_ghz, f2_ghz and zfile columns"
                )
    c_map = _port_map(getattr(args, "c_shunt", None), 1e-15, "--c-shunt")
    base_dir = os.path.dirname(os.path.abspath(args.records))
    cache: dict[str, object] = {}

    records = []
    for line_no, row in enumerate(reader, start=2):
        try:
            measured = float(row["measured_zz_khz"])
        except (TypeError, ValueError):
            raise InputError(
                f"row {line_no}: bad measured_zz_khz value"
            ) from None
        if have_predicted:
            try:
                predicted = float(row["predicted_zz_khz"])
            except (TypeError, ValueError):
                raise InputError(
                    f"row {line_no}: bad predicted_zz_khz value"
                ) from None
        else:
            zfile = row["zfile"].strip()
            if not os.path.isabs(zfile):
                zfile = os.path.join(base_dir, zfile)
            predicted = _predict_zz_khz(
                zfile,
                float(row["f1_ghz"]) * 1e9,
                float(row["f2_ghz"]) * 1e9,
                c_map,
                cache,
            )
        records.append((row["pair"], measured, predicted))
    if len(records) < 2:
        raise InputError("need at least 2 records to fit")

    x = [r[1] for r in records]
    y = [r[2] for r in records]
    try:
        fit = least_squares_fit(x, y)
    except ValueError as exc:
        raise InputError(str(exc)) from exc

    directory = _figure_dir(args)
    if directory is not None:
        from .plotting import fit_figure

        fit_figure(x, y, fit, os.path.join(directory, "fit.png"))

    if args.format == "csv":
        buffer = io.StringIO()
        writer = csv.writer(buffer, lineterminator="\n")
        writer.writerow(["pair", "measured_zz_khz", "predicted_zz_khz"])
        for pair_id, measured, predicted in records:
            writer.writerow([pair_id, f"{measured:.3f}", f"{predicted:.3f}"])
        _write_output(buffer.getvalue(), args.out)
        print(fit.describe(), file=sys.stderr)
    else:
        payload = {
            "n": fit.n,
            "slope": _fixed(fit.slope, 6),
            "intercept_khz": _fixed(fit.intercept, 6),
            "sigma_khz": _fixed(fit.sigma, 6),
            "line": fit.describe(),
            "records": [
                {
                    "pair": pair_id,
                    "measured_zz_khz": _fixed(measured, 3),
                    "predicted_zz_khz": _fixed(predicted, 3),
                }
                for pair_id, measured, predicted in records
            ],
        }
        _write_output(json.dumps(payload, indent=2), args.out)
    return 0


def _add_output_options(parser: argparse.ArgumentParser, default_format: str):
    parser.add_argument(
        "--out", default=None, metavar="PATH",
        help="write the report here instead of stdout",
    )
    parser.add_argument(
        "--format", choices=("csv", "json"), default=default_format,
        help=f"report format (default {default_format})",
    )
    parser.add_argument(
        "--figures", default=None, metavar="DIR",
        help="also render figures into this directory",
    )


def _add_source_options(parser: argparse.ArgumentParser):
    parser.add_argument(
        "device",
        help="netlist (.nl), Touchstone (.s1p-.s4p) or impedance CSV",
    )
    parser.add_argument(
        "--input-format", choices=("auto", "netlist", "touchstone", "ztable"),
        default="auto", help="override input detection by extension",
    )
    parser.add_argument(
        "--eps-eff", type=float, default=None, metavar="X",
        help="replace every line's effective dielectric constant",
    )
    parser.add_argument(
        "--c-shunt", action="append", metavar="PORT=FF",
        help="shunt capacitance override (fF); required for non-netlist "
        "sources",
    )
    parser.add_argument(
        "--lj", action="append", metavar="PORT=NH",
        help="junction inductance (nH) for ports without a --target",
    )
    parser.add_argument(
        "--target", action="append", metavar="PORT=GHZ",
        help="tune this port's junction to the given frequency",
    )
    parser.add_argument(
        "--include-line-caps", action="store_true",
        help="lump half of each line's static capacitance into the shunts",
    )


def _add_oracle_options(parser: argparse.ArgumentParser):
    parser.add_argument(
        "--levels", default=None, metavar="N",
        help="Fock levels per mode for the exact method (default auto)",
    )
    parser.add_argument(
        "--cosine-order", choices=("4", "6", "full"), default="full",
        help="junction potential treatment for the exact method",
    )
    parser.add_argument(
        "--segments", type=int, default=None, metavar="N",
        help="LC segments per transmission line (default auto)",
    )
    parser.add_argument(
        "--mode-budget", type=int, default=12, metavar="N",
        help="total mode budget when discretizing lines",
    )
    parser.add_argument(
        "--mode-max", type=float, default=None, metavar="GHZ",
        help="drop circuit modes above this frequency",
    )


def _add_sweep_options(parser: argparse.ArgumentParser):
    parser.add_argument(
        "--param", required=True,
        help="sweep knob: element:<name>, bus:<L>:<C> or qubit:<port>",
    )
    parser.add_argument(
        "--from", dest="start", type=float, required=True,
        help="sweep start (GHz for bus:/qubit:, file units otherwise)",
    )
    parser.add_argument(
        "--to", dest="stop", type=float, required=True,
        help="sweep stop (same units as --from)",
    )
    parser.add_argument("--points", type=int, required=True)
    parser.add_argument(
        "--pair", type=int, nargs=2, default=(1, 2), metavar=("I", "J"),
        help="qubit pair the report refers to (default 1 2)",
    )
    parser.add_argument(
        "--plot-data", default=None, metavar="PATH",
        help="also write the figure-axis CSV here",
    )
    parser.add_argument(
        "--log-figure", action="store_true",
        help="draw the ZZ figure on a log magnitude axis",
    )


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="zzcalc",
        description="Exchange couplings and ZZ rates of Transmon qubits "
        "from the impedance response of their coupling network.",
    )
    parser.add_argument(
        "--version", action="version", version=f"%(prog)s {__version__}"
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_analyze = sub.add_parser(
        "analyze", help="couplings and ZZ for every qubit pair of a device"
    )
    _add_source_options(p_analyze)
    p_analyze.add_argument(
        "--methods", default="naive,zm0,zmk0,zm",
        help="comma-separated method list (default all perturbative)",
    )
    p_analyze.add_argument(
        "--export-z", default=None, metavar="PATH",
        help="also export the sampled impedance table here",
    )
    p_analyze.add_argument(
        "--export-points", type=int, default=801,
        help="grid size for --export-z (default 801)",
    )
    _add_output_options(p_analyze, "json")
    p_analyze.set_defaults(func=cmd_analyze)

    p_sweep = sub.add_parser(
        "sweep", help="trace couplings along one swept parameter"
    )
    _add_source_options(p_sweep)
    _add_sweep_options(p_sweep)
    p_sweep.add_argument(
        "--methods", default="naive,zm0,zmk0,zm",
        help="comma-separated methods; add 'exact' for the oracle, or "
        "'all'",
    )
    _add_oracle_options(p_sweep)
    _add_output_options(p_sweep, "csv")
    p_sweep.set_defaults(func=cmd_sweep)

    p_oracle = sub.add_parser(
        "oracle", help="one exact-diagonalization ZZ evaluation"
    )
    _add_source_options(p_oracle)
    p_oracle.add_argument(
        "--pair", type=int, nargs=2, default=(1, 2), metavar=("I", "J")
    )
    _add_oracle_options(p_oracle)
    _add_output_options(p_oracle, "json")
    p_oracle.set_defaults(func=cmd_oracle)

    p_cal = sub.add_parser(
        "calibrate", help="solve junction inductances for target frequencies"
    )
    _add_source_options(p_cal)
    p_cal.add_argument(
        "--variant", choices=[v.value for v in MethodVariant], default="zm",
        help="qubit model used while tuning (default zm)",
    )
    p_cal.add_argument(
        "--oracle", action="store_true",
        help="tune inside the exact model instead (two targets required)",
    )
    _add_oracle_options(p_cal)
    _add_output_options(p_cal, "json")
    p_cal.set_defaults(func=cmd_calibrate)

    p_cmp = sub.add_parser(
        "compare", help="score every method against the exact reference"
    )
    _add_source_options(p_cmp)
    _add_sweep_options(p_cmp)
    _add_oracle_options(p_cmp)
    _add_output_options(p_cmp, "json")
    p_cmp.set_defaults(func=cmd_compare)

    p_fit = sub.add_parser(
        "fit", help="least-squares comparison of predictions to measurements"
    )
    p_fit.add_argument(
        "records",
        help="CSV with pair,measured_zz_khz and either predicted_zz_khz "
        "or f1_ghz,f2_ghz,zfile columns",
    )
    p_fit.add_argument(
        "--c-shunt", action="append", metavar="PORT=FF",
        help="shunt capacitances used when predicting from zfile sources",
    )
    _add_output_options(p_fit, "json")
    p_fit.set_defaults(func=cmd_fit)

    return parser


def _emit_error(exc: Exception, code: int) -> int:
    payload: dict = {"error": type(exc).__name__, "message": str(exc)}
    line = getattr(exc, "line", None)
    if line is not None:
        payload["line"] = line
    print(json.dumps(payload), file=sys.stderr)
    return code


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except InputError as exc:
        return _emit_error(exc, 2)
    except PhysicsError as exc:
        return _emit_error(exc, 1)
    except (ValueError, OSError) as exc:
        return _emit_error(exc, 2)


if __name__ == "__main__":
    sys.exit(main())
