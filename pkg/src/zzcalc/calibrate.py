"""Junction tuning, parameter sweeps, and comparison statistics.

``tune_junction`` finds the junction inductance that puts a qubit at a
target frequency.  ``run_sweep`` traces ZZ and J against a swept circuit
parameter, re-tuning junctions at every point when targets are given, and
never lets one bad point kill the whole table.  ``least_squares_fit`` is
the ordinary least squares used to compare predicted against measured
ZZ rates.
"""

from __future__ import annotations

import csv
import io
import json
import math
from dataclasses import dataclass, field

import numpy as np

from .constants import HBAR, TWO_PI, charging_energy
from .dispersive import (
    MethodVariant,
    QubitDesign,
    _flux_weight,
    analyze_pairs,
    solve_qubit,
)
from .errors import ConvergenceError, PhysicsError, ZZCalcError
from .impedance import NodalCircuit
from .netlist import Capacitor, Inductor, Netlist, capacitive_reduction
from .oracle import (
    OracleResult,
    default_segments,
    discretize_lines,
    linear_normal_modes,
    oracle_zz,
    renormalized_linearization,
)

__all__ = [
    "ORACLE",
    "SweepSpec",
    "SweepRow",
    "FitResult",
    "tune_junction",
    "tune_oracle_junctions",
    "run_sweep",
    "sweep_to_csv",
    "sweep_to_json",
    "least_squares_fit",
]

#: Method key requesting the exact-diagonalization reference in sweeps.
ORACLE = "exact"

#: Default tuning tolerance: solved frequency within 1 kHz of target.
_TUNE_TOL_HZ = 1e3

#: Oracle convergence goal used in sweep rows (rad/s; 0.1 kHz).
_ORACLE_TOL = TWO_PI * 100.0


def tune_junction(
    provider,
    port: int,
    c_shunt: float,
    target_omega: float,
    variant: MethodVariant = MethodVariant.ZMETHOD,
    tol_hz: float = _TUNE_TOL_HZ,
    e_charging: float | None = None,
) -> float:
    """Junction inductance (H) that places the solved qubit frequency
    within ``tol_hz`` of ``target_omega``.

    The resonance condition can be inverted in closed form -- the network
    reactance at the target fixes the required loaded inductance, and the
    charging-energy renormalization maps it back to a bare value -- so the
    first candidate usually lands; a secant iteration (seeded with the
    plain 1/(w^2 C) value) polishes or recovers otherwise.
    """
    if target_omega <= 0.0:
        raise ValueError("target frequency must be positive")
    port_index = port - 1
    x_target = provider.z_matrix(target_omega)[port_index, port_index].imag
    l_loaded = -x_target / target_omega
    if l_loaded <= 0.0:
        raise ConvergenceError(
            f"network reactance at {target_omega / TWO_PI / 1e9:.4f} GHz is "
            "not capacitive; no junction inductance can resonate there"
        )
    ec = (
        charging_energy(c_shunt) if e_charging is None else e_charging
    ) / HBAR
    if variant.self_consistent:
        alpha = _flux_weight(
            provider, port_index, target_omega, math.sqrt(l_loaded / c_shunt)
        )
        ec_eff = alpha**2 * ec
    else:
        ec_eff = ec
    factor = 1.0 - 2.0 * ec_eff / target_omega
    if factor <= 0.0:
        raise ConvergenceError(
            "target frequency below twice the charging energy; not a "
            "Transmon-regime working point"
        )

    def solved_omega(l_j: float) -> float:
        return solve_qubit(
            provider,
            port,
            l_j,
            c_shunt,
            variant,
            seed_omega=target_omega,
            e_charging=e_charging,
        ).omega

    l_curr = l_loaded * factor
    err_curr = solved_omega(l_curr) - target_omega
    if abs(err_curr) <= TWO_PI * tol_hz:
        return l_curr

    l_prev = 1.0 / (target_omega**2 * c_shunt)
    if abs(l_prev - l_curr) < 1e-18 * l_curr:
        l_prev = l_curr * 1.001
    err_prev = solved_omega(l_prev) - target_omega
    for _ in range(50):
        if abs(err_curr) <= TWO_PI * tol_hz:
            return l_curr
        denom = err_curr - err_prev
        if denom == 0.0:
            raise ConvergenceError(
                f"secant stalled tuning port {port}: flat response"
            )
        l_next = l_curr - err_curr * (l_curr - l_prev) / denom
        if l_next <= 0.0:
            l_next = 0.5 * l_curr
        l_prev, err_prev = l_curr, err_curr
        l_curr = l_next
        err_curr = solved_omega(l_curr) - target_omega
    raise ConvergenceError(
        f"tuning port {port} to {target_omega / TWO_PI / 1e9:.4f} GHz did "
        "not converge in 50 secant iterations"
    )


def tune_oracle_junctions(
    netlist: Netlist,
    targets: dict[int, float],
    pair: tuple[int, int],
    l_init: dict[int, float],
    e_charging: dict[int, float] | None = None,
    levels=None,
    cosine_order: int | None = None,
    mode_max_hz: float | None = None,
    tol_hz: float = _TUNE_TOL_HZ,
    max_rounds: int = 12,
    convergence_tol: float = _ORACLE_TOL,
) -> tuple[dict[int, float], OracleResult]:
    """Retune junction inductances inside the exact model so its dressed
    0->1 frequencies hit ``targets`` (Hz, by 1-based port), then return
    the tuned inductances and the oracle result at that working point.

    Each method predicts slightly different frequencies for the same
    inductance, so comparing methods at a common *observed* working point
    requires tuning within each model; here the update
    L <- L (f/f_target)^2 converges in a few rounds.  Ports outside
    ``pair`` keep their ``l_init`` values.

    Tuning probes only need the dressed 0->1 frequencies, which converge
    in far fewer Fock levels than ZZ does (well under 10 Hz of drift by
    12 levels), so the probes run at a reduced truncation and only the
    final result pays for the full one.
    """
    l_j = dict(l_init)
    model = None
    for _ in range(max_rounds):
        lin = renormalized_linearization(
            netlist, junction_l=l_j, e_charging=e_charging
        )
        model = linear_normal_modes(
            netlist,
            junction_l=l_j,
            levels=levels,
            cosine_order=cosine_order,
            mode_max_hz=mode_max_hz,
            junction_l_linear=lin,
        )
        probe_levels = tuple(
            min(d, 12 if k in model.qubit_modes else 3)
            for k, d in enumerate(model.levels)
        )
        probe = oracle_zz(
            model.with_levels(probe_levels), pair=pair, check_convergence=False
        )
        errs = {}
        for slot, port in enumerate(pair):
            if port in targets:
                errs[port] = probe.qubit_freqs[slot] / TWO_PI - targets[port]
        if not errs or max(abs(e) for e in errs.values()) <= tol_hz:
            result = oracle_zz(
                model, convergence_tol=convergence_tol, pair=pair
            )
            return l_j, result
        for slot, port in enumerate(pair):
            if port in errs:
                f = probe.qubit_freqs[slot] / TWO_PI
                l_j[port] = l_j[port] * (f / targets[port]) ** 2
    raise ConvergenceError(
        f"exact-model tuning of ports {sorted(targets)} did not reach "
        f"{tol_hz:g} Hz in {max_rounds} rounds"
    )


@dataclass(frozen=True)
class SweepSpec:
    """One-dimensional sweep definition.

    ``parameter`` selects the swept knob:

    * ``"element:<name>"`` -- an element's principal value, in its file
      units (fF / nH / mm); start/stop in the same units;
    * ``"bus:<L-name>:<C-name>"`` -- the resonance frequency (Hz) of a
      named LC pair, realized by adjusting the inductor;
    * ``"qubit:<port>"`` -- the target frequency (Hz) of one qubit.

    ``targets`` maps 1-based ports to fixed target frequencies (Hz);
    ports absent from it keep the junction inductance given in the
    netlist (or in ``l_junctions``).  ``pair`` selects which two ports
    the reported couplings refer to.
    """

    parameter: str
    start: float
    stop: float
    points: int
    targets: dict[int, float] = field(default_factory=dict)
    pair: tuple[int, int] = (1, 2)

    def __post_init__(self):
        if self.points < 1:
            raise ValueError("points must be >= 1")
        if self.points > 1 and not (self.start < self.stop):
            raise ValueError("start must be < stop for a multi-point sweep")
        kind = self.parameter.split(":", 1)[0]
        if kind not in ("element", "bus", "qubit"):
            raise ValueError(f"unknown sweep parameter {self.parameter!r}")

    def values(self) -> list[float]:
        if self.points == 1:
            return [self.start]
        step = (self.stop - self.start) / (self.points - 1)
        return [self.start + k * step for k in range(self.points)]


@dataclass(frozen=True)
class SweepRow:
    """One sweep point.  ``zz`` maps method keys (variant values or
    ``"exact"``) to rates in rad/s; ``error`` holds the message when the
    point failed and every numeric field is then unusable."""

    value: float
    j: float | None = None
    zz: dict[str, float] = field(default_factory=dict)
    tuned_l: dict[int, float] = field(default_factory=dict)
    straddling: bool | None = None
    near_boundary: bool | None = None
    oracle_delta: float | None = None
    oracle_converged: bool | None = None
    overlap_min: float | None = None
    warnings: tuple[str, ...] = ()
    error: str | None = None

    def flags(self) -> str:
        parts = []
        if self.straddling:
            parts.append("straddling")
        if self.near_boundary:
            parts.append("near-boundary")
        if self.oracle_converged is False:
            parts.append("oracle-nonconverged")
        if self.warnings:
            parts.append("near-pole")
        if self.error is not None:
            parts.append(f"error={self.error}")
        return ";".join(parts)


def _normalize_methods(methods) -> tuple[list[MethodVariant], bool]:
    variants: list[MethodVariant] = []
    want_oracle = False
    for m in methods:
        if isinstance(m, MethodVariant):
            if m not in variants:
                variants.append(m)
        elif str(m).lower() in (ORACLE, "oracle"):
            want_oracle = True
        else:
            variants.append(MethodVariant(str(m).lower()))
    return variants, want_oracle


def _frequency_like(parameter: str) -> bool:
    return parameter.split(":", 1)[0] in ("bus", "qubit")


def run_sweep(
    source,
    spec: SweepSpec,
    methods=(MethodVariant.ZMETHOD,),
    *,
    c_shunts: dict[int, float] | None = None,
    l_junctions: dict[int, float] | None = None,
    oracle_levels=None,
    cosine_order: int | None = None,
    segments=None,
    mode_budget: int = 12,
    mode_max_hz: float | None = None,
    include_line_caps: bool = False,
) -> list[SweepRow]:
    """Trace couplings and ZZ along a one-parameter sweep.

    ``source`` is a :class:`Netlist` or any impedance provider.  Netlist
    sources derive shunt capacitances from the capacitor network and
    support the exact method; provider sources need explicit ``c_shunts``
    and support the perturbative methods only.  Junctions for ports with
    a target (from ``spec.targets`` or a ``qubit:`` parameter) are
    re-tuned at every point: the perturbative methods share the circuit
    tuned with the most accurate requested variant, while the exact
    method re-tunes within its own model, so every method is compared at
    the same observed qubit frequencies.  Failures are recorded per row.
    """
    variants, want_oracle = _normalize_methods(methods)
    if not variants and not want_oracle:
        raise ValueError("no methods requested")
    is_netlist = isinstance(source, Netlist)
    if want_oracle and not is_netlist:
        raise ValueError(
            "the exact method needs a netlist source (a circuit to "
            "diagonalize), not a bare impedance provider"
        )
    if spec.parameter.startswith(("element:", "bus:")) and not is_netlist:
        raise ValueError(f"sweep {spec.parameter!r} needs a netlist source")

    tune_variant = (
        MethodVariant.ZMETHOD
        if MethodVariant.ZMETHOD in variants or want_oracle
        else (variants[0] if variants else MethodVariant.ZMETHOD)
    )
    # The perturbative chain always needs the plain variants computed in
    # analyze_pairs; build the list passed down (order fixed for output).
    analysis_variants = tuple(v for v in MethodVariant if v in variants)

    rows: list[SweepRow] = []
    for value in spec.values():
        try:
            rows.append(
                _sweep_point(
                    source,
                    spec,
                    value,
                    analysis_variants,
                    want_oracle,
                    tune_variant,
                    c_shunts,
                    l_junctions,
                    oracle_levels,
                    cosine_order,
                    segments,
                    mode_budget,
                    mode_max_hz,
                    include_line_caps,
                )
            )
        except (ZZCalcError, ValueError) as exc:
            rows.append(SweepRow(value=value, error=str(exc)))
    return rows


def _sweep_point(
    source,
    spec: SweepSpec,
    value: float,
    variants: tuple[MethodVariant, ...],
    want_oracle: bool,
    tune_variant: MethodVariant,
    c_shunts,
    l_junctions,
    oracle_levels,
    cosine_order,
    segments,
    mode_budget,
    mode_max_hz,
    include_line_caps,
) -> SweepRow:
    is_netlist = isinstance(source, Netlist)
    targets = dict(spec.targets)

    kind, _, detail = spec.parameter.partition(":")
    netlist = source if is_netlist else None
    if kind == "element":
        netlist = netlist.with_value(detail, value)
    elif kind == "bus":
        l_name, _, c_name = detail.partition(":")
        cap = netlist.element(c_name)
        if not isinstance(cap, Capacitor):
            raise ValueError(f"{c_name!r} is not a capacitor")
        if not isinstance(netlist.element(l_name), Inductor):
            raise ValueError(f"{l_name!r} is not an inductor")
        l_h = 1.0 / ((TWO_PI * value) ** 2 * cap.farads)
        netlist = netlist.with_value(l_name, l_h / 1e-9)
    elif kind == "qubit":
        targets[int(detail)] = value

    if is_netlist:
        provider = NodalCircuit(netlist)
        c_matrix = capacitive_reduction(netlist, include_lines=include_line_caps)
        shunts = {
            p: c_matrix[p - 1, p - 1] for p in range(1, provider.port_count + 1)
        }
        bare_l = {
            p: junction.henries
            for p, junction in enumerate(netlist.junctions, start=1)
        }
    else:
        provider = source
        if c_shunts is None:
            raise ValueError("provider sources need explicit c_shunts")
        shunts = dict(c_shunts)
        bare_l = dict(l_junctions or {})

    tuned: dict[int, float] = {}
    designs: dict[int, QubitDesign] = {}
    for port in range(1, provider.port_count + 1):
        if port in targets:
            l_j = tune_junction(
                provider,
                port,
                shunts[port],
                TWO_PI * targets[port],
                variant=tune_variant,
            )
            tuned[port] = l_j
        elif port in bare_l:
            l_j = bare_l[port]
        else:
            raise ValueError(
                f"port {port} has neither a target frequency nor a fixed "
                "junction inductance"
            )
        designs[port] = QubitDesign(l_junction=l_j, c_shunt=shunts[port])

    zz: dict[str, float] = {}
    j = None
    straddling = near_boundary = None
    warnings: tuple[str, ...] = ()
    if variants:
        reports = analyze_pairs(provider, designs, variants)
        report = next(
            r
            for r in reports
            if {r.port_i, r.port_j} == set(spec.pair)
        )
        j = report.j
        straddling = report.straddling
        near_boundary = report.near_boundary
        warnings = report.warnings
        for variant, rate in report.zz.items():
            zz[variant.value] = rate

    oracle_delta = oracle_converged = overlap_min = None
    if want_oracle:
        analysis_max_hz = max(
            [targets[p] for p in targets]
            + ([value] if _frequency_like(spec.parameter) else [])
            + [1e9]
        )
        lumped = netlist
        if netlist.transmission_lines:
            seg = segments
            if seg is None:
                seg = default_segments(
                    netlist, 1.5 * analysis_max_hz, mode_budget
                )
            lumped = discretize_lines(netlist, seg)
        junction_l = {p: designs[p].l_junction for p in designs}
        ec = {p: charging_energy(shunts[p]) for p in designs}
        oracle_targets = {p: targets[p] for p in targets if p in spec.pair}
        if oracle_targets:
            _, result = tune_oracle_junctions(
                lumped,
                oracle_targets,
                spec.pair,
                junction_l,
                e_charging=ec,
                levels=oracle_levels,
                cosine_order=cosine_order,
                mode_max_hz=mode_max_hz,
            )
        else:
            model = linear_normal_modes(
                lumped,
                junction_l=junction_l,
                levels=oracle_levels,
                cosine_order=cosine_order,
                mode_max_hz=mode_max_hz,
                junction_l_linear=renormalized_linearization(
                    lumped, junction_l=junction_l, e_charging=ec
                ),
            )
            result = oracle_zz(
                model, convergence_tol=_ORACLE_TOL, pair=spec.pair
            )
        zz[ORACLE] = result.zz
        oracle_delta = result.convergence_delta
        oracle_converged = result.converged
        overlap_min = min(result.spectrum.overlap_quality.values())

    return SweepRow(
        value=value,
        j=j,
        zz=zz,
        tuned_l=tuned,
        straddling=straddling,
        near_boundary=near_boundary,
        oracle_delta=oracle_delta,
        oracle_converged=oracle_converged,
        overlap_min=overlap_min,
        warnings=warnings,
    )


_CSV_COLUMNS = (
    "param",
    "j_mhz",
    "zz_naive_khz",
    "zz_zm0_khz",
    "zz_zmk0_khz",
    "zz_zm_khz",
    "zz_exact_khz",
    "flags",
)

_METHOD_KEYS = ("naive", "zm0", "zmk0", "zm", ORACLE)


def _format_param(spec: SweepSpec, value: float) -> str:
    if _frequency_like(spec.parameter):
        return f"{value / 1e9:.6f}"
    return f"{value:.6f}"


def sweep_to_csv(rows: list[SweepRow], spec: SweepSpec) -> str:
    """Fixed-format CSV of a sweep (frequencies in GHz, J in MHz, ZZ in
    kHz; columns always present, blank when not computed)."""
    buffer = io.StringIO()
    writer = csv.writer(buffer, lineterminator="\n")
    writer.writerow(_CSV_COLUMNS)
    for row in rows:
        record = [_format_param(spec, row.value)]
        record.append("" if row.j is None else f"{row.j / TWO_PI / 1e6:.4f}")
        for key in _METHOD_KEYS:
            rate = row.zz.get(key)
            record.append("" if rate is None else f"{rate / TWO_PI / 1e3:.3f}")
        record.append(row.flags())
        writer.writerow(record)
    return buffer.getvalue()


def sweep_to_json(rows: list[SweepRow], spec: SweepSpec) -> str:
    """JSON export carrying the same content as the CSV plus diagnostics."""
    payload = []
    for row in rows:
        entry: dict = {
            "param": row.value,
            "flags": row.flags(),
        }
        if row.error is not None:
            entry["error"] = row.error
        else:
            entry["j_hz"] = None if row.j is None else row.j / TWO_PI
            entry["zz_hz"] = {
                key: rate / TWO_PI for key, rate in sorted(row.zz.items())
            }
            entry["tuned_l_nh"] = {
                str(p): l / 1e-9 for p, l in sorted(row.tuned_l.items())
            }
            if row.oracle_delta is not None:
                entry["oracle_delta_hz"] = row.oracle_delta / TWO_PI
                entry["overlap_min"] = row.overlap_min
        payload.append(entry)
    return json.dumps({"parameter": spec.parameter, "rows": payload}, indent=2)


@dataclass(frozen=True)
class FitResult:
    slope: float
    intercept: float
    sigma: float
    n: int

    def describe(self, unit: str = "kHz") -> str:
        sign = "-" if self.intercept < 0 else "+"
        return (
            f"y = {self.slope:.3f}x {sign} {abs(self.intercept):.3f}, "
            f"sigma = {self.sigma:.1f} {unit}"
        )


def least_squares_fit(x, y) -> FitResult:
    """Ordinary least squares y = a x + b with the residual standard
    deviation (population convention, matching a scatter-plot sigma)."""
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    if x.shape != y.shape or x.ndim != 1:
        raise ValueError("x and y must be 1-D arrays of equal length")
    if x.size < 2:
        raise ValueError("need at least 2 points to fit a line")
    x_mean = x.mean()
    y_mean = y.mean()
    sxx = float(((x - x_mean) ** 2).sum())
    if sxx == 0.0:
        raise ValueError("zero variance in x; slope undefined")
    slope = float(((x - x_mean) * (y - y_mean)).sum()) / sxx
    intercept = y_mean - slope * x_mean
    residuals = y - (slope * x + intercept)
    sigma = float(np.sqrt(np.mean(residuals**2)))
    return FitResult(slope=slope, intercept=intercept, sigma=sigma, n=int(x.size))
