"""Perturbative qubit parameters, exchange couplings, and ZZ rates derived
directly from the multiport impedance of the coupling network.

The chain of quantities is:

1. each qubit's dressed frequency from the parallel-resonance condition
   Im[Z_ii(w)] + w L_i(w) = 0, with the junction inductance renormalized by
   the charging energy, L_i(w) = L_Ji / (1 - 2 E_C / (hbar w));
2. the transverse exchange coupling J between two qubits from the
   trans-impedance sampled at both qubit frequencies;
3. corrected couplings of the second excited states (|20> and |02> to
   |11>), which differ from J by anharmonicity-dependent factors;
4. the ZZ rate, assembled in four variants of increasing fidelity:

   * ``NAIVE`` -- textbook second-order formula with the bare J;
   * ``ZMETHOD0`` -- the corrected couplings in the second-order formula;
   * ``ZMETHODK0`` -- adds the direct (cross-Kerr) contribution;
   * ``ZMETHOD`` -- same expression, but the whole qubit chain is
     re-solved with the junction-flux weight alpha_ii folded into the
     charging energy, making frequency and anharmonicity self-consistent.

All frequencies are angular (rad/s) inside this module.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum

import numpy as np
from scipy.optimize import brentq

from .constants import HBAR, TWO_PI, charging_energy
from .errors import (
    ConvergenceError,
    DegeneracyError,
    ExtrapolationError,
    PoleProximityError,
    StampSingularityError,
)
from .impedance import impedance_derivative

__all__ = [
    "MethodVariant",
    "QubitDesign",
    "QubitParams",
    "PairCouplings",
    "CouplingReport",
    "solve_qubit",
    "exchange_coupling",
    "coupling_corrections",
    "zz_rate",
    "analyze_pairs",
    "STRADDLING_BOUNDARY_RATIO",
]

#: Angular-frequency tolerance of the resonance root search (rad/s);
#: corresponds to well under 1 Hz.
_OMEGA_TOL = 1.0

#: Fixed-point tolerance on the junction-flux weight alpha_ii.  The
#: resonance root is only located to _OMEGA_TOL, which jitters alpha at
#: the 1e-10 level, so demanding more than this would never settle.
_ALPHA_TOL = 1e-9

#: Flux weights a qubit-like root may plausibly have; roots outside are
#: network resonances masquerading as qubit modes.
_ALPHA_SANE = (0.0, 1.2)

#: Qubit pairs closer than this (rad/s) are rejected as degenerate.
_DEGENERACY_GUARD = TWO_PI * 1e3

#: ZZ denominators closer than this (rad/s) to zero get a warning.
_POLE_WARN = TWO_PI * 1e4

#: A pair is flagged "near the straddling boundary" when the smaller ZZ
#: denominator drops below this fraction of the smaller anharmonicity.
STRADDLING_BOUNDARY_RATIO = 0.4


class MethodVariant(str, Enum):
    """The four ZZ estimation methods; values are the short column keys
    used in sweep tables."""

    NAIVE = "naive"
    ZMETHOD0 = "zm0"
    ZMETHODK0 = "zmk0"
    ZMETHOD = "zm"

    @property
    def label(self) -> str:
        return {
            MethodVariant.NAIVE: "Naive",
            MethodVariant.ZMETHOD0: "ZMethod0",
            MethodVariant.ZMETHODK0: "ZMethodK0",
            MethodVariant.ZMETHOD: "ZMethod",
        }[self]

    @property
    def self_consistent(self) -> bool:
        """True if the qubit chain folds alpha_ii into the charging energy."""
        return self is MethodVariant.ZMETHOD


@dataclass(frozen=True)
class QubitDesign:
    """Physical inputs for one qubit port: junction inductance (H) and
    total shunt capacitance (F)."""

    l_junction: float
    c_shunt: float


@dataclass(frozen=True)
class QubitParams:
    """Solved parameters of one qubit.

    ``anharmonicity`` and ``l_eff`` use the plain charging energy for the
    base variants and the alpha_ii-weighted one for the self-consistent
    variant; ``flux_weight`` is alpha_ii evaluated at the solved frequency
    either way.
    """

    port: int
    omega: float
    l_junction: float
    c_shunt: float
    e_charging: float
    l_eff: float
    anharmonicity: float
    flux_weight: float
    z_char: float
    variant: MethodVariant
    residual_hz: float

    @property
    def f_ghz(self) -> float:
        return self.omega / TWO_PI / 1e9


@dataclass(frozen=True)
class PairCouplings:
    """Exchange couplings of a qubit pair (all rad/s except the weights).

    ``j`` couples |10> and |01>; ``j_upper_i`` couples |20> and |11>
    (over sqrt(2)), ``j_upper_j`` likewise for |02>.  The cross flux
    weights give the participation of each qubit's mode in the other
    junction's phase; ``upper_factors_*`` are the dimensionless weights
    applied to the two trans-impedance samples inside the corrected
    couplings.
    """

    j: float
    cross_weight_ij: float
    cross_weight_ji: float
    upper_factors_i: tuple[float, float]
    upper_factors_j: tuple[float, float]
    j_upper_i: float
    j_upper_j: float


@dataclass(frozen=True)
class CouplingReport:
    """Everything computed for one qubit pair.

    ``qubit_i``/``qubit_j``/``couplings`` are the plain-chain quantities;
    the ``_sc`` fields hold the self-consistent chain when it was needed.
    ``zz`` maps each requested variant to its ZZ rate (rad/s).
    """

    port_i: int
    port_j: int
    qubit_i: QubitParams
    qubit_j: QubitParams
    couplings: PairCouplings
    qubit_i_sc: QubitParams | None
    qubit_j_sc: QubitParams | None
    couplings_sc: PairCouplings | None
    zz: dict[MethodVariant, float]
    straddling: bool
    near_boundary: bool
    warnings: tuple[str, ...]

    @property
    def detuning(self) -> float:
        return self.qubit_i.omega - self.qubit_j.omega

    @property
    def j(self) -> float:
        return self.couplings.j


def _diag_z(provider, port_index: int, omega: float) -> complex:
    return provider.z_matrix(omega)[port_index, port_index]


def _resonance_residual(
    provider, port_index: int, l_junction: float, ec_eff: float, omega: float
) -> float:
    x = _diag_z(provider, port_index, omega).imag
    return x + omega * l_junction / (1.0 - 2.0 * ec_eff / omega)


def _find_resonances(
    provider, port_index: int, l_junction: float, ec_eff: float, seed: float
) -> list[float]:
    """Rising zeros of the resonance residual near the seed frequency.

    The residual rises through zero at a qubit-like resonance and falls
    through zero at network poles, so only rising crossings are accepted.
    The bracket starts at +-40% around the seed and widens geometrically
    until at least one root is found; every root in that bracket is
    returned so the caller can disambiguate qubit-like from network-like
    resonances.
    """
    floor = 2.2 * ec_eff

    def residual(omega: float) -> float:
        return _resonance_residual(provider, port_index, l_junction, ec_eff, omega)

    for attempt, n_grid in enumerate((241, 241, 401, 801, 1601)):
        width = 0.4 * 1.6**attempt
        lo = max(seed * (1.0 - width), floor, seed * 0.02)
        hi = seed * (1.0 + width)
        if hi <= lo:
            continue
        omegas = np.linspace(lo, hi, n_grid)
        values = np.full(n_grid, np.nan)
        for k, omega in enumerate(omegas):
            try:
                values[k] = residual(omega)
            except (PoleProximityError, StampSingularityError, ExtrapolationError):
                pass
        roots = []
        for k in range(n_grid - 1):
            a, b = values[k], values[k + 1]
            if np.isnan(a) or np.isnan(b) or not (a < 0.0 < b):
                continue
            roots.append(
                brentq(residual, omegas[k], omegas[k + 1], xtol=_OMEGA_TOL)
            )
        if roots:
            return roots
    raise ConvergenceError(
        "no rising zero of the resonance residual near "
        f"{seed / TWO_PI / 1e9:.4g} GHz (port {port_index + 1}); "
        "the qubit may sit on a network resonance or outside the data band"
    )


def _flux_weight(provider, port_index: int, omega: float, z_char: float) -> float:
    """Weight of the qubit mode's flux on its own junction (alpha_ii)."""
    z_ii = _diag_z(provider, port_index, omega)
    dz_ii = impedance_derivative(provider, omega)[port_index, port_index]
    return (
        0.5
        - 0.75 * z_ii.imag / z_char
        - 0.25 * omega * dz_ii.imag / z_char
    )


def _pick_qubit_root(
    provider,
    port_index: int,
    l_junction: float,
    c_shunt: float,
    ec_eff: float,
    roots: list[float],
    seed: float,
) -> float:
    """Choose the qubit-like root among the rising resonance crossings.

    Network resonances also satisfy the resonance condition but carry a
    flux weight far from 1 (often negative), so candidates with a sane
    weight win; proximity to the seed breaks ties.
    """
    if len(roots) == 1:
        return roots[0]
    sane = []
    for omega in roots:
        spread = 1.0 - 2.0 * ec_eff / omega
        if spread <= 0.0:
            continue
        z_char = math.sqrt(l_junction / spread / c_shunt)
        try:
            alpha = _flux_weight(provider, port_index, omega, z_char)
        except (PoleProximityError, StampSingularityError, ExtrapolationError):
            continue
        if _ALPHA_SANE[0] < alpha <= _ALPHA_SANE[1]:
            sane.append(omega)
    pool = sane or roots
    return min(pool, key=lambda omega: abs(omega - seed))


def _refine_root(
    provider,
    port_index: int,
    l_junction: float,
    ec_eff: float,
    omega_prev: float,
) -> float | None:
    """Re-locate a known root after a small parameter change, without a
    full grid scan; None when the root left the local window."""

    def residual(omega: float) -> float:
        return _resonance_residual(provider, port_index, l_junction, ec_eff, omega)

    lo, hi = omega_prev * (1.0 - 1e-3), omega_prev * (1.0 + 1e-3)
    try:
        a, b = residual(lo), residual(hi)
    except (PoleProximityError, StampSingularityError, ExtrapolationError):
        return None
    if not (a < 0.0 < b):
        return None
    return brentq(residual, lo, hi, xtol=_OMEGA_TOL)


def _residual_hz(
    provider, port_index: int, l_junction: float, ec_eff: float, omega: float
) -> float:
    """Convert the residual reactance at the solution into a frequency
    error estimate via the local slope."""
    value = _resonance_residual(provider, port_index, l_junction, ec_eff, omega)
    h = omega * 1e-7
    upper = _resonance_residual(
        provider, port_index, l_junction, ec_eff, omega + h
    )
    lower = _resonance_residual(
        provider, port_index, l_junction, ec_eff, omega - h
    )
    slope = (upper - lower) / (2.0 * h)
    if slope == 0.0:
        return float("inf")
    return abs(value / slope) / TWO_PI


def solve_qubit(
    provider,
    port: int,
    l_junction: float,
    c_shunt: float,
    variant: MethodVariant = MethodVariant.ZMETHOD0,
    seed_omega: float | None = None,
    e_charging: float | None = None,
) -> QubitParams:
    """Solve one qubit's dressed frequency and derived parameters.

    ``port`` is 1-based.  For the base variants a single root solve with
    the plain charging energy is enough; the self-consistent variant
    iterates the flux weight alpha_ii against the resonance until both
    are stationary (to < 1 Hz in frequency).  ``e_charging`` (J) replaces
    the value derived from ``c_shunt`` when given; passing 0 turns the
    anharmonic renormalization off entirely.
    """
    if l_junction <= 0.0 or c_shunt <= 0.0:
        raise ValueError("junction inductance and shunt capacitance must be > 0")
    if not (1 <= port <= provider.port_count):
        raise ValueError(f"port {port} outside 1..{provider.port_count}")
    port_index = port - 1
    e_charging = (
        charging_energy(c_shunt) if e_charging is None else float(e_charging)
    )
    ec = e_charging / HBAR
    seed = (
        seed_omega
        if seed_omega is not None
        else 1.0 / math.sqrt(l_junction * c_shunt)
    )

    alpha = 1.0
    omega = None
    delta_prev = None
    damped = False
    for _ in range(100):
        ec_eff = alpha**2 * ec
        new_omega = None
        if omega is not None:
            new_omega = _refine_root(provider, port_index, l_junction, ec_eff, omega)
        if new_omega is None:
            anchor = omega or seed
            roots = _find_resonances(
                provider, port_index, l_junction, ec_eff, anchor
            )
            new_omega = _pick_qubit_root(
                provider, port_index, l_junction, c_shunt, ec_eff, roots, anchor
            )
        l_eff = l_junction / (1.0 - 2.0 * ec_eff / new_omega)
        z_char = math.sqrt(l_eff / c_shunt)
        new_alpha = _flux_weight(provider, port_index, new_omega, z_char)
        if not variant.self_consistent:
            omega, alpha_report = new_omega, new_alpha
            alpha_chain = 1.0
            break
        if new_alpha <= 0.0 or new_alpha > 2.0:
            raise ConvergenceError(
                f"flux weight iterated to {new_alpha:.4g} on port {port}; "
                "the self-consistent chain is outside its domain of validity"
            )
        if damped:
            new_alpha = 0.5 * (alpha + new_alpha)
        delta = abs(new_alpha - alpha)
        converged = (
            omega is not None
            and abs(new_omega - omega) < TWO_PI * 0.5
            and delta < _ALPHA_TOL
        )
        # A non-contracting update means the plain iteration is circling
        # the fixed point; averaging restores convergence.
        if delta_prev is not None and delta > 0.7 * delta_prev:
            damped = True
        delta_prev = delta
        omega, alpha = new_omega, new_alpha
        if converged:
            alpha_report = alpha
            alpha_chain = alpha
            break
    else:
        raise ConvergenceError(
            f"flux-weight fixed point on port {port} did not settle "
            "within 100 iterations"
        )

    ec_eff = alpha_chain**2 * ec
    l_eff = l_junction / (1.0 - 2.0 * ec_eff / omega)
    anharmonicity = -ec_eff / (1.0 - 2.0 * ec_eff / omega)
    return QubitParams(
        port=port,
        omega=omega,
        l_junction=l_junction,
        c_shunt=c_shunt,
        e_charging=e_charging,
        l_eff=l_eff,
        anharmonicity=anharmonicity,
        flux_weight=alpha_report,
        z_char=math.sqrt(l_eff / c_shunt),
        variant=variant,
        residual_hz=_residual_hz(provider, port_index, l_junction, ec_eff, omega),
    )


def _trans_z(provider, q_i: QubitParams, q_j: QubitParams) -> tuple[complex, complex]:
    """Trans-impedance between the pair's ports at both qubit frequencies."""
    pi, pj = q_i.port - 1, q_j.port - 1
    z_at_i = provider.z_matrix(q_i.omega)[pi, pj]
    z_at_j = provider.z_matrix(q_j.omega)[pi, pj]
    return z_at_i, z_at_j


def exchange_coupling(q_i: QubitParams, q_j: QubitParams, provider) -> float:
    """Transverse exchange coupling J between two solved qubits (rad/s)."""
    if q_i.port == q_j.port:
        raise ValueError("exchange coupling needs two distinct ports")
    z_at_i, z_at_j = _trans_z(provider, q_i, q_j)
    prefactor = -0.25 * math.sqrt(
        q_i.omega * q_j.omega / (q_i.l_eff * q_j.l_eff)
    )
    return prefactor * (z_at_i.imag / q_i.omega + z_at_j.imag / q_j.omega)


def coupling_corrections(
    q_i: QubitParams, q_j: QubitParams, provider
) -> PairCouplings:
    """Exchange coupling plus the corrected couplings of the second
    excited states and the cross flux weights.

    The two published routes to the corrected couplings -- dimensionless
    factors multiplying the trans-impedance samples, and an additive
    shift proportional to the cross flux weight -- are algebraically
    identical here and cross-checked to 1e-9 relative on every call.
    """
    wi, wj = q_i.omega, q_j.omega
    if abs(wi - wj) < _DEGENERACY_GUARD:
        raise DegeneracyError(
            f"qubits {q_i.port} and {q_j.port} are degenerate to "
            f"{abs(wi - wj) / TWO_PI:.3g} Hz; corrected couplings are singular"
        )
    di, dj = q_i.anharmonicity, q_j.anharmonicity
    z_at_i, z_at_j = _trans_z(provider, q_i, q_j)
    li, lj = q_i.l_eff, q_j.l_eff

    j = exchange_coupling(q_i, q_j, provider)

    # Cross flux weights.  The inverse cross characteristic impedance is
    # taken at the resonance-consistent capacitance C* = 1/(w^2 L), which
    # reduces to the plain shunt capacitance for an isolated qubit and
    # keeps the two published forms of the corrected couplings identical.
    wi2, wj2 = wi * wi, wj * wj
    cross_ij = (
        ((wi2 - 2.0 * wj2) * z_at_j.imag + wi * wj * z_at_i.imag)
        / (2.0 * (wj2 - wi2))
        / (wi * math.sqrt(li * lj))
    )
    cross_ji = (
        ((wj2 - 2.0 * wi2) * z_at_i.imag + wi * wj * z_at_j.imag)
        / (2.0 * (wi2 - wj2))
        / (wj * math.sqrt(li * lj))
    )

    # Second-excited-state couplings via the correction factors.
    split = wi2 - wj2
    f_i_at_i = 1.0 + 2.0 * wi * di / split
    f_i_at_j = 1.0 - 2.0 * wi * di / split + 4.0 * di / wi
    f_j_at_i = 1.0 + 2.0 * wj * dj / split + 4.0 * dj / wj
    f_j_at_j = 1.0 - 2.0 * wj * dj / split
    prefactor = -0.25 * math.sqrt(wi * wj / (li * lj))
    j_upper_i = prefactor * (
        f_i_at_i * z_at_i.imag / wi + f_i_at_j * z_at_j.imag / wj
    )
    j_upper_j = prefactor * (
        f_j_at_i * z_at_i.imag / wi + f_j_at_j * z_at_j.imag / wj
    )

    # Cross-check against the additive form.
    additive_i = j + di * math.sqrt(wi / wj) * cross_ij
    additive_j = j + dj * math.sqrt(wj / wi) * cross_ji
    scale = max(abs(j_upper_i), abs(j_upper_j), abs(j), TWO_PI * 1e-3)
    if (
        abs(j_upper_i - additive_i) > 1e-9 * scale
        or abs(j_upper_j - additive_j) > 1e-9 * scale
    ):  # pragma: no cover - algebraically impossible
        raise AssertionError(
            "factor-form and additive-form corrected couplings disagree: "
            f"{j_upper_i} vs {additive_i}, {j_upper_j} vs {additive_j}"
        )

    return PairCouplings(
        j=j,
        cross_weight_ij=cross_ij,
        cross_weight_ji=cross_ji,
        upper_factors_i=(f_i_at_i, f_i_at_j),
        upper_factors_j=(f_j_at_i, f_j_at_j),
        j_upper_i=j_upper_i,
        j_upper_j=j_upper_j,
    )


def zz_rate(
    q_i: QubitParams,
    q_j: QubitParams,
    couplings: PairCouplings,
    variant: MethodVariant,
) -> tuple[float, tuple[str, ...]]:
    """ZZ rate (rad/s) for one variant, with any near-pole warnings.

    The caller chooses which solved chain to pass in: the self-consistent
    variant uses the same expression as ``ZMETHODK0`` but evaluated on
    the alpha-corrected qubit parameters and couplings.
    """
    delta_ij = q_i.omega - q_j.omega
    di, dj = q_i.anharmonicity, q_j.anharmonicity
    den_i = delta_ij + di
    den_j = delta_ij - dj
    warnings = []
    if abs(den_i) < _POLE_WARN or abs(den_j) < _POLE_WARN:
        warnings.append(
            f"{variant.label}: detuning within 10 kHz of a straddling-"
            "boundary pole; perturbative ZZ unreliable"
        )
    denominator = den_i * den_j

    if variant is MethodVariant.NAIVE:
        value = -2.0 * couplings.j**2 * (di + dj) / (den_i * (dj - delta_ij))
    else:
        value = (
            2.0
            * (
                couplings.j_upper_i**2 * (dj - delta_ij)
                + couplings.j_upper_j**2 * (di + delta_ij)
            )
            / denominator
        )
        if variant in (MethodVariant.ZMETHODK0, MethodVariant.ZMETHOD):
            value += 2.0 * di * (q_i.omega / q_j.omega) * couplings.cross_weight_ij**2
            value += 2.0 * dj * (q_j.omega / q_i.omega) * couplings.cross_weight_ji**2
    return value, tuple(warnings)


def _boundary_flags(q_i: QubitParams, q_j: QubitParams) -> tuple[bool, bool]:
    delta_ij = q_i.omega - q_j.omega
    di, dj = q_i.anharmonicity, q_j.anharmonicity
    straddling = bool(abs(delta_ij) < min(abs(di), abs(dj)))
    margin = min(abs(delta_ij + di), abs(delta_ij - dj))
    near_boundary = bool(
        margin < STRADDLING_BOUNDARY_RATIO * min(abs(di), abs(dj))
    )
    return straddling, near_boundary


def analyze_pairs(
    provider,
    designs: dict[int, QubitDesign],
    variants: tuple[MethodVariant, ...] = tuple(MethodVariant),
) -> list[CouplingReport]:
    """Full coupling reports for every pair of the given ports.

    ``designs`` maps 1-based port numbers to their junction/shunt values.
    The plain chain is always solved (it feeds three of the variants and
    the diagnostics); the self-consistent chain is solved only when the
    ``ZMETHOD`` variant is requested.
    """
    ports = sorted(designs)
    if len(ports) < 2:
        raise ValueError("need at least two ports to analyze couplings")
    base: dict[int, QubitParams] = {}
    selfc: dict[int, QubitParams] = {}
    for port in ports:
        d = designs[port]
        base[port] = solve_qubit(
            provider, port, d.l_junction, d.c_shunt, MethodVariant.ZMETHOD0
        )
        if MethodVariant.ZMETHOD in variants:
            selfc[port] = solve_qubit(
                provider, port, d.l_junction, d.c_shunt, MethodVariant.ZMETHOD
            )

    reports = []
    for a in range(len(ports)):
        for b in range(a + 1, len(ports)):
            pi, pj = ports[a], ports[b]
            couplings = coupling_corrections(base[pi], base[pj], provider)
            couplings_sc = None
            zz: dict[MethodVariant, float] = {}
            warnings: list[str] = []
            for variant in variants:
                if variant.self_consistent:
                    couplings_sc = coupling_corrections(
                        selfc[pi], selfc[pj], provider
                    )
                    value, warn = zz_rate(
                        selfc[pi], selfc[pj], couplings_sc, variant
                    )
                else:
                    value, warn = zz_rate(base[pi], base[pj], couplings, variant)
                zz[variant] = value
                warnings.extend(warn)
            flag_i = selfc.get(pi, base[pi])
            flag_j = selfc.get(pj, base[pj])
            straddling, near_boundary = _boundary_flags(flag_i, flag_j)
            reports.append(
                CouplingReport(
                    port_i=pi,
                    port_j=pj,
                    qubit_i=base[pi],
                    qubit_j=base[pj],
                    couplings=couplings,
                    qubit_i_sc=selfc.get(pi),
                    qubit_j_sc=selfc.get(pj),
                    couplings_sc=couplings_sc,
                    zz=zz,
                    straddling=straddling,
                    near_boundary=near_boundary,
                    warnings=tuple(warnings),
                )
            )
    return reports
