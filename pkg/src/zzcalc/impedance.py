"""Multiport impedance of the coupling network.

Every qubit analysis in this package consumes an *impedance provider*: an
object with a ``port_count`` attribute and a ``z_matrix(omega)`` method
returning the complex impedance matrix seen by the junction ports at one
angular frequency.  Three providers are implemented:

* :class:`NodalCircuit` -- lossless nodal analysis of a netlist (junction
  inductances excluded, junction capacitances included, ideal
  transmission-line stamps);
* :class:`RationalTransImpedance` -- a two-port whose trans-impedance is a
  rational function given by its zeros and poles, with purely capacitive
  diagonal entries;
* :class:`TabulatedImpedance` -- cubic-spline interpolation of sampled
  data (from a CSV table or a Touchstone file).

``impedance_derivative`` returns dZ/d(omega), using an analytic form when
the provider has one and a Richardson-refined central difference otherwise.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from numpy.polynomial import Polynomial
from scipy.interpolate import CubicSpline

from .constants import C_LIGHT, TWO_PI
from .errors import (
    ExtrapolationError,
    PoleProximityError,
    StampSingularityError,
    TableError,
)
from .netlist import (
    Capacitor,
    Inductor,
    JosephsonJunction,
    Netlist,
    TransmissionLine,
    is_ground,
)

__all__ = [
    "ZSample",
    "NodalCircuit",
    "RationalTransImpedance",
    "TabulatedImpedance",
    "tl_two_port_admittance",
    "impedance_derivative",
    "find_network_poles",
]

#: Electrical lengths closer than this (radians) to a multiple of pi make
#: the ideal line stamp singular.
_STAMP_ANGLE_TOL = 1e-9

#: Relative reciprocity violation tolerated before declaring numerical
#: breakdown near a network resonance.
_RECIPROCITY_TOL = 1e-6


@dataclass(frozen=True)
class ZSample:
    """One evaluated impedance point."""

    omega: float
    z: np.ndarray


def tl_two_port_admittance(
    omega: float, z0: float, length_m: float, eps_eff: float
) -> np.ndarray:
    """Admittance matrix of an ideal lossless line at one frequency.

    The line is described by its characteristic impedance, physical length
    and effective dielectric constant; the phase velocity is
    c / sqrt(eps_eff).  Raises ``StampSingularityError`` when the
    electrical length is a multiple of pi (sin(beta*l) = 0), where the
    ideal stamp has no finite admittance representation.
    """
    beta_l = omega * np.sqrt(eps_eff) * length_m / C_LIGHT
    distance = abs(beta_l - np.pi * round(beta_l / np.pi))
    if distance < _STAMP_ANGLE_TOL:
        raise StampSingularityError(
            f"line of electrical length {beta_l:.6g} rad is resonant "
            f"(sin = 0) at omega = {omega:.6g} rad/s"
        )
    sin = np.sin(beta_l)
    cos = np.cos(beta_l)
    y11 = -1j * cos / (sin * z0)
    y12 = 1j / (sin * z0)
    return np.array([[y11, y12], [y12, y11]])


class NodalCircuit:
    """Impedance provider built from a netlist by lossless nodal analysis.

    The junction inductive branches are *excluded* -- the matrix returned
    is the impedance of the environment each junction looks into -- while
    junction capacitances stay in the network.  Ports are numbered in
    junction declaration order.
    """

    def __init__(self, netlist: Netlist):
        junctions = netlist.junctions
        if not junctions:
            raise ValueError("netlist has no junctions, so no ports")
        self.netlist = netlist
        self._nodes = netlist.nodes
        index = {node: k for k, node in enumerate(self._nodes)}

        def node_id(name: str) -> int:
            return -1 if is_ground(name) else index[name]

        self._caps: list[tuple[int, int, float]] = []
        self._inds: list[tuple[int, int, float]] = []
        self._lines: list[tuple[int, int, float, float, float]] = []
        for el in netlist.elements:
            i, j = node_id(el.node1), node_id(el.node2)
            if isinstance(el, Capacitor):
                self._caps.append((i, j, el.farads))
            elif isinstance(el, Inductor):
                self._inds.append((i, j, el.henries))
            elif isinstance(el, JosephsonJunction):
                if el.cj_ff > 0.0:
                    self._caps.append((i, j, el.farads))
            elif isinstance(el, TransmissionLine):
                self._lines.append((i, j, el.z0_ohm, el.meters, el.eps_eff))

        n = len(self._nodes)
        self._ports = np.zeros((n, len(junctions)))
        for p, junction in enumerate(junctions):
            i, j = node_id(junction.node1), node_id(junction.node2)
            if i >= 0:
                self._ports[i, p] += 1.0
            if j >= 0:
                self._ports[j, p] -= 1.0

    @property
    def port_count(self) -> int:
        return self._ports.shape[1]

    def susceptance(self, omega: float) -> np.ndarray:
        """Real node susceptance matrix B, where Y(omega) = j B."""
        if omega <= 0.0:
            raise ValueError("angular frequency must be positive")
        n = len(self._nodes)
        b = np.zeros((n, n))

        def stamp(i: int, j: int, value: float) -> None:
            if i >= 0:
                b[i, i] += value
            if j >= 0:
                b[j, j] += value
            if i >= 0 and j >= 0:
                b[i, j] -= value
                b[j, i] -= value

        for i, j, c in self._caps:
            stamp(i, j, omega * c)
        for i, j, ell in self._inds:
            stamp(i, j, -1.0 / (omega * ell))
        for i, j, z0, length, eps in self._lines:
            y = tl_two_port_admittance(omega, z0, length, eps)
            b11 = y[0, 0].imag
            b12 = y[0, 1].imag
            if i >= 0:
                b[i, i] += b11
            if j >= 0:
                b[j, j] += b11
            if i >= 0 and j >= 0:
                b[i, j] += b12
                b[j, i] += b12
        return b

    def z_matrix(self, omega: float) -> np.ndarray:
        b = self.susceptance(omega)
        try:
            x = np.linalg.solve(b, self._ports)
        except np.linalg.LinAlgError:
            raise PoleProximityError(
                f"node equations singular at omega = {omega:.6g} rad/s "
                "(network resonance)",
                omega=omega,
            ) from None
        z = -1j * (self._ports.T @ x)
        if not np.all(np.isfinite(z)):
            raise PoleProximityError(
                f"impedance overflow at omega = {omega:.6g} rad/s",
                omega=omega,
            )
        asym = np.max(np.abs(z - z.T))
        scale = max(np.max(np.abs(z)), 1e-300)
        if asym > _RECIPROCITY_TOL * scale:
            raise PoleProximityError(
                f"reciprocity lost at omega = {omega:.6g} rad/s "
                "(ill-conditioned node equations)",
                omega=omega,
            )
        return 0.5 * (z + z.T)


class RationalTransImpedance:
    """Two-port with a rational, purely reactive trans-impedance.

    Z12(omega) = j * X12(omega) with::

        X12 = scale * prod_k (z_k^2 - omega^2) / (omega * prod_m (p_m^2 - omega^2))

    ``zeros`` and ``poles`` are ordinary frequencies in Hz; a pole at DC is
    implied by the leading 1/omega and poles listed at 0 Hz are folded into
    it.  The diagonal entries are single capacitors to ground.
    """

    def __init__(
        self,
        scale: float,
        zeros_hz: tuple[float, ...],
        poles_hz: tuple[float, ...],
        shunt_c: tuple[float, float],
    ):
        self.scale = float(scale)
        self.zeros = tuple(TWO_PI * f for f in zeros_hz)
        self.poles = tuple(TWO_PI * f for f in poles_hz if f > 0.0)
        if any(z <= 0.0 for z in self.zeros):
            raise ValueError("zeros must be positive frequencies")
        if len(shunt_c) != 2 or any(c <= 0.0 for c in shunt_c):
            raise ValueError("two positive shunt capacitances required")
        self.shunt_c = (float(shunt_c[0]), float(shunt_c[1]))

        numerator = Polynomial([1.0])
        for z in self.zeros:
            numerator *= Polynomial([z * z, 0.0, -1.0])
        denominator = Polynomial([0.0, 1.0])
        for p in self.poles:
            denominator *= Polynomial([p * p, 0.0, -1.0])
        self._num = numerator
        self._den = denominator
        self._dnum = numerator.deriv()
        self._dden = denominator.deriv()

    port_count = 2

    def trans_reactance(self, omega: float) -> float:
        den = self._den(omega)
        if den == 0.0:
            raise PoleProximityError(
                f"trans-impedance pole at omega = {omega:.6g} rad/s",
                omega=omega,
            )
        return self.scale * self._num(omega) / den

    def z_matrix(self, omega: float) -> np.ndarray:
        if omega <= 0.0:
            raise ValueError("angular frequency must be positive")
        x12 = self.trans_reactance(omega)
        z11 = 1.0 / (1j * omega * self.shunt_c[0])
        z22 = 1.0 / (1j * omega * self.shunt_c[1])
        return np.array([[z11, 1j * x12], [1j * x12, z22]])

    def z_derivative(self, omega: float) -> np.ndarray:
        """Analytic dZ/d(omega)."""
        num, den = self._num(omega), self._den(omega)
        if den == 0.0:
            raise PoleProximityError(
                f"trans-impedance pole at omega = {omega:.6g} rad/s",
                omega=omega,
            )
        dx12 = self.scale * (
            self._dnum(omega) / den - num * self._dden(omega) / den**2
        )
        d11 = 1j / (omega**2 * self.shunt_c[0])
        d22 = 1j / (omega**2 * self.shunt_c[1])
        return np.array([[d11, 1j * dx12], [1j * dx12, d22]])


class TabulatedImpedance:
    """Impedance provider interpolating sampled data on a frequency grid.

    ``entries`` maps 1-based port pairs (i, j) to complex samples; missing
    transposes are filled by reciprocity, missing off-diagonal pairs are
    treated as uncoupled (zero), and missing diagonals fall back to a
    single-capacitor model 1/(j omega C_i) when ``diagonal_fallback_c``
    supplies the capacitance.  Real and imaginary parts are interpolated
    with separate cubic splines; requests outside the grid raise
    ``ExtrapolationError``.
    """

    def __init__(
        self,
        freq_hz: np.ndarray,
        entries: dict[tuple[int, int], np.ndarray],
        port_count: int,
        diagonal_fallback_c: tuple[float, ...] | None = None,
    ):
        freq_hz = np.asarray(freq_hz, dtype=float)
        if freq_hz.ndim != 1 or freq_hz.size < 4:
            raise TableError("need at least 4 frequency samples")
        if np.any(np.diff(freq_hz) <= 0.0):
            raise TableError("frequency axis must be strictly increasing")
        if port_count < 1:
            raise TableError("port count must be at least 1")
        self.freq_hz = freq_hz
        self.port_count = int(port_count)
        self.diagonal_fallback_c = diagonal_fallback_c
        self._splines: dict[tuple[int, int], tuple[CubicSpline, CubicSpline]] = {}
        for (i, j), samples in entries.items():
            if not (1 <= i <= port_count and 1 <= j <= port_count):
                raise TableError(f"entry ({i}, {j}) outside port range")
            samples = np.asarray(samples, dtype=complex)
            if samples.shape != freq_hz.shape:
                raise TableError(
                    f"entry ({i}, {j}) has {samples.size} samples, "
                    f"expected {freq_hz.size}"
                )
            key = (min(i, j), max(i, j))
            self._splines[key] = (
                CubicSpline(freq_hz, samples.real),
                CubicSpline(freq_hz, samples.imag),
            )

    def z_matrix(self, omega: float) -> np.ndarray:
        f = omega / TWO_PI
        if f < self.freq_hz[0] or f > self.freq_hz[-1]:
            raise ExtrapolationError(
                f"{f / 1e9:.6g} GHz outside tabulated range "
                f"[{self.freq_hz[0] / 1e9:.6g}, {self.freq_hz[-1] / 1e9:.6g}] GHz"
            )
        n = self.port_count
        z = np.zeros((n, n), dtype=complex)
        for i in range(1, n + 1):
            for j in range(i, n + 1):
                pair = self._splines.get((i, j))
                if pair is not None:
                    value = complex(pair[0](f), pair[1](f))
                elif i == j:
                    if self.diagonal_fallback_c is None:
                        raise TableError(
                            f"no data for diagonal entry ({i}, {i}) and no "
                            "fallback capacitance given"
                        )
                    value = 1.0 / (1j * omega * self.diagonal_fallback_c[i - 1])
                else:
                    value = 0.0
                z[i - 1, j - 1] = value
                z[j - 1, i - 1] = value
        return z


def impedance_derivative(provider, omega: float, h_rel: float = 1e-6):
    """dZ/d(omega) at one frequency.

    Uses the provider's analytic ``z_derivative`` when available, otherwise
    a central difference with one step of Richardson extrapolation (error
    O(h^4)).  The relative step ``h_rel`` applies to omega.
    """
    analytic = getattr(provider, "z_derivative", None)
    if analytic is not None:
        return analytic(omega)

    def central(h: float) -> np.ndarray:
        step = omega * h
        upper = provider.z_matrix(omega + step)
        lower = provider.z_matrix(omega - step)
        return (upper - lower) / (2.0 * step)

    coarse = central(h_rel)
    fine = central(h_rel / 2.0)
    return (4.0 * fine - coarse) / 3.0


def find_network_poles(
    circuit: NodalCircuit,
    f_lo_hz: float,
    f_hi_hz: float,
    n_grid: int = 400,
) -> list[float]:
    """Resonant frequencies (Hz) of the coupling network in a window.

    Poles of the port impedance are zeros of det B(omega); they are located
    by tracking the sign of the determinant on a grid and bisecting each
    sign change.  Grid points that land exactly on a line singularity are
    skipped.
    """
    freqs = np.linspace(f_lo_hz, f_hi_hz, n_grid)
    signs = np.zeros(n_grid)
    for k, f in enumerate(freqs):
        try:
            sign, _ = np.linalg.slogdet(circuit.susceptance(TWO_PI * f))
        except StampSingularityError:
            sign = 0.0
        signs[k] = sign

    poles = []
    for k in range(n_grid - 1):
        if signs[k] == 0.0 or signs[k + 1] == 0.0 or signs[k] == signs[k + 1]:
            continue
        lo, hi = freqs[k], freqs[k + 1]
        s_lo = signs[k]
        for _ in range(80):
            mid = 0.5 * (lo + hi)
            try:
                s_mid, _ = np.linalg.slogdet(circuit.susceptance(TWO_PI * mid))
            except StampSingularityError:
                s_mid = 0.0
            if s_mid == s_lo or s_mid == 0.0:
                lo = mid
            else:
                hi = mid
            if hi - lo < 1e-2:
                break
        candidate = 0.5 * (lo + hi)
        # A determinant sign change can also come from a line-stamp
        # eigenvalue passing through infinity; a genuine resonance has an
        # eigenvalue passing through zero, so check the smallest singular
        # value actually collapses there.  The magnitude is judged against
        # the susceptance at the bracket endpoints, which sit a full grid
        # step away from the root and so carry the network's normal scale
        # (the matrix at the root itself can be uniformly tiny when few
        # nodes are involved).
        try:
            b = circuit.susceptance(TWO_PI * candidate)
            b_lo = circuit.susceptance(TWO_PI * freqs[k])
            b_hi = circuit.susceptance(TWO_PI * freqs[k + 1])
        except StampSingularityError:
            continue
        s_min = np.linalg.svd(b, compute_uv=False)[-1]
        scale = max(np.max(np.abs(b_lo)), np.max(np.abs(b_hi)), 1e-300)
        if s_min < 1e-6 * scale:
            poles.append(candidate)
    return poles
