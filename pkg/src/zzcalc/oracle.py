"""Exact ZZ computation by dense diagonalization of the circuit Hamiltonian.

The route is: replace transmission lines by LC ladders, linearize the
junctions, solve the generalized eigenproblem of the resulting lumped
circuit for its normal modes, then quantize: each mode becomes a boson,
each junction's phase is a linear combination of mode quadratures, and
the cosine potential beyond its quadratic part is restored as a quartic
(optionally sextic) perturbation in a truncated Fock space.  The ZZ rate
is read off the dressed two-qubit spectrum,

    zz = (E_11 - E_10) - (E_01 - E_00),

with dressed states labelled by their dominant bare-occupation overlap.

Two details make the truncated model well behaved:

* junctions can be linearized at their *renormalized* inductance
  L = L_J / (1 - 2 E_C / (hbar w)) instead of L_J itself, which places
  the linear modes at the observed qubit frequencies; the quadratic
  difference between the true junction inductance and the linearization
  point is then restored explicitly alongside the higher-order terms, so
  the Hamiltonian is still exactly the circuit's -- only the Fock basis
  moved.  A basis centered on the dressed frequencies converges in far
  fewer levels.
* the quartic alone is unbounded below, so very high truncations
  eventually collapse; the sextic order has a bounded potential and
  converges monotonically.  The convergence metric below makes either
  case measurable instead of assumed.

This module is the ground truth the perturbative estimates are judged
against, so it reports its own convergence (the change in ZZ when every
truncation is raised by one level) instead of assuming it.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace

import numpy as np
from scipy.linalg import eigh

from .constants import C_LIGHT, HBAR, PHI0, TWO_PI, charging_energy
from .errors import (
    ConvergenceError,
    FloatingModeError,
    LabelingError,
    NetlistValidationError,
    SingularMassError,
)
from .netlist import (
    Capacitor,
    Inductor,
    JosephsonJunction,
    Netlist,
    TransmissionLine,
    capacitive_reduction,
    is_ground,
)

__all__ = [
    "HamiltonianModel",
    "DressedSpectrum",
    "OracleResult",
    "discretize_lines",
    "default_segments",
    "linear_normal_modes",
    "renormalized_linearization",
    "oracle_zz",
]

#: Hard cap on the dense Hamiltonian dimension.
_MAX_DIM = 4000

#: Relative threshold below which a squared mode frequency counts as zero.
_ZERO_MODE_TOL = 1e-12

#: Default Fock truncation for junction-dominated modes.  Chosen so that
#: one more level moves ZZ by well under 0.1 kHz on transmon-like
#: circuits (the quartic tail of a zpf ~ 0.5 junction needs this many).
_QUBIT_LEVELS = 14

#: Default truncation for the remaining (near-linear) modes; raising it
#: moves ZZ at the Hz level.
_OTHER_LEVELS = 4


def _auto_levels(
    zpf: np.ndarray, qubit_modes: list[int]
) -> tuple[int, ...]:
    """Per-mode truncation from each mode's junction participation.

    A mode only feels the cosine through its phase zero-point amplitude,
    so the Fock depth it needs scales with that amplitude: near-linear
    modes are done at 3-4 levels while strongly hybridized ones (and the
    qubit modes they spill into) need more.  Thresholds are set so one
    extra level everywhere moves ZZ by well under 0.1 kHz.
    """
    n_modes = zpf.shape[1]
    spill = max(
        (
            float(np.abs(zpf[:, k]).max())
            for k in range(n_modes)
            if k not in qubit_modes
        ),
        default=0.0,
    )
    qubit_levels = _QUBIT_LEVELS + (2 if spill >= 0.07 else 0)
    chosen = []
    for k in range(n_modes):
        if k in qubit_modes:
            chosen.append(qubit_levels)
            continue
        m = float(np.abs(zpf[:, k]).max())
        if m < 0.03:
            chosen.append(3)
        elif m < 0.07:
            chosen.append(_OTHER_LEVELS)
        elif m < 0.10:
            chosen.append(5)
        else:
            chosen.append(6)
    return tuple(chosen)


@dataclass(frozen=True, eq=False)
class HamiltonianModel:
    """Quantized normal-mode model of a lumped circuit.

    ``phase_zpf[i, k]`` is the zero-point amplitude of junction i's phase
    in mode k; ``josephson_energies`` are the bare E_J of each junction;
    ``qubit_modes`` gives the normal mode dominated by each junction.
    ``levels`` is the Fock truncation per mode and ``cosine_order`` the
    order (4 or 6) at which the cosine expansion is kept; ``None`` keeps
    the full cosine, evaluated exactly on the truncated Fock space.
    ``linearization_energies`` are phi0^2 / L of the quadratic stamp each
    junction was linearized at; when it differs from E_J the residual
    quadratic (E_J - that) phi^2 / 2 is part of the potential, keeping
    the total Hamiltonian independent of the linearization point.
    """

    mode_freqs: np.ndarray
    phase_zpf: np.ndarray
    josephson_energies: np.ndarray
    qubit_modes: tuple[int, ...]
    levels: tuple[int, ...]
    cosine_order: int | None = None
    dropped_modes: int = 0
    linearization_energies: np.ndarray | None = None

    def with_levels(self, levels) -> "HamiltonianModel":
        return replace(self, levels=_normalize_levels(levels, len(self.mode_freqs)))

    def bumped(self, extra: int = 1) -> "HamiltonianModel":
        return replace(self, levels=tuple(n + extra for n in self.levels))


@dataclass(frozen=True, eq=False)
class DressedSpectrum:
    """Eigenenergies (rad/s, ground-referenced ordering of ``eigh``) plus
    the bare-occupation labels of the four computational states."""

    energies: np.ndarray
    labels: dict[tuple[int, ...], int]
    overlap_quality: dict[tuple[int, ...], float]


@dataclass(frozen=True, eq=False)
class OracleResult:
    """ZZ rate (rad/s) with its spectrum, the dressed 0->1 frequencies of
    the two junctions (rad/s), and the truncation-convergence report
    (``None`` when the bump run was skipped)."""

    zz: float
    spectrum: DressedSpectrum
    qubit_freqs: tuple[float, float]
    convergence_delta: float | None
    converged: bool | None
    dimension: int


def _normalize_levels(levels, n_modes: int) -> tuple[int, ...]:
    if isinstance(levels, int):
        out = (levels,) * n_modes
    else:
        out = tuple(int(n) for n in levels)
        if len(out) != n_modes:
            raise ValueError(
                f"{len(out)} truncation entries for {n_modes} modes"
            )
    if any(n < 2 for n in out):
        raise ValueError("every mode needs at least 2 levels")
    return out


def discretize_lines(netlist: Netlist, segments_per_line) -> Netlist:
    """Replace every transmission line by an LC ladder.

    Each of the n segments contributes a series inductor
    L = Z0 sqrt(eps) l / (c n) and a shunt capacitor
    C = sqrt(eps) l / (Z0 c n), split half-and-half across the segment
    ends (so interior nodes carry a full C and the two terminals C/2).
    ``segments_per_line`` is an int applied to every line or a mapping
    from line name to int.
    """
    new_elements = []
    for el in netlist.elements:
        if not isinstance(el, TransmissionLine):
            new_elements.append(el)
            continue
        if isinstance(segments_per_line, dict):
            n = int(segments_per_line[el.name])
        else:
            n = int(segments_per_line)
        if n < 1:
            raise ValueError("segments_per_line must be >= 1")
        l_seg = el.z0_ohm * math.sqrt(el.eps_eff) * el.meters / (C_LIGHT * n)
        c_seg = math.sqrt(el.eps_eff) * el.meters / (el.z0_ohm * C_LIGHT * n)
        l_seg_nh = l_seg / 1e-9
        c_seg_ff = c_seg / 1e-15
        chain = (
            [el.node1]
            + [f"{el.name}__n{k}" for k in range(1, n)]
            + [el.node2]
        )
        for k in range(n):
            a, b = chain[k], chain[k + 1]
            new_elements.append(
                Inductor(f"{el.name}__l{k + 1}", a, b, l_seg_nh)
            )
        # Shunt capacitance: C/2 at segment ends accumulates to a full C
        # on interior nodes.  Grounded terminals shed their share.
        for k, node in enumerate(chain):
            if is_ground(node):
                continue
            share = 1.0 if 0 < k < n else 0.5
            new_elements.append(
                Capacitor(f"{el.name}__c{k}", node, "0", share * c_seg_ff)
            )
    return Netlist(tuple(new_elements))


def default_segments(
    netlist: Netlist, f_max_hz: float, mode_budget: int = 12
) -> dict[str, int]:
    """Segment counts for each line: enough that the ladder's artificial
    cutoff sits well above ``f_max_hz``, then scaled down so the total
    number of circuit modes stays within ``mode_budget``.

    The ladder's highest resonance is at 2 v_p n / l (rad/s); requiring it
    to exceed 10x the analysis band gives n per line.
    """
    lines = netlist.transmission_lines
    if not lines:
        return {}
    wanted: dict[str, int] = {}
    for el in lines:
        v_p = C_LIGHT / math.sqrt(el.eps_eff)
        n_min = math.ceil(10.0 * TWO_PI * f_max_hz * el.meters / (2.0 * v_p))
        wanted[el.name] = max(1, n_min)
    base_nodes = len(netlist.nodes)
    budget = max(mode_budget - base_nodes, len(lines))
    total_interior = sum(n - 1 for n in wanted.values())
    if total_interior > budget:
        scale = budget / total_interior
        for name in wanted:
            wanted[name] = max(1, 1 + math.floor((wanted[name] - 1) * scale))
    return wanted


def _assemble_matrices(
    netlist: Netlist,
    junction_l: dict[int, float] | None,
    junction_l_linear: dict[int, float] | None = None,
) -> tuple[np.ndarray, np.ndarray, list[np.ndarray], list[float], list[float]]:
    """Capacitance and inverse-inductance matrices over non-ground nodes,
    plus per-junction incidence vectors, bare inductances, and the
    inductances actually stamped.

    ``junction_l`` overrides the junction inductances themselves (1-based
    port -> henries); ``junction_l_linear`` overrides only the value used
    for the quadratic stamp, leaving E_J at the bare value.
    """
    nodes = netlist.nodes
    index = {node: k for k, node in enumerate(nodes)}
    n = len(nodes)

    def node_id(name: str) -> int:
        return -1 if is_ground(name) else index[name]

    cmat = np.zeros((n, n))
    mmat = np.zeros((n, n))

    def stamp(mat: np.ndarray, i: int, j: int, value: float) -> None:
        if i >= 0:
            mat[i, i] += value
        if j >= 0:
            mat[j, j] += value
        if i >= 0 and j >= 0 and i != j:
            mat[i, j] -= value
            mat[j, i] -= value

    incidences: list[np.ndarray] = []
    inductances: list[float] = []
    stamped: list[float] = []
    port = 0
    for el in netlist.elements:
        i, j = node_id(el.node1), node_id(el.node2)
        if isinstance(el, Capacitor):
            stamp(cmat, i, j, el.farads)
        elif isinstance(el, Inductor):
            stamp(mmat, i, j, 1.0 / el.henries)
        elif isinstance(el, TransmissionLine):
            raise NetlistValidationError(
                f"transmission line {el.name!r} must be discretized before "
                "normal-mode analysis"
            )
        elif isinstance(el, JosephsonJunction):
            port += 1
            l_j = el.henries
            if junction_l and port in junction_l:
                l_j = junction_l[port]
            if l_j <= 0.0:
                raise NetlistValidationError(
                    f"junction {el.name!r} needs a positive inductance"
                )
            l_lin = l_j
            if junction_l_linear and port in junction_l_linear:
                l_lin = junction_l_linear[port]
                if l_lin <= 0.0:
                    raise NetlistValidationError(
                        f"junction {el.name!r} needs a positive "
                        "linearization inductance"
                    )
            stamp(mmat, i, j, 1.0 / l_lin)
            if el.cj_ff > 0.0:
                stamp(cmat, i, j, el.farads)
            p = np.zeros(n)
            if i >= 0:
                p[i] += 1.0
            if j >= 0:
                p[j] -= 1.0
            incidences.append(p)
            inductances.append(l_j)
            stamped.append(l_lin)
    if not incidences:
        raise NetlistValidationError("circuit has no junctions")
    return cmat, mmat, incidences, inductances, stamped


def linear_normal_modes(
    netlist: Netlist,
    junction_l: dict[int, float] | None = None,
    levels=None,
    cosine_order: int | None = None,
    mode_max_hz: float | None = None,
    junction_l_linear: dict[int, float] | None = None,
) -> HamiltonianModel:
    """Normal modes of the linearized lumped circuit, quantized.

    ``junction_l`` overrides junction inductances by 1-based port number
    (e.g. after tuning).  ``junction_l_linear`` sets the linearization
    point only: the quadratic stamp uses it while E_J keeps the bare
    inductance, so the linear modes can be placed at the observed
    (inductance-renormalized) frequencies.  ``levels`` is an int (uniform
    truncation), a per-mode sequence, or ``None`` for the default of 14
    on junction-dominated modes and 4 elsewhere.  Capacitance-free nodes
    are eliminated exactly; modes above ``mode_max_hz`` are dropped from
    the quantum model (their count is recorded), except that a junction's
    own dominant mode is always kept.
    """
    cmat, mmat, incidences, inductances, stamped = _assemble_matrices(
        netlist, junction_l, junction_l_linear
    )
    n = cmat.shape[0]

    massive = np.flatnonzero(np.diag(cmat) > 0.0)
    massless = np.flatnonzero(np.diag(cmat) == 0.0)
    if massive.size == 0:
        raise SingularMassError("no node carries any capacitance")
    m_rr = mmat[np.ix_(massive, massive)]
    c_rr = cmat[np.ix_(massive, massive)]
    if massless.size:
        m_ee = mmat[np.ix_(massless, massless)]
        m_er = mmat[np.ix_(massless, massive)]
        try:
            reconstruct = -np.linalg.solve(m_ee, m_er)
        except np.linalg.LinAlgError:
            raise SingularMassError(
                "capacitance-free nodes could not be eliminated "
                "(singular inductive sub-network)"
            ) from None
        m_rr = m_rr + mmat[np.ix_(massive, massless)] @ reconstruct

    try:
        w2, vecs = eigh(m_rr, c_rr)
    except np.linalg.LinAlgError:
        raise SingularMassError(
            "capacitance matrix is singular on the remaining nodes "
            "(a collective mode carries no charge)"
        ) from None

    scale = max(w2.max(), 1.0)
    n_zero = int(np.sum(w2 < _ZERO_MODE_TOL * scale))
    if n_zero:
        raise FloatingModeError(
            f"{n_zero} zero-frequency mode(s): the circuit has floating "
            "inductive islands"
        )
    freqs = np.sqrt(w2)

    full = np.zeros((n, len(freqs)))
    full[massive, :] = vecs
    if massless.size:
        full[massless, :] = reconstruct @ vecs

    zpf = np.zeros((len(incidences), len(freqs)))
    for i, p in enumerate(incidences):
        zpf[i, :] = (p @ full) * np.sqrt(HBAR / (2.0 * freqs)) / PHI0

    qubit_modes = []
    for i in range(len(incidences)):
        order = np.argsort(-np.abs(zpf[i, :]))
        chosen = next((k for k in order if k not in qubit_modes), None)
        if chosen is None or abs(zpf[i, chosen]) == 0.0:
            raise LabelingError(
                f"no distinct dominant mode for junction {i + 1}"
            )
        qubit_modes.append(int(chosen))

    keep = np.arange(len(freqs))
    dropped = 0
    if mode_max_hz is not None:
        mask = freqs <= TWO_PI * mode_max_hz
        mask[qubit_modes] = True
        keep = np.flatnonzero(mask)
        dropped = len(freqs) - keep.size
        remap = {int(old): new for new, old in enumerate(keep)}
        qubit_modes = [remap[k] for k in qubit_modes]
        freqs = freqs[keep]
        zpf = zpf[:, keep]

    if levels is None:
        levels = _auto_levels(zpf, qubit_modes)
    e_j = np.array([PHI0**2 / l for l in inductances])
    e_lin = np.array([PHI0**2 / l for l in stamped])
    return HamiltonianModel(
        mode_freqs=freqs,
        phase_zpf=zpf,
        josephson_energies=e_j,
        qubit_modes=tuple(qubit_modes),
        levels=_normalize_levels(levels, len(freqs)),
        cosine_order=None if cosine_order is None else int(cosine_order),
        dropped_modes=dropped,
        linearization_energies=e_lin,
    )


def renormalized_linearization(
    netlist: Netlist,
    junction_l: dict[int, float] | None = None,
    e_charging: dict[int, float] | None = None,
) -> dict[int, float]:
    """Linearization inductances L_J / (1 - 2 E_C / (hbar w)) per port.

    ``w`` is each junction's dominant normal-mode frequency, found
    self-consistently (the renormalized inductances feed back into the
    modes); E_C (overridable per port via ``e_charging``, in joules)
    defaults to the reduced shunt capacitance seen by the junction in the
    given netlist.  Feeding the result to ``linear_normal_modes`` as
    ``junction_l_linear`` places the linear modes at the observed qubit
    frequencies; together with the normal-ordered cosine terms this
    reproduces the junction's true residual potential, whose
    Wick-contraction quadratic cancels the linearization shift at leading
    order.
    """
    junctions = netlist.junctions
    bare = {p: j.henries for p, j in enumerate(junctions, start=1)}
    if junction_l:
        bare.update(junction_l)
    if e_charging is None:
        c_matrix = capacitive_reduction(netlist)
        e_charging = {
            p: charging_energy(c_matrix[p - 1, p - 1]) for p in bare
        }
    ec = {p: e_charging[p] / HBAR for p in bare}
    lin = dict(bare)
    for _ in range(30):
        model = linear_normal_modes(
            netlist, junction_l=bare, junction_l_linear=lin, levels=2
        )
        new = {}
        for p in bare:
            w_q = model.mode_freqs[model.qubit_modes[p - 1]]
            factor = 1.0 - 2.0 * ec[p] / w_q
            if factor <= 0.0:
                raise ConvergenceError(
                    f"junction {p} mode at {w_q / TWO_PI / 1e9:.3f} GHz "
                    "is below twice its charging energy; inductance "
                    "renormalization breaks down"
                )
            new[p] = bare[p] / factor
        shift = max(abs(new[p] - lin[p]) / lin[p] for p in bare)
        lin = new
        if shift < 1e-12:
            return lin
    raise ConvergenceError(
        "junction inductance renormalization did not settle in 30 rounds"
    )


def _ladder_x(d: int) -> np.ndarray:
    """(a + a^dag) on a d-level mode."""
    x = np.zeros((d, d))
    for m in range(d - 1):
        x[m, m + 1] = x[m + 1, m] = math.sqrt(m + 1.0)
    return x


def _lifted_quadratures(levels: tuple[int, ...]) -> list[np.ndarray]:
    """(a + a^dag) for each mode, embedded in the full product space."""
    total = int(np.prod(levels))
    if total > _MAX_DIM:
        raise ValueError(
            f"Hamiltonian dimension {total} exceeds the dense-solver cap "
            f"{_MAX_DIM}; lower the truncation or drop high modes"
        )
    ops = []
    for k, d in enumerate(levels):
        x = _ladder_x(d)
        left = int(np.prod(levels[:k])) if k else 1
        right = int(np.prod(levels[k + 1 :])) if k + 1 < len(levels) else 1
        op = np.kron(np.kron(np.eye(left), x), np.eye(right))
        ops.append(op)
    return ops


def _cosine_phase(levels: tuple[int, ...], weights: np.ndarray) -> np.ndarray:
    """cos(sum_k weights[k] x_k) on the product space, exactly.

    The mode quadratures commute, so exp(i Phi) factorizes into per-mode
    phase factors, each computed from the small per-mode
    eigendecomposition; no series truncation is involved.
    """
    t = np.ones((1, 1), dtype=complex)
    for k, d in enumerate(levels):
        w, v = np.linalg.eigh(weights[k] * _ladder_x(d))
        u = (v * np.exp(1j * w)) @ v.T
        t = np.kron(t, u)
    return t.real


def _solve_spectrum(
    model: HamiltonianModel, pair: tuple[int, int]
) -> tuple[DressedSpectrum, np.ndarray]:
    if model.cosine_order not in (None, 4, 6):
        raise ValueError("cosine_order must be 4, 6, or None (full cosine)")
    levels = model.levels
    dims = tuple(levels)
    occupations = np.indices(dims).reshape(len(dims), -1)
    bare = (model.mode_freqs[:, None] * occupations).sum(axis=0)
    h = np.diag(bare)

    quadratures = _lifted_quadratures(levels)
    eye = np.eye(h.shape[0])
    for i, e_j in enumerate(model.josephson_energies):
        e_lin = (
            e_j
            if model.linearization_energies is None
            else model.linearization_energies[i]
        )
        if e_j == 0.0 and e_lin == 0.0:
            continue
        phi = sum(
            model.phase_zpf[i, k] * quadratures[k]
            for k in range(len(levels))
        )
        phi2 = phi @ phi
        # Residual junction potential beyond the quadratic stamp: the
        # mismatch (E_J - E_lin) phi^2 / 2 restores the true inductance
        # when the linearization point was moved, then the cosine --
        # either in full or truncated at the requested order.
        if model.cosine_order is None:
            cos_phi = _cosine_phase(levels, model.phase_zpf[i])
            term = -(e_j / HBAR) * (cos_phi - eye) - 0.5 * (e_lin / HBAR) * phi2
        else:
            phi4 = phi2 @ phi2
            term = (
                0.5 * ((e_j - e_lin) / HBAR) * phi2
                - (e_j / HBAR) / 24.0 * phi4
            )
            if model.cosine_order == 6:
                phi6 = phi2 @ phi4
                term = term + (e_j / HBAR) / 720.0 * phi6
        h = h + term
    h = 0.5 * (h + h.T)
    assert np.array_equal(h, h.T), "Hamiltonian assembly lost symmetry"

    energies, states = eigh(h)

    labels: dict[tuple[int, ...], int] = {}
    quality: dict[tuple[int, ...], float] = {}
    if not (
        1 <= pair[0] <= len(model.qubit_modes)
        and 1 <= pair[1] <= len(model.qubit_modes)
        and pair[0] != pair[1]
    ):
        raise ValueError(f"invalid junction pair {pair}")
    qi = model.qubit_modes[pair[0] - 1]
    qj = model.qubit_modes[pair[1] - 1]
    wanted = []
    for occ_i, occ_j in ((0, 0), (1, 0), (0, 1), (1, 1)):
        occ = [0] * len(levels)
        occ[qi] += occ_i
        occ[qj] += occ_j
        wanted.append(tuple(occ))
    for occ in wanted:
        flat = int(np.ravel_multi_index(occ, dims))
        overlaps = np.abs(states[flat, :])
        idx = int(np.argmax(overlaps))
        q = float(overlaps[idx])
        if q < 0.5:
            raise LabelingError(
                f"bare state {occ} has best dressed overlap {q:.3f} < 0.5; "
                "states too hybridized to label"
            )
        labels[occ] = idx
        quality[occ] = q
    if len(set(labels.values())) != len(labels):
        raise LabelingError(
            "two bare states map to the same dressed eigenstate"
        )
    spectrum = DressedSpectrum(
        energies=energies, labels=labels, overlap_quality=quality
    )
    return spectrum, np.array(wanted)


def oracle_zz(
    model: HamiltonianModel,
    convergence_tol: float | None = None,
    pair: tuple[int, int] = (1, 2),
    check_convergence: bool = True,
) -> OracleResult:
    """Exact ZZ rate (rad/s) for one junction pair (1-based), with a
    truncation-convergence report.

    The convergence metric is the change in ZZ when every mode gets one
    more level; ``converged`` is False when a tolerance was requested and
    the metric exceeds it.  ``check_convergence=False`` skips the bumped
    run (used inside iteration loops).
    """
    for k, n in enumerate(model.levels):
        need = 4 if k in model.qubit_modes else 3
        if n < need:
            raise ValueError(
                f"mode {k} has {n} levels; junction-dominated modes need "
                ">= 4 and the rest >= 3"
            )

    def zz_of(m: HamiltonianModel):
        spectrum, wanted = _solve_spectrum(m, pair)
        e = {
            occ: spectrum.energies[idx] for occ, idx in spectrum.labels.items()
        }
        keys = [tuple(w) for w in wanted]
        freqs = (e[keys[1]] - e[keys[0]], e[keys[2]] - e[keys[0]])
        return (
            e[keys[3]] - e[keys[1]] - e[keys[2]] + e[keys[0]],
            spectrum,
            freqs,
        )

    zz, spectrum, freqs = zz_of(model)
    delta = converged = None
    if check_convergence:
        zz_bumped, _, _ = zz_of(model.bumped(1))
        delta = zz_bumped - zz
        converged = (
            True if convergence_tol is None else abs(delta) <= convergence_tol
        )
    return OracleResult(
        zz=zz,
        spectrum=spectrum,
        qubit_freqs=freqs,
        convergence_delta=delta,
        converged=converged,
        dimension=int(np.prod(model.levels)),
    )
