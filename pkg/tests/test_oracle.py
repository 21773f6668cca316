"""Exact-diagonalization oracle: modes, discretization, and soundness.

The full-cosine spectrum is cross-validated against an independent
charge-basis diagonalization of the transmon Hamiltonian written from
scratch here, so the two routes share no code.
"""

import math
from dataclasses import replace

import numpy as np
import pytest

from zzcalc import (
    NodalCircuit,
    capacitive_reduction,
    default_segments,
    discretize_lines,
    linear_normal_modes,
    oracle_zz,
    parse_netlist,
    renormalized_linearization,
    solve_qubit,
)
from zzcalc.constants import C_LIGHT, HBAR, PHI0, TWO_PI, charging_energy
from zzcalc.errors import FloatingModeError

from conftest import BUS_NETLIST

SINGLE = "C C1 p1 0 65\nJJ J1 p1 0 LJ=15.5865\n"

# Two transmons with no coupling element at all.
DECOUPLED = (
    "C C1 p1 0 65\nJJ J1 p1 0 LJ=15.5865\n"
    "C C2 p2 0 55\nJJ J2 p2 0 LJ=9.5\n"
)

OPEN_STUB = (
    "C C1 p1 0 1e-3\nJJ J1 p1 0 LJ=15\n"
    "TL T1 p1 x Z0=50 LEN=3.75 EEFF=6.45\n"
)


def transmon_charge_basis(e_c, e_j, n_charge=40):
    """Lowest transmon levels (rad/s) by charge-basis diagonalization,
    averaged over integer and half-integer offset charge to remove the
    charge dispersion (the average sits at the band center, which is what
    a well-localized Fock-basis treatment converges to)."""

    def levels(ng):
        n = np.arange(-n_charge, n_charge + 1)
        h = np.diag(4.0 * e_c * (n - ng) ** 2)
        h -= e_j / 2.0 * (np.eye(len(n), k=1) + np.eye(len(n), k=-1))
        return np.linalg.eigvalsh(h)[:3]

    return 0.5 * (levels(0.0) + levels(0.5))


# ------------------------------------------------------------ normal modes


def test_single_mode_frequency_zpf_and_energies():
    model = linear_normal_modes(parse_netlist(SINGLE))
    l_j, c = 15.5865e-9, 65e-15
    w_bare = 1.0 / math.sqrt(l_j * c)
    assert model.mode_freqs.shape == (1,)
    assert model.mode_freqs[0] == pytest.approx(w_bare, rel=1e-12)
    # Closed-form phase zero-point amplitude of an LC mode.
    zpf = math.sqrt(HBAR * math.sqrt(l_j / c) / 2.0) / PHI0
    assert model.phase_zpf[0, 0] == pytest.approx(zpf, rel=1e-12)
    assert model.josephson_energies[0] == pytest.approx(PHI0**2 / l_j, rel=1e-12)
    assert model.qubit_modes == (0,)
    assert model.levels == (14,)
    assert model.dropped_modes == 0


@pytest.mark.parametrize("c_ff,lj_nh", [(50.0, 12.0), (80.0, 18.0), (65.0, 9.0)])
def test_zpf_closed_form(c_ff, lj_nh):
    text = f"C C1 p1 0 {c_ff}\nJJ J1 p1 0 LJ={lj_nh}\n"
    model = linear_normal_modes(parse_netlist(text))
    z = math.sqrt(lj_nh * 1e-9 / (c_ff * 1e-15))
    assert model.phase_zpf[0, 0] == pytest.approx(
        math.sqrt(HBAR * z / 2.0) / PHI0, rel=1e-12
    )


def test_junction_inductance_overrides():
    base = linear_normal_modes(parse_netlist(SINGLE))
    tuned = linear_normal_modes(parse_netlist(SINGLE), junction_l={1: 10e-9})
    assert tuned.mode_freqs[0] > base.mode_freqs[0]
    assert tuned.josephson_energies[0] == pytest.approx(PHI0**2 / 10e-9, rel=1e-12)


def test_linearization_point_does_not_change_josephson_energy():
    model = linear_normal_modes(
        parse_netlist(SINGLE), junction_l_linear={1: 18e-9}
    )
    assert model.josephson_energies[0] == pytest.approx(
        PHI0**2 / 15.5865e-9, rel=1e-12
    )
    assert model.linearization_energies[0] == pytest.approx(
        PHI0**2 / 18e-9, rel=1e-12
    )
    # The linear mode moved to the linearization inductance.
    assert model.mode_freqs[0] == pytest.approx(
        1.0 / math.sqrt(18e-9 * 65e-15), rel=1e-12
    )


def test_mode_ceiling_drops_modes_but_keeps_qubit_modes():
    full = linear_normal_modes(parse_netlist(BUS_NETLIST))
    capped = linear_normal_modes(parse_netlist(BUS_NETLIST), mode_max_hz=2.0e9)
    assert len(full.mode_freqs) == 3  # two qubit modes plus the bus mode
    assert capped.dropped_modes == 1
    assert len(capped.mode_freqs) == 2
    assert sorted(capped.qubit_modes) == [0, 1]


def test_floating_inductive_island_rejected():
    text = (
        "C C1 p1 0 65\nJJ J1 p1 0 LJ=15\n"
        "C Cc p1 x 1\nC Cx x 0 10\n"  # x has charge but no restoring flux
    )
    with pytest.raises(FloatingModeError):
        linear_normal_modes(parse_netlist(text))


def test_renormalized_linearization_fixed_point():
    netlist = parse_netlist(SINGLE)
    lin = renormalized_linearization(netlist)
    assert lin[1] > 15.5865e-9
    model = linear_normal_modes(netlist, junction_l_linear=lin)
    w_q = model.mode_freqs[0]
    e_c = charging_energy(65e-15) / HBAR
    assert lin[1] == pytest.approx(
        15.5865e-9 / (1.0 - 2.0 * e_c / w_q), rel=1e-9
    )


# ----------------------------------------------------------- discretization


def test_discretize_open_stub_bookkeeping():
    netlist = parse_netlist(OPEN_STUB)
    ladder = discretize_lines(netlist, {"T1": 4})
    from zzcalc.netlist import Capacitor, Inductor, TransmissionLine

    inductors = [e for e in ladder.elements if isinstance(e, Inductor)]
    line_caps = [
        e
        for e in ladder.elements
        if isinstance(e, Capacitor) and e.name != "C1"
    ]
    assert not any(isinstance(e, TransmissionLine) for e in ladder.elements)
    assert len(inductors) == 4
    assert len(line_caps) == 5  # two half caps at the ends, three interior
    l_total = 50.0 * math.sqrt(6.45) * 3.75e-3 / C_LIGHT
    c_total = math.sqrt(6.45) * 3.75e-3 / (50.0 * C_LIGHT)
    assert sum(e.henries for e in inductors) == pytest.approx(l_total, rel=1e-12)
    assert sum(e.farads for e in line_caps) == pytest.approx(c_total, rel=1e-12)
    assert ladder.nodes == ("p1", "T1__n1", "T1__n2", "T1__n3", "x")


def test_discretize_grounded_stub_sheds_far_end_capacitor():
    text = "C C1 p1 0 65\nJJ J1 p1 0 LJ=15\nTL T2 p1 0 Z0=50 LEN=3.75 EEFF=6.45\n"
    ladder = discretize_lines(parse_netlist(text), {"T2": 4})
    from zzcalc.netlist import Capacitor, Inductor

    inductors = [e for e in ladder.elements if isinstance(e, Inductor)]
    line_caps = [
        e
        for e in ladder.elements
        if isinstance(e, Capacitor) and e.name != "C1"
    ]
    assert len(inductors) == 4
    assert len(line_caps) == 4  # the grounded end carries no capacitor


def test_ladder_matches_continuous_line_below_band():
    netlist = parse_netlist(OPEN_STUB)
    cont = NodalCircuit(netlist)
    disc = NodalCircuit(discretize_lines(netlist, {"T1": 40}))
    # Quarter-wave zero crossing sits at 7.87 GHz; stay below it.
    for f in np.linspace(1e9, 7.5e9, 27):
        z_cont = cont.z_matrix(TWO_PI * f)[0, 0].imag
        z_disc = disc.z_matrix(TWO_PI * f)[0, 0].imag
        assert abs(z_disc - z_cont) <= 0.011 * abs(z_cont)


def test_default_segments_scaling_and_budget():
    netlist = parse_netlist(OPEN_STUB)
    assert default_segments(netlist, 8e9) == {"T1": 8}
    assert default_segments(netlist, 8e9, mode_budget=30) == {"T1": 8}
    capped = default_segments(netlist, 16e9)
    uncapped = default_segments(netlist, 16e9, mode_budget=40)
    assert capped["T1"] < uncapped["T1"]  # budget limits the count
    assert default_segments(parse_netlist(SINGLE), 8e9) == {}


# ----------------------------------------------------------------- spectrum


def test_full_cosine_matches_charge_basis():
    model = linear_normal_modes(parse_netlist(DECOUPLED), levels=(20, 14))
    result = oracle_zz(model, check_convergence=False)
    e = transmon_charge_basis(
        charging_energy(65e-15) / HBAR, PHI0**2 / 15.5865e-9 / HBAR
    )
    assert result.qubit_freqs[0] == pytest.approx(e[1] - e[0], abs=TWO_PI * 200.0)


def test_oracle_tracks_perturbative_frequency():
    result = oracle_zz(linear_normal_modes(parse_netlist(DECOUPLED)),
                       check_convergence=False)
    q = solve_qubit(
        NodalCircuit(parse_netlist(SINGLE)), 1, 15.5865e-9, 65e-15
    )
    assert result.qubit_freqs[0] == pytest.approx(q.omega, rel=5e-3)


def test_decoupled_pair_has_no_zz():
    model = linear_normal_modes(parse_netlist(DECOUPLED))
    result = oracle_zz(model, convergence_tol=TWO_PI * 1.0)
    assert abs(result.zz) < TWO_PI * 1.0
    assert result.converged is True
    assert abs(result.convergence_delta) < TWO_PI * 1.0
    assert result.dimension == 14 * 14
    f1, f2 = (f / TWO_PI for f in result.qubit_freqs)
    assert f1 == pytest.approx(4.6809e9, rel=1e-4)
    assert f2 == pytest.approx(6.5898e9, rel=1e-4)


def test_harmonic_limit_zz_is_zero():
    model = linear_normal_modes(parse_netlist(BUS_NETLIST), levels=8)
    harmonic = replace(
        model,
        josephson_energies=np.zeros(2),
        linearization_energies=None,
    )
    result = oracle_zz(harmonic, check_convergence=False)
    assert result.zz == 0.0


def test_gauge_ground_to_ground_capacitor_is_a_noop():
    base = parse_netlist(BUS_NETLIST)
    gauged = parse_netlist(BUS_NETLIST + "C Cg 0 GND 10\n")
    assert np.array_equal(capacitive_reduction(base), capacitive_reduction(gauged))
    m_a = linear_normal_modes(base, levels=8)
    m_b = linear_normal_modes(gauged, levels=8)
    assert np.array_equal(m_a.mode_freqs, m_b.mode_freqs)
    assert np.array_equal(m_a.phase_zpf, m_b.phase_zpf)
    zz_a = oracle_zz(m_a, check_convergence=False).zz
    zz_b = oracle_zz(m_b, check_convergence=False).zz
    assert zz_a == zz_b


def test_internal_node_renaming_is_a_noop():
    renamed = BUS_NETLIST.replace(" b ", " bus ").replace(" b\n", " bus\n")
    assert "bus" in renamed and renamed != BUS_NETLIST
    m_a = linear_normal_modes(parse_netlist(BUS_NETLIST), levels=8)
    m_b = linear_normal_modes(parse_netlist(renamed), levels=8)
    assert np.array_equal(m_a.mode_freqs, m_b.mode_freqs)
    assert oracle_zz(m_a, check_convergence=False).zz == oracle_zz(
        m_b, check_convergence=False
    ).zz


def test_coupled_pair_convergence_report():
    model = linear_normal_modes(parse_netlist(BUS_NETLIST))
    result = oracle_zz(model, convergence_tol=TWO_PI * 100.0)
    assert result.converged is True
    assert abs(result.convergence_delta) < TWO_PI * 100.0
    assert result.dimension == int(np.prod(model.levels))
    assert result.zz != 0.0


def test_truncation_and_pair_guards():
    model = linear_normal_modes(parse_netlist(BUS_NETLIST))
    with pytest.raises(ValueError):
        oracle_zz(model.with_levels(3), check_convergence=False)
    with pytest.raises(ValueError):
        oracle_zz(model, pair=(1, 1), check_convergence=False)
    with pytest.raises(ValueError):
        oracle_zz(model, pair=(0, 2), check_convergence=False)
    with pytest.raises(ValueError):
        oracle_zz(
            replace(model, cosine_order=5), check_convergence=False
        )
    with pytest.raises(ValueError):
        model.with_levels((8, 8))  # three modes need three entries


def test_taylor_orders_bracket_the_full_cosine():
    model = linear_normal_modes(parse_netlist(BUS_NETLIST))
    full = oracle_zz(model, check_convergence=False).zz
    quartic = oracle_zz(
        replace(model, cosine_order=4), check_convergence=False
    ).zz
    sextic = oracle_zz(
        replace(model, cosine_order=6), check_convergence=False
    ).zz
    # The sextic correction must land closer to the full cosine than the
    # quartic truncation does.
    assert abs(sextic - full) < abs(quartic - full)
