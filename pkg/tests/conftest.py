"""Shared fixtures.

The expensive fixture here is ``bus_sweep``: the 50-point bus-frequency
sweep of the reference two-qubit device with all four perturbative
methods plus the exact diagonalization.  Several acceptance checks grade
different aspects of the same sweep, so it runs once per session.
"""

import os

import pytest

from zzcalc import (
    MethodVariant,
    NodalCircuit,
    RationalTransImpedance,
    SweepSpec,
    parse_netlist,
    run_sweep,
)

TESTS_DIR = os.path.dirname(os.path.abspath(__file__))
DEVICES_DIR = os.path.join(os.path.dirname(TESTS_DIR), "devices")

#: Two transmons coupled through one LC bus resonator.  Pad shunts 60 fF,
#: coupling caps 5 fF, bus cap 300 fF; the bus inductor sets f_b.
BUS_NETLIST = """\
C C1 p1 0 60
C C2 p2 0 60
C Cc1 p1 b 5
C Cc2 b p2 5
C Cb b 0 300
L Lb b 0 10
JJ J1 p1 0 LJ=13.7
JJ J2 p2 0 LJ=12.7
"""

#: Rational two-port trans-impedance with exchange-coupling zeros at
#: 4.5 / 5.5 GHz and poles at DC / 4.0 / 6.25 GHz.
RATIONAL_SCALE = -7.97e10
RATIONAL_ZEROS = (4.5e9, 5.5e9)
RATIONAL_POLES = (0.0, 4.0e9, 6.25e9)


def make_single_qubit(c_ff: float = 65.0, lj_nh: float = 15.0) -> NodalCircuit:
    """Isolated transmon: one junction shunted by one capacitor."""
    return NodalCircuit(
        parse_netlist(f"C C1 p1 0 {c_ff}\nJJ J1 p1 0 LJ={lj_nh}\n")
    )


@pytest.fixture
def bus_netlist():
    return parse_netlist(BUS_NETLIST)


@pytest.fixture
def bus_provider(bus_netlist):
    return NodalCircuit(bus_netlist)


@pytest.fixture
def rational_provider():
    return RationalTransImpedance(
        scale=RATIONAL_SCALE,
        zeros_hz=RATIONAL_ZEROS,
        poles_hz=RATIONAL_POLES,
        shunt_c=(65e-15, 65e-15),
    )


@pytest.fixture
def coupler_netlist():
    with open(os.path.join(DEVICES_DIR, "two_arm_coupler.nl")) as handle:
        return parse_netlist(handle.read())


@pytest.fixture(scope="session")
def bus_sweep():
    """The reference device swept over bus frequency 5.6 -> 9.0 GHz at 50
    points, qubits re-tuned to 5.0 / 5.2 GHz at every point, with all
    perturbative methods and the exact reference."""
    spec = SweepSpec(
        parameter="bus:Lb:Cb",
        start=5.6e9,
        stop=9.0e9,
        points=50,
        targets={1: 5.0e9, 2: 5.2e9},
    )
    netlist = parse_netlist(BUS_NETLIST)
    rows = run_sweep(
        netlist, spec, methods=list(MethodVariant) + ["exact"]
    )
    return spec, rows
