"""Circuit file parsing, serialization, and capacitor-network reduction."""

import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from zzcalc import parse_netlist, serialize_netlist, capacitive_reduction
from zzcalc.errors import (
    DegenerateReductionError,
    NetlistError,
    NetlistSyntaxError,
    NetlistValidationError,
)
from zzcalc.netlist import (
    DEFAULT_EPS_EFF,
    Capacitor,
    Inductor,
    JosephsonJunction,
    TransmissionLine,
    is_ground,
)

from conftest import BUS_NETLIST


def test_parse_all_element_kinds():
    netlist = parse_netlist(
        "C C1 a 0 60\n"
        "L L1 a b 10\n"
        "JJ J1 b 0 LJ=12.5 CJ=3\n"
        "TL T1 b c Z0=50 LEN=2.5 EEFF=6.0\n"
    )
    c, l, j, t = netlist.elements
    assert isinstance(c, Capacitor) and c.farads == pytest.approx(60e-15)
    assert isinstance(l, Inductor) and l.henries == pytest.approx(10e-9)
    assert isinstance(j, JosephsonJunction)
    assert j.henries == pytest.approx(12.5e-9)
    assert j.farads == pytest.approx(3e-15)
    assert isinstance(t, TransmissionLine)
    assert t.z0_ohm == 50.0
    assert t.meters == pytest.approx(2.5e-3)
    assert t.eps_eff == 6.0


def test_parse_comments_blanks_and_case():
    netlist = parse_netlist(
        "# full-line comment\n"
        "\n"
        "c C1 a 0 60  # trailing comment\n"
        "jj J1 a gnd lj=12\n"
    )
    assert len(netlist.elements) == 2
    assert netlist.junctions[0].lj_nh == 12.0


def test_default_eps_eff_applied():
    netlist = parse_netlist("TL T1 a b Z0=50 LEN=1\nJJ J1 a 0 LJ=10\n")
    assert netlist.transmission_lines[0].eps_eff == DEFAULT_EPS_EFF


def test_ground_aliases():
    assert is_ground("0") and is_ground("GND") and is_ground("gnd")
    assert not is_ground("g1")
    netlist = parse_netlist("C C1 GND a 5\n")
    assert netlist.nodes == ("a",)


def test_port_order_is_declaration_order():
    netlist = parse_netlist(
        "JJ JB q2 0 LJ=11\nC C1 q1 0 60\nJJ JA q1 0 LJ=12\nC C2 q2 0 60\n"
    )
    assert [j.name for j in netlist.junctions] == ["JB", "JA"]


def test_serialize_round_trip():
    netlist = parse_netlist(BUS_NETLIST)
    again = parse_netlist(serialize_netlist(netlist))
    assert again == netlist


@settings(max_examples=50, deadline=None)
@given(
    c_ff=st.floats(0.1, 1e4),
    lj_nh=st.floats(0.1, 1e3),
    z0=st.floats(1.0, 500.0),
    len_mm=st.floats(1e-3, 50.0),
    eps=st.floats(1.0, 12.0),
)
def test_serialize_round_trip_values(c_ff, lj_nh, z0, len_mm, eps):
    text = (
        f"C C1 a 0 {c_ff!r}\n"
        f"JJ J1 a 0 LJ={lj_nh!r}\n"
        f"TL T1 a b Z0={z0!r} LEN={len_mm!r} EEFF={eps!r}\n"
    )
    netlist = parse_netlist(text)
    assert parse_netlist(serialize_netlist(netlist)) == netlist


@pytest.mark.parametrize(
    "text, line, fragment",
    [
        ("C C1 a\n", 1, "name and two nodes"),
        ("Q X a 0 5\n", 1, "unknown element kind"),
        ("C C1 a 0 60\nC C2 a 0 banana\n", 2, "capacitance"),
        ("C C1 a 0 -5\n", 1, "positive"),
        ("L L1 a 0 0\n", 1, "positive"),
        ("JJ J1 a 0\n", 1, "missing keyword 'LJ'"),
        ("JJ J1 a 0 LJ=10 LJ=11\n", 1, "duplicate keyword"),
        ("JJ J1 a 0 LJ=10 FOO=1\n", 1, "unknown keyword"),
        ("JJ J1 a a LJ=10\n", 1, "terminals must differ"),
        ("TL T1 a b LEN=1\n", 1, "missing keyword 'Z0'"),
        ("TL T1 a b Z0=50 LEN=1 EEFF=0.5\n", 1, ">= 1"),
        ("C C1 a 0 60\nC C1 b 0 5\n", 2, "duplicate element name"),
    ],
)
def test_parse_errors_carry_line_numbers(text, line, fragment):
    with pytest.raises(NetlistError) as info:
        parse_netlist(text)
    assert info.value.line == line
    assert fragment in str(info.value)


def test_syntax_vs_validation_error_split():
    with pytest.raises(NetlistSyntaxError):
        parse_netlist("C C1 a 0\n")
    with pytest.raises(NetlistValidationError):
        parse_netlist("C C1 a 0 -1\n")


def test_with_value_and_junction_inductances():
    netlist = parse_netlist(BUS_NETLIST)
    bumped = netlist.with_value("Cb", 400.0)
    assert bumped.element("Cb").value_ff == 400.0
    assert netlist.element("Cb").value_ff == 300.0
    retuned = netlist.with_junction_inductances({2: 11.0})
    assert retuned.junctions[0].lj_nh == 13.7
    assert retuned.junctions[1].lj_nh == 11.0
    with pytest.raises(KeyError):
        netlist.with_value("nope", 1.0)


def test_with_eps_eff_replaces_every_line():
    netlist = parse_netlist(
        "TL T1 a b Z0=50 LEN=1 EEFF=5.0\nTL T2 b c Z0=50 LEN=1\nJJ J a 0 LJ=9\n"
    )
    replaced = netlist.with_eps_eff(7.25)
    assert all(t.eps_eff == 7.25 for t in replaced.transmission_lines)
    with pytest.raises(NetlistValidationError):
        netlist.with_eps_eff(-1.0)


def test_reduction_series_parallel_anchor():
    # One 60 fF pad plus 5 fF in series with a grounded 60 fF node:
    # C = 60 + 5*60/65 fF by hand reduction.
    netlist = parse_netlist(
        "C Cpad q 0 60\nC Cc q mid 5\nC Cfar mid 0 60\nJJ J1 q 0 LJ=10\n"
    )
    c = capacitive_reduction(netlist)
    assert c.shape == (1, 1)
    assert c[0, 0] == pytest.approx((60.0 + 5.0 * 60.0 / 65.0) * 1e-15, rel=1e-12)


def test_reduction_bus_device_symmetric():
    c = capacitive_reduction(parse_netlist(BUS_NETLIST))
    assert c.shape == (2, 2)
    assert c[0, 1] == pytest.approx(c[1, 0])
    assert c[0, 0] == pytest.approx(c[1, 1], rel=1e-12)  # symmetric device
    # Pad plus a little of the coupling path, and a small cross term
    # mediated by the bus node.
    assert 60e-15 < c[0, 0] < 66e-15
    assert 0.0 < abs(c[0, 1]) < 1e-15
    assert np.all(np.linalg.eigvalsh(c) > 0.0)


def test_reduction_junction_cj_counts():
    bare = capacitive_reduction(parse_netlist("C C1 q 0 60\nJJ J q 0 LJ=10\n"))
    with_cj = capacitive_reduction(
        parse_netlist("C C1 q 0 60\nJJ J q 0 LJ=10 CJ=4\n")
    )
    assert with_cj[0, 0] == pytest.approx(bare[0, 0] + 4e-15, rel=1e-12)


def test_reduction_include_lines_adds_half_ends():
    netlist = parse_netlist(
        "C C1 q 0 60\nJJ J q 0 LJ=10\nTL T q 0 Z0=50 LEN=1 EEFF=4.0\n"
    )
    without = capacitive_reduction(netlist)
    c_total = math.sqrt(4.0) * 1e-3 / (50.0 * 299792458.0)
    with_lines = capacitive_reduction(netlist, include_lines=True)
    assert with_lines[0, 0] == pytest.approx(
        without[0, 0] + c_total / 2.0, rel=1e-9
    )


def test_reduction_requires_capacitive_path():
    with pytest.raises(DegenerateReductionError):
        capacitive_reduction(parse_netlist("L L1 q 0 10\nJJ J q 0 LJ=10\n"))
    with pytest.raises(DegenerateReductionError):
        capacitive_reduction(parse_netlist("C C1 a 0 60\n"))  # no junctions


@settings(max_examples=30, deadline=None)
@given(
    pads=st.tuples(st.floats(20.0, 200.0), st.floats(20.0, 200.0)),
    coupling=st.floats(0.5, 30.0),
)
def test_reduction_positive_definite(pads, coupling):
    netlist = parse_netlist(
        f"C C1 q1 0 {pads[0]!r}\n"
        f"C C2 q2 0 {pads[1]!r}\n"
        f"C Cc q1 q2 {coupling!r}\n"
        "JJ J1 q1 0 LJ=10\n"
        "JJ J2 q2 0 LJ=10\n"
    )
    c = capacitive_reduction(netlist)
    assert np.allclose(c, c.T)
    assert np.all(np.linalg.eigvalsh(c) > 0.0)
    # Direct coupling capacitor: diagonals are pad + coupling exactly.
    assert c[0, 0] == pytest.approx((pads[0] + coupling) * 1e-15, rel=1e-9)
