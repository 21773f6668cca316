"""Touchstone ingestion, Z-table round trips, and ingestion fidelity."""

import numpy as np
import pytest

from zzcalc import (
    MethodVariant,
    NodalCircuit,
    QubitDesign,
    analyze_pairs,
    parse_netlist,
    read_touchstone,
    read_z_table,
    tune_junction,
    write_z_table,
)
from zzcalc.constants import TWO_PI
from zzcalc.errors import TableError, TouchstoneError

from conftest import BUS_NETLIST


def s_from_z(z: np.ndarray, z0: float = 50.0) -> np.ndarray:
    n = z.shape[0]
    eye = np.eye(n)
    zn = z / z0
    return (zn - eye) @ np.linalg.inv(zn + eye)


def touchstone_text(
    freq_hz,
    s_list,
    fmt: str = "RI",
    unit: str = "GHz",
    z0: float = 50.0,
    comment: str = "! synthetic data\n",
) -> str:
    """Render sampled S-parameters in Touchstone v1 layout.

    Two-port rows follow the v1 convention S11 S21 S12 S22; other port
    counts are row-major.
    """
    scale = {"hz": 1.0, "khz": 1e3, "mhz": 1e6, "ghz": 1e9}[unit.lower()]
    lines = [comment, f"# {unit} S {fmt} R {z0:g}\n"]
    for f, s in zip(freq_hz, s_list):
        n = s.shape[0]
        if n == 2:
            order = [s[0, 0], s[1, 0], s[0, 1], s[1, 1]]
        else:
            order = [s[i, j] for i in range(n) for j in range(n)]
        parts = [f"{f / scale:.9g}"]
        for value in order:
            if fmt == "RI":
                parts += [f"{value.real:.12e}", f"{value.imag:.12e}"]
            elif fmt == "MA":
                parts += [
                    f"{abs(value):.12e}",
                    f"{np.degrees(np.angle(value)):.9f}",
                ]
            else:  # DB
                mag = max(abs(value), 1e-300)
                parts += [
                    f"{20.0 * np.log10(mag):.9f}",
                    f"{np.degrees(np.angle(value)):.9f}",
                ]
        lines.append(" ".join(parts) + "\n")
    return "".join(lines)


@pytest.fixture
def bus_samples():
    circuit = NodalCircuit(parse_netlist(BUS_NETLIST))
    freq = np.linspace(4.0e9, 6.0e9, 21)
    z = [circuit.z_matrix(TWO_PI * f) for f in freq]
    return circuit, freq, z


@pytest.mark.parametrize("fmt", ["RI", "MA", "DB"])
def test_round_trip_formats(bus_samples, fmt):
    circuit, freq, z = bus_samples
    text = touchstone_text(freq, [s_from_z(zk) for zk in z], fmt=fmt)
    table = read_touchstone(text, n_ports=2)
    for f, zk in zip(freq[2:-2:4], z[2:-2:4]):
        got = table.z_matrix(TWO_PI * f)
        assert np.max(np.abs(got - zk)) < 1e-6 * np.max(np.abs(zk))


def test_round_trip_hz_unit(bus_samples):
    _, freq, z = bus_samples
    text = touchstone_text(freq, [s_from_z(zk) for zk in z], unit="Hz")
    table = read_touchstone(text, n_ports=2)
    got = table.z_matrix(TWO_PI * freq[10])
    assert np.max(np.abs(got - z[10])) < 1e-6 * np.max(np.abs(z[10]))


def test_round_trip_nonstandard_reference(bus_samples):
    _, freq, z = bus_samples
    text = touchstone_text(freq, [s_from_z(zk, z0=75.0) for zk in z], z0=75.0)
    table = read_touchstone(text, n_ports=2)
    got = table.z_matrix(TWO_PI * freq[10])
    assert np.max(np.abs(got - z[10])) < 1e-6 * np.max(np.abs(z[10]))


def test_port_count_inferred_without_hint(bus_samples):
    _, freq, z = bus_samples
    text = touchstone_text(freq, [s_from_z(zk) for zk in z])
    table = read_touchstone(text)
    assert table.port_count == 2


def test_one_port_round_trip():
    freq = np.linspace(4e9, 6e9, 7)
    z = [np.array([[1.0 / (1j * TWO_PI * f * 65e-15)]]) for f in freq]
    text = touchstone_text(freq, [s_from_z(zk) for zk in z])
    table = read_touchstone(text)
    assert table.port_count == 1
    got = table.z_matrix(TWO_PI * 5e9)
    want = 1.0 / (1j * TWO_PI * 5e9 * 65e-15)
    assert abs(got[0, 0] - want) < 1e-6 * abs(want)


def test_three_port_wrapped_lines():
    rng = np.random.default_rng(7)
    freq = np.linspace(1e9, 2e9, 6)
    s_list = []
    for _ in freq:
        a = 0.05 * (rng.standard_normal((3, 3)) + 1j * rng.standard_normal((3, 3)))
        s_list.append(0.5 * (a + a.T))  # reciprocal
    text = touchstone_text(freq, s_list)
    # Wrap every data line after the 4th value pair, like classic files.
    wrapped = []
    for line in text.splitlines():
        parts = line.split()
        if line.startswith(("!", "#")) or len(parts) < 9:
            wrapped.append(line)
        else:
            wrapped.append(" ".join(parts[:9]))
            wrapped.append("  " + " ".join(parts[9:]))
    table = read_touchstone("\n".join(wrapped) + "\n")
    assert table.port_count == 3
    z_want = 50.0 * (np.eye(3) + s_list[2]) @ np.linalg.inv(
        np.eye(3) - s_list[2]
    )
    got = table.z_matrix(TWO_PI * freq[2])
    assert np.max(np.abs(got - z_want)) < 1e-6 * np.max(np.abs(z_want))


def test_comments_and_blank_lines_ignored(bus_samples):
    _, freq, z = bus_samples
    text = touchstone_text(freq, [s_from_z(zk) for zk in z])
    noisy = "! header chatter\n\n" + text.replace(
        "# GHz", "! another note\n# GHz"
    )
    assert read_touchstone(noisy, n_ports=2).port_count == 2


def test_version_two_rejected():
    with pytest.raises(TouchstoneError):
        read_touchstone("[Version] 2.0\n# GHz S RI R 50\n1 0 0\n")


def test_bad_option_lines():
    with pytest.raises(TouchstoneError):
        read_touchstone("# GHz Y RI R 50\n1 0 0\n")  # Y-parameters
    with pytest.raises(TouchstoneError):
        read_touchstone("# parsec S RI R 50\n1 0 0\n")  # unknown unit


def test_singular_identity_s_rejected():
    # S = I makes (I - S) singular: infinite impedance, no Z representation.
    freq = np.linspace(1e9, 2e9, 5)
    text = touchstone_text(freq, [np.eye(1, dtype=complex) for _ in freq])
    with pytest.raises(TouchstoneError):
        read_touchstone(text)


def test_z_table_round_trip(bus_samples):
    circuit, freq, z = bus_samples
    text = write_z_table(circuit, freq)
    table = read_z_table(text)
    assert table.port_count == 2
    for f, zk in zip(freq[1:-1:5], z[1:-1:5]):
        got = table.z_matrix(TWO_PI * f)
        assert np.max(np.abs(got - zk)) < 1e-6 * np.max(np.abs(zk))


def test_z_table_header_and_cell_errors():
    good = "freq_hz,re_z_1_1,im_z_1_1\n"
    rows = "".join(f"{f},0.0,-{100 + f / 1e9}\n" for f in (1e9, 2e9, 3e9, 4e9))
    read_z_table(good + rows)
    with pytest.raises(TableError):
        read_z_table("frequency,re_z_1_1,im_z_1_1\n" + rows)
    with pytest.raises(TableError):
        read_z_table(good.replace("im_z_1_1", "imag_1_1") + rows)
    with pytest.raises(TableError):
        read_z_table(good + rows.replace("-101", "beast", 1))
    with pytest.raises(TableError):  # re without im
        read_z_table("freq_hz,re_z_1_1\n1e9,0\n2e9,0\n3e9,0\n4e9,0\n")


def test_z_table_needs_increasing_frequency():
    text = (
        "freq_hz,re_z_1_1,im_z_1_1\n"
        "2e9,0,-100\n1e9,0,-120\n3e9,0,-90\n4e9,0,-80\n"
    )
    with pytest.raises(TableError):
        read_z_table(text)


def test_z_table_transpose_and_fallback():
    header = "freq_hz,re_z_1_2,im_z_1_2\n"
    rows = "".join(f"{f},0.0,3.5\n" for f in (1e9, 2e9, 3e9, 4e9))
    table = read_z_table(
        header + rows, diagonal_fallback_c=(65e-15, 65e-15)
    )
    omega = TWO_PI * 2.5e9
    z = table.z_matrix(omega)
    assert z[0, 1] == z[1, 0]
    assert z[0, 1] == pytest.approx(3.5j, rel=1e-9)
    assert z[0, 0] == pytest.approx(1.0 / (1j * omega * 65e-15))


def test_ingestion_fidelity_on_reference_device():
    # Exported-then-ingested impedance reproduces the self-consistent ZZ
    # of the circuit to well within 0.5%.
    netlist = parse_netlist(BUS_NETLIST)
    circuit = NodalCircuit(netlist)
    from zzcalc import capacitive_reduction

    c = capacitive_reduction(netlist)
    shunts = {1: c[0, 0], 2: c[1, 1]}
    designs = {}
    for port, f in ((1, 5.0e9), (2, 5.2e9)):
        l_j = tune_junction(circuit, port, shunts[port], TWO_PI * f)
        designs[port] = QubitDesign(l_junction=l_j, c_shunt=shunts[port])
    direct = analyze_pairs(circuit, designs, (MethodVariant.ZMETHOD,))[0]

    freq = np.linspace(2.5e9, 8.0e9, 801)
    table = read_z_table(write_z_table(circuit, freq))
    ingested = analyze_pairs(table, designs, (MethodVariant.ZMETHOD,))[0]

    zz_a = direct.zz[MethodVariant.ZMETHOD]
    zz_b = ingested.zz[MethodVariant.ZMETHOD]
    assert abs(zz_b - zz_a) < 0.005 * abs(zz_a)
