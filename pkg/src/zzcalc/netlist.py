"""Circuit description files: parsing, validation, serialization, and the
capacitor-network reduction that defines qubit shunt capacitances.

The file format is line oriented.  ``#`` starts a comment (full-line or
trailing), blank lines are ignored, and each remaining line declares one
element::

    C  <name> <node1> <node2> <value_fF>
    L  <name> <node1> <node2> <value_nH>
    JJ <name> <node1> <node2> LJ=<nH> [CJ=<fF>]
    TL <name> <node1> <node2> Z0=<ohm> LEN=<mm> [EEFF=<value>]

Node ``0`` (or ``GND``, case-insensitive) is ground.  Each ``JJ`` line
defines a qubit port; ports are numbered 1..N in declaration order.
Values are stored in the file's units so that parse -> serialize -> parse
is the identity; SI values are exposed as properties.
"""

from __future__ import annotations

from dataclasses import dataclass, replace

import numpy as np

from .constants import FEMTO, MILLI, NANO
from .errors import (
    DegenerateReductionError,
    NetlistSyntaxError,
    NetlistValidationError,
)

__all__ = [
    "DEFAULT_EPS_EFF",
    "Element",
    "Capacitor",
    "Inductor",
    "JosephsonJunction",
    "TransmissionLine",
    "Netlist",
    "is_ground",
    "parse_netlist",
    "serialize_netlist",
    "capacitive_reduction",
]

#: Effective dielectric constant assumed for lines that do not specify one
#: (coplanar waveguide on a silicon substrate).
DEFAULT_EPS_EFF = 6.45


def is_ground(node: str) -> bool:
    """True if a node identifier names the ground net."""
    return node == "0" or node.upper() == "GND"


@dataclass(frozen=True)
class Element:
    """Common part of every circuit element: a name and two terminals."""

    name: str
    node1: str
    node2: str

    @property
    def nodes(self) -> tuple[str, str]:
        return (self.node1, self.node2)


@dataclass(frozen=True)
class Capacitor(Element):
    value_ff: float

    @property
    def farads(self) -> float:
        return self.value_ff * FEMTO


@dataclass(frozen=True)
class Inductor(Element):
    value_nh: float

    @property
    def henries(self) -> float:
        return self.value_nh * NANO


@dataclass(frozen=True)
class JosephsonJunction(Element):
    """A junction defines a qubit port across its two terminals.

    ``lj_nh`` is the junction inductance at the working point; ``cj_ff``
    is the junction's own capacitance, which belongs to the linear network.
    """

    lj_nh: float = 0.0
    cj_ff: float = 0.0

    @property
    def henries(self) -> float:
        return self.lj_nh * NANO

    @property
    def farads(self) -> float:
        return self.cj_ff * FEMTO


@dataclass(frozen=True)
class TransmissionLine(Element):
    """Ideal lossless line segment with characteristic impedance ``z0_ohm``,
    physical length ``length_mm``, and effective dielectric ``eps_eff``."""

    z0_ohm: float = 50.0
    length_mm: float = 0.0
    eps_eff: float = DEFAULT_EPS_EFF

    @property
    def meters(self) -> float:
        return self.length_mm * MILLI


@dataclass(frozen=True)
class Netlist:
    """An ordered collection of circuit elements.

    The element order is the file order; junction order defines the port
    numbering used everywhere else in the package.
    """

    elements: tuple[Element, ...] = ()

    @property
    def nodes(self) -> tuple[str, ...]:
        """Non-ground node identifiers, in order of first appearance."""
        seen: dict[str, None] = {}
        for el in self.elements:
            for node in el.nodes:
                if not is_ground(node) and node not in seen:
                    seen[node] = None
        return tuple(seen)

    @property
    def junctions(self) -> tuple[JosephsonJunction, ...]:
        return tuple(
            el for el in self.elements if isinstance(el, JosephsonJunction)
        )

    @property
    def transmission_lines(self) -> tuple[TransmissionLine, ...]:
        return tuple(
            el for el in self.elements if isinstance(el, TransmissionLine)
        )

    def element(self, name: str) -> Element:
        for el in self.elements:
            if el.name == name:
                return el
        raise KeyError(f"no element named {name!r}")

    def with_value(self, name: str, value: float) -> "Netlist":
        """Copy of the netlist with one element's principal value replaced.

        The value is interpreted in the element's file units (fF for
        capacitors, nH for inductors and junctions, mm for lines).
        """
        new_elements = []
        found = False
        for el in self.elements:
            if el.name == name:
                found = True
                if isinstance(el, Capacitor):
                    el = replace(el, value_ff=value)
                elif isinstance(el, Inductor):
                    el = replace(el, value_nh=value)
                elif isinstance(el, JosephsonJunction):
                    el = replace(el, lj_nh=value)
                elif isinstance(el, TransmissionLine):
                    el = replace(el, length_mm=value)
            new_elements.append(el)
        if not found:
            raise KeyError(f"no element named {name!r}")
        return Netlist(tuple(new_elements))

    def with_junction_inductances(self, lj_nh: dict[int, float]) -> "Netlist":
        """Copy with junction inductances replaced, keyed by 1-based port."""
        juncs = self.junctions
        new_elements = []
        for el in self.elements:
            if isinstance(el, JosephsonJunction):
                port = juncs.index(el) + 1
                if port in lj_nh:
                    el = replace(el, lj_nh=lj_nh[port])
            new_elements.append(el)
        return Netlist(tuple(new_elements))

    def with_eps_eff(self, eps_eff: float) -> "Netlist":
        """Copy with every transmission line's effective dielectric replaced.

        A single global knob: fabrication spread mostly shifts all lines
        together, so retargeting one value is the usual calibration move.
        """
        if eps_eff <= 0:
            raise NetlistValidationError("eps_eff must be positive")
        new_elements = tuple(
            replace(el, eps_eff=eps_eff)
            if isinstance(el, TransmissionLine) else el
            for el in self.elements
        )
        return Netlist(new_elements)


def _parse_float(token: str, line_no: int, what: str) -> float:
    try:
        value = float(token)
    except ValueError:
        raise NetlistSyntaxError(
            f"could not read {what} from {token!r}", line=line_no
        ) from None
    if not np.isfinite(value):
        raise NetlistSyntaxError(f"{what} must be finite", line=line_no)
    return value


def _parse_keywords(
    tokens: list[str],
    line_no: int,
    required: tuple[str, ...],
    optional: dict[str, float],
) -> dict[str, float]:
    values = dict(optional)
    seen: set[str] = set()
    for token in tokens:
        key, sep, raw = token.partition("=")
        key = key.upper()
        if not sep:
            raise NetlistSyntaxError(
                f"expected KEY=VALUE, got {token!r}", line=line_no
            )
        if key not in required and key not in optional:
            raise NetlistSyntaxError(f"unknown keyword {key!r}", line=line_no)
        if key in seen:
            raise NetlistSyntaxError(f"duplicate keyword {key!r}", line=line_no)
        seen.add(key)
        values[key] = _parse_float(raw, line_no, key)
    for key in required:
        if key not in seen:
            raise NetlistSyntaxError(f"missing keyword {key!r}", line=line_no)
    return values


def parse_netlist(text: str) -> Netlist:
    """Parse a circuit description; raise ``NetlistSyntaxError`` or
    ``NetlistValidationError`` with a line number on bad input."""
    elements: list[Element] = []
    names: set[str] = set()
    for line_no, raw_line in enumerate(text.splitlines(), start=1):
        line = raw_line.split("#", 1)[0].strip()
        if not line:
            continue
        tokens = line.split()
        kind = tokens[0].upper()
        if len(tokens) < 4:
            raise NetlistSyntaxError(
                f"element line needs a name and two nodes: {line!r}",
                line=line_no,
            )
        name, node1, node2 = tokens[1], tokens[2], tokens[3]
        rest = tokens[4:]
        if name in names:
            raise NetlistValidationError(
                f"duplicate element name {name!r}", line=line_no
            )
        names.add(name)
        if is_ground(node1) and is_ground(node2):
            node1 = node2 = "0"

        if kind == "C":
            if len(rest) != 1:
                raise NetlistSyntaxError(
                    "capacitor takes exactly one value (fF)", line=line_no
                )
            value = _parse_float(rest[0], line_no, "capacitance")
            if value <= 0.0:
                raise NetlistValidationError(
                    "capacitance must be positive", line=line_no
                )
            elements.append(Capacitor(name, node1, node2, value))
        elif kind == "L":
            if len(rest) != 1:
                raise NetlistSyntaxError(
                    "inductor takes exactly one value (nH)", line=line_no
                )
            value = _parse_float(rest[0], line_no, "inductance")
            if value <= 0.0:
                raise NetlistValidationError(
                    "inductance must be positive", line=line_no
                )
            elements.append(Inductor(name, node1, node2, value))
        elif kind == "JJ":
            values = _parse_keywords(rest, line_no, ("LJ",), {"CJ": 0.0})
            if values["LJ"] <= 0.0:
                raise NetlistValidationError(
                    "junction inductance must be positive", line=line_no
                )
            if values["CJ"] < 0.0:
                raise NetlistValidationError(
                    "junction capacitance must be non-negative", line=line_no
                )
            if node1 == node2:
                raise NetlistValidationError(
                    "junction terminals must differ", line=line_no
                )
            elements.append(
                JosephsonJunction(name, node1, node2, values["LJ"], values["CJ"])
            )
        elif kind == "TL":
            values = _parse_keywords(
                rest, line_no, ("Z0", "LEN"), {"EEFF": DEFAULT_EPS_EFF}
            )
            if values["Z0"] <= 0.0:
                raise NetlistValidationError(
                    "characteristic impedance must be positive", line=line_no
                )
            if values["LEN"] <= 0.0:
                raise NetlistValidationError(
                    "line length must be positive", line=line_no
                )
            if values["EEFF"] < 1.0:
                raise NetlistValidationError(
                    "effective dielectric constant must be >= 1", line=line_no
                )
            elements.append(
                TransmissionLine(
                    name, node1, node2, values["Z0"], values["LEN"], values["EEFF"]
                )
            )
        else:
            raise NetlistSyntaxError(
                f"unknown element kind {tokens[0]!r}", line=line_no
            )
    return Netlist(tuple(elements))


def serialize_netlist(netlist: Netlist) -> str:
    """Render a netlist back to its canonical text form.

    Float values are written with ``repr`` so that parsing the output
    reproduces the netlist object exactly.
    """
    lines = []
    for el in netlist.elements:
        if isinstance(el, Capacitor):
            lines.append(f"C {el.name} {el.node1} {el.node2} {el.value_ff!r}")
        elif isinstance(el, Inductor):
            lines.append(f"L {el.name} {el.node1} {el.node2} {el.value_nh!r}")
        elif isinstance(el, JosephsonJunction):
            line = f"JJ {el.name} {el.node1} {el.node2} LJ={el.lj_nh!r}"
            if el.cj_ff != 0.0:
                line += f" CJ={el.cj_ff!r}"
            lines.append(line)
        elif isinstance(el, TransmissionLine):
            lines.append(
                f"TL {el.name} {el.node1} {el.node2} "
                f"Z0={el.z0_ohm!r} LEN={el.length_mm!r} EEFF={el.eps_eff!r}"
            )
        else:  # pragma: no cover - no other element kinds exist
            raise TypeError(f"cannot serialize {type(el).__name__}")
    return "\n".join(lines) + "\n"


def _capacitance_stamps(
    netlist: Netlist, include_lines: bool
) -> list[tuple[str, str, float]]:
    """(node1, node2, farads) for every capacitance in the circuit."""
    stamps: list[tuple[str, str, float]] = []
    for el in netlist.elements:
        if isinstance(el, Capacitor):
            stamps.append((el.node1, el.node2, el.farads))
        elif isinstance(el, JosephsonJunction) and el.cj_ff > 0.0:
            stamps.append((el.node1, el.node2, el.farads))
        elif isinstance(el, TransmissionLine) and include_lines:
            # Lump half of the line's total capacitance at each end.
            from .constants import C_LIGHT

            c_total = (
                np.sqrt(el.eps_eff) * el.meters / (el.z0_ohm * C_LIGHT)
            )
            stamps.append((el.node1, "0", c_total / 2.0))
            stamps.append((el.node2, "0", c_total / 2.0))
    return stamps


def capacitive_reduction(
    netlist: Netlist, include_lines: bool = False
) -> np.ndarray:
    """Effective capacitance matrix between qubit ports, in farads.

    All capacitors (and junction capacitances) are kept; every node that is
    not a junction terminal is eliminated by a Schur complement, leaving a
    symmetric positive-definite matrix whose diagonal entries are the total
    shunt capacitances C_i seen by each junction.  Transmission lines
    contribute nothing unless ``include_lines`` is set, in which case half
    of each line's static capacitance is lumped at its two ends.

    Raises ``DegenerateReductionError`` if any junction terminal has no
    capacitive path to ground.
    """
    junctions = netlist.junctions
    if not junctions:
        raise DegenerateReductionError("circuit has no junctions")

    stamps = _capacitance_stamps(netlist, include_lines)

    # Nodes that carry at least one capacitor terminal.
    cap_nodes: dict[str, None] = {}
    for n1, n2, _ in stamps:
        for node in (n1, n2):
            if not is_ground(node):
                cap_nodes.setdefault(node, None)

    # Keep only nodes with a capacitive path to ground; isolated islands
    # cannot store charge against ground and would make the matrix singular.
    adjacency: dict[str, set[str]] = {node: set() for node in cap_nodes}
    grounded: set[str] = set()
    for n1, n2, _ in stamps:
        g1, g2 = is_ground(n1), is_ground(n2)
        if g1 and not g2:
            grounded.add(n2)
        elif g2 and not g1:
            grounded.add(n1)
        elif not g1 and not g2 and n1 != n2:
            adjacency[n1].add(n2)
            adjacency[n2].add(n1)
    reachable: set[str] = set()
    frontier = list(grounded)
    while frontier:
        node = frontier.pop()
        if node in reachable:
            continue
        reachable.add(node)
        frontier.extend(adjacency[node] - reachable)

    for junction in junctions:
        for node in junction.nodes:
            if not is_ground(node) and node not in reachable:
                raise DegenerateReductionError(
                    f"junction {junction.name!r} terminal {node!r} has no "
                    "capacitive path to ground"
                )

    kept = [node for node in netlist.nodes if node in reachable]
    index = {node: k for k, node in enumerate(kept)}
    n = len(kept)
    cmat = np.zeros((n, n))
    for n1, n2, value in stamps:
        i = index.get(n1, -1) if not is_ground(n1) else -1
        j = index.get(n2, -1) if not is_ground(n2) else -1
        if i >= 0:
            cmat[i, i] += value
        if j >= 0:
            cmat[j, j] += value
        if i >= 0 and j >= 0 and i != j:
            cmat[i, j] -= value
            cmat[j, i] -= value

    # Port incidence vectors (+1 / -1 on the junction terminals).
    ports = np.zeros((n, len(junctions)))
    for p, junction in enumerate(junctions):
        if not is_ground(junction.node1):
            ports[index[junction.node1], p] += 1.0
        if not is_ground(junction.node2):
            ports[index[junction.node2], p] -= 1.0

    # The port capacitance matrix is the inverse of the port block of the
    # inverse capacitance matrix -- equivalently, the Schur complement of
    # the full matrix onto the port degrees of freedom.
    try:
        elastance = ports.T @ np.linalg.solve(cmat, ports)
        c_ports = np.linalg.inv(elastance)
    except np.linalg.LinAlgError as exc:
        raise DegenerateReductionError(
            f"capacitance network is singular: {exc}"
        ) from None
    c_ports = 0.5 * (c_ports + c_ports.T)
    if np.any(np.diag(c_ports) <= 0.0):
        raise DegenerateReductionError(
            "reduction produced a non-positive shunt capacitance"
        )
    return c_ports
