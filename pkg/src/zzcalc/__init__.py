"""Exchange-coupling and ZZ-rate estimation for Transmon qubits.

The package turns a circuit description (or a measured / simulated
impedance response) into the quantities that matter for two-qubit
crosstalk: the exchange coupling J between qubit modes and the always-on
ZZ rate, estimated with a ladder of perturbative methods and checked
against exact diagonalization of the circuit Hamiltonian.

Typical use::

    from zzcalc import parse_netlist, NodalCircuit, analyze_pairs, QubitDesign

    netlist = parse_netlist(open("device.nl").read())
    provider = NodalCircuit(netlist)
    reports = analyze_pairs(provider, {1: QubitDesign(12e-9, 65e-15),
                                       2: QubitDesign(12e-9, 65e-15)})

or, from a shell, ``zzcalc analyze device.nl``.
"""

from .calibrate import (
    ORACLE,
    FitResult,
    SweepRow,
    SweepSpec,
    least_squares_fit,
    run_sweep,
    sweep_to_csv,
    sweep_to_json,
    tune_junction,
    tune_oracle_junctions,
)
from .dispersive import (
    CouplingReport,
    MethodVariant,
    PairCouplings,
    QubitDesign,
    QubitParams,
    analyze_pairs,
    coupling_corrections,
    exchange_coupling,
    solve_qubit,
    zz_rate,
)
from .errors import InputError, PhysicsError, ZZCalcError
from .impedance import (
    NodalCircuit,
    RationalTransImpedance,
    TabulatedImpedance,
    ZSample,
    find_network_poles,
    impedance_derivative,
    tl_two_port_admittance,
)
from .netlist import (
    Netlist,
    capacitive_reduction,
    parse_netlist,
    serialize_netlist,
)
from .oracle import (
    DressedSpectrum,
    HamiltonianModel,
    OracleResult,
    default_segments,
    discretize_lines,
    linear_normal_modes,
    oracle_zz,
    renormalized_linearization,
)
from .touchstone import read_touchstone, read_z_table, write_z_table

__version__ = "0.1.0"

__all__ = [
    "__version__",
    # circuit description
    "Netlist",
    "parse_netlist",
    "serialize_netlist",
    "capacitive_reduction",
    # impedance providers
    "NodalCircuit",
    "RationalTransImpedance",
    "TabulatedImpedance",
    "ZSample",
    "tl_two_port_admittance",
    "impedance_derivative",
    "find_network_poles",
    "read_touchstone",
    "read_z_table",
    "write_z_table",
    # dispersive estimates
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
    # exact reference
    "HamiltonianModel",
    "DressedSpectrum",
    "OracleResult",
    "discretize_lines",
    "default_segments",
    "linear_normal_modes",
    "renormalized_linearization",
    "oracle_zz",
    # calibration and sweeps
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
    # errors
    "ZZCalcError",
    "InputError",
    "PhysicsError",
]
