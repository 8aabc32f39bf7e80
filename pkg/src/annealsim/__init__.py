"""Closed-system dynamics of time-varying transverse-field Ising models.

Typical use mirrors the shape of the problem: build an Ising model as a
dictionary of 1-based index tuples, pick an annealing schedule, and ask for
the final density matrix::

    import annealsim as qa

    model = {(1, 2): -1.0, (2, 3): -1.0, (1,): 0.5}
    rho = qa.simulate(model, 100.0, qa.builtin_schedule("circular")).rho
"""

from .encoding import (
    binary_to_braket,
    binary_to_int,
    binary_to_spin,
    int_to_binary,
    int_to_braket,
    int_to_spin,
    spin_to_binary,
    spin_to_braket,
    spin_to_int,
)
from .errors import (
    AnnealSimError,
    BqpjsonError,
    ConvergenceError,
    ModelError,
    NumericalError,
    ScheduleError,
    ScheduleParseError,
    SizeError,
    SolverConfigError,
)
from .hamiltonian import (
    MAX_QUBITS,
    FieldOffsets,
    IsingModel,
    SpectrumResult,
    brute_force_ground_states,
    eigenspectrum,
    hamiltonian_at,
    ising_diagonal,
    minimum_gap,
    transverse_matrix,
)
from .io import export_result, read_bqpjson, write_bqpjson
from .magnus import (
    MatrixPolynomial,
    OmegaTerm,
    SimulationResult,
    SolverConfig,
    SweepPoint,
    build_step_polynomial,
    error_max,
    error_mean,
    exponentiate_omega,
    omega_explicit4,
    omega_recursive,
    omega_total,
    run_config,
    simulate,
    simulate_fixed,
    simulate_reference_rk,
    simulate_sweep,
)
from .oracle import (
    coupled_pair_model,
    hamiltonian_h1,
    hamiltonian_h2,
    psi_h2,
    rho_h1,
    rho_h2,
    single_field_model,
    trace_distance,
)
from .schedule import (
    AnnealingSchedule,
    ScalarQuadratic,
    builtin_schedule,
    builtin_schedule_names,
    load_schedule_csv,
    local_quadratic_fit,
    save_schedule_csv,
    schedule_from_functions,
)

__version__ = "0.1.0"

__all__ = [
    "AnnealSimError",
    "AnnealingSchedule",
    "BqpjsonError",
    "ConvergenceError",
    "FieldOffsets",
    "IsingModel",
    "MAX_QUBITS",
    "MatrixPolynomial",
    "ModelError",
    "NumericalError",
    "OmegaTerm",
    "ScalarQuadratic",
    "ScheduleError",
    "ScheduleParseError",
    "SimulationResult",
    "SizeError",
    "SolverConfig",
    "SolverConfigError",
    "SpectrumResult",
    "SweepPoint",
    "binary_to_braket",
    "binary_to_int",
    "binary_to_spin",
    "brute_force_ground_states",
    "build_step_polynomial",
    "builtin_schedule",
    "builtin_schedule_names",
    "coupled_pair_model",
    "eigenspectrum",
    "error_max",
    "error_mean",
    "exponentiate_omega",
    "export_result",
    "hamiltonian_at",
    "hamiltonian_h1",
    "hamiltonian_h2",
    "int_to_binary",
    "int_to_braket",
    "int_to_spin",
    "ising_diagonal",
    "load_schedule_csv",
    "local_quadratic_fit",
    "minimum_gap",
    "omega_explicit4",
    "omega_recursive",
    "omega_total",
    "psi_h2",
    "read_bqpjson",
    "rho_h1",
    "rho_h2",
    "run_config",
    "save_schedule_csv",
    "schedule_from_functions",
    "simulate",
    "simulate_fixed",
    "simulate_reference_rk",
    "simulate_sweep",
    "single_field_model",
    "spin_to_binary",
    "spin_to_braket",
    "spin_to_int",
    "trace_distance",
    "transverse_matrix",
    "write_bqpjson",
]
