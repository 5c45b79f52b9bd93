"""rotorwave: resonant pulse-sequence design and exact rotational dynamics.

Workflow: pick a molecule, compute the maximal-orientation superposition for
a chosen number of rotational states, convert it into a train of resonant
terahertz subpulses, then verify by exact propagation of the time-dependent
Schroedinger equation on the truncated |J> ladder.
"""

from .magnus import AnalyticState, analytic_trajectory, magnus_state, partial_area, to_schrodinger_picture
from .model import (
    LIH,
    Molecule,
    RotationalBasis,
    builtin_molecule,
    cos2_operator_matrix,
    cos_matrix_element,
    cos_operator_matrix,
    load_molecule,
    rotational_energy,
    transition_dipole,
    transition_frequency,
)
from .observables import (
    AngularDistribution,
    ObservableSeries,
    PeakStats,
    Trajectory,
    alignment,
    angular_distribution,
    orientation,
    peak_statistics,
    series,
)
from .optimizer import (
    OrientationTarget,
    char_poly_eval,
    eigen_oracle,
    max_orientation,
    optimal_amplitudes,
    optimal_phases,
    orientation_target,
    predicted_orientation,
)
from .pulses import (
    CrossTalkReport,
    InfeasibleTargetError,
    PulseSequence,
    Subpulse,
    cross_talk_report,
    design_sequence,
    field_amplitude,
    pulse_areas_from_amplitudes,
    subpulse_phases,
)
from .tdse import (
    BasisTooSmallError,
    PropagationSchedule,
    WavefunctionState,
    free_evolution,
    hamiltonian_at,
    propagate_window,
    run_experiment,
    step_exponential_midpoint,
)
from .units import UNITS, UnitContext

__version__ = "0.1.0"
