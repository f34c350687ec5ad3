"""Information gain, operation fidelity and reversibility of quantum measurements.

The package computes the information triple (G, F, R) of arbitrary
finite-outcome measurements on qudits, evaluates the global and pairwise
trade-off bounds relating them, builds the parametric qutrit measurement
families realizable with waveplate optics, and simulates the photon
counting experiment that measures the triple through tomography.
"""

from .bounds import (
    BoundReport,
    SaturationFlags,
    bound_report,
    classify_saturation,
    global_gap,
    pairwise_gaps,
)
from .errors import (
    CompletenessError,
    ConfigError,
    ImpossibleOutcomeError,
    InfeasibleTripleError,
    InsufficientDataError,
    NotRealizableError,
    QmeasError,
)
from .experiment import (
    CountsTable,
    ExperimentResult,
    NoisyInput,
    ProcessResult,
    experiment_counts,
    fit_noise,
    noisy_model_triple,
    process_tomography,
    qst_reconstruct,
    reversal_success_counts,
    run_experiment,
    sic_average_triple,
    sic_povm,
    sic_states,
    simulate_counts,
)
from .families import (
    AngleRow,
    FamilySpec,
    SweepRow,
    closed_form_triple,
    compile_angles,
    default_grid,
    family,
    family_domain,
    load_family_table,
    operators_from_angles,
    sweep,
)
from .linalg import (
    SVDTriple,
    fidelity_pure,
    haar_random_state,
    random_unitary,
    svd,
)
from .measurement import (
    EmpiricalTriple,
    InfoTriple,
    Measurement,
    ReversalOperation,
    empirical_triple,
    info_gain,
    info_triple,
    operation_fidelity,
    optimal_estimate,
    optimal_reversal,
    post_measurement,
    random_kraus_batch,
    random_measurement,
    reversibility,
    triple_from_singulars,
    validate,
)

__version__ = "0.1.0"
