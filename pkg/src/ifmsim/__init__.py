"""Single-photon interaction-free measurement of multilevel atoms.

Sparse labeled-state simulator of a Mach-Zehnder interferometer with
polarization-selective absorbers, plus a dense reference implementation for
cross-checks.
"""
from .errors import (
    BasisError,
    ConfigSyntaxError,
    IFMError,
    NormalizationError,
    RegisterError,
    ValidationError,
)
from .matter import AtomInitialState, AtomModel, interact, prepare_atoms
from .measurement import (
    Budget,
    DetectorConfig,
    Outcome,
    measure,
    outcome_budget,
    post_select,
    posterior_fidelity,
)
from .metrics import MetricReport, concurrence, fidelity, l1_coherence, metric_report, purity
from .optics import (
    PolarizationSpec,
    beam_splitter,
    circular_to_linear,
    linear_to_circular,
    photon_input,
)
from .oracle import oracle_run
from .scenario import (
    Report,
    Scenario,
    canned,
    canned_names,
    load_scenario,
    parse_scenario,
    render_report,
    run,
)
from .state import (
    DensityMatrix,
    JointState,
    Register,
    apply_map,
    norm,
    normalize,
    partial_trace,
    tensor,
    to_density,
)

__version__ = "0.1.0"
