"""Explicit extension operators for bounded functions on sampled metric sets."""

from .extenders import (
    Dieudonne,
    DualWeight,
    Extender,
    ExtenderReport,
    Reciprocal,
    Riesz,
    Tietze,
    eval_dual,
    eval_extender,
    get_dual_weight,
    get_extender,
    validate_extender,
)
from .functions import BoundedFunction, lattice, sup_norm
from .metric import (
    EuclideanMetric,
    MatrixMetric,
    PointCloudSet,
    RealLineMetric,
    dist,
    dist_to_set,
    make_metric,
)
from .operators import (
    EtaStep,
    Extension,
    NegativeValuesError,
    ZeroInfimumWarning,
    bohr_eta,
    bohr_eval,
    hausdorff_eval,
    mho_eval,
    omega_eval,
    pasch_eval,
    theta_eval,
)

from .verify import (
    DEFAULT_SEED,
    GluingCheck,
    ModulusTable,
    PropertyReport,
    check_gluing,
    empirical_modulus,
    remark_suite,
    run_suites,
)

__version__ = "0.1.0"
