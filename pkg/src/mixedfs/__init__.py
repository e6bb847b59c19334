"""Mixed-state Fubini-Study metric: purifications, square-root derivatives,
alpha-generalized tensors, operator means and seeded verification suites."""

from ._kernels import BACKEND
from .channels import KrausChannel, random_channel, stinespring
from . import errors
from .expsim import generator_commutator, generator_rank2, simulate_variance
from .metrics import (
    alpha_qgt_G,
    alpha_qgt_Gtilde,
    dynamical_phase,
    fs_metric,
    fs_qgt,
    metric_cptp_dilation,
    metric_cptp_kraus,
    metric_report,
    metric_unitary,
    petz_metric,
    sld_qfi,
    sqrt_derivative,
)
from .opspace import hermitian_eig, matrix_function
from .states import (
    DensityMatrix,
    StateFamily,
    family_constant,
    family_eigenvalue_path,
    family_ginibre_path,
    family_linear,
    family_unitary_orbit,
    purify,
    random_density,
)
from .verify import SuiteResult, run_suites

__version__ = "0.1.0"
