from .quantum import (Ket, Operator, BlochVector, tensor, partial_trace, permute_qubits, werner_state,
                      ket_from_bloch, bloch_vector, born_probabilities)
from .measurements import JointBasis, bell_basis, ejm_basis, validate_basis, tetrahedron
from .network import (CorrelationTable, NetworkScenario, triangle_correlation, triangle_stats,
                      chain_correlation, bsm_triangle_reference, SETTINGS_PRESETS)
from .inequalities import chsh_value, bilocality_value, threshold_report
from .local_models import LocalModel, evaluate_model, symmetric_q_model, asymmetric_model
from .fitting import FitConfig, fit_3local
from ._helpers import show_debug
from . import exceptions

__version__ = "v1.0.0"
