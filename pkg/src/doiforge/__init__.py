"""Double operator integrals for Hermitian matrices and executable checks of
Lipschitz and commutator estimates for ``f(D) = D (1 + D^2)^(-1/2)``.

Hot loops (Jacobi eigensolver, Fourier quadrature, Hoelder maximization) run
under numba when it is importable; set ``DOIFORGE_DISABLE_NUMBA=1`` to force
the pure-numpy path.  ``BACKEND`` names the active one.
"""
from ._backend import BACKEND
from .besov import (SampledFunction, besov_chain_check, holder_seminorm, poisson_kernel,
                    poisson_smooth, sample)
from .config import RunConfig, load_config
from .doi import (DoiOperator, change_of_variables_check, commutator_transfer_check,
                  defining_identity_check, doi, homomorphism_check, multiplier_norm_estimate)
from .errors import DoiforgeError
from .fourier import FourierProfile, fourier_profile, synthesize_from_profile, theta_scaling_fit
from .functions import ScalarFunction, f_alpha, h_alpha, main_f
from .harness import (weak_power_check, verify_cor12, verify_thm11, verify_thm13, verify_thm14,
                      verify_thm15, verify_thm16_cor22, verify_thm17, verify_thm18, verify_thm19)
from .kernels import Kernel, factorization_residual, psi_f
from .norms import (NormSpec, interpolation_bound_check, norm_eval, singular_values,
                    submajorization_check)
from .report import EstimateReport
from .spectral import HermitianOperator, apply_function, decompose

__all__ = [
    "BACKEND", "DoiOperator", "DoiforgeError", "EstimateReport", "FourierProfile",
    "HermitianOperator", "Kernel", "NormSpec", "RunConfig", "SampledFunction", "ScalarFunction",
    "apply_function", "besov_chain_check", "change_of_variables_check",
    "commutator_transfer_check", "decompose", "defining_identity_check", "doi", "f_alpha",
    "factorization_residual", "fourier_profile", "weak_power_check", "h_alpha", "holder_seminorm",
    "homomorphism_check", "interpolation_bound_check", "load_config", "main_f",
    "multiplier_norm_estimate", "norm_eval", "poisson_kernel", "poisson_smooth", "psi_f",
    "sample", "singular_values", "submajorization_check", "synthesize_from_profile",
    "theta_scaling_fit", "verify_cor12", "verify_thm11", "verify_thm13", "verify_thm14",
    "verify_thm15", "verify_thm16_cor22", "verify_thm17", "verify_thm18", "verify_thm19",
]
__version__ = "0.1.0"
