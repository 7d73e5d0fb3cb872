"""Cooling of a vibrating cavity mirror through intracavity atomic ensembles."""
from .errors import (ConfigError, GainPoleError, InstabilityError, MirrorCoolError,
                     NetHeatingError, ParameterError, PhysicalityError, PoleError,
                     StepSizeError)
from .model import (DerivedParams, PhysicalSetup, SystemParams, bosonization_check,
                    cooperativities, derive_params, effective_detuning, reference_params,
                    validate)
from .response import (dip_peak_metrics, eps_1, eps_2, eps_f, eps_f_bar, eps_m,
                       response_profile)
from .spectrum import (analytic_combined, analytic_gamma1, analytic_gamma2,
                       analytic_nres, cavity_thermal_occupancy, force_spectrum,
                       perturbative_occupancy, regime_validity, scattering_rates)
from .steady_state import (build_diffusion, build_drift, integrate_moments,
                           mirror_occupancy, solve_lyapunov, stability_check,
                           steady_state)

__version__ = "0.1.0"
