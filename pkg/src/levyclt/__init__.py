"""Monte Carlo estimation and closed-form envelopes for the Gaussian
approximation of finite-variance Levy processes."""

from .bounds import (BE_CONSTANT, BoundBreakdown, berry_esseen_term,
                     big_jump_rate, centering_term, prob_big_jump, total_bound)
from .distance import (DistanceEstimate, dkw_slack, ks_against_normal,
                       normal_cdf, phi_discrepancy, z_crit)
from .errors import (DegenerateModel, DivergentRequest, DomainError,
                     EmptySample, IdentityViolation, InfiniteVariance,
                     InvalidParameter, MalformedDocument, NonpositiveScale,
                     QuadratureError, UnsupportedMeasure)
from .levy_model import (CompoundPoissonParametric, LevyModel,
                         LogPerturbedPowerTail, MeasureSpec, MomentStatus,
                         MomentVerdict, PowerTail, TwoSidedMixture,
                         ZeroMeasure, build_model, log_moment_finite,
                         model_from_dict, model_from_json, model_to_dict,
                         mu_t, sigma_t, total_variance)
from .quadrature import (IdentityReport, TailIntegralRequest, adaptive_quad,
                         check_I_identities, semi_infinite_quad, tail_mass,
                         tail_moment, tail_quad, x3_identity_pair)
from .sampler import (DecomposedDraws, SimPlan, chunk_rng, dump_samples,
                      sample_decomposed, sample_endpoint)
from .verify import (DecayEstimate, Regime, RegimeCall, ScanConfig, ScanGrid,
                     ScanReport, ScanRow, SigmaDeficit, classify_regime,
                     decay_integral, scan, sigma_deficit_integral)

__version__ = "0.1.0"
