"""Linear time-invariant systems under sampling-time jitter.

Jitter of a fraction ``eps_k`` of the nominal period makes a sampled system
look like a jitter-free one whose ``A`` and ``B`` are scaled by ``1 + eps_k``.
This package builds those scaled models (measurement and implementation
direction), the matching transfer-function frequency scaling, an LPV
realization scheduled on ``eps_k``, and simulators that check the
sample-by-sample equivalence numerically.
"""
__version__ = "0.1.0"

from .analysis import (LpvRealization, PidParams, effective_case_b, lpv_realize,
                       perceive_case_a, pid_transfer_function, pid_under_jitter,
                       recover_perceived_from_data, scale_tf)
from .jitter import (JitterModel, JitterSequence, effective_timesteps, generate,
                     parse_descriptor, validate)
from .lti import (ContinuousStateSpace, DiscreteStateSpace, RationalTransferFunction,
                  SamplingSpec, TimeVaryingStateSpace, c2d, d2c, freq_response, ss2tf,
                  validate_sampling)
from .matfun import discretize_pair, expm, integral_expm, logm_principal
from .sim import (InputSignal, SampledTrajectory, ode_oracle, simulate_discrete,
                  simulate_jittered, verify_equivalence)

__all__ = [
    "ContinuousStateSpace", "DiscreteStateSpace", "TimeVaryingStateSpace",
    "RationalTransferFunction", "SamplingSpec", "c2d", "d2c", "ss2tf",
    "freq_response", "validate_sampling",
    "expm", "logm_principal", "discretize_pair", "integral_expm",
    "JitterModel", "JitterSequence", "generate", "validate", "effective_timesteps",
    "parse_descriptor",
    "perceive_case_a", "effective_case_b", "scale_tf", "lpv_realize", "LpvRealization",
    "PidParams", "pid_under_jitter", "pid_transfer_function",
    "recover_perceived_from_data",
    "InputSignal", "SampledTrajectory", "simulate_discrete", "simulate_jittered",
    "ode_oracle", "verify_equivalence",
]
