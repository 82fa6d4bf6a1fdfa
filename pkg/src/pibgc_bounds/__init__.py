"""Lower and upper bounds on two-way capacities of phase-insensitive bosonic Gaussian channels."""
from .baselines import (BoundValue, bosonic_entropy, ci_tmsv, excess_noise, npj_bound, plob_upper,
                        rci_tmsv)
from .bell_algebra import (BellDiag2, BellDiagD, ConditionalState, bell_diag_distillable, c_bar,
                           conditional_is_distillable, conditional_state, twirl)
from .channel_core import (ChannelKind, CompositionForm, PiBGC, channel_action_fock, f_coeff,
                           is_entanglement_breaking, to_composition)
from .distill_engine import (best_yield, hashing_yield, p1p2_step, p1p2_step_qudit, qudit_yield,
                             run_recurrence)
from .gaussian_cov import CovMatrix4, choi_cov, simon_f, tmsv_cov
from .rate_multirail import (MultirailBudget, multirail_best, multirail_rate, p_F, post_meas_state,
                             qudit_twirl, reverse_ci)
from .rate_qubit import OptBudget, RateResult, optimize, rate

__version__ = "0.1.0"
