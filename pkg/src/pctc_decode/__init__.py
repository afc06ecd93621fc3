"""Simulation of information decoding through a postselected teleportation loop.

Submodules: ``qcore`` (state-vector kernel), ``scramblers``, ``protocol``
(analytic engines and the exact laboratory pipeline), ``shots`` (sampled
experiment), ``tomography``, ``otoc`` and ``cli``.
"""

from .exceptions import DegenerateOutcomeError, DimensionError, InsufficientStatisticsError
from .otoc import (
    OtocReport,
    otoc_average_exact,
    otoc_average_sampled,
    otoc_overlap,
    otoc_value,
    state_design_average,
    twirl_projector,
)
from .protocol import (
    NoiseModel,
    ProtocolResult,
    bound_check,
    decode_analytic_pctc,
    decode_analytic_yk,
    exact_conditional_distribution,
    success_probability,
)
from .scramblers import ScramblerSpec, by_name, haar_scrambler, identity_scrambler, u_c, u_q
from .shots import run_shots, simulate_basis
from .tomography import TomographyDataset, estimate, make_physical, reconstruct_linear

__version__ = "0.1.0"
