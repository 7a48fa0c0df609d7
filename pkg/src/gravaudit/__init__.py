"""Exchange amplitudes, entanglement verdicts and factorization checks for two
masses in spatial superposition coupled through a classical potential."""

__version__ = "0.1.0"

from .model import (AmplitudeMatrix, ExchangeTensor, PhysicalParams, SetupGeometry,
                    branch_distances, derive_params, kappa)
from .potential import PotentialField, sphere_potential
from .quadrature import QuadratureSpec, ball_pair_coulomb, mc_oracle
from .amplitudes import (VMatrix, beta_matrix, compute_Vij, exchange_tensor, farfield_Vij,
                         vmatrix_farfield, vmatrix_quadrature)
from .entanglement import (EntanglementReport, PureState2x2, schmidt_analysis,
                           state_from_beta, verdict_suite)

__all__ = [
    "AmplitudeMatrix", "ExchangeTensor", "PhysicalParams", "SetupGeometry",
    "branch_distances", "derive_params", "kappa", "PotentialField", "sphere_potential",
    "QuadratureSpec", "ball_pair_coulomb", "mc_oracle", "VMatrix", "beta_matrix",
    "compute_Vij", "exchange_tensor", "farfield_Vij", "vmatrix_farfield",
    "vmatrix_quadrature", "EntanglementReport", "PureState2x2", "schmidt_analysis",
    "state_from_beta", "verdict_suite",
]
