from .base import (LiftedMap, compose, compose_all, deck_defect, fd_jacobian, identity, iterate,
                   orbit_arrays)
from .families import (BoundaryParams, BumpProfile, Strip, boundary_morse_smale, bump_push,
                       connector_shear, exterior_dissipation, integrable_twist, sup_perturbation,
                       vertical_contraction)

__all__ = [
    "LiftedMap", "compose", "compose_all", "deck_defect", "fd_jacobian", "identity", "iterate",
    "orbit_arrays", "BoundaryParams", "BumpProfile", "Strip", "boundary_morse_smale", "bump_push",
    "connector_shear", "exterior_dissipation", "integrable_twist", "sup_perturbation",
    "vertical_contraction",
]
