"""Simulations of a flux-tunable artificial atom sharing a nonlinear
inductance with its antenna resonator: three-wave couplings, forbidden-line
selection rules, Raman cooling, calibration, and stimulated Raman control."""

__version__ = "0.1.0"

from .backend import available_backends, backend_name
from .qcore import (Evolution, QOperator, QState, Trajectory, annihilation,
                    coherent_state, creation, eigendecompose, expectation,
                    fock_state, identity, lindblad_evolve, liouvillian,
                    number, product_state, projector, sigma_minus, sigma_plus,
                    sigma_x, sigma_z, steady_state, tensor)

__all__ = [
    "__version__", "available_backends", "backend_name",
    "Evolution", "QOperator", "QState", "Trajectory",
    "annihilation", "coherent_state", "creation", "eigendecompose",
    "expectation", "fock_state", "identity", "lindblad_evolve", "liouvillian",
    "number", "product_state", "projector", "sigma_minus", "sigma_plus",
    "sigma_x", "sigma_z", "steady_state", "tensor",
]
