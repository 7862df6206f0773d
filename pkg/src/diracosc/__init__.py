"""Spectral wavepacket dynamics in the Dirac oscillator."""

from .model import ModelParams, SectorKey, ValidationError, a_index, omega_nlj, nonrel_splitting
from .packets import BispinorExpansion, PacketSpec, Rep, initial_state
from .evolution import Propagator, dirac_AB, evolve, fw_ab

__all__ = [
    "BispinorExpansion",
    "ModelParams",
    "PacketSpec",
    "Propagator",
    "Rep",
    "SectorKey",
    "ValidationError",
    "a_index",
    "dirac_AB",
    "evolve",
    "fw_ab",
    "initial_state",
    "nonrel_splitting",
    "omega_nlj",
]
