"""Simulation of a heralded single-photon source based on pulsed type-I PDC in BBO."""

__version__ = "0.1.0"
