"""Probabilistic ZZ measurement gates between remote atoms via frequency-qubit interference."""

__version__ = "0.1.0"
