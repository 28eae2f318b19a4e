"""Coupled Ising/FK edge-spin Markov jump dynamics: exact checks and simulation."""

__version__ = "0.1.0"
