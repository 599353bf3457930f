"""Stochastic resolvers for parity automata: classification, conversion and analysis."""

__version__ = "0.1.0"
