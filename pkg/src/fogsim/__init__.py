"""Discrete-event simulator and placement optimizer for fog computing over 5G-like networks."""

__version__ = "0.1.0"
