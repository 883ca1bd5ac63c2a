"""Exact and numeric checks of local Liakopoulos-Meyer type volume inequalities."""

__version__ = "0.1.0"
