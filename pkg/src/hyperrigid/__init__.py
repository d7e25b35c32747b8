"""Numerical laboratory for hyperrigidity experiments at matrix scale.

The package classifies rigid functions, constructs explicit counterexample
maps for non-convex functions, probes the unique extension property of
finite-dimensional operator systems by semidefinite feasibility, and checks
concrete spectral and approximation claims (discretized Volterra operator,
Korovkin convergence, minimax extension identities).
"""

__version__ = "0.1.0"
