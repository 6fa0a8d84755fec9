"""Exact experiments with quadratic Dirichlet L-functions over F_q[T]."""

__version__ = "0.1.0"
