"""Exact verification of order-p symmetries on blown-up threefolds and of
the quotient singularities they produce."""

__version__ = "0.1.0"
