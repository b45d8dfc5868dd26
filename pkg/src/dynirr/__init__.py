"""Dynamical irreducibility of integer polynomials modulo primes."""

__version__ = "0.1.0"
