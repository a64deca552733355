"""Hermitian modular forms on U(n,n): exact Eisenstein data and congruence checks."""
__version__ = "0.1.0"
