"""Exact mod-p Hecke algebras and universal modules for GL_n over finite fields."""

__version__ = "0.1.0"
