"""Harmonic analysis on finite Abelian groups: additive energy and norm certificates for character maps."""
