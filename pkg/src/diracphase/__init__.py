"""Geometric phase of the Dirac scattering operator on truncated momentum models."""
