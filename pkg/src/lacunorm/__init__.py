"""Norms and measures of noncompactness on lacunary difference sequence spaces."""

__version__ = "0.1.0"
