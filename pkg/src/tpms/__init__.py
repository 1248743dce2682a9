"""Genus-7 triply periodic minimal surfaces: Weierstrass data, periods, meshes."""

__version__ = "0.1.0"
