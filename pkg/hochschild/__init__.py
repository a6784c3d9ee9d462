"""
Hochschild Cohomology Engine for N_m

Exact computation of HH*(N_m, M) for the algebra of upper triangular matrices
with constant diagonal: Koszul and bar models, the J-adic spectral sequence,
cup products, Gerstenhaber brackets and the complete N_2 theory.
"""

__version__ = "1.0.0"
__author__ = "Hochschild Engine Maintainers"
