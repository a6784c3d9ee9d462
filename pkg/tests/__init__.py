"""
Test Suite for the Hochschild Cohomology Engine

Covers exact arithmetic, the algebra and bimodule catalogs, the cochain
complexes, the spectral sequence, cup products and brackets, and the CLI.

Test Categories:
- Unit tests for exact linear algebra and the phi/psi counts
- Unit tests for bimodules, Koszul and bar cohomology
- Spectral-sequence and Gerstenhaber-structure tests
- N_2 theory over Z, Z/N and fields
- Integration tests for the command-line entry point

Usage:
    # Run all tests
    pytest tests/ -v

    # Run with coverage
    pytest tests/ --cov=hochschild --cov=lib

    # Run specific test category
    pytest tests/test_ghstructure.py -v
    pytest tests/test_integration.py -v
"""

__version__ = "1.0.0"
