"""Construction and verification of Yang-Baxter solutions by matrix factorization."""

__version__ = "0.1.0"
