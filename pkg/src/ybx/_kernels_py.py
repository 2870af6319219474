"""Pure numpy versions of the compiled kernels, with identical signatures."""

import numpy as np


def theta1_series(z, tau, nterms):
    """Truncated odd theta series, summed over half-integers |k + 1/2| <= nterms."""
    z = np.asarray(z, dtype=np.complex128)
    half = np.arange(-nterms, nterms)[:, None] + 0.5
    terms = np.exp(1j * np.pi * half**2 * tau) * np.exp(2j * np.pi * half * (z[None, :] + 0.5))
    return -terms.sum(axis=0)


def egamma_product(z, p, q, nterms):
    """Truncated elliptic gamma double product.

    Returns the values and the smallest denominator modulus met.
    """
    z = np.asarray(z, dtype=np.complex128)
    k = np.arange(nterms + 1)
    table = (p ** k[:, None] * q ** k[None, :]).ravel()
    e = np.exp(2j * np.pi * z)
    den = 1 - e[None, :] * table[:, None]
    num = 1 - (1 / e)[None, :] * (table * p * q)[:, None]
    mind = float(np.abs(den).min()) if den.size else np.inf
    return np.prod(num / den, axis=0), mind
