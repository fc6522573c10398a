"""Small shared helpers for the test suite."""

from __future__ import annotations

import numpy as np

from poincarefp.spectral import ShiftedSpectrum


def make_shifted(gammas, mu=0.0) -> ShiftedSpectrum:
    """Build a ShiftedSpectrum directly from a root tuple."""
    gammas = tuple(sorted((float(g) for g in gammas), reverse=True))
    if gammas[0] < 0:
        case = 1
    elif gammas[-1] > 0:
        case = len(gammas) + 1
    else:
        case = next(
            k + 1
            for k in range(1, len(gammas))
            if gammas[k] < 0 < gammas[k - 1]
        )
    return ShiftedSpectrum(
        gamma=gammas, base_index=1, case_index=case, mu=mu
    )


def char_coeffs(gammas) -> np.ndarray:
    """Monic coefficients (highest first) of prod (x - gamma_l)."""
    return np.poly(np.asarray(gammas))


def coeffs_from_roots(roots):
    """(a_0, ..., a_{n-1}) of the monic polynomial with the given roots."""
    poly = np.poly(np.asarray(roots))
    return tuple(poly[1:][::-1])
