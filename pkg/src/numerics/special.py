"""Special functions used by the theory formulas."""
from __future__ import annotations

import numpy as np
from scipy import special as sp

from src.errors import ParameterError

ERFC_SATURATION = 27.0


def special_erfc(x):
    """Complementary error function, saturated to 0 / 2 beyond |x| = 27."""
    x = np.asarray(x, dtype=float)
    out = np.where(x > ERFC_SATURATION, 0.0, np.where(x < -ERFC_SATURATION, 2.0, sp.erfc(x)))
    return float(out) if out.ndim == 0 else out


def special_log_gamma(x):
    """log Gamma(x) for x > 0."""
    x = np.asarray(x, dtype=float)
    if np.any(x <= 0) or not np.all(np.isfinite(x)):
        raise ParameterError(f"log_gamma requires finite x > 0, got {x}")
    out = sp.gammaln(x)
    return float(out) if out.ndim == 0 else out
