"""Scalar conventions shared by the rest of the package.

All SNR-like quantities are linear power ratios. Rates are in bps/Hz with
the bandwidth normalized to one, so ``capacity(x) = log2(1 + x)``. Energies
are noise-normalized, i.e. ``gamma_s = energy / nu`` on a channel with
normalized noise energy ``nu``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

# Plain floats; the aliases only document units in signatures.
LinearSnr = float
Rate = float
Energy = float

__all__ = [
    "ChannelParams",
    "DomainError",
    "Energy",
    "LinearSnr",
    "Rate",
    "capacity",
    "db_to_linear",
    "linear_to_db",
]


class DomainError(ValueError):
    """Raised when an argument lies outside the domain of a function."""


def _as_array(x, name):
    arr = np.asarray(x, dtype=float)
    if not np.all(np.isfinite(arr)):
        raise DomainError(f"{name} must be finite, got {x!r}")
    return arr


def _scalar_or_array(arr):
    return float(arr) if arr.ndim == 0 else arr


def capacity(x):
    """Gaussian channel capacity ``log2(1 + x)`` in bps/Hz.

    Accepts a scalar or an array of non-negative linear SNRs.
    """
    arr = _as_array(x, "x")
    if np.any(arr < 0):
        raise DomainError(f"capacity needs x >= 0, got {x!r}")
    return _scalar_or_array(np.log2(1.0 + arr))


def db_to_linear(db):
    """Convert decibels to a linear power ratio."""
    arr = _as_array(db, "db")
    return _scalar_or_array(10.0 ** (arr / 10.0))


def linear_to_db(x):
    """Convert a strictly positive linear power ratio to decibels."""
    arr = _as_array(x, "x")
    if np.any(arr <= 0):
        raise DomainError(f"linear_to_db needs x > 0, got {x!r}")
    return _scalar_or_array(10.0 * np.log10(arr))


@dataclass(frozen=True)
class ChannelParams:
    """Per-channel parameters seen by the secondary receiver.

    Attributes
    ----------
    nu : float
        Normalized noise energy; the secondary SNR is ``energy / nu``.
    gamma_p : float
        Linear SNR of the primary signal at the secondary receiver.
    beta_p : float
        Minimum linear SNR needed to decode the primary at its chosen rate,
        so the primary rate is ``capacity(beta_p)``.
    """

    nu: float
    gamma_p: float
    beta_p: float

    def __post_init__(self):
        for name in ("nu", "gamma_p", "beta_p"):
            value = getattr(self, name)
            if isinstance(value, bool) or not isinstance(value, (int, float, np.floating, np.integer)):
                raise DomainError(f"{name} must be a real number, got {value!r}")
            if not math.isfinite(value):
                raise DomainError(f"{name} must be finite, got {value!r}")
            object.__setattr__(self, name, float(value))
        if self.nu <= 0:
            raise DomainError(f"nu must be > 0, got {self.nu}")
        if self.gamma_p < 0:
            raise DomainError(f"gamma_p must be >= 0, got {self.gamma_p}")
        if self.beta_p <= 0:
            raise DomainError(f"beta_p must be > 0, got {self.beta_p}")

    @property
    def primary_rate(self) -> Rate:
        return capacity(self.beta_p)

    @property
    def decodable(self) -> bool:
        """True when the primary signal can be decoded on its own."""
        return self.gamma_p >= self.beta_p
