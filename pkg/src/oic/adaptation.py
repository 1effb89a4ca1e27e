"""Opportunistic interference cancellation (OIC) rate adaptation.

For a primary at SNR ``gamma_p`` sending at rate ``C(beta_p)``, the best
secondary rate as a function of its own SNR ``gamma_s`` is

* ``C(gamma_s / (1 + gamma_p))`` when ``gamma_p < beta_p`` (primary cannot
  be decoded, it stays noise);
* ``C(gamma_s)`` when the primary is decodable and
  ``gamma_s <= gamma_p / beta_p - 1`` (decode and subtract it first);
* ``log2((1 + gamma_p) / (1 + beta_p)) + C(gamma_s / (1 + gamma_p))``
  above that kink (superposition split, see :mod:`oic.mac`).

The function is continuous and concave in ``gamma_s`` with a single kink
where the slope drops by the factor ``1 + beta_p``.
"""

from __future__ import annotations

import enum

import numpy as np

from oic.core import ChannelParams, DomainError

__all__ = [
    "Regime",
    "classify",
    "oic_rate_array",
    "noic_rate_array",
    "rate_noic",
    "rate_oic",
    "required_snr_noic",
    "required_snr_oic",
]

_LN2 = np.log(2.0)


class Regime(str, enum.Enum):
    UNDECODABLE_PRIMARY = "UndecodablePrimary"
    CLEAN_DECODE = "CleanDecode"
    SUPERPOSITION = "Superposition"

    def __str__(self):
        return self.value


def classify(gamma_s: float, params: ChannelParams) -> Regime:
    """Which branch of the rate function applies at ``gamma_s``.

    The kink itself (``gamma_s == gamma_p / beta_p - 1``) counts as
    ``CLEAN_DECODE``.
    """
    if params.gamma_p < params.beta_p:
        return Regime.UNDECODABLE_PRIMARY
    if gamma_s <= params.gamma_p / params.beta_p - 1.0:
        return Regime.CLEAN_DECODE
    return Regime.SUPERPOSITION


def oic_rate_array(gamma_s, gamma_p, beta_p):
    """Vectorized OIC rate; arguments broadcast against each other.

    ``beta_p`` may be ``inf`` to model a primary that is never decodable.
    No validation is done here.
    """
    gamma_s, gamma_p, beta_p = np.broadcast_arrays(
        np.asarray(gamma_s, dtype=float),
        np.asarray(gamma_p, dtype=float),
        np.asarray(beta_p, dtype=float),
    )
    decodable = gamma_p >= beta_p
    with np.errstate(divide="ignore", invalid="ignore"):
        kink = np.where(decodable, gamma_p / beta_p - 1.0, -np.inf)
        noisy = np.log1p(gamma_s / (1.0 + gamma_p)) / _LN2
        clean = np.log1p(gamma_s) / _LN2
        offset = np.where(decodable, (np.log1p(gamma_p) - np.log1p(beta_p)) / _LN2, 0.0)
    out = np.where(gamma_s <= kink, clean, noisy + offset)
    return out


def noic_rate_array(gamma_s, gamma_p):
    """Vectorized rate when the primary is always treated as noise."""
    gamma_s = np.asarray(gamma_s, dtype=float)
    gamma_p = np.asarray(gamma_p, dtype=float)
    return np.log1p(gamma_s / (1.0 + gamma_p)) / _LN2


def _check_gamma_s(gamma_s):
    if not (np.isfinite(gamma_s) and gamma_s >= 0):
        raise DomainError(f"gamma_s must be finite and >= 0, got {gamma_s!r}")


def rate_oic(gamma_s: float, params: ChannelParams) -> float:
    """Achievable secondary rate with opportunistic interference cancellation."""
    _check_gamma_s(gamma_s)
    return float(oic_rate_array(gamma_s, params.gamma_p, params.beta_p))


def rate_noic(gamma_s: float, params: ChannelParams) -> float:
    """Secondary rate when the primary is never decoded (no IC baseline)."""
    _check_gamma_s(gamma_s)
    return float(noic_rate_array(gamma_s, params.gamma_p))


def _check_target(target):
    if not (np.isfinite(target) and target >= 0):
        raise DomainError(f"target rate must be finite and >= 0, got {target!r}")


def inversion_branch(target: float, params: ChannelParams) -> Regime:
    """Branch of the rate function that reaches ``target`` (kink included in clean)."""
    _check_target(target)
    if params.gamma_p < params.beta_p:
        return Regime.UNDECODABLE_PRIMARY
    if target <= np.log2(params.gamma_p / params.beta_p):
        return Regime.CLEAN_DECODE
    return Regime.SUPERPOSITION


def required_snr_oic(target: float, params: ChannelParams) -> float:
    """Smallest ``gamma_s`` whose OIC rate equals ``target``."""
    branch = inversion_branch(target, params)
    g_p, b_p = params.gamma_p, params.beta_p
    if branch is Regime.UNDECODABLE_PRIMARY:
        return float((1.0 + g_p) * np.expm1(target * _LN2))
    if branch is Regime.CLEAN_DECODE:
        return float(np.expm1(target * _LN2))
    offset = np.log2((1.0 + g_p) / (1.0 + b_p))
    return float((1.0 + g_p) * np.expm1((target - offset) * _LN2))


def required_snr_noic(target: float, params: ChannelParams) -> float:
    """``gamma_s`` needed for ``target`` when the primary is treated as noise."""
    _check_target(target)
    return float((1.0 + params.gamma_p) * np.expm1(target * _LN2))
