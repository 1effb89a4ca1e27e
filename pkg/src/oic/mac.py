"""Two-user multiple-access rate region and the superposition-coding split.

The secondary receiver sees the secondary transmitter (SNR ``gamma_s``) and
the primary transmitter (SNR ``gamma_p``). A rate pair ``(r_s, r_p)`` is
jointly decodable when

    r_s <= C(gamma_s),  r_p <= C(gamma_p),  r_s + r_p <= C(gamma_s + gamma_p).

When the primary rate is fixed somewhere on the dominant face of that
pentagon, time sharing is not an option because the primary does not
cooperate. Splitting the secondary codeword into two layers reaches the
same point: layer 1 is decoded treating layer 2 and the primary as noise,
then the primary is decoded and removed, then layer 2 is decoded cleanly.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import NamedTuple

from oic.core import DomainError, capacity

__all__ = [
    "RatePair",
    "RegimeError",
    "SuperpositionSplit",
    "corner_points",
    "region_contains",
    "sum_rate_identity_check",
    "superposition_split",
]


class RegimeError(ValueError):
    """Raised when a formula is used outside the regime where it holds."""


class RatePair(NamedTuple):
    r_s: float
    r_p: float


@dataclass(frozen=True)
class SuperpositionSplit:
    """Power split between the two secondary layers.

    ``alpha`` is the power fraction of the layer decoded after the primary
    (rate ``r2``); ``1 - alpha`` goes to the layer decoded before it
    (rate ``r1``).
    """

    alpha: float
    r1: float
    r2: float

    @property
    def rate(self) -> float:
        return self.r1 + self.r2


def _check_snr(name, value):
    if not value >= 0:
        raise DomainError(f"{name} must be >= 0, got {value!r}")


def corner_points(gamma_s: float, gamma_p: float) -> tuple[RatePair, RatePair]:
    """Corner points ``(L_s, L_p)`` of the dominant face of the region.

    ``L_s`` decodes the primary first (secondary gets its clean capacity);
    ``L_p`` decodes the secondary first, treating the primary as noise.
    """
    _check_snr("gamma_s", gamma_s)
    _check_snr("gamma_p", gamma_p)
    l_s = RatePair(capacity(gamma_s), capacity(gamma_p / (1.0 + gamma_s)))
    l_p = RatePair(capacity(gamma_s / (1.0 + gamma_p)), capacity(gamma_p))
    return l_s, l_p


def region_contains(pair, gamma_s: float, gamma_p: float, tol: float = 0.0) -> bool:
    """Whether ``pair`` lies in the MAC capacity region, up to ``tol``."""
    if tol < 0:
        raise DomainError(f"tol must be >= 0, got {tol}")
    _check_snr("gamma_s", gamma_s)
    _check_snr("gamma_p", gamma_p)
    r_s, r_p = pair
    return bool(
        r_s <= capacity(gamma_s) + tol
        and r_p <= capacity(gamma_p) + tol
        and r_s + r_p <= capacity(gamma_s + gamma_p) + tol
    )


def superposition_split(gamma_s: float, gamma_p: float, beta_p: float) -> SuperpositionSplit:
    """Layer split that lets the primary be decoded at exactly ``C(beta_p)``.

    ``alpha`` is chosen so that, once layer 1 is removed, the primary sees
    SNR ``gamma_p / (1 + alpha * gamma_s) = beta_p``.

    Raises
    ------
    RegimeError
        Unless ``beta_p <= gamma_p`` and ``gamma_s >= gamma_p / beta_p - 1``
        with ``gamma_s > 0``. At equality ``alpha = 1`` and the split
        reduces to decoding the primary first.
    """
    _check_snr("gamma_s", gamma_s)
    _check_snr("gamma_p", gamma_p)
    if not beta_p > 0:
        raise DomainError(f"beta_p must be > 0, got {beta_p!r}")
    if beta_p > gamma_p:
        raise RegimeError(
            f"superposition needs beta_p <= gamma_p (primary decodable), "
            f"got beta_p={beta_p} > gamma_p={gamma_p}"
        )
    kink = gamma_p / beta_p - 1.0
    if gamma_s < kink:
        raise RegimeError(
            f"superposition needs gamma_s >= gamma_p/beta_p - 1 = {kink}, got gamma_s={gamma_s}"
        )
    if gamma_s == 0:
        raise RegimeError("superposition needs gamma_s > 0; a silent secondary has rate 0")
    alpha = min(kink / gamma_s, 1.0)
    r1 = capacity((1.0 - alpha) * gamma_s / (1.0 + gamma_p + alpha * gamma_s))
    r2 = capacity(alpha * gamma_s)
    return SuperpositionSplit(alpha=alpha, r1=r1, r2=r2)


def sum_rate_identity_check(gamma_s: float, gamma_p: float, beta_p: float) -> float:
    """Residual ``|r1 + C(beta_p) + r2 - C(gamma_s + gamma_p)|`` of a split.

    A correct split puts the pair on the sum-rate face, so this should sit
    at rounding level.
    """
    split = superposition_split(gamma_s, gamma_p, beta_p)
    return abs(split.r1 + capacity(beta_p) + split.r2 - capacity(gamma_s + gamma_p))
