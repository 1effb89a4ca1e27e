"""Energy allocation over parallel channels.

Each channel's OIC rate is concave in its energy but has a kink where the
primary stops being decodable "for free". Conventional water-filling
assumes a smooth log curve per channel; with the kink, the optimum is an
*intercepted* water-filling. In level terms, a channel whose primary is
decodable looks like a basin of noise floor ``nu`` filled up to
``nu * gamma_p / beta_p``, then a suspended stone block of height
``nu * gamma_p``, then open water again. An undecodable channel is a single
block of height ``nu * (1 + gamma_p)``.

For a water level ``L`` the energy a channel holds is therefore

    clip(L - lower_top, 0, cap) + max(0, L - upper_top)

and ``L = 1 / (lambda * ln 2)`` where ``lambda`` is the common marginal rate
per unit energy. The solver bisects on ``lambda`` and then spreads the
remaining bisection residue over the channels that are still filling.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from oic.adaptation import noic_rate_array, oic_rate_array, rate_oic
from oic.core import ChannelParams, DomainError

__all__ = [
    "AllocationResult",
    "BlockGeometry",
    "allocate_conventional",
    "allocate_intercepted",
    "blocks_for_channel",
    "channel_rate",
    "conventional_energies",
    "intercepted_energies",
    "oracle_allocate",
]

_LN2 = np.log(2.0)
MAX_BISECTIONS = 200


@dataclass(frozen=True)
class BlockGeometry:
    """Levels of one channel's stone blocks.

    ``[0, lower_top]`` is the lower block, ``(lower_top, gap_top]`` the
    basin that takes water before the upper block, ``(gap_top, upper_top]``
    the upper block. Undecodable channels have all three levels equal.
    """

    lower_top: float
    gap_top: float
    upper_top: float

    @property
    def cap(self) -> float:
        """Energy the lower basin holds (the kink energy)."""
        return self.gap_top - self.lower_top

    @property
    def total_height(self) -> float:
        return self.lower_top + (self.upper_top - self.gap_top)

    def fill(self, level: float) -> float:
        """Energy held by this channel at water level ``level``."""
        return float(_fill(level, self.lower_top, self.gap_top, self.upper_top))


@dataclass(frozen=True)
class AllocationResult:
    energies: np.ndarray
    per_channel_rates: np.ndarray
    sum_rate: float
    water_marginal: float

    @property
    def water_level(self) -> float:
        return 1.0 / (self.water_marginal * _LN2)


def _geometry_arrays(nu, gamma_p, beta_p):
    nu = np.asarray(nu, dtype=float)
    gamma_p = np.asarray(gamma_p, dtype=float)
    beta_p = np.asarray(beta_p, dtype=float)
    decodable = gamma_p >= beta_p
    with np.errstate(divide="ignore", invalid="ignore"):
        ratio = np.where(decodable, gamma_p / beta_p, 0.0)
    single = nu * (1.0 + gamma_p)
    lower = np.where(decodable, nu, single)
    gap = np.where(decodable, nu * ratio, single)
    upper = np.where(decodable, nu * ratio + nu * gamma_p, single)
    return lower, gap, upper


def _fill(level, lower, gap, upper):
    level = np.asarray(level, dtype=float)
    return np.clip(level - lower, 0.0, gap - lower) + np.maximum(level - upper, 0.0)


def blocks_for_channel(params: ChannelParams) -> BlockGeometry:
    """Stone-block levels of a channel for intercepted water-filling."""
    lower, gap, upper = _geometry_arrays(params.nu, params.gamma_p, params.beta_p)
    return BlockGeometry(float(lower), float(gap), float(upper))


def channel_rate(e: float, params: ChannelParams) -> float:
    """OIC rate of a channel loaded with energy ``e``."""
    if not (np.isfinite(e) and e >= 0):
        raise DomainError(f"energy must be finite and >= 0, got {e!r}")
    return rate_oic(e / params.nu, params)


def _unpack(channels: Sequence[ChannelParams]):
    if len(channels) == 0:
        raise DomainError("at least one channel is required")
    nu = np.array([c.nu for c in channels])
    gamma_p = np.array([c.gamma_p for c in channels])
    beta_p = np.array([c.beta_p for c in channels])
    return nu, gamma_p, beta_p


def _check_total(total):
    if not (np.isfinite(total) and total >= 0):
        raise DomainError(f"total energy must be finite and >= 0, got {total!r}")


def intercepted_energies(totals, nu, gamma_p, beta_p):
    """Intercepted water-filling for several total energies at once.

    Parameters
    ----------
    totals : array_like, shape (T,)
        Non-negative total energies.
    nu, gamma_p, beta_p : array_like, shape (M,)
        Channel parameters. ``beta_p`` may be ``inf``.

    Returns
    -------
    energies : ndarray, shape (T, M)
    marginals : ndarray, shape (T,)
        Dual value ``lambda`` for each total.
    """
    totals = np.atleast_1d(np.asarray(totals, dtype=float))
    nu = np.asarray(nu, dtype=float)
    gamma_p = np.asarray(gamma_p, dtype=float)
    lower, gap, upper = _geometry_arrays(nu, gamma_p, beta_p)

    lam_hi = np.full(totals.shape, 1.0 / (nu.min() * _LN2))
    lam_lo = 1.0 / ((np.max(nu * (1.0 + gamma_p)) + totals) * _LN2)
    tol = 1e-10 * np.maximum(1.0, totals)
    zero = totals == 0
    lam_lo = np.where(zero, lam_hi, lam_lo)

    def volume(lam):
        return _fill((1.0 / (lam * _LN2))[:, None], lower, gap, upper).sum(axis=1)

    # invariant: the level at lam_lo holds at least the total, lam_hi less
    err_lo = volume(lam_lo) - totals
    for _ in range(MAX_BISECTIONS):
        if np.all(err_lo <= tol):
            break
        lam = 0.5 * (lam_lo + lam_hi)
        err = volume(lam) - totals
        over = (err >= 0) & (err_lo > tol)
        under = (err < 0) & (err_lo > tol)
        lam_lo = np.where(over, lam, lam_lo)
        err_lo = np.where(over, err, err_lo)
        lam_hi = np.where(under, lam, lam_hi)

    # Near the solution the filled volume is linear in the level on every
    # channel not sitting on a block edge; spreading the remaining residue over
    # those channels directly avoids losing digits to the level's magnitude.
    lam = lam_lo
    level = 1.0 / (lam * _LN2)
    energies = _fill(level[:, None], lower, gap, upper)
    lv = level[:, None]
    sloped = ((lv > lower) & (lv < gap)) | (lv > upper)
    n_sloped = sloped.sum(axis=1)
    err = totals - energies.sum(axis=1)
    share = np.where(n_sloped > 0, err / np.maximum(n_sloped, 1), 0.0)
    energies = np.maximum(energies + np.where(sloped, share[:, None], 0.0), 0.0)
    energies[zero] = 0.0
    return energies, lam


def allocate_intercepted(total: float, channels: Sequence[ChannelParams]) -> AllocationResult:
    """Sum-rate optimal energy split under OIC (intercepted water-filling).

    Examples
    --------
    >>> chans = [ChannelParams(1, 10, 5), ChannelParams(1, 10, 20)]
    >>> allocate_intercepted(1.5, chans).energies.round(9).tolist()
    [1.0, 0.5]
    """
    _check_total(total)
    nu, gamma_p, beta_p = _unpack(channels)
    energies, lam = intercepted_energies([total], nu, gamma_p, beta_p)
    energies = energies[0]
    rates = oic_rate_array(energies / nu, gamma_p, beta_p)
    return AllocationResult(energies, rates, float(rates.sum()), float(lam[0]))


def _conventional_level(total, noise_sorted, prefix):
    # largest k such that the level with k active channels exceeds the k-th noise
    k = noise_sorted.size
    levels = (total + prefix) / np.arange(1, k + 1)
    active = np.nonzero(levels > noise_sorted)[0]
    if active.size == 0:
        return noise_sorted[0]
    return levels[active[-1]]


def conventional_energies(totals, noise):
    """Classic water-filling ``e_m = max(0, L - n_m)`` for several totals.

    Returns ``(energies, levels)`` with shapes ``(T, M)`` and ``(T,)``.
    """
    totals = np.atleast_1d(np.asarray(totals, dtype=float))
    noise = np.asarray(noise, dtype=float)
    noise_sorted = np.sort(noise)
    prefix = np.cumsum(noise_sorted)
    levels = np.array([_conventional_level(t, noise_sorted, prefix) for t in totals])
    energies = np.maximum(levels[:, None] - noise, 0.0)
    return energies, levels


def allocate_conventional(total: float, noise_levels) -> AllocationResult:
    """Conventional water-filling over channels with the given noise levels.

    Rates are ``C(e_m / n_m)``. For the no-IC baseline pass the effective
    noises ``nu_m * (1 + gamma_p_m)``.
    """
    _check_total(total)
    noise = np.asarray(noise_levels, dtype=float).ravel()
    if noise.size == 0:
        raise DomainError("at least one channel is required")
    if not np.all(np.isfinite(noise) & (noise > 0)):
        raise DomainError(f"noise levels must be finite and > 0, got {noise_levels!r}")
    energies, levels = conventional_energies([total], noise)
    energies = energies[0]
    rates = noic_rate_array(energies / noise, 0.0)
    return AllocationResult(energies, rates, float(rates.sum()), float(1.0 / (levels[0] * _LN2)))


def oracle_allocate(total: float, channels: Sequence[ChannelParams], steps: int = 100_000) -> AllocationResult:
    """Greedy quantized allocation used as an independent check.

    The total is cut into ``steps`` equal quanta and each quantum goes to the
    channel whose rate grows most from it. For concave rates this is the
    same as keeping the ``steps`` largest per-quantum increments over all
    channels, which is how it is computed here. Only the rate function is
    used, never the block geometry.
    """
    _check_total(total)
    if steps < 1000:
        raise DomainError(f"steps must be >= 1000, got {steps}")
    nu, gamma_p, beta_p = _unpack(channels)
    m = nu.size
    if total == 0:
        zeros = np.zeros(m)
        return AllocationResult(zeros, zeros.copy(), 0.0, float(1.0 / (nu.min() * _LN2)))

    quantum = total / steps
    grid = quantum * np.arange(steps + 1)
    rates = oic_rate_array(grid[None, :] / nu[:, None], gamma_p[:, None], beta_p[:, None])
    gains = np.diff(rates, axis=1).ravel()
    chosen = np.argpartition(-gains, steps - 1)[:steps]
    counts = np.bincount(chosen // steps, minlength=m)
    energies = counts * quantum
    per_channel = oic_rate_array(energies / nu, gamma_p, beta_p)
    marginal = float(gains[chosen].min() / quantum)
    return AllocationResult(energies, per_channel, float(per_channel.sum()), marginal)
