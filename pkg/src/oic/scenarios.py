"""Numerical experiments: the line scenario, power gap and multi-channel Monte Carlo."""

from __future__ import annotations

import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from typing import NamedTuple, Sequence

import numpy as np

from oic.adaptation import (
    Regime,
    classify,
    inversion_branch,
    noic_rate_array,
    oic_rate_array,
    rate_noic,
    rate_oic,
    required_snr_noic,
    required_snr_oic,
)
from oic.allocator import conventional_energies, intercepted_energies
from oic.core import ChannelParams, DomainError, linear_to_db

__all__ = [
    "GapRow",
    "LineRow",
    "LineScenario",
    "McConfig",
    "McRow",
    "McSamples",
    "energy_diff",
    "gamma_p_at",
    "line_rate_curve",
    "mc_run",
    "mc_samples",
    "power_gap_curve",
]


def gamma_p_at(x: float, beta_p: float, v: float) -> float:
    """Primary SNR at normalized distance ``x`` from the primary transmitter.

    The primary is set up to deliver exactly ``beta_p`` at ``x = 1``.
    """
    if not x > 0:
        raise DomainError(f"normalized distance must be > 0, got {x!r}")
    return beta_p / x**v


@dataclass(frozen=True)
class LineScenario:
    beta_p: float
    v: float
    gamma_s: float
    x_grid: Sequence[float]

    def __post_init__(self):
        if not self.v > 0:
            raise DomainError(f"propagation coefficient must be > 0, got {self.v}")
        if not self.beta_p > 0:
            raise DomainError(f"beta_p must be > 0, got {self.beta_p}")
        if not self.gamma_s >= 0:
            raise DomainError(f"gamma_s must be >= 0, got {self.gamma_s}")
        if any(not x > 0 for x in self.x_grid):
            raise DomainError("all distances in x_grid must be > 0")

    @property
    def superposition_band(self) -> tuple[float, float]:
        """Open interval of ``x`` where the superposition split is used."""
        return (1.0 + self.gamma_s) ** (-1.0 / self.v), 1.0


class LineRow(NamedTuple):
    x: float
    gamma_p: float
    rate_noic: float
    rate_oic: float
    regime: Regime


def line_rate_curve(s: LineScenario) -> list[LineRow]:
    rows = []
    for x in s.x_grid:
        params = ChannelParams(1.0, gamma_p_at(x, s.beta_p, s.v), s.beta_p)
        rows.append(
            LineRow(
                float(x),
                params.gamma_p,
                rate_noic(s.gamma_s, params),
                rate_oic(s.gamma_s, params),
                classify(s.gamma_s, params),
            )
        )
    return rows


class GapRow(NamedTuple):
    x: float
    gamma_p: float
    required_snr_noic: float
    required_snr_oic: float
    gap_db: float
    branch: Regime


def power_gap_curve(target: float, beta_p: float, v: float, x_grid) -> list[GapRow]:
    """Extra secondary SNR (dB) needed for ``target`` when the primary is never decoded.

    ``target`` must be strictly positive; at zero both required SNRs vanish
    and their ratio in dB is undefined.
    """
    if not (math.isfinite(target) and target > 0):
        raise DomainError(f"target rate must be finite and > 0, got {target!r}")
    rows = []
    for x in x_grid:
        params = ChannelParams(1.0, gamma_p_at(x, beta_p, v), beta_p)
        noic = required_snr_noic(target, params)
        oic = required_snr_oic(target, params)
        gap = linear_to_db(noic) - linear_to_db(oic)
        rows.append(GapRow(float(x), params.gamma_p, noic, oic, gap, inversion_branch(target, params)))
    return rows


def energy_diff(e_oic, e_conv, total: float) -> tuple[float, float]:
    """Relative distance between two energy vectors.

    Returns ``(sqrt(||d||) / total, ||d|| / total)`` with ``d = e_oic - e_conv``
    and the Euclidean norm. The first is the figure-of-merit used for the
    published curves; the second is the dimensionally consistent variant.
    """
    if not total > 0:
        raise DomainError(f"total energy must be > 0, got {total!r}")
    e_oic = np.asarray(e_oic, dtype=float)
    e_conv = np.asarray(e_conv, dtype=float)
    if e_oic.shape != e_conv.shape:
        raise DomainError(f"shape mismatch: {e_oic.shape} vs {e_conv.shape}")
    norm = float(np.linalg.norm(e_oic - e_conv))
    return math.sqrt(norm) / total, norm / total


@dataclass(frozen=True)
class McConfig:
    """Monte-Carlo setup for the multi-channel study.

    Per iteration and channel: ``nu = 1 / g`` with ``g ~ Exp(1)``,
    ``gamma_p ~ Exp(mean_gamma_p)`` and ``beta_p ~ Exp(mean_beta_p)``, all
    linear. ``mean_beta_p = inf`` makes the primary never decodable.
    """

    channels: int
    mean_gamma_p: float
    mean_beta_p: float
    iterations: int
    energy_grid: tuple = field(default_factory=tuple)
    seed: int = 0

    def __post_init__(self):
        object.__setattr__(self, "energy_grid", tuple(float(e) for e in self.energy_grid))
        if self.channels < 1:
            raise DomainError(f"channels must be >= 1, got {self.channels}")
        if self.iterations < 1:
            raise DomainError(f"iterations must be >= 1, got {self.iterations}")
        if not (math.isfinite(self.mean_gamma_p) and self.mean_gamma_p > 0):
            raise DomainError(f"mean_gamma_p must be finite and > 0, got {self.mean_gamma_p}")
        if not self.mean_beta_p > 0:
            raise DomainError(f"mean_beta_p must be > 0, got {self.mean_beta_p}")
        if not self.energy_grid:
            raise DomainError("energy_grid must not be empty")
        if any(not (math.isfinite(e) and e >= 0) for e in self.energy_grid):
            raise DomainError("energies in energy_grid must be finite and >= 0")
        if not 0 <= self.seed < 2**64:
            raise DomainError(f"seed must fit in 64 unsigned bits, got {self.seed}")


def iteration_rng(seed: int, index: int) -> np.random.Generator:
    """PCG64 stream for one iteration, independent of all others."""
    return np.random.default_rng(np.random.SeedSequence(seed, spawn_key=(index,)))


def draw_channels(cfg: McConfig, index: int):
    """Channel draw ``(nu, gamma_p, beta_p)`` for iteration ``index``.

    Draws are unit exponentials scaled by the configured means, so two
    configs sharing a seed see coupled (common random number) channels.
    """
    rng = iteration_rng(cfg.seed, index)
    m = cfg.channels
    nu = 1.0 / rng.standard_exponential(m)
    gamma_p = cfg.mean_gamma_p * rng.standard_exponential(m)
    unit_beta = rng.standard_exponential(m)
    if math.isinf(cfg.mean_beta_p):
        beta_p = np.full(m, np.inf)
    else:
        beta_p = cfg.mean_beta_p * unit_beta
    return nu, gamma_p, beta_p


class McSamples(NamedTuple):
    """Per-iteration outcomes, each of shape ``(iterations, len(energy_grid))``."""

    sum_rate_oic: np.ndarray
    sum_rate_noic: np.ndarray
    rel_diff_paper: np.ndarray
    rel_diff_companion: np.ndarray


def _run_iterations(cfg: McConfig, indices: Sequence[int]):
    totals = np.asarray(cfg.energy_grid)
    n = len(indices)
    t = totals.size
    out = np.empty((4, n, t))
    positive = totals > 0
    for row, i in enumerate(indices):
        nu, gamma_p, beta_p = draw_channels(cfg, i)
        eff_noise = nu * (1.0 + gamma_p)
        e_oic, _ = intercepted_energies(totals, nu, gamma_p, beta_p)
        e_conv, _ = conventional_energies(totals, eff_noise)
        out[0, row] = oic_rate_array(e_oic / nu, gamma_p, beta_p).sum(axis=1)
        out[1, row] = noic_rate_array(e_conv / nu, gamma_p).sum(axis=1)
        norm = np.linalg.norm(e_oic - e_conv, axis=1)
        with np.errstate(divide="ignore", invalid="ignore"):
            out[2, row] = np.where(positive, np.sqrt(norm) / totals, np.nan)
            out[3, row] = np.where(positive, norm / totals, np.nan)
    return out


def mc_samples(cfg: McConfig, workers: int = 1) -> McSamples:
    """Run every iteration and keep the per-iteration results.

    Results do not depend on ``workers``: iteration ``i`` always uses the
    stream ``(seed, i)`` and chunks are reassembled in index order.
    """
    indices = list(range(cfg.iterations))
    if workers <= 1:
        out = _run_iterations(cfg, indices)
    else:
        chunks = [c.tolist() for c in np.array_split(indices, workers) if len(c)]
        with ProcessPoolExecutor(max_workers=workers) as pool:
            parts = list(pool.map(_run_iterations, [cfg] * len(chunks), chunks))
        out = np.concatenate(parts, axis=1)
    return McSamples(*out)


class McRow(NamedTuple):
    energy: float
    avg_snr_per_channel: float
    avg_sum_rate_oic: float
    avg_sum_rate_noic: float
    avg_rel_diff_paper: float
    avg_rel_diff_companion: float


def mc_run(cfg: McConfig, workers: int = 1) -> list[McRow]:
    """Average sum rates and energy-vector differences over the iterations."""
    s = mc_samples(cfg, workers=workers)
    means = [arr.mean(axis=0) for arr in s]
    rows = []
    for k, energy in enumerate(cfg.energy_grid):
        rows.append(
            McRow(
                energy,
                energy / cfg.channels,
                float(means[0][k]),
                float(means[1][k]),
                float(means[2][k]),
                float(means[3][k]),
            )
        )
    return rows
