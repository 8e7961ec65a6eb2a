"""Heat-bath single-site sampler for the finite-volume measure.

Randomness comes from NumPy's PCG64 bit generator via
``numpy.random.default_rng(seed)``.  One sweep visits the sites left to
right and consumes exactly one uniform per site, so a trajectory is
fully determined by the seed and the sweep count; resuming a chain skips
the stream ahead instead of replaying it.

Mixing collapses at large beta once couplings grow with |x| -- that
slowdown is the phenomenon under study, not an implementation problem --
so statistical cross-checks belong at moderate beta.  The command-line
front end refuses beta > 4 without an explicit override for this reason.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .model import Configuration, CouplingProfile, Volume

__all__ = [
    "ChainState",
    "EstimateRecord",
    "estimate_marginal",
    "glauber_sweep",
    "heat_bath_flip_probability",
    "initial_state",
]

_BATCHES = 20
_SWEEP_BLOCK = 4096


@dataclass(frozen=True)
class ChainState:
    """A resumable chain position: configuration, seed, sweeps consumed."""

    config: Configuration
    seed: int
    sweeps_done: int = 0


@dataclass(frozen=True)
class EstimateRecord:
    mean: float
    std_error: float
    samples: int
    burn_in: int


def initial_state(volume: Volume, boundary: int, seed: int) -> ChainState:
    """Fresh chain started from the boundary-aligned configuration."""
    return ChainState(Configuration.uniform(volume, boundary, boundary), int(seed), 0)


def _sigmoid(a: float) -> float:
    """1 / (1 + e^-a) without overflow at either end."""
    if a >= 0.0:
        return 1.0 / (1.0 + math.exp(-a))
    e = math.exp(a)
    return e / (1.0 + e)


def heat_bath_flip_probability(
    config: Configuration, profile: CouplingProfile, beta: float, site: int
) -> float:
    """Probability that updating ``site`` flips it: 1 / (1 + e^(beta dH)).

    dH is the energy change of negating that single spin; neighbors
    beyond the window contribute through the boundary sign.
    """
    if not (beta > 0.0 and math.isfinite(beta)):
        raise ValueError("inverse temperature must be positive and finite")
    vol = config.volume
    s = config.spin(site)
    left = config.spin(site - 1) if site - 1 in vol else config.boundary
    right = config.spin(site + 1) if site + 1 in vol else config.boundary
    delta = s * (profile.coupling(site) * left + profile.coupling(site + 1) * right)
    return _sigmoid(-beta * delta)


def _flip_tables(
    profile: CouplingProfile, volume: Volume, beta: float
) -> list[list[float]]:
    """Per-site flip probabilities indexed by the (left, self, right) sign bits."""
    tables: list[list[float]] = []
    for x in volume.sites():
        c_left = profile.coupling(x)
        c_right = profile.coupling(x + 1)
        row = [0.0] * 8
        for code in range(8):
            left = 1 if code & 4 else -1
            own = 1 if code & 2 else -1
            right = 1 if code & 1 else -1
            delta = own * (c_left * left + c_right * right)
            row[code] = _sigmoid(-beta * delta)
        tables.append(row)
    return tables


def _sweep(
    spins: list[int], boundary: int, tables: list[list[float]], uniforms: list[float]
) -> None:
    """One in-place pass over all sites in ascending order."""
    last = len(spins) - 1
    for i, u in enumerate(uniforms):
        s = spins[i]
        left = spins[i - 1] if i > 0 else boundary
        right = spins[i + 1] if i < last else boundary
        code = (4 if left > 0 else 0) | (2 if s > 0 else 0) | (1 if right > 0 else 0)
        if u < tables[i][code]:
            spins[i] = -s


def glauber_sweep(
    state: ChainState, profile: CouplingProfile, beta: float
) -> ChainState:
    """Advance the chain by one full sweep and return the new state.

    Pure with respect to the stream contract: the uniforms consumed are
    positions [k*size, (k+1)*size) of the seed's PCG64 stream for sweep
    number k, so composing this call reproduces any longer run exactly.
    """
    if not (beta > 0.0 and math.isfinite(beta)):
        raise ValueError("inverse temperature must be positive and finite")
    volume = state.config.volume
    rng = np.random.default_rng(state.seed)
    rng.bit_generator.advance(state.sweeps_done * volume.size)
    uniforms = rng.random(volume.size).tolist()
    spins = list(state.config.spins)
    _sweep(spins, state.config.boundary, _flip_tables(profile, volume, beta), uniforms)
    config = Configuration(volume, tuple(spins), state.config.boundary)
    return ChainState(config, state.seed, state.sweeps_done + 1)


def estimate_marginal(
    profile: CouplingProfile,
    volume: Volume,
    beta: float,
    boundary: int,
    site: int,
    sweeps: int,
    burn_in: int,
    seed: int,
) -> EstimateRecord:
    """Monte Carlo estimate of P(spin at ``site`` = -1).

    Time average of the indicator over every post-burn-in sweep, with a
    batch-means standard error over 20 equal batches (the trailing
    remainder enters the mean but not the batches).  Requires at least 20
    post-burn-in sweeps.
    """
    if not (beta > 0.0 and math.isfinite(beta)):
        raise ValueError("inverse temperature must be positive and finite")
    if boundary not in (1, -1):
        raise ValueError("boundary sign must be +1 or -1")
    if not 0 <= burn_in < sweeps:
        raise ValueError("need sweeps > burn_in >= 0")
    samples = sweeps - burn_in
    if samples < _BATCHES:
        raise ValueError(f"batch means need at least {_BATCHES} post-burn-in sweeps")
    index = volume.index(site)

    tables = _flip_tables(profile, volume, beta)
    rng = np.random.default_rng(int(seed))
    spins = [boundary] * volume.size
    indicators = np.empty(samples, dtype=np.uint8)

    done = 0
    while done < sweeps:
        count = min(_SWEEP_BLOCK, sweeps - done)
        block = rng.random((count, volume.size)).tolist()
        for j, uniforms in enumerate(block):
            _sweep(spins, boundary, tables, uniforms)
            k = done + j
            if k >= burn_in:
                indicators[k - burn_in] = 1 if spins[index] == -1 else 0
        done += count

    mean = float(indicators.mean())
    batch_len = samples // _BATCHES
    batches = indicators[: _BATCHES * batch_len].reshape(_BATCHES, batch_len)
    batch_means = batches.mean(axis=1)
    std_error = float(batch_means.std(ddof=1) / math.sqrt(_BATCHES))
    return EstimateRecord(mean, std_error, samples, burn_in)
