"""Brute-force enumeration ground truth for small windows.

Everything here is recomputed from raw spin arrays on purpose: the
energies come from a vectorized bond scan that shares no code with the
model module, so agreement between this module and the transfer engine
is a genuine two-route check.  Enumeration order is fixed (binary
counting with site -n as the least significant bit, a set bit meaning
spin -1), so results are bit-identical between runs.  No pruning, no
symmetry tricks: simplicity over speed.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .contours import enumerate_blocks
from .exact import NEG_INF, log_add
from .model import Block, CouplingProfile, Volume

__all__ = ["MAX_ENUM_N", "EnumerationResult", "enumerate_all"]

MAX_ENUM_N = 12  # 2^25 configurations; anything bigger is a mistake
_CHUNK = 1 << 18


@dataclass
class EnumerationResult:
    """Exact sums over every configuration of one (profile, n, beta, boundary)."""

    log_partition: float
    minus_marginals: dict[int, float]
    block_probabilities: dict[Block, float]
    maxrun_histogram: np.ndarray


def _lse(values: np.ndarray) -> float:
    """Max-shifted log-sum-exp of a 1-D array; empty sums are -inf."""
    if values.size == 0:
        return NEG_INF
    top = float(np.max(values))
    if top == NEG_INF:
        return NEG_INF
    return top + float(np.log(np.sum(np.exp(values - top))))


def enumerate_all(
    profile: CouplingProfile, volume: Volume, beta: float, boundary: int
) -> EnumerationResult:
    """Literal summation over all 2^(2n+1) configurations.

    Produces the log partition sum, the per-site probability of spin -1,
    the probability of every connected block being a maximal minus-run,
    and the histogram of the longest minus-run.
    """
    if volume.n > MAX_ENUM_N:
        raise ValueError(f"enumeration is capped at n = {MAX_ENUM_N}, got {volume.n}")
    if not beta > 0.0:
        raise ValueError("inverse temperature must be positive")
    if boundary not in (1, -1):
        raise ValueError("boundary sign must be +1 or -1")

    num = volume.size
    couplings = np.array([profile.coupling(x) for x in volume.all_bonds()], dtype=float)
    blocks = enumerate_blocks(volume)

    log_z = NEG_INF
    site_acc = np.full(num, NEG_INF)
    block_acc = {b: NEG_INF for b in blocks}
    run_acc = np.full(num + 1, NEG_INF)

    total = 1 << num
    shifts = np.arange(num, dtype=np.int64)
    for start in range(0, total, _CHUNK):
        count = min(_CHUNK, total - start)
        codes = np.arange(start, start + count, dtype=np.int64)
        spins = (1 - 2 * ((codes[:, None] >> shifts) & 1)).astype(np.int8)

        disagree = spins[:, 1:] != spins[:, :-1]
        energy = disagree @ couplings[1:-1]
        energy += np.where(spins[:, 0] != boundary, couplings[0], 0.0)
        energy += np.where(spins[:, -1] != boundary, couplings[-1], 0.0)
        log_w = -beta * energy

        log_z = log_add(log_z, _lse(log_w))

        minus = spins == -1
        for i in range(num):
            site_acc[i] = log_add(site_acc[i], _lse(log_w[minus[:, i]]))

        prefix = np.zeros((count, num + 1), dtype=np.int32)
        prefix[:, 1:] = np.cumsum(minus, axis=1)
        for block in blocks:
            i0 = block.left + volume.n
            i1 = block.right + volume.n
            mask = (prefix[:, i1 + 1] - prefix[:, i0]) == len(block)
            possible = True
            if i0 - 1 >= 0:
                mask = mask & ~minus[:, i0 - 1]
            elif boundary == -1:
                possible = False
            if i1 + 1 < num:
                mask = mask & ~minus[:, i1 + 1]
            elif boundary == -1:
                possible = False
            if possible:
                block_acc[block] = log_add(block_acc[block], _lse(log_w[mask]))

        run = np.zeros(count, dtype=np.int32)
        best = np.zeros(count, dtype=np.int32)
        for i in range(num):
            run = np.where(minus[:, i], run + 1, 0)
            np.maximum(best, run, out=best)
        for length in range(num + 1):
            run_acc[length] = log_add(run_acc[length], _lse(log_w[best == length]))

    marginals = {
        site: min(1.0, float(np.exp(site_acc[volume.index(site)] - log_z)))
        for site in volume.sites()
    }
    probabilities = {
        b: min(1.0, float(np.exp(acc - log_z))) for b, acc in block_acc.items()
    }
    histogram = np.exp(run_acc - log_z)
    return EnumerationResult(log_z, marginals, probabilities, histogram)
