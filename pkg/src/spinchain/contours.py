"""Minus-run decomposition, block erasure, and the contour probability
bound that controls how unlikely a given minus-run is.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from . import exact
from .model import Block, Configuration, CouplingProfile, Volume

__all__ = [
    "ContourDecomposition",
    "PeierlsVerdict",
    "PEIERLS_SLACK",
    "configuration_from_blocks",
    "contour_cost",
    "decompose",
    "enumerate_blocks",
    "erase_block",
    "verify_peierls",
]

# Absolute slack granted to the probability bound checks; covers the
# rounding of two log-domain partition scans.
PEIERLS_SLACK = 1e-12


@dataclass(frozen=True)
class ContourDecomposition:
    """Minus-set of a configuration, split into maximal runs.

    ``boundary_bonds`` lists every bond index x with disagreeing spins at
    sites x-1 and x, outside sites taking the boundary sign.  Under a
    plus boundary each block contributes exactly its two edge bonds.
    ``edge_blocks`` flags blocks that touch the window edge while the
    boundary is minus: those continue into the outside minus sea.
    """

    minus_sites: tuple[int, ...]
    blocks: tuple[Block, ...]
    boundary_bonds: tuple[int, ...]
    edge_blocks: tuple[Block, ...]


def decompose(config: Configuration) -> ContourDecomposition:
    """Exact minus-set, maximal minus-runs, and disagreeing bonds."""
    vol = config.volume
    minus_sites = tuple(x for x in vol.sites() if config.spin(x) == -1)

    blocks: list[Block] = []
    run_start: int | None = None
    for x in vol.sites():
        if config.spin(x) == -1:
            if run_start is None:
                run_start = x
        elif run_start is not None:
            blocks.append(Block(run_start, x - 1))
            run_start = None
    if run_start is not None:
        blocks.append(Block(run_start, vol.n))

    bonds: list[int] = []
    prev = config.boundary
    for x in vol.all_bonds():
        cur = config.spin(x) if x in vol else config.boundary
        if cur != prev:
            bonds.append(x)
        prev = cur

    edge: tuple[Block, ...] = ()
    if config.boundary == -1:
        edge = tuple(
            b for b in blocks if b.left == -vol.n or b.right == vol.n
        )
    return ContourDecomposition(minus_sites, tuple(blocks), tuple(bonds), edge)


def configuration_from_blocks(
    volume: Volume, blocks, boundary: int
) -> Configuration:
    """Rebuild the configuration whose maximal minus-runs are ``blocks``.

    Inverse of ``decompose``: blocks must be inside the volume, sorted,
    disjoint and non-adjacent (a gap of at least one plus site).
    """
    spins = [1] * volume.size
    prev_right: int | None = None
    for block in sorted(blocks):
        if block.left < -volume.n or block.right > volume.n:
            raise ValueError(f"block [{block.left}, {block.right}] outside volume")
        if prev_right is not None and block.left <= prev_right + 1:
            raise ValueError("blocks must be disjoint and non-adjacent")
        for x in block.sites():
            spins[volume.index(x)] = -1
        prev_right = block.right
    return Configuration(volume, tuple(spins), boundary)


def erase_block(config: Configuration, block: Block) -> Configuration:
    """Flip every spin of ``block`` to +1.

    ``block`` must be one of the configuration's maximal minus-runs; the
    erasure is only defined there (erasing a partial run would silently
    shrink a different block), so anything else is rejected.
    """
    if block not in decompose(config).blocks:
        raise ValueError(
            f"block [{block.left}, {block.right}] is not a maximal minus-run "
            "of the configuration"
        )
    spins = list(config.spins)
    for x in block.sites():
        spins[config.volume.index(x)] = 1
    return Configuration(config.volume, tuple(spins), config.boundary)


def contour_cost(profile: CouplingProfile, block: Block) -> float:
    """Energy released by erasing the block: I_left + I_{right+1}."""
    return profile.coupling(block.left) + profile.coupling(block.right + 1)


@dataclass(frozen=True)
class PeierlsVerdict:
    probability: float
    bound: float
    holds: bool


def verify_peierls(
    profile: CouplingProfile, volume: Volume, beta: float, block: Block
) -> PeierlsVerdict:
    """Check the contour bound under the plus boundary.

    The probability that ``block`` is a maximal minus-run never exceeds
    exp(-beta * (I_left + I_{right+1})); the verdict compares the exact
    probability against that bound with ``PEIERLS_SLACK`` of room.
    """
    probability = exact.block_probability(profile, volume, beta, 1, block)
    bound = math.exp(-beta * contour_cost(profile, block))
    return PeierlsVerdict(probability, bound, probability <= bound + PEIERLS_SLACK)


def enumerate_blocks(volume: Volume) -> list[Block]:
    """All connected sub-intervals of the volume in lexicographic order.

    There are (2n+1)(2n+2)/2 of them.
    """
    return [
        Block(left, right)
        for left in volume.sites()
        for right in range(left, volume.n + 1)
    ]
