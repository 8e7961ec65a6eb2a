"""Exact log-domain computation of partition sums, marginals and
run-length statistics via two-state transfer recursions.

All weights are carried as ``float`` logarithms, with ``-inf`` encoding
weight zero: couplings that grow with |x| push energies far past the
range where direct exponentials survive.  Every computation is a single
left-to-right scan with a fixed operation order, so repeated calls are
reproducible bit for bit.
"""

from __future__ import annotations

import math

import numpy as np

from .model import Block, CouplingProfile, Volume

__all__ = [
    "block_probability",
    "log_add",
    "log_partition",
    "log_sum",
    "magnetization_gap",
    "max_run_distribution",
    "max_run_tail",
    "origin_minus_upper_bound",
    "run_capped_log_partition",
    "run_length_threshold",
    "site_marginal",
]

NEG_INF = float("-inf")


def log_add(a: float, b: float) -> float:
    """log(e^a + e^b); symmetric in its arguments, -inf encodes zero."""
    if a < b:
        a, b = b, a
    if b == NEG_INF:
        return a
    return a + math.log1p(math.exp(b - a))


def log_sum(values) -> float:
    """Left fold of ``log_add`` over an iterable of log-weights."""
    total = NEG_INF
    for v in values:
        total = log_add(total, v)
    return total


def _check_beta(beta: float) -> None:
    if not (beta > 0.0 and math.isfinite(beta)):
        raise ValueError(f"inverse temperature must be positive and finite, got {beta}")


def _check_boundary(boundary: int) -> None:
    if boundary not in (1, -1):
        raise ValueError("boundary sign must be +1 or -1")


def _checked_constraints(volume: Volume, constraints) -> dict[int, int]:
    cons: dict[int, int] = {}
    for site, spin in (constraints or {}).items():
        if site not in volume:
            raise ValueError(f"constrained site {site} outside volume [-{volume.n}, {volume.n}]")
        if spin not in (1, -1):
            raise ValueError(f"constraint spin must be +1 or -1, got {spin}")
        cons[int(site)] = int(spin)
    return cons


def log_partition(
    profile: CouplingProfile,
    volume: Volume,
    beta: float,
    boundary: int,
    constraints: dict[int, int] | None = None,
) -> float:
    """Log of the (optionally constrained) partition sum.

    Returns log sum of exp(-beta * energy) over all configurations that
    agree with ``constraints`` (a map site -> required spin; absent sites
    are free).  Cost is linear in the number of sites.  Constraints only
    pin values, so the sum always has at least one term.
    """
    _check_beta(beta)
    _check_boundary(boundary)
    cons = _checked_constraints(volume, constraints)

    c_left = beta * profile.coupling(volume.left_bond)
    w_plus = 0.0 if boundary == 1 else -c_left
    w_minus = -c_left if boundary == 1 else 0.0
    want = cons.get(-volume.n)
    if want == 1:
        w_minus = NEG_INF
    elif want == -1:
        w_plus = NEG_INF

    for x in volume.internal_bonds():
        c = beta * profile.coupling(x)
        new_plus = log_add(w_plus, w_minus - c)
        new_minus = log_add(w_plus - c, w_minus)
        want = cons.get(x)
        if want == 1:
            new_minus = NEG_INF
        elif want == -1:
            new_plus = NEG_INF
        w_plus, w_minus = new_plus, new_minus

    c_right = beta * profile.coupling(volume.right_bond)
    if boundary == 1:
        w_minus -= c_right
    else:
        w_plus -= c_right
    return log_add(w_plus, w_minus)


def site_marginal(
    profile: CouplingProfile,
    volume: Volume,
    beta: float,
    boundary: int,
    site: int,
    spin: int,
) -> float:
    """Probability that ``site`` carries ``spin``.

    Ratio of the site-pinned to the unconstrained partition sum, formed
    in the log domain so tiny probabilities keep relative accuracy.
    """
    if site not in volume:
        raise ValueError(f"site {site} outside volume [-{volume.n}, {volume.n}]")
    if spin not in (1, -1):
        raise ValueError("spin must be +1 or -1")
    log_z = log_partition(profile, volume, beta, boundary)
    log_c = log_partition(profile, volume, beta, boundary, {site: spin})
    return min(1.0, math.exp(log_c - log_z))


def block_probability(
    profile: CouplingProfile,
    volume: Volume,
    beta: float,
    boundary: int,
    block: Block,
) -> float:
    """Probability that ``block`` is exactly a maximal minus-run.

    The event pins every site of the block to -1 and both neighbor sites
    to +1.  A neighbor beyond the window carries the boundary sign: under
    a plus boundary it is satisfied for free, under a minus boundary it
    contradicts the event and the probability is exactly 0.
    """
    _check_boundary(boundary)
    if block.left < -volume.n or block.right > volume.n:
        raise ValueError(
            f"block [{block.left}, {block.right}] not inside volume [-{volume.n}, {volume.n}]"
        )
    cons = {x: -1 for x in block.sites()}
    for neighbor in (block.left - 1, block.right + 1):
        if neighbor in volume:
            cons[neighbor] = 1
        elif boundary == -1:
            return 0.0
    log_z = log_partition(profile, volume, beta, boundary)
    log_c = log_partition(profile, volume, beta, boundary, cons)
    return min(1.0, math.exp(log_c - log_z))


def magnetization_gap(profile: CouplingProfile, volume: Volume, beta: float) -> float:
    """Origin minus-spin probability under the minus boundary, minus the
    same probability under the plus boundary.

    By the global spin-flip symmetry this equals the mean origin spin
    under the plus boundary, which for a two-state nearest-neighbor chain
    factorizes into tanh products over the bonds left and right of the
    origin.  The product form is used here because it keeps full relative
    precision even when the gap is far below the rounding error of the
    marginals themselves (the difference of two marginals near 1/2 loses
    everything past 1e-16).
    """
    _check_beta(beta)
    left = 1.0
    for x in range(-volume.n, 1):
        left *= math.tanh(0.5 * beta * profile.coupling(x))
    right = 1.0
    for x in range(1, volume.n + 2):
        right *= math.tanh(0.5 * beta * profile.coupling(x))
    denom = 1.0 + left * right
    if denom == 0.0:
        return 0.0
    return (left + right) / denom


def max_run_distribution(
    profile: CouplingProfile, volume: Volume, beta: float, boundary: int
) -> np.ndarray:
    """Exact distribution of the longest minus-run inside the window.

    Entry L of the returned vector (length 2n+2) is the probability that
    the longest run of -1 spins has length exactly L.  The dynamic
    program carries log-weights indexed by (current run length, running
    maximum), so every entry is a direct sum of positive weights and even
    entries near the underflow edge keep full relative precision.  Memory
    is quadratic in the number of sites.
    """
    _check_beta(beta)
    _check_boundary(boundary)
    num = volume.size
    w = np.full((num + 1, num + 1), NEG_INF)  # w[r, m]: run r, max-so-far m
    c_left = beta * profile.coupling(volume.left_bond)
    w[0, 0] = 0.0 if boundary == 1 else -c_left
    w[1, 1] = -c_left if boundary == 1 else 0.0

    r_idx = np.arange(num + 1)
    below_max = r_idx[:, None] < r_idx[None, :]  # r < m: extension keeps m
    diag_rows = np.arange(2, num + 1)

    for x in volume.internal_bonds():
        c = beta * profile.coupling(x)
        new = np.full_like(w, NEG_INF)
        # next spin +1: closing an open run costs the bond, staying + is free
        new[0] = np.logaddexp(w[0], _lse_over_rows(w[1:]) - c)
        # next spin -1 from +: a run of length 1 opens, max bumps to >= 1
        start = w[0] - c
        new[1, 1:] = start[1:]
        new[1, 1] = np.logaddexp(new[1, 1], start[0])
        # next spin -1 inside a run: free; the max grows only on the diagonal
        extend = np.where(below_max, w, NEG_INF)
        new[2:, :] = np.logaddexp(new[2:, :], extend[1:num, :])
        new[diag_rows, diag_rows] = np.logaddexp(
            new[diag_rows, diag_rows], w.diagonal()[1:num]
        )
        w = new

    c_right = beta * profile.coupling(volume.right_bond)
    if boundary == 1:
        w[1:, :] = w[1:, :] - c_right  # run open at the right edge: last spin is -1
    else:
        w[0, :] = w[0, :] - c_right
    per_max = _lse_over_rows(w)
    log_z = log_sum(per_max)
    return np.exp(per_max - log_z)


def _lse_over_rows(a: np.ndarray) -> np.ndarray:
    """Columnwise log-sum-exp; all -inf columns stay -inf."""
    top = np.max(a, axis=0)
    out = np.full(a.shape[1], NEG_INF)
    ok = top > NEG_INF
    if np.any(ok):
        out[ok] = top[ok] + np.log(np.sum(np.exp(a[:, ok] - top[ok]), axis=0))
    return out


def max_run_tail(
    profile: CouplingProfile,
    volume: Volume,
    beta: float,
    boundary: int,
    threshold: int,
) -> float:
    """Probability that the longest minus-run exceeds ``threshold`` sites."""
    dist = max_run_distribution(profile, volume, beta, boundary)
    start = max(threshold + 1, 0)
    if start >= len(dist):
        return 0.0
    return min(1.0, float(np.sum(dist[start:])))


def run_capped_log_partition(
    profile: CouplingProfile,
    volume: Volume,
    beta: float,
    boundary: int,
    cap: int,
) -> float:
    """Log partition sum over configurations whose minus-runs never
    exceed ``cap`` sites.

    Independent one-dimensional recursion used to cross-check the
    run-length distribution: exp(capped - unconstrained) is the CDF of
    the longest run at ``cap``.
    """
    _check_beta(beta)
    _check_boundary(boundary)
    if cap < 0:
        raise ValueError("run cap must be nonnegative")
    cap = min(cap, volume.size)
    c_left = beta * profile.coupling(volume.left_bond)
    w = [NEG_INF] * (cap + 1)
    w[0] = 0.0 if boundary == 1 else -c_left
    if cap >= 1:
        w[1] = -c_left if boundary == 1 else 0.0

    for x in volume.internal_bonds():
        c = beta * profile.coupling(x)
        closing = log_sum(w[1:])
        new = [NEG_INF] * (cap + 1)
        new[0] = log_add(w[0], closing - c)
        if cap >= 1:
            new[1] = w[0] - c
            for r in range(2, cap + 1):
                new[r] = w[r - 1]
        w = new

    c_right = beta * profile.coupling(volume.right_bond)
    if boundary == 1:
        w = [w[0]] + [v - c_right for v in w[1:]]
    else:
        w = [w[0] - c_right] + w[1:]
    return log_sum(w)


def run_length_threshold(volume: Volume, c1: float) -> int:
    """Run-length cutoff floor(c1 * ln(2n+1)) used by the tail experiments."""
    return math.floor(c1 * math.log(volume.size))


def origin_minus_upper_bound(volume: Volume, beta: float, c1: float) -> float:
    """Analytic upper bound on the origin minus-spin probability under
    the plus boundary, for couplings satisfying the growth condition.

    With q = e^(1-beta) the bound reads q/(1-q) + s^(c1(1-beta)+1)/(1-q)
    where s = 2n+1.  It is meaningful for beta > 1 (the geometric series
    behind it diverges otherwise) and decays in the window size once
    c1 > 1/(beta-1).
    """
    if not beta > 1.0:
        raise ValueError("the bound needs beta > 1")
    q = math.exp(1.0 - beta)
    size = float(volume.size)
    return q / (1.0 - q) + size ** (c1 * (1.0 - beta) + 1.0) / (1.0 - q)
