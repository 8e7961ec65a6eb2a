"""Couplings, finite volumes, spin configurations and their energies.

The chain lives on the integers with a ±1 spin at every site.  Bond x
joins sites x-1 and x and costs I_x whenever the two spins disagree.  A
finite window [-n, n] is closed off by pinning every outside spin to a
single boundary sign, which turns the two edge bonds (indices -n and
n+1) into boundary terms.  All types here are immutable values; every
operation is a pure function.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import ClassVar, Iterable

__all__ = [
    "Block",
    "Configuration",
    "CouplingProfile",
    "Volume",
    "flip_boundary",
    "growth_condition_violations",
    "total_energy",
]


@dataclass(frozen=True)
class CouplingProfile:
    """Deterministic map from bond index to coupling strength.

    Four families are supported:

    * ``abs``          -- I_x = |x|
    * ``constant``     -- I_x = c
    * ``linear``       -- I_x = a + b * |x|
    * ``table``        -- explicit values for a contiguous index range;
                          lookups outside the range raise ``ValueError``

    The text grammar used by config files and the CLI is ``abs``,
    ``constant:<c>``, ``linear:<a>:<b>`` and ``table:<xmin>:<v0,v1,...>``
    with floats in decimal or scientific notation.
    """

    kind: str
    const: float = 0.0
    offset: float = 0.0
    slope: float = 0.0
    xmin: int = 0
    values: tuple[float, ...] = ()

    _KINDS: ClassVar[tuple[str, ...]] = ("abs", "constant", "linear", "table")

    def __post_init__(self) -> None:
        if self.kind not in self._KINDS:
            raise ValueError(f"unknown profile kind {self.kind!r}")
        if self.kind == "table" and not self.values:
            raise ValueError("table profile needs at least one value")

    @classmethod
    def absolute(cls) -> "CouplingProfile":
        return cls(kind="abs")

    @classmethod
    def constant(cls, c: float) -> "CouplingProfile":
        return cls(kind="constant", const=float(c))

    @classmethod
    def linear(cls, a: float, b: float) -> "CouplingProfile":
        return cls(kind="linear", offset=float(a), slope=float(b))

    @classmethod
    def table(cls, xmin: int, values: Iterable[float]) -> "CouplingProfile":
        return cls(kind="table", xmin=int(xmin), values=tuple(float(v) for v in values))

    @classmethod
    def parse(cls, spec: str) -> "CouplingProfile":
        """Parse the profile grammar (see class docstring)."""
        head, _, rest = spec.strip().partition(":")
        try:
            if head == "abs":
                if rest:
                    raise ValueError("abs takes no parameters")
                return cls.absolute()
            if head == "constant":
                return cls.constant(float(rest))
            if head == "linear":
                a_text, sep, b_text = rest.partition(":")
                if not sep:
                    raise ValueError("linear needs two parameters")
                return cls.linear(float(a_text), float(b_text))
            if head == "table":
                xmin_text, sep, values_text = rest.partition(":")
                if not sep:
                    raise ValueError("table needs an xmin and a value list")
                values = [float(v) for v in values_text.split(",") if v != ""]
                return cls.table(int(xmin_text), values)
        except ValueError as err:
            raise ValueError(f"bad profile spec {spec!r}: {err}") from None
        raise ValueError(f"bad profile spec {spec!r}: unknown kind {head!r}")

    def spec_string(self) -> str:
        """Canonical text form; ``parse`` round-trips it."""
        if self.kind == "abs":
            return "abs"
        if self.kind == "constant":
            return f"constant:{self.const!r}"
        if self.kind == "linear":
            return f"linear:{self.offset!r}:{self.slope!r}"
        return f"table:{self.xmin}:" + ",".join(repr(v) for v in self.values)

    def coupling(self, x: int) -> float:
        """The coupling I_x of bond x (the bond joining sites x-1 and x)."""
        if self.kind == "abs":
            return float(abs(x))
        if self.kind == "constant":
            return self.const
        if self.kind == "linear":
            return self.offset + self.slope * abs(x)
        i = x - self.xmin
        if not 0 <= i < len(self.values):
            raise ValueError(
                f"bond index {x} outside table domain "
                f"[{self.xmin}, {self.xmin + len(self.values) - 1}]"
            )
        return self.values[i]


@dataclass(frozen=True)
class Volume:
    """The symmetric window [-n, n] of 2n+1 sites.

    Internal bonds carry indices -n+1 .. n; the bonds with indices -n and
    n+1 connect the window to the fixed outside spins.
    """

    n: int

    def __post_init__(self) -> None:
        if self.n < 0:
            raise ValueError("volume size n must be nonnegative")

    @property
    def size(self) -> int:
        return 2 * self.n + 1

    @property
    def left_bond(self) -> int:
        return -self.n

    @property
    def right_bond(self) -> int:
        return self.n + 1

    def sites(self) -> range:
        return range(-self.n, self.n + 1)

    def internal_bonds(self) -> range:
        return range(-self.n + 1, self.n + 1)

    def all_bonds(self) -> range:
        """Internal bonds plus the two edge bonds, left to right."""
        return range(-self.n, self.n + 2)

    def __contains__(self, site: int) -> bool:
        return -self.n <= site <= self.n

    def index(self, site: int) -> int:
        """Array index of a site (site -n maps to 0)."""
        if site not in self:
            raise ValueError(f"site {site} outside volume [-{self.n}, {self.n}]")
        return site + self.n


@dataclass(frozen=True, order=True)
class Block:
    """A connected interval of sites, endpoints inclusive."""

    left: int
    right: int

    def __post_init__(self) -> None:
        if self.left > self.right:
            raise ValueError(f"empty block [{self.left}, {self.right}]")

    def sites(self) -> range:
        return range(self.left, self.right + 1)

    def __len__(self) -> int:
        return self.right - self.left + 1


@dataclass(frozen=True)
class Configuration:
    """Spins on a volume plus the sign pinned on every outside site."""

    volume: Volume
    spins: tuple[int, ...]
    boundary: int

    def __post_init__(self) -> None:
        if self.boundary not in (1, -1):
            raise ValueError("boundary sign must be +1 or -1")
        if len(self.spins) != self.volume.size:
            raise ValueError(
                f"expected {self.volume.size} spins, got {len(self.spins)}"
            )
        if any(s not in (1, -1) for s in self.spins):
            raise ValueError("spins must be +1 or -1")

    @classmethod
    def uniform(cls, volume: Volume, spin: int, boundary: int) -> "Configuration":
        return cls(volume, (spin,) * volume.size, boundary)

    def spin(self, site: int) -> int:
        return self.spins[self.volume.index(site)]


def flip_boundary(config: Configuration) -> Configuration:
    """Negate every spin together with the boundary sign (an involution)."""
    return Configuration(
        config.volume, tuple(-s for s in config.spins), -config.boundary
    )


def total_energy(config: Configuration, profile: CouplingProfile) -> float:
    """Energy of a configuration in its volume.

    Sum of I_x over disagreeing internal bonds, plus the edge bonds -n and
    n+1 when the outermost spins disagree with the boundary sign.
    """
    vol = config.volume
    spins = config.spins
    energy = 0.0
    for x in vol.internal_bonds():
        i = x + vol.n
        if spins[i - 1] != spins[i]:
            energy += profile.coupling(x)
    if spins[0] != config.boundary:
        energy += profile.coupling(vol.left_bond)
    if spins[-1] != config.boundary:
        energy += profile.coupling(vol.right_bond)
    return energy


def growth_condition_violations(
    profile: CouplingProfile, n_min: int, n_max: int, r_max: int
) -> list[tuple[int, int]]:
    """All pairs (n, r) in the requested window with I_n + I_{n+r} < r.

    An empty result over every finite window is what makes long minus
    runs expensive enough to suppress; the ``abs`` profile satisfies it
    everywhere.  Table profiles must cover indices up to n_max + r_max.
    """
    if n_min > n_max:
        raise ValueError("need n_min <= n_max")
    if r_max < 1:
        raise ValueError("need r_max >= 1")
    violations: list[tuple[int, int]] = []
    for n in range(n_min, n_max + 1):
        i_n = profile.coupling(n)
        for r in range(1, r_max + 1):
            if i_n + profile.coupling(n + r) < r:
                violations.append((n, r))
    return violations
