"""Nonnegative radial pair potentials and their basic integrals.

All potentials are spherically symmetric, v(r) >= 0, and either vanish
exactly beyond a finite range or decay as an explicit power tail C/r^p
with p > 3.  A hard core is represented as a boundary condition (the
wave function vanishes at the core radius), never as a large number.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, replace

import numpy as np

__all__ = [
    "RadialPotential",
    "HardCore",
    "SquareWell",
    "Shells",
    "Tabulated",
    "PowerTail",
    "Segment",
    "evaluate",
    "truncate",
    "born_integral",
    "parse_potential_config",
]

# Cutoff policy for infinite tails: truncate where the neglected tail
# integral 4*pi*int v r^2 dr drops below TAIL_TOL times the Born integral
# of the kept part.
TAIL_TOL = 1e-10
MAX_TAIL_CUTOFF_FACTOR = 1e8


class PotentialError(ValueError):
    """Invalid potential parameters or evaluation outside the domain."""


@dataclass(frozen=True)
class Segment:
    """A radial interval on which v is smooth, with its local evaluator."""

    lo: float
    hi: float
    v: object  # callable r-array -> v-array, safe on the closed interval
    geometric: bool = False  # grade the grid geometrically (wide tails)


class RadialPotential:
    """Base class; concrete kinds implement the evaluation and integrals."""

    kind = "abstract"
    is_hard_core = False

    @property
    def core_radius(self) -> float:
        """Radius of the hard core, or the radius where the tail starts."""
        raise NotImplementedError

    @property
    def range_radius(self):
        """Radius beyond which v vanishes exactly, or None for a power tail."""
        raise NotImplementedError

    @property
    def effective_range(self) -> float:
        """Finite radius the solver integrates to (tail truncated if needed)."""
        r = self.range_radius
        return self.tail_cutoff() if r is None else r

    def values(self, r) -> np.ndarray:
        """Vectorized v(r); raises on r <= 0 or inside a hard core."""
        raise NotImplementedError

    def segments(self) -> list[Segment]:
        """Smooth pieces covering (start, effective_range); empty for hard core."""
        raise NotImplementedError

    def born_integral(self) -> float:
        """4*pi * int_0^inf v(r) r^2 dr."""
        raise NotImplementedError

    def truncate(self, cutoff: float) -> "RadialPotential":
        """Zero the potential beyond `cutoff` (> core radius)."""
        if cutoff <= self.core_radius:
            raise PotentialError(
                f"cutoff {cutoff} must exceed the core radius {self.core_radius}"
            )
        rng = self.range_radius
        if rng is not None and cutoff >= rng:
            return self
        return self._truncate(cutoff)

    def _truncate(self, cutoff: float) -> "RadialPotential":
        raise NotImplementedError

    def tail_cutoff(self, tol: float = TAIL_TOL) -> float:
        """Truncation radius for the declared tail (finite range: the range)."""
        rng = self.range_radius
        if rng is None:
            raise NotImplementedError
        return rng

    def __call__(self, r):
        return self.values(r)


def _check_radii(r: np.ndarray) -> None:
    if np.any(r <= 0.0):
        raise PotentialError("potential evaluated at r <= 0")


@dataclass(frozen=True)
class HardCore(RadialPotential):
    """Hard sphere of radius `radius`: u(r) = 0 for r <= radius, v = 0 beyond."""

    radius: float
    kind = "hard-core"
    is_hard_core = True

    def __post_init__(self):
        if self.radius <= 0:
            raise PotentialError("hard-core radius must be positive")

    @property
    def core_radius(self) -> float:
        return self.radius

    @property
    def range_radius(self) -> float:
        return self.radius

    def values(self, r) -> np.ndarray:
        r = np.asarray(r, dtype=float)
        _check_radii(r)
        if np.any(r < self.radius):
            raise PotentialError("hard-core potential evaluated inside the core")
        return np.zeros_like(r)

    def segments(self) -> list[Segment]:
        return []

    def born_integral(self) -> float:
        raise PotentialError("Born integral diverges for a hard core")

    def _truncate(self, cutoff):  # range is finite, never reached
        return self


@dataclass(frozen=True)
class SquareWell(RadialPotential):
    """Repulsive square well: v = height on (0, radius], zero beyond."""

    height: float
    radius: float
    kind = "square-well"

    def __post_init__(self):
        if self.height < 0:
            raise PotentialError("square-well height must be nonnegative")
        if self.radius <= 0:
            raise PotentialError("square-well radius must be positive")

    @property
    def core_radius(self) -> float:
        return self.radius

    @property
    def range_radius(self) -> float:
        return self.radius

    def values(self, r) -> np.ndarray:
        r = np.asarray(r, dtype=float)
        _check_radii(r)
        return np.where(r <= self.radius, self.height, 0.0)

    def segments(self) -> list[Segment]:
        h = self.height
        return [Segment(0.0, self.radius, lambda r, h=h: np.full_like(np.asarray(r, float), h))]

    def born_integral(self) -> float:
        return 4.0 * math.pi * self.height * self.radius**3 / 3.0

    def _truncate(self, cutoff):
        return self


@dataclass(frozen=True)
class Shells(RadialPotential):
    """Piecewise-constant shells: v = heights[i] on (edges[i], edges[i+1]]."""

    edges: tuple
    heights: tuple
    kind = "shells"

    def __post_init__(self):
        edges = tuple(float(e) for e in self.edges)
        heights = tuple(float(h) for h in self.heights)
        object.__setattr__(self, "edges", edges)
        object.__setattr__(self, "heights", heights)
        if len(edges) != len(heights) + 1:
            raise PotentialError("need len(edges) == len(heights) + 1")
        if edges[0] < 0 or any(b <= a for a, b in zip(edges, edges[1:])):
            raise PotentialError("shell edges must be nonnegative and increasing")
        if any(h < 0 for h in heights):
            raise PotentialError("shell heights must be nonnegative")

    @property
    def core_radius(self) -> float:
        return self.edges[-1]

    @property
    def range_radius(self) -> float:
        return self.edges[-1]

    def values(self, r) -> np.ndarray:
        r = np.asarray(r, dtype=float)
        _check_radii(r)
        out = np.zeros_like(r)
        for lo, hi, h in zip(self.edges, self.edges[1:], self.heights):
            out = np.where((r > lo) & (r <= hi), h, out)
        return out

    def segments(self) -> list[Segment]:
        segs = []
        for lo, hi, h in zip(self.edges, self.edges[1:], self.heights):
            segs.append(Segment(lo, hi, lambda r, h=h: np.full_like(np.asarray(r, float), h)))
        if self.edges[0] > 0.0:
            segs.insert(0, Segment(0.0, self.edges[0], lambda r: np.zeros_like(np.asarray(r, float))))
        return segs

    def born_integral(self) -> float:
        total = 0.0
        for lo, hi, h in zip(self.edges, self.edges[1:], self.heights):
            total += h * (hi**3 - lo**3)
        return 4.0 * math.pi * total / 3.0

    def _truncate(self, cutoff):
        return self


@dataclass(frozen=True)
class Tabulated(RadialPotential):
    """Linear interpolation of (r, v) samples, zero beyond the last node."""

    r_nodes: tuple
    v_nodes: tuple
    kind = "tabulated"

    def __post_init__(self):
        r = tuple(float(x) for x in self.r_nodes)
        v = tuple(float(x) for x in self.v_nodes)
        object.__setattr__(self, "r_nodes", r)
        object.__setattr__(self, "v_nodes", v)
        if len(r) != len(v) or len(r) < 2:
            raise PotentialError("need at least two (r, v) samples")
        if r[0] < 0 or any(b <= a for a, b in zip(r, r[1:])):
            raise PotentialError("table radii must be nonnegative and increasing")
        if any(x < 0 for x in v):
            raise PotentialError("table values must be nonnegative")

    @property
    def core_radius(self) -> float:
        return self.r_nodes[-1]

    @property
    def range_radius(self) -> float:
        return self.r_nodes[-1]

    def values(self, r) -> np.ndarray:
        r = np.asarray(r, dtype=float)
        _check_radii(r)
        return np.interp(r, self.r_nodes, self.v_nodes, right=0.0)

    def segments(self) -> list[Segment]:
        segs = []
        r, v = self.r_nodes, self.v_nodes
        if r[0] > 0.0:
            # constant continuation of the first sample down to the origin
            segs.append(Segment(0.0, r[0], lambda x, h=v[0]: np.full_like(np.asarray(x, float), h)))
        for i in range(len(r) - 1):
            lo, hi = r[i], r[i + 1]
            slope = (v[i + 1] - v[i]) / (hi - lo)
            segs.append(
                Segment(lo, hi, lambda x, lo=lo, v0=v[i], s=slope: v0 + s * (np.asarray(x, float) - lo))
            )
        return segs

    def born_integral(self) -> float:
        # exact integral of the piecewise-linear v times r^2
        total = 0.0
        r, v = self.r_nodes, self.v_nodes
        if r[0] > 0.0:
            total += v[0] * r[0] ** 3 / 3.0
        for i in range(len(r) - 1):
            lo, hi = r[i], r[i + 1]
            s = (v[i + 1] - v[i]) / (hi - lo)
            c = v[i] - s * lo
            # int (c + s r) r^2 dr
            total += c * (hi**3 - lo**3) / 3.0 + s * (hi**4 - lo**4) / 4.0
        return 4.0 * math.pi * total

    def _truncate(self, cutoff):
        return self


@dataclass(frozen=True)
class PowerTail(RadialPotential):
    """A finite-range core potential continued by a tail C/r^p for r > core.

    `exponent` must exceed 3 or the scattering length diverges.  With
    `cutoff` set the tail is zeroed beyond it and the potential has
    finite range.
    """

    core: RadialPotential
    amplitude: float
    exponent: float
    cutoff: float | None = None
    kind = "power-tail"

    def __post_init__(self):
        if self.core.is_hard_core:
            raise PotentialError("power tail around a hard core is not supported")
        if self.amplitude < 0:
            raise PotentialError("tail amplitude must be nonnegative")
        if self.exponent <= 3:
            raise PotentialError("tail exponent must exceed 3 (finite scattering length)")
        if self.cutoff is not None and self.cutoff <= self.core.range_radius:
            raise PotentialError("cutoff must exceed the core range")

    @property
    def core_radius(self) -> float:
        return self.core.range_radius

    @property
    def range_radius(self):
        return self.cutoff

    def tail_cutoff(self, tol: float = TAIL_TOL) -> float:
        if self.cutoff is not None:
            return self.cutoff
        r0, c, p = self.core_radius, self.amplitude, self.exponent
        if c == 0.0:
            return r0
        born_inf = self._born(None)
        # 4*pi*C*cut^(3-p)/(p-3) == tol * born_inf
        cut = (4.0 * math.pi * c / ((p - 3.0) * tol * born_inf)) ** (1.0 / (p - 3.0))
        cap = MAX_TAIL_CUTOFF_FACTOR * max(r0, 1.0)
        if cut > cap:
            warnings.warn(
                f"tail cutoff capped at {cap:g}; neglected tail above tolerance {tol:g}",
                stacklevel=2,
            )
            cut = cap
        return max(cut, 2.0 * r0)

    def values(self, r) -> np.ndarray:
        r = np.asarray(r, dtype=float)
        _check_radii(r)
        r0 = self.core_radius
        tail = np.where(r > r0, self.amplitude / np.maximum(r, r0) ** self.exponent, 0.0)
        if self.cutoff is not None:
            tail = np.where(r > self.cutoff, 0.0, tail)
        inner = np.where(r <= r0, self.core.values(np.minimum(r, r0)), 0.0)
        return inner + tail

    def segments(self) -> list[Segment]:
        segs = list(self.core.segments())
        c, p = self.amplitude, self.exponent
        segs.append(
            Segment(
                self.core_radius,
                self.effective_range,
                lambda r, c=c, p=p: c / np.asarray(r, float) ** p,
                geometric=True,
            )
        )
        return segs

    def _born(self, cutoff) -> float:
        r0, c, p = self.core_radius, self.amplitude, self.exponent
        total = self.core.born_integral()
        if cutoff is None:
            total += 4.0 * math.pi * c * r0 ** (3.0 - p) / (p - 3.0)
        else:
            total += 4.0 * math.pi * c * (r0 ** (3.0 - p) - cutoff ** (3.0 - p)) / (p - 3.0)
        return total

    def born_integral(self) -> float:
        return self._born(self.cutoff)

    def _truncate(self, cutoff):
        return replace(self, cutoff=cutoff)


def evaluate(pot: RadialPotential, r: float):
    """v(r); error for r <= 0 or inside a hard core."""
    out = pot.values(r)
    return float(out) if np.isscalar(r) or np.ndim(r) == 0 else out


def truncate(pot: RadialPotential, cutoff: float) -> RadialPotential:
    """Finite-range potential equal to `pot` up to `cutoff`, zero beyond."""
    return pot.truncate(cutoff)


def born_integral(pot: RadialPotential) -> float:
    """4*pi * int v(r) r^2 dr; for v >= 0 this is >= 8*pi*mu*a."""
    return pot.born_integral()


# -- config file support -----------------------------------------------------

_CONFIG_KINDS = ("hard-core", "square-well", "shells", "tabulated", "power-tail")


def parse_potential_config(text: str) -> RadialPotential:
    """Build a potential from key=value lines.

    Keys: kind (required), R0, V0, edges, heights, table (r:v pairs),
    C, tail_exponent, cutoff.  '#' starts a comment.
    """
    entries: dict[str, str] = {}
    for raw in text.splitlines():
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise PotentialError(f"expected key=value, got {line!r}")
        key, val = line.split("=", 1)
        entries[key.strip()] = val.strip()

    kind = entries.get("kind")
    if kind not in _CONFIG_KINDS:
        raise PotentialError(f"kind must be one of {_CONFIG_KINDS}, got {kind!r}")

    def num(key, default=None):
        if key not in entries:
            if default is None:
                raise PotentialError(f"missing key {key!r} for kind {kind!r}")
            return default
        return float(entries[key])

    def numlist(key):
        if key not in entries:
            raise PotentialError(f"missing key {key!r} for kind {kind!r}")
        return tuple(float(x) for x in entries[key].replace(",", " ").split())

    if kind == "hard-core":
        return HardCore(radius=num("R0"))
    if kind == "square-well":
        return SquareWell(height=num("V0"), radius=num("R0"))
    if kind == "shells":
        return Shells(edges=numlist("edges"), heights=numlist("heights"))
    if kind == "tabulated":
        pairs = [p for p in entries.get("table", "").replace(",", " ").split() if p]
        if not pairs:
            raise PotentialError("tabulated kind needs table=r1:v1 r2:v2 ...")
        try:
            rv = [tuple(float(x) for x in p.split(":")) for p in pairs]
        except ValueError as exc:
            raise PotentialError(f"bad table entry in {pairs!r}") from exc
        return Tabulated(r_nodes=tuple(r for r, _ in rv), v_nodes=tuple(v for _, v in rv))
    # power-tail: inner core is a square well (possibly of zero height)
    core = SquareWell(height=num("V0", 0.0), radius=num("R0"))
    cutoff = float(entries["cutoff"]) if "cutoff" in entries else None
    return PowerTail(core=core, amplitude=num("C"), exponent=num("tail_exponent"), cutoff=cutoff)
