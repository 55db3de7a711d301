"""Zero-energy scattering: solve -2*mu*u'' + v*u = 0 and extract the
scattering length.

The solution is normalized so that u(r) = r - a beyond the range of the
potential.  A classical RK4 integrator runs on a grid aligned to the
potential's discontinuities, so the local truncation error stays O(h^5)
on every step.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.integrate import simpson
from scipy.linalg import solveh_banded

from .potentials import RadialPotential, Segment

__all__ = [
    "ScatteringSolution",
    "EnergyIdentity",
    "MinimizedProfile",
    "solve_zero_energy",
    "scattering_length",
    "energy_identity",
    "radial_form_minimize",
]

EXTRACTION_FACTOR = 10.0  # default outermost radius in units of the range


class SolverError(RuntimeError):
    """The integrator or extraction failed its internal checks."""


@dataclass(frozen=True)
class ScatteringSolution:
    """u0 on a radial grid with the extracted scattering length.

    `u` and `du` are normalized so u(r) = r - a and u'(r) = 1 beyond the
    potential's (effective) range.  For a hard core the grid starts at the
    core radius where u vanishes.
    """

    r: np.ndarray
    u: np.ndarray
    du: np.ndarray
    a: float
    mu: float
    potential: RadialPotential
    a_consistency: float  # |a(outermost) - a(second outermost)|
    pieces: tuple  # (i0, i1, Segment) node spans, exterior piece last

    @property
    def range_radius(self) -> float:
        return self.potential.effective_range

    def u_at(self, r):
        """Interpolated u(r); exact r - a beyond the grid, 0 below it."""
        r = np.asarray(r, dtype=float)
        out = np.interp(r, self.r, self.u)
        out = np.where(r >= self.r[-1], r - self.a, out)
        out = np.where(r <= self.r[0], 0.0 if self.potential.is_hard_core else r * self.du[0], out)
        return out if out.ndim else float(out)

    def du_at(self, r):
        r = np.asarray(r, dtype=float)
        out = np.interp(r, self.r, self.du)
        out = np.where(r >= self.r[-1], 1.0, out)
        return out if out.ndim else float(out)


def _even(n: int) -> int:
    return n if n % 2 == 0 else n + 1


def _segment_nodes(seg: Segment, m: int) -> np.ndarray:
    if seg.geometric and seg.lo > 0.0 and seg.hi / seg.lo > 8.0:
        return np.geomspace(seg.lo, seg.hi, m + 1)
    return np.linspace(seg.lo, seg.hi, m + 1)


def _allocate_steps(segs: list[Segment], n_steps: int) -> list[int]:
    """Split the step budget over segments, geometric ones by log-measure."""
    if not segs:
        return []
    weights = []
    for seg in segs:
        if seg.geometric and seg.lo > 0.0:
            weights.append(math.log(max(seg.hi / seg.lo, 1.001)))
        else:
            weights.append(1.0)  # uniform share per smooth piece
    total = sum(weights)
    return [_even(max(16, round(n_steps * w / total))) for w in weights]


def _rk4_segment(nodes: np.ndarray, vfun, mu: float, u0: float, w0: float):
    """Integrate u'' = v/(2 mu) u across one smooth segment."""
    mids = 0.5 * (nodes[:-1] + nodes[1:])
    qa = np.asarray(vfun(nodes[:-1]), dtype=float) / (2.0 * mu)
    qm = np.asarray(vfun(mids), dtype=float) / (2.0 * mu)
    qb = np.asarray(vfun(nodes[1:]), dtype=float) / (2.0 * mu)
    u = np.empty_like(nodes)
    w = np.empty_like(nodes)
    u[0], w[0] = u0, w0
    h = np.diff(nodes)
    for i in range(len(h)):
        hi = h[i]
        ui, wi = u[i], w[i]
        k1u, k1w = wi, qa[i] * ui
        k2u = wi + 0.5 * hi * k1w
        k2w = qm[i] * (ui + 0.5 * hi * k1u)
        k3u = wi + 0.5 * hi * k2w
        k3w = qm[i] * (ui + 0.5 * hi * k2u)
        k4u = wi + hi * k3w
        k4w = qb[i] * (ui + hi * k3u)
        u[i + 1] = ui + hi * (k1u + 2 * k2u + 2 * k3u + k4u) / 6.0
        w[i + 1] = wi + hi * (k1w + 2 * k2w + 2 * k3w + k4w) / 6.0
    return u, w


def solve_zero_energy(
    pot: RadialPotential,
    mu: float = 1.0,
    *,
    n_steps: int = 4000,
    r_max: float | None = None,
    exterior_steps: int = 64,
) -> ScatteringSolution:
    """Solve the zero-energy equation outward and normalize to u = r - a.

    The grid is aligned to the potential's discontinuities; `n_steps` is
    the interior step budget.  Raises SolverError if u' is not strictly
    positive (impossible for v >= 0 unless the integration failed).
    """
    if mu <= 0:
        raise ValueError("mu must be positive")
    reff = pot.effective_range
    if r_max is None:
        r_max = EXTRACTION_FACTOR * reff
    if r_max <= reff:
        raise ValueError("r_max must exceed the potential range")

    segs = list(pot.segments())
    zero = lambda r: np.zeros_like(np.asarray(r, dtype=float))
    exterior = Segment(reff, r_max, zero, geometric=(r_max / max(reff, 1e-300) > 50.0))

    steps = _allocate_steps(segs, n_steps)
    start = pot.core_radius if pot.is_hard_core else 0.0

    r_parts, u_parts, w_parts, pieces = [], [], [], []
    u_cur, w_cur = 0.0, 1.0
    idx = 0
    for seg, m in list(zip(segs, steps)) + [(exterior, _even(exterior_steps))]:
        nodes = _segment_nodes(seg, m)
        u_seg, w_seg = _rk4_segment(nodes, seg.v, mu, u_cur, w_cur)
        u_cur, w_cur = u_seg[-1], w_seg[-1]
        if idx == 0:
            r_parts.append(nodes)
            u_parts.append(u_seg)
            w_parts.append(w_seg)
            pieces.append((0, len(nodes) - 1, seg))
            idx = len(nodes) - 1
        else:
            r_parts.append(nodes[1:])
            u_parts.append(u_seg[1:])
            w_parts.append(w_seg[1:])
            pieces.append((idx, idx + len(nodes) - 1, seg))
            idx += len(nodes) - 1

    r = np.concatenate(r_parts)
    u = np.concatenate(u_parts)
    w = np.concatenate(w_parts)
    if abs(r[0] - start) > 1e-12 * max(start, 1.0):
        raise SolverError(f"grid starts at {r[0]}, expected {start}")

    if np.any(w <= 0.0):
        raise SolverError("u' lost positivity; integration failed for this potential")

    a_outer = r[-1] - u[-1] / w[-1]
    a_prev = r[-2] - u[-2] / w[-2]
    a_consistency = abs(a_outer - a_prev)
    scale = max(abs(a_outer), reff)
    if a_consistency > 1e-6 * scale:
        raise SolverError(
            f"scattering-length extraction inconsistent: {a_outer} vs {a_prev}"
        )

    norm = w[-1]
    return ScatteringSolution(
        r=r,
        u=u / norm,
        du=w / norm,
        a=a_outer,
        mu=mu,
        potential=pot,
        a_consistency=a_consistency,
        pieces=tuple(pieces),
    )


def scattering_length(sol: ScatteringSolution) -> float:
    """a = r - u/u' at the outermost grid point (checked against the next one)."""
    if sol.du[-1] <= 0.0:
        raise SolverError("u' vanished at the extraction radius")
    return sol.r[-1] - sol.u[-1] / sol.du[-1]


@dataclass(frozen=True)
class EnergyIdentity:
    """Both sides of the radial energy identity at radius R.

    lhs   : 4*pi*int_0^R {2*mu*(u' - u/r)^2 + v u^2} dr  (quadrature)
    rhs   : 8*pi*mu*u(R)*(u'(R) - u(R)/R), the exact value of lhs obtained
            by partial integration; equals 8*pi*mu*a*(1 - a/R) in the
            u = r - a normalization and tends to 8*pi*mu*a as R grows.
    shell_bound : 8*pi*mu*a*u(R)^2/R^2, the energy credited by a delta
            shell at R.  A strict lower bound of lhs for a > 0, equal to
            it only as a/R -> 0; equals 8*pi*mu*a*(1 - a/R)^2 here.
    """

    R: float
    lhs: float
    rhs: float
    shell_bound: float
    residual: float


def _kinetic_term(sol: ScatteringSolution, i0: int, i1: int) -> np.ndarray:
    r = sol.r[i0 : i1 + 1]
    safe_r = np.where(r > 0.0, r, 1.0)
    term = sol.du[i0 : i1 + 1] - sol.u[i0 : i1 + 1] / safe_r
    if r[0] == 0.0:
        term[0] = 0.0  # u ~ u'(0) r, so u' - u/r -> 0
    return term**2


def energy_identity(sol: ScatteringSolution, R: float) -> EnergyIdentity:
    """Evaluate the energy identity at R (must be at least the range)."""
    reff = sol.range_radius
    if R < reff:
        raise ValueError("identity requires R at or beyond the potential range")
    if R > sol.r[-1] * (1 + 1e-12):
        raise ValueError("R beyond the solved grid; re-solve with larger r_max")
    mu, a = sol.mu, sol.a

    # interior: per-piece Simpson, segments end exactly at the range
    interior = 0.0
    for i0, i1, seg in sol.pieces:
        if seg.lo >= reff:
            break
        r = sol.r[i0 : i1 + 1]
        kin = 2.0 * mu * _kinetic_term(sol, i0, i1)
        pot_term = np.asarray(seg.v(r), dtype=float) * sol.u[i0 : i1 + 1] ** 2
        interior += simpson(kin + pot_term, x=r)
    # exterior: u = r - a exactly, integrand 2*mu*a^2/r^2
    start_ext = max(reff, sol.r[0])
    if R > start_ext:
        interior += 2.0 * mu * a * a * (1.0 / start_ext - 1.0 / R)

    lhs = 4.0 * math.pi * interior
    uR = float(sol.u_at(R))
    duR = float(sol.du_at(R))
    rhs = 8.0 * math.pi * mu * uR * (duR - uR / R)
    shell = 8.0 * math.pi * mu * a * uR**2 / R**2
    scale = max(abs(rhs), 8.0 * math.pi * mu * max(abs(a), 1e-300))
    residual = abs(lhs - rhs) / scale
    return EnergyIdentity(R=R, lhs=lhs, rhs=rhs, shell_bound=shell, residual=residual)


@dataclass(frozen=True)
class MinimizedProfile:
    r: np.ndarray
    u: np.ndarray
    value: float


def radial_form_minimize(
    pot: RadialPotential,
    mu: float,
    R: float,
    boundary_value: float,
    *,
    n_steps: int = 4000,
) -> MinimizedProfile:
    """Minimize int_0^R { mu*(u' - u/r)^2 + v u^2 / 2 } dr directly.

    Discrete piecewise-linear minimization with u(0) = 0 (u(core) = 0 for
    a hard core) and u(R) = boundary_value.  The functional is convex for
    v >= 0, so the banded normal equations give the exact discrete
    minimizer.  The minimum equals mu*a*u(R)^2/(R*(R - a)) when R is
    outside the range, and the minimizer is the rescaled scattering
    solution.
    """
    if boundary_value <= 0:
        raise ValueError("boundary_value must be positive")
    reff = pot.effective_range
    if R < reff:
        raise ValueError("R must be at or beyond the potential range")

    zero = lambda rr: np.zeros_like(np.asarray(rr, dtype=float))
    segs = [s for s in pot.segments() if s.lo < reff]
    if R > reff:
        segs.append(Segment(reff, R, zero))
    steps = _allocate_steps(segs, n_steps)

    nodes_list = []
    vfun_for_interval = []
    for seg, m in zip(segs, steps):
        nodes = _segment_nodes(seg, m)
        nodes_list.append(nodes if not nodes_list else nodes[1:])
        vfun_for_interval.extend([seg.v] * (len(nodes) - 1))
    r = np.concatenate(nodes_list)
    h = np.diff(r)
    rm = 0.5 * (r[:-1] + r[1:])
    vm = np.array([float(np.asarray(f(x)).reshape(())) for f, x in zip(vfun_for_interval, rm)])

    # per-interval quadratic: mu*h*(p*u1 + q*u0)^2 + (vm*h/8)*(u0 + u1)^2
    p = 1.0 / h - 1.0 / (2.0 * rm)
    q = -1.0 / h - 1.0 / (2.0 * rm)
    A = mu * h
    B = vm * h / 8.0

    m = len(r)
    diag = np.zeros(m)
    sub = np.zeros(m - 1)
    diag[:-1] += 2.0 * (A * q * q + B)
    diag[1:] += 2.0 * (A * p * p + B)
    sub += 2.0 * (A * p * q + B)

    u = np.zeros(m)
    u[-1] = boundary_value
    # interior solve K u_int = -coupling * boundary
    rhs = np.zeros(m - 2)
    rhs[-1] = -sub[-1] * boundary_value
    ab = np.zeros((2, m - 2))
    ab[0] = diag[1:-1]
    ab[1, :-1] = sub[1:-1]
    u[1:-1] = solveh_banded(ab, rhs, lower=True)

    u0s, u1s = u[:-1], u[1:]
    value = float(np.sum(A * (p * u1s + q * u0s) ** 2 + B * (u0s + u1s) ** 2))
    return MinimizedProfile(r=r, u=u, value=value)
