"""Closed-form and reduced-ODE ground truth for the exactly solvable cases.

Four scenarios admit explicit solutions: a single dislocation in the upper
half plane, a single dislocation in the unit disk, a symmetric opposite
pair on a diameter of the unit disk, and a pair in the whole plane.  Each
oracle returns the classification, the collision time where one exists, and
a trajectory sampler used to validate the generic integrator.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable

import numpy as np
from scipy.optimize import brentq

from .errors import NoConvergence, Singularity, ZeroInitialCondition
from .geometry import Configuration

__all__ = [
    "OracleResult",
    "halfplane_single",
    "disk_single",
    "disk_symmetric_pair",
    "plane_pair",
    "disk_pair_reduced_ode",
    "EQUILIBRIUM_RADIUS",
]

_SQRT5 = math.sqrt(5.0)

# radius at which the symmetric opposite pair in the unit disk is stationary
EQUILIBRIUM_RADIUS = math.sqrt(_SQRT5 - 2.0)


@dataclass(frozen=True)
class OracleResult:
    case: str
    classification: str  # boundary-collision | pair-collision | equilibrium | global-existence
    collision_time: float | None
    sample: Callable[[float], Configuration]
    detail: dict = field(default_factory=dict)


def halfplane_single(delta: float) -> OracleResult:
    """One dislocation at height delta in the upper half plane.

    It falls straight down, x2(t) = sqrt(delta^2 - t/(2 pi)), and hits the
    boundary at T = 2 pi delta^2.
    """
    if not delta > 0:
        raise ValueError("delta must be positive")
    T = 2.0 * math.pi * delta * delta

    def sample(t: float) -> Configuration:
        if not 0.0 <= t < T:
            raise ValueError("sample time outside [0, T)")
        x2 = math.sqrt(delta * delta - t / (2.0 * math.pi))
        return Configuration.from_arrays([[0.0, x2]], [1])

    return OracleResult("halfplane_single", "boundary-collision", T, sample,
                        {"delta": delta})


def disk_single(delta: float) -> OracleResult:
    """One dislocation at distance delta from the unit-disk boundary.

    The squared radius R(t) = |z(t)|^2 satisfies
    log(R / (1-delta)^2) - R + (1-delta)^2 = t / pi, giving the collision
    time T = pi (delta^2 - 2 delta - 2 log(1-delta)).
    """
    if not 0 < delta < 1:
        raise ValueError("delta must lie in (0, 1)")
    R0 = (1.0 - delta) ** 2
    T = math.pi * (delta * delta - 2.0 * delta - 2.0 * math.log1p(-delta))

    def radius_sq(t: float) -> float:
        if t == 0.0:
            return R0

        def g(R):
            return math.log(R / R0) - R + R0 - t / math.pi

        try:
            return brentq(g, R0, 1.0, xtol=1e-15, rtol=8.9e-16, maxiter=200)
        except Exception as exc:  # pragma: no cover - monotone branch
            raise NoConvergence(str(exc)) from exc

    def sample(t: float) -> Configuration:
        if not 0.0 <= t < T:
            raise ValueError("sample time outside [0, T)")
        r = math.sqrt(radius_sq(t))
        return Configuration.from_arrays([[r, 0.0]], [1])

    return OracleResult("disk_single", "boundary-collision", T, sample,
                        {"delta": delta, "radius_sq": radius_sq})


def _pair_time_boundary(r0: float) -> float:
    """Collision time with the unit-disk boundary for the symmetric pair."""
    R0 = r0 * r0
    arg = (7.0 - 3.0 * _SQRT5) * (R0 + 2.0 + _SQRT5) / (2.0 * (R0 + 2.0 - _SQRT5))
    assert arg > 0, "log argument must be positive for r0 above equilibrium"
    quartic = (R0 * R0 + 4.0 * R0 - 1.0) / 4.0
    assert quartic > 0
    return 2.0 * math.pi * (R0 - 1.0 - (4.0 * _SQRT5 / 5.0) * math.log(arg)
                            - 2.0 * math.log(quartic))


def _pair_time_center(r0: float) -> float:
    """Collision time of the symmetric pair at the disk centre."""
    R0 = r0 * r0
    arg = (9.0 + 4.0 * _SQRT5) * (R0 + 2.0 - _SQRT5) / (-(R0 + 2.0 + _SQRT5))
    assert arg > 0, "log argument must be positive for r0 below equilibrium"
    poly = 1.0 - 4.0 * R0 - R0 * R0
    assert poly > 0
    return 2.0 * math.pi * (R0 + (4.0 * _SQRT5 / 5.0) * math.log(arg)
                            - 2.0 * math.log(poly))


def _pair_implicit_time(R: float, R0: float) -> float:
    """Time at which the squared radius of the symmetric pair reaches R."""
    c1 = 2.0 - 4.0 * _SQRT5 / 5.0
    c2 = 2.0 + 4.0 * _SQRT5 / 5.0
    t = -(R - R0)
    t += c1 * math.log(abs((R + 2.0 - _SQRT5) / (R0 + 2.0 - _SQRT5)))
    t += c2 * math.log((R + 2.0 + _SQRT5) / (R0 + 2.0 + _SQRT5))
    return 2.0 * math.pi * t


def disk_symmetric_pair(r0: float, angle: float = 0.0) -> OracleResult:
    """Opposite pair at +/- r0 on a diameter of the unit disk.

    The pair is stationary at r0 = sqrt(sqrt(5) - 2); below it the two
    dislocations meet at the centre, above it they hit the boundary.
    """
    if not 0 < r0 < 1:
        raise ValueError("r0 must lie in (0, 1)")
    R0 = r0 * r0
    sign = R0 * R0 + 4.0 * R0 - 1.0
    e = np.array([math.cos(angle), math.sin(angle)])

    def config_at_radius(r: float) -> Configuration:
        return Configuration.from_arrays([r * e, -r * e], [1, -1])

    if abs(sign) < 1e-14:
        def sample_eq(t: float) -> Configuration:
            return config_at_radius(r0)

        return OracleResult("disk_symmetric_pair", "equilibrium", None,
                            sample_eq, {"r0": r0})

    if sign > 0:
        T = _pair_time_boundary(r0)
        classification = "boundary-collision"
        bracket = (R0, 1.0)
    else:
        T = _pair_time_center(r0)
        classification = "pair-collision"
        bracket = (0.0, R0)

    def radius_sq(t: float) -> float:
        if t == 0.0:
            return R0

        def g(R):
            return _pair_implicit_time(R, R0) - t

        lo, hi = bracket
        try:
            return brentq(g, lo + 1e-300, hi, xtol=1e-15, rtol=8.9e-16,
                          maxiter=200)
        except Exception as exc:  # pragma: no cover
            raise NoConvergence(str(exc)) from exc

    def sample(t: float) -> Configuration:
        if not 0.0 <= t < T:
            raise ValueError("sample time outside [0, T)")
        return config_at_radius(math.sqrt(radius_sq(t)))

    return OracleResult("disk_symmetric_pair", classification, T, sample,
                        {"r0": r0, "radius_sq": radius_sq})


def plane_pair(z0, b1b2: int) -> OracleResult:
    """Symmetric pair z, -z in the whole plane.

    Equal moduli separate forever; opposite moduli collide at the origin at
    T = 2 pi |z0|^2.
    """
    z0 = np.asarray(z0, dtype=float).reshape(2)
    if np.all(z0 == 0.0):
        raise ZeroInitialCondition("initial position must be nonzero")
    if b1b2 not in (-1, 1):
        raise ValueError("b1b2 must be -1 or +1")
    r0sq = float(z0 @ z0)
    burgers = [1, b1b2]

    if b1b2 == 1:
        def sample_g(t: float) -> Configuration:
            z = z0 * math.sqrt(1.0 + t / (2.0 * math.pi * r0sq))
            return Configuration.from_arrays([z, -z], burgers)

        return OracleResult("plane_pair", "global-existence", None, sample_g,
                            {"z0": z0.tolist()})

    T = 2.0 * math.pi * r0sq

    def sample(t: float) -> Configuration:
        if not 0.0 <= t < T:
            raise ValueError("sample time outside [0, T)")
        z = z0 * math.sqrt(1.0 - t / (2.0 * math.pi * r0sq))
        return Configuration.from_arrays([z, -z], burgers)

    return OracleResult("plane_pair", "pair-collision", T, sample,
                        {"z0": z0.tolist()})


def disk_pair_reduced_ode(r1: float, r2: float, phi: float) -> tuple[float, float, float]:
    """Right-hand sides (r1dot, r2dot, phidot) of the radial system for an
    opposite pair in the unit disk (b1 = +1, b2 = -1)."""
    if not (0 < r1 < 1 and 0 < r2 < 1):
        raise ValueError("radii must lie in (0, 1)")
    sep2 = r1 * r1 + r2 * r2 - 2.0 * r1 * r2 * math.cos(phi)
    if sep2 < 1e-20:
        raise Singularity("pair separation vanishes")
    c, s = math.cos(phi), math.sin(phi)
    img = 1.0 - 2.0 * r1 * r2 * c + r1 * r1 * r2 * r2
    two_pi = 2.0 * math.pi
    r1dot = ((r2 * c - r1) / sep2 + r1 / (1.0 - r1 * r1)
             - (r2 * c - r1 * r2 * r2) / img) / two_pi
    r2dot = ((r1 * c - r2) / sep2 + r2 / (1.0 - r2 * r2)
             - (r1 * c - r1 * r1 * r2) / img) / two_pi
    phidot = ((r1 * r1 + r2 * r2)
              * (r1 * r1 + r2 * r2 - r1 * r1 * r2 * r2 - 1.0) * s
              / (r1 * r2 * img * sep2)) / two_pi
    return r1dot, r2dot, phidot
