"""Closed-form interaction kernels for the disk, its exterior, the half
plane and the whole plane.

Every evaluator exposes the Dirichlet Green's function G(x, y), its regular
part k(x, y) = G(x, y) + log|x - y| / (2*pi), the self-interaction potential
h(x) = k(x, x) and the gradients of all three.  Gradients are
hand-differentiated closed forms; the finite-difference consistency checks
live in the test suite.

For the disk of radius rho centred at the origin the symmetric form

    k(x, y) = log(Q / rho^2) / (4*pi),   Q = rho^4 - 2 rho^2 x.y + |x|^2 |y|^2

is used; it is smooth through x = 0 (no explicit reflection point) and the
same expression serves the exterior domain.  On the whole plane k and h
vanish by convention, so the pair energy reduces to the bare logarithm.
"""

from __future__ import annotations

import math

import numpy as np

from .errors import CoincidentPoints, PointInsideDisk, PointOutside
from .geometry import Disk, Domain, ExteriorDisk, HalfPlane, Plane

__all__ = [
    "KernelEvaluator",
    "DiskKernels",
    "ExteriorDiskKernels",
    "HalfPlaneKernels",
    "PlaneKernels",
    "analytic_kernels",
    "green_disk",
    "kernels_exterior_disk",
    "kernels_halfplane",
    "kernels_plane",
    "h_disk",
    "grad_h_disk",
]

COINCIDENCE_TOL = 1e-14
_TWO_PI = 2.0 * math.pi


def _vec(x) -> np.ndarray:
    return np.asarray(x, dtype=float).reshape(2)


class KernelEvaluator:
    """Uniform kernel interface consumed by mechanics and dynamics.

    ``min_eval_distance`` is the boundary margin below which evaluations are
    only best-effort (zero for analytic backends).
    """

    backend = "analytic"
    min_eval_distance = 0.0

    domain: Domain

    def G(self, x, y) -> float:
        raise NotImplementedError

    def grad_x_G(self, x, y) -> np.ndarray:
        raise NotImplementedError

    def grad_y_G(self, x, y) -> np.ndarray:
        # G is symmetric, so the y-gradient is the x-gradient with arguments swapped
        return self.grad_x_G(y, x)

    def k(self, x, y) -> float:
        raise NotImplementedError

    def grad_x_k(self, x, y) -> np.ndarray:
        raise NotImplementedError

    def h(self, x) -> float:
        raise NotImplementedError

    def grad_h(self, x) -> np.ndarray:
        raise NotImplementedError

    def _check_distinct(self, x, y):
        if math.hypot(x[0] - y[0], x[1] - y[1]) < COINCIDENCE_TOL:
            raise CoincidentPoints(f"points {x} and {y} coincide")


class DiskKernels(KernelEvaluator):
    """Interior of a disk of radius rho (method of images)."""

    def __init__(self, domain: Disk):
        self.domain = domain
        self.rho = float(domain.radius)
        self.center = np.asarray(domain.center, dtype=float)

    def _local(self, x) -> np.ndarray:
        u = _vec(x) - self.center
        if math.hypot(u[0], u[1]) >= self.rho:
            raise PointOutside(f"{x} is not inside the disk")
        return u

    def _Q(self, u, v) -> float:
        r2 = self.rho * self.rho
        return r2 * r2 - 2.0 * r2 * float(u @ v) + float(u @ u) * float(v @ v)

    def k(self, x, y) -> float:
        u, v = self._local(x), self._local(y)
        return math.log(self._Q(u, v) / self.rho**2) / (2.0 * _TWO_PI)

    def G(self, x, y) -> float:
        u, v = self._local(x), self._local(y)
        self._check_distinct(u, v)
        d2 = float((u - v) @ (u - v))
        return (math.log(self._Q(u, v) / self.rho**2) / 2.0 - math.log(d2) / 2.0) / _TWO_PI

    def grad_x_k(self, x, y) -> np.ndarray:
        u, v = self._local(x), self._local(y)
        return (u * float(v @ v) - self.rho**2 * v) / (_TWO_PI * self._Q(u, v))

    def grad_x_G(self, x, y) -> np.ndarray:
        u, v = self._local(x), self._local(y)
        self._check_distinct(u, v)
        w = u - v
        return -w / (_TWO_PI * float(w @ w)) + self.grad_x_k(x, y)

    def h(self, x) -> float:
        u = self._local(x)
        return math.log((self.rho**2 - float(u @ u)) / self.rho) / _TWO_PI

    def grad_h(self, x) -> np.ndarray:
        u = self._local(x)
        return -u / (math.pi * (self.rho**2 - float(u @ u)))


class ExteriorDiskKernels(KernelEvaluator):
    """Exterior of a disk of radius rho (double circular reflection)."""

    def __init__(self, domain: ExteriorDisk):
        self.domain = domain
        self.rho = float(domain.radius)
        self.center = np.asarray(domain.center, dtype=float)

    def _local(self, x) -> np.ndarray:
        u = _vec(x) - self.center
        if math.hypot(u[0], u[1]) <= self.rho:
            raise PointInsideDisk(f"{x} is not outside the disk")
        return u

    def _Q(self, u, v) -> float:
        r2 = self.rho * self.rho
        return float(u @ u) * float(v @ v) - 2.0 * r2 * float(u @ v) + r2 * r2

    def k(self, x, y) -> float:
        u, v = self._local(x), self._local(y)
        return math.log(self._Q(u, v) / self.rho**2) / (2.0 * _TWO_PI)

    def G(self, x, y) -> float:
        u, v = self._local(x), self._local(y)
        self._check_distinct(u, v)
        d2 = float((u - v) @ (u - v))
        return (math.log(self._Q(u, v) / self.rho**2) / 2.0 - math.log(d2) / 2.0) / _TWO_PI

    def grad_x_k(self, x, y) -> np.ndarray:
        u, v = self._local(x), self._local(y)
        return (u * float(v @ v) - self.rho**2 * v) / (_TWO_PI * self._Q(u, v))

    def grad_x_G(self, x, y) -> np.ndarray:
        u, v = self._local(x), self._local(y)
        self._check_distinct(u, v)
        w = u - v
        return -w / (_TWO_PI * float(w @ w)) + self.grad_x_k(x, y)

    def h(self, x) -> float:
        u = self._local(x)
        return math.log((float(u @ u) - self.rho**2) / self.rho) / _TWO_PI

    def grad_h(self, x) -> np.ndarray:
        u = self._local(x)
        return u / (math.pi * (float(u @ u) - self.rho**2))


class HalfPlaneKernels(KernelEvaluator):
    """Half plane via the image point across the flat boundary."""

    def __init__(self, domain: HalfPlane):
        self.domain = domain
        self.nu = np.asarray(domain.normal, dtype=float)
        self.offset = float(domain.offset)

    def _depth(self, x) -> float:
        d = self.offset - float(_vec(x) @ self.nu)
        if d <= 0:
            raise PointOutside(f"{x} is not inside the half plane")
        return d

    def _mirror(self, x) -> np.ndarray:
        p = _vec(x)
        return p + 2.0 * (self.offset - float(p @ self.nu)) * self.nu

    def k(self, x, y) -> float:
        self._depth(x)
        self._depth(y)
        xb = self._mirror(x)
        v = _vec(y)
        return math.log(math.hypot(xb[0] - v[0], xb[1] - v[1])) / _TWO_PI

    def G(self, x, y) -> float:
        p, v = _vec(x), _vec(y)
        self._check_distinct(p, v)
        return -math.log(math.hypot(p[0] - v[0], p[1] - v[1])) / _TWO_PI + self.k(x, y)

    def grad_x_k(self, x, y) -> np.ndarray:
        self._depth(x)
        self._depth(y)
        xb = self._mirror(x)
        w = xb - _vec(y)
        # chain rule through the reflection x -> x - 2((x.nu)-off)nu
        refl = w - 2.0 * float(w @ self.nu) * self.nu
        return refl / (_TWO_PI * float(w @ w))

    def grad_x_G(self, x, y) -> np.ndarray:
        p, v = _vec(x), _vec(y)
        self._check_distinct(p, v)
        w = p - v
        return -w / (_TWO_PI * float(w @ w)) + self.grad_x_k(x, y)

    def h(self, x) -> float:
        return math.log(2.0 * self._depth(x)) / _TWO_PI

    def grad_h(self, x) -> np.ndarray:
        return -self.nu / (_TWO_PI * self._depth(x))


class PlaneKernels(KernelEvaluator):
    """Whole plane: k and h vanish; only the bare logarithm interacts."""

    def __init__(self, domain: Plane | None = None):
        self.domain = domain if domain is not None else Plane()

    def k(self, x, y) -> float:
        return 0.0

    def G(self, x, y) -> float:
        p, v = _vec(x), _vec(y)
        self._check_distinct(p, v)
        return -math.log(math.hypot(p[0] - v[0], p[1] - v[1])) / _TWO_PI

    def grad_x_k(self, x, y) -> np.ndarray:
        return np.zeros(2)

    def grad_x_G(self, x, y) -> np.ndarray:
        p, v = _vec(x), _vec(y)
        self._check_distinct(p, v)
        w = p - v
        return -w / (_TWO_PI * float(w @ w))

    def h(self, x) -> float:
        return 0.0

    def grad_h(self, x) -> np.ndarray:
        return np.zeros(2)


def analytic_kernels(domain: Domain) -> KernelEvaluator:
    """Closed-form evaluator for a domain that has one."""
    if isinstance(domain, Disk):
        return DiskKernels(domain)
    if isinstance(domain, ExteriorDisk):
        return ExteriorDiskKernels(domain)
    if isinstance(domain, HalfPlane):
        return HalfPlaneKernels(domain)
    if isinstance(domain, Plane):
        return PlaneKernels(domain)
    raise ValueError(f"no closed-form kernels for {type(domain).__name__}")


# Convenience functions mirroring the per-domain formulas directly.

def green_disk(x, y, rho: float = 1.0) -> float:
    """Green's function of the disk B_rho(0)."""
    return DiskKernels(Disk(radius=rho)).G(x, y)


def kernels_exterior_disk(x, y, rho: float = 1.0) -> tuple[float, float, float]:
    """(G, k, h at x) for the exterior of B_rho(0)."""
    ev = ExteriorDiskKernels(ExteriorDisk(radius=rho))
    return ev.G(x, y), ev.k(x, y), ev.h(x)


def kernels_halfplane(x, y) -> tuple[float, float, float, np.ndarray]:
    """(G, k, h at x, grad h at x) for the upper half plane {y > 0}."""
    ev = HalfPlaneKernels(HalfPlane.upper())
    return ev.G(x, y), ev.k(x, y), ev.h(x), ev.grad_h(x)


def kernels_plane(x, y) -> tuple[float, float, float]:
    """(pairwise log interaction, k, h) on the whole plane."""
    ev = PlaneKernels()
    return ev.G(x, y), 0.0, 0.0


def h_disk(x, rho: float = 1.0) -> float:
    """Self-interaction potential of B_rho(0)."""
    return DiskKernels(Disk(radius=rho)).h(x)


def grad_h_disk(x, rho: float = 1.0) -> np.ndarray:
    return DiskKernels(Disk(radius=rho)).grad_h(x)
