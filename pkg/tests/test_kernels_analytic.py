import math

import numpy as np
import pytest

from dislodyn.errors import CoincidentPoints, PointInsideDisk, PointOutside
from dislodyn.geometry import Disk, ExteriorDisk, HalfPlane, Plane
from dislodyn.kernels_analytic import (DiskKernels, ExteriorDiskKernels,
                                       HalfPlaneKernels, PlaneKernels,
                                       analytic_kernels, grad_h_disk,
                                       green_disk, h_disk, kernels_exterior_disk,
                                       kernels_halfplane, kernels_plane)

TWO_PI = 2.0 * math.pi


def fd_grad(f, x, step=1e-6):
    x = np.asarray(x, float)
    return np.array([
        (f(x + [step, 0]) - f(x - [step, 0])) / (2 * step),
        (f(x + [0, step]) - f(x - [0, step])) / (2 * step),
    ])


class TestGreenDisk:
    def test_center_source(self):
        # with y at the origin the regular part cancels
        assert green_disk((0.5, 0.0), (0.0, 0.0)) == pytest.approx(
            -math.log(0.5) / TWO_PI, abs=1e-14)

    def test_symmetry(self):
        a = green_disk((0.3, 0.2), (-0.4, 0.1))
        b = green_disk((-0.4, 0.1), (0.3, 0.2))
        assert abs(a - b) < 1e-13

    def test_dirichlet_decay(self):
        y = (0.2, 0.1)
        for d1 in (1e-3, 1e-5, 1e-7):
            x = (1.0 - d1, 0.0)
            assert abs(green_disk(x, y)) < max(1e-6, 10 * d1)

    def test_symmetry_sweep(self, rng):
        ev = DiskKernels(Disk())
        for _ in range(1000):
            x, y = rng.uniform(-0.7, 0.7, (2, 2))
            if np.linalg.norm(x - y) < 1e-3:
                continue
            assert abs(ev.G(x, y) - ev.G(y, x)) < 1e-12

    def test_coincident_raises(self):
        with pytest.raises(CoincidentPoints):
            green_disk((0.1, 0.1), (0.1, 0.1))

    def test_outside_raises(self):
        with pytest.raises(PointOutside):
            green_disk((1.5, 0.0), (0.1, 0.1))


class TestExteriorDisk:
    def test_h_value(self):
        # |x| = 1.1: h = log(0.21) / (2 pi)
        _, _, h = kernels_exterior_disk((1.1, 0.0), (2.0, 0.0))
        assert h == pytest.approx(math.log(0.21) / TWO_PI, abs=1e-12)

    def test_h_two_forms_agree(self, rng):
        ev = ExteriorDiskKernels(ExteriorDisk())
        for _ in range(100):
            r = rng.uniform(1.05, 4.0)
            ang = rng.uniform(0, TWO_PI)
            x = r * np.array([math.cos(ang), math.sin(ang)])
            d1 = r - 1.0
            alt = math.log(2 * d1 + d1 * d1) / TWO_PI
            assert ev.h(x) == pytest.approx(alt, abs=1e-12)

    def test_h_matches_halfplane_limit(self):
        # large rho at fixed depth approaches the flat-boundary value
        d = 0.3
        for rho in (10.0, 100.0, 1000.0):
            ev = ExteriorDiskKernels(ExteriorDisk(radius=rho))
            flat = math.log(2 * d) / TWO_PI
            assert abs(ev.h((rho + d, 0.0)) - flat) < 2.0 / rho

    def test_positivity(self, rng):
        ev = ExteriorDiskKernels(ExteriorDisk())
        for _ in range(300):
            x = rng.uniform(-4, 4, 2)
            y = rng.uniform(-4, 4, 2)
            if np.hypot(*x) < 1.1 or np.hypot(*y) < 1.1:
                continue
            if np.linalg.norm(x - y) < 1e-3:
                continue
            assert ev.G(x, y) >= -1e-13

    def test_inside_raises(self):
        with pytest.raises(PointInsideDisk):
            kernels_exterior_disk((0.5, 0.0), (2.0, 0.0))


class TestHalfPlane:
    def test_h_at_half(self):
        _, _, h, _ = kernels_halfplane((0.0, 0.5), (1.0, 1.0))
        assert h == pytest.approx(0.0, abs=1e-15)

    def test_single_dislocation_force(self):
        # -grad h / 2 at height 0.1
        *_, gh = kernels_halfplane((0.0, 0.1), (1.0, 1.0))
        force = -0.5 * gh
        assert force == pytest.approx([0.0, -1.0 / (4 * math.pi * 0.1)],
                                      abs=1e-12)

    def test_green_value(self):
        G, *_ = kernels_halfplane((0.0, 1.0), (0.0, 2.0))
        assert G == pytest.approx(math.log(3.0) / TWO_PI, abs=1e-14)

    def test_symmetry_sweep(self, rng):
        ev = HalfPlaneKernels(HalfPlane.upper())
        for _ in range(1000):
            x = rng.uniform([-2, 0.05], [2, 3], 2)
            y = rng.uniform([-2, 0.05], [2, 3], 2)
            if np.linalg.norm(x - y) < 1e-3:
                continue
            assert abs(ev.G(x, y) - ev.G(y, x)) < 1e-12

    def test_grad_k_vs_fd(self):
        ev = HalfPlaneKernels(HalfPlane.upper())
        y = np.array([0.4, 0.8])
        x = np.array([-0.2, 0.5])
        num = fd_grad(lambda p: ev.k(p, y), x)
        assert ev.grad_x_k(x, y) == pytest.approx(num, rel=1e-6)


class TestPlane:
    def test_pair_energy_values(self):
        G, k, h = kernels_plane((1.0, 0.0), (0.0, 0.0))
        assert k == 0.0 and h == 0.0
        assert G == pytest.approx(0.0, abs=1e-15)  # log 1
        G2, _, _ = kernels_plane((0.5, 0.0), (0.0, 0.0))
        # opposite moduli: E_2 = -b1 b2 log r / (2 pi) = log(0.5)/(2 pi)
        assert -(-1) * G2 == pytest.approx(math.log(2) / TWO_PI, abs=1e-14)

    def test_h_zero_everywhere(self, rng):
        ev = PlaneKernels()
        for _ in range(10):
            assert ev.h(rng.uniform(-5, 5, 2)) == 0.0


class TestHDisk:
    def test_center(self):
        assert h_disk((0.0, 0.0)) == pytest.approx(0.0, abs=1e-15)
        assert grad_h_disk((0.0, 0.0)) == pytest.approx([0.0, 0.0])

    def test_value_at_half_radius(self):
        # h = log(1 - 0.25) / (2 pi); equals the boundary-distance identity
        assert h_disk((0.5, 0.0)) == pytest.approx(
            math.log(0.75) / TWO_PI, abs=1e-14)

    def test_identity_with_boundary_distance(self, rng):
        # h(x) = log|2 d - d^2 / rho| / (2 pi) exactly
        for rho in (1.0, 2.5):
            ev = DiskKernels(Disk(radius=rho))
            for _ in range(200):
                x = rng.uniform(-rho, rho, 2) * 0.98
                if np.hypot(*x) >= rho:
                    continue
                d = rho - np.hypot(*x)
                expected = math.log(abs(2 * d - d * d / rho)) / TWO_PI
                assert ev.h(x) == pytest.approx(expected, abs=1e-12)

    def test_grad_vs_fd(self):
        x = np.array([0.3, 0.4])
        num = fd_grad(lambda p: h_disk(p), x)
        assert grad_h_disk(x) == pytest.approx(num, rel=1e-6)

    def test_velocity_is_motion_law(self):
        # -grad h / 2 = z / (2 pi (1 - |z|^2))
        z = np.array([0.5, 0.0])
        v = -0.5 * grad_h_disk(z)
        assert v == pytest.approx(z / (TWO_PI * (1 - 0.25)), abs=1e-14)


class TestEllipticStructure:
    def test_harmonicity_of_k(self, disk_kernels, rng):
        # 5-point Laplacian of k(., y) at interior points
        step = 1e-3
        y = np.array([0.25, -0.15])
        for _ in range(20):
            x = rng.uniform(-0.6, 0.6, 2)
            if np.linalg.norm(x - y) < 0.05:
                continue
            k = disk_kernels.k
            lap = (k(x + [step, 0], y) + k(x - [step, 0], y)
                   + k(x + [0, step], y) + k(x - [0, step], y)
                   - 4 * k(x, y)) / step**2
            assert abs(lap) < 1e-4

    def test_liouville_pde_disk(self, disk_kernels, rng):
        # -lap h = (2/pi) exp(-4 pi h), finite differences
        step = 1e-3
        for _ in range(20):
            x = rng.uniform(-0.75, 0.75, 2)
            if 1.0 - np.hypot(*x) < 0.2:
                continue
            h = disk_kernels.h
            lap = (h(x + [step, 0]) + h(x - [step, 0]) + h(x + [0, step])
                   + h(x - [0, step]) - 4 * h(x)) / step**2
            resid = -lap - (2 / math.pi) * math.exp(-4 * math.pi * h(x))
            assert abs(resid) < 1e-3

    @pytest.mark.parametrize("domain,box", [
        (Disk(), (-0.7, 0.7)),
        (ExteriorDisk(), (1.2, 3.0)),
    ])
    def test_grad_G_vs_fd(self, domain, box, rng):
        ev = analytic_kernels(domain)
        lo, hi = box
        done = 0
        while done < 25:
            x = rng.uniform(lo, hi, 2) * rng.choice([-1, 1], 2)
            y = rng.uniform(lo, hi, 2) * rng.choice([-1, 1], 2)
            if not (domain.contains(x) and domain.contains(y)):
                continue
            if np.linalg.norm(x - y) < 0.1:
                continue
            num = fd_grad(lambda p: ev.G(p, y), x)
            assert ev.grad_x_G(x, y) == pytest.approx(num, rel=1e-5)
            done += 1

    def test_factory_rejects_polygon(self, square):
        with pytest.raises(ValueError):
            analytic_kernels(square)


class TestGeneralPlacements:
    def test_offcenter_disk_consistency(self, rng):
        dom = Disk(center=(0.4, -0.7), radius=1.6)
        ev = DiskKernels(dom)
        c = np.array([0.4, -0.7])
        ref = DiskKernels(Disk(radius=1.6))
        for _ in range(30):
            x = c + rng.uniform(-1.0, 1.0, 2)
            y = c + rng.uniform(-1.0, 1.0, 2)
            if not (dom.contains(x) and dom.contains(y)):
                continue
            if np.linalg.norm(x - y) < 0.05:
                continue
            assert ev.G(x, y) == pytest.approx(ref.G(x - c, y - c), abs=1e-13)
            assert ev.h(x) == pytest.approx(ref.h(x - c), abs=1e-13)
            assert ev.grad_h(x) == pytest.approx(ref.grad_h(x - c), abs=1e-13)

    def test_rotated_halfplane(self, rng):
        # domain { x . nu < offset } with a slanted normal
        nu = np.array([3.0, 4.0]) / 5.0
        dom = HalfPlane(normal=tuple(nu), offset=0.2)
        ev = HalfPlaneKernels(dom)
        for _ in range(20):
            x = rng.uniform(-2, 2, 2)
            y = rng.uniform(-2, 2, 2)
            if not (dom.contains(x) and dom.contains(y)):
                continue
            if np.linalg.norm(x - y) < 0.05:
                continue
            depth = 0.2 - float(x @ nu)
            assert ev.h(x) == pytest.approx(math.log(2 * depth) / TWO_PI,
                                            abs=1e-13)
            num = fd_grad(lambda p: ev.k(p, y), x)
            assert ev.grad_x_k(x, y) == pytest.approx(num, rel=1e-5)
            assert abs(ev.G(x, y) - ev.G(y, x)) < 1e-12

    def test_disk_pair_energy_closed_form_sweep(self, disk_kernels, rng):
        # explicit opposite-pair energy of the unit disk:
        # log|z1-z2|/(2 pi) + log(1-|z1|^2)/(4 pi) + log(1-|z2|^2)/(4 pi)
        #   - log(1 - 2 z1.z2 + |z1|^2 |z2|^2)/(4 pi)
        from dislodyn.geometry import Configuration
        from dislodyn.mechanics import energy
        for _ in range(50):
            z1 = rng.uniform(-0.65, 0.65, 2)
            z2 = rng.uniform(-0.65, 0.65, 2)
            if np.linalg.norm(z1 - z2) < 0.1:
                continue
            expected = (math.log(np.linalg.norm(z1 - z2)) / TWO_PI
                        + math.log(1 - z1 @ z1) / (2 * TWO_PI)
                        + math.log(1 - z2 @ z2) / (2 * TWO_PI)
                        - math.log(1 - 2 * z1 @ z2
                                   + (z1 @ z1) * (z2 @ z2)) / (2 * TWO_PI))
            got = energy(Configuration.from_arrays([z1, z2], [1, -1]),
                         disk_kernels)
            assert got == pytest.approx(expected, abs=1e-13)
