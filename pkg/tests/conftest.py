import numpy as np
import pytest

from dislodyn.geometry import AxisAlignedPolygon, Disk, cardioid_domain
from dislodyn.kernels_analytic import DiskKernels
from dislodyn.kernels_numeric import (GridKernels, NumericKernelConfig,
                                      NystromKernels)


@pytest.fixture(scope="session")
def disk():
    return Disk()


@pytest.fixture(scope="session")
def disk_kernels(disk):
    return DiskKernels(disk)


@pytest.fixture(scope="session")
def square():
    return AxisAlignedPolygon.square()


@pytest.fixture(scope="session")
def cardioid():
    return cardioid_domain()


@pytest.fixture(scope="session")
def square_grid(square):
    return GridKernels(square, NumericKernelConfig())


@pytest.fixture(scope="session")
def square_integral(square):
    return NystromKernels(square, NumericKernelConfig(boundary_nodes=512))


@pytest.fixture(scope="session")
def disk_integral(disk):
    return NystromKernels(disk, NumericKernelConfig(boundary_nodes=256))


@pytest.fixture(scope="session")
def cardioid_integral(cardioid):
    return NystromKernels(cardioid, NumericKernelConfig(boundary_nodes=512))


@pytest.fixture()
def rng():
    return np.random.default_rng(20240817)
