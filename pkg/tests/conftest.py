"""Shared fixtures: parameter sets, meshes and laws reused across the suite."""

import numpy as np
import pytest

from thinporous import CellGeometry, FluidParams, build_cell_mesh


@pytest.fixture(scope="session")
def params_thinning():
    """Pseudoplastic (1 < r < 2) Carreau constants used throughout."""
    return FluidParams(eta0=2.0, eta_inf=1.0, lam=2.0, r=1.5, gamma=1.0)


@pytest.fixture(scope="session")
def params_thickening():
    """Dilatant (r > 2) constants; gamma = 2 selects the power-law family."""
    return FluidParams(eta0=2.0, eta_inf=1.0, lam=2.0, r=3.0, gamma=2.0)


@pytest.fixture(scope="session")
def mesh_none16():
    return build_cell_mesh(CellGeometry.none(), 16)


@pytest.fixture(scope="session")
def mesh_disk16():
    return build_cell_mesh(CellGeometry.disk(0.25), 16)


@pytest.fixture(scope="session")
def mesh_disk32():
    return build_cell_mesh(CellGeometry.disk(0.25), 32)


@pytest.fixture(scope="session")
def mesh_disk64():
    return build_cell_mesh(CellGeometry.disk(0.25), 64)


@pytest.fixture()
def rng():
    return np.random.default_rng(20240812)
