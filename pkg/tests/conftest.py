from __future__ import annotations

import pytest

from survpath import SurvivalMatrix, packaged_instance, read_spn


@pytest.fixture
def pairwise3() -> SurvivalMatrix:
    """Three fibers, three paths, each path using a distinct fiber pair."""
    return read_spn(packaged_instance("pairwise3.spn")).matrix()


@pytest.fixture
def uncoverable() -> SurvivalMatrix:
    """Fiber 1 is used by every path, so no selection can survive it."""
    return read_spn(packaged_instance("uncoverable.spn")).matrix()


@pytest.fixture
def nonadditive() -> SurvivalMatrix:
    """Witness that fiber-footprint minimization is not additive."""
    return read_spn(packaged_instance("nonadditive.spn")).matrix()
