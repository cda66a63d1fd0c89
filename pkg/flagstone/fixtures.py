from __future__ import annotations

import pytest

from flagstone.curve import CurveParams, SearchWindow
from flagstone.driver import DriverConfig, example_window
from flagstone.verifier import TargetSet


@pytest.fixture(scope="session")
def worked_example() -> SearchWindow:
    """X0=0.31415, h=0.001, K=1e-5, L=1000 with c=2."""
    return example_window()


@pytest.fixture
def curve_params() -> CurveParams:
    return CurveParams()


@pytest.fixture
def example_targets() -> TargetSet:
    return TargetSet(frozenset({19, 427}), d_max=1000, min_yz=10)


@pytest.fixture
def pinned_config() -> DriverConfig:
    """Config whose every trial samples the worked example window."""
    return DriverConfig(x0_low=0.31415, x0_high=0.31415, h_low=0.001, h_high=0.001, kappa=10, lambda_=1)
