from pathlib import Path

import pytest

import flagstone.fixtures
from flagstone.curve import build_basis
from flagstone.lattice import ReducedLattice, lll_reduce

pytest_plugins = flagstone.fixtures.__name__

DATA = Path(__file__).parent / "data"


@pytest.fixture(scope="session")
def solutions_path() -> Path:
    return DATA / "large_solutions.txt"


@pytest.fixture(scope="session")
def large_solutions(solutions_path: Path) -> list[tuple[int, int, int, int]]:
    rows = []
    for line in solutions_path.read_text().splitlines():
        if line and not line.startswith("#"):
            d, x, y, z = (int(p) for p in line.split())
            rows.append((d, x, y, z))
    return rows


@pytest.fixture(scope="session")
def worked_reduction(worked_example: flagstone.SearchWindow) -> ReducedLattice:
    return lll_reduce(build_basis(worked_example))


# a unimodular reduction matrix for the worked example
REFERENCE_M = ((-15, -74, -313), (-47, -230, -976), (-48, -235, -997))
