"""Large solutions of d = c·x³ + y³ + z³ by lattice reduction around the curve Y³ = 1 − cX³."""

from __future__ import annotations

from flagstone.curve import (
    Basis as Basis,
    CurveParams as CurveParams,
    Region as Region,
    SearchWindow as SearchWindow,
    build_basis as build_basis,
    build_window as build_window,
)
from flagstone.driver import (
    DriverConfig as DriverConfig,
    RunSummary as RunSummary,
    TrialSummary as TrialSummary,
    run_trial as run_trial,
    sample_window as sample_window,
    search as search,
)
from flagstone.lattice import ReducedLattice as ReducedLattice, lll_reduce as lll_reduce
from flagstone.pyramid import CandidateVector as CandidateVector, enumerate_candidates as enumerate_candidates
from flagstone.verifier import (
    Solution as Solution,
    SolutionRecord as SolutionRecord,
    TargetSet as TargetSet,
    canonicalize as canonicalize,
    residue_admissible as residue_admissible,
)

__version__ = "0.1.0"
