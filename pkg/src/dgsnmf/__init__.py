"""Data-guided sparse NMF for hyperspectral unmixing."""

from .core import DgMap, FactorPair, HyperCube, SolverConfig, validate_cube
from .dgmap import (
    build_matting_laplacian,
    constant_dgmap,
    estimate_dgmap,
    fine_tune,
    initial_dgmap,
    rescale,
)
from .metrics import EvalReport, evaluate, hoyer_sparsity_map, match_endmembers, rmse, sad
from .synth import SceneSpec, generate
from .unmix import Regularizer, RunTrace, initialize_factors, objective, run

__version__ = "0.1.0"

__all__ = [
    "DgMap", "EvalReport", "FactorPair", "HyperCube", "Regularizer", "RunTrace",
    "SceneSpec", "SolverConfig", "build_matting_laplacian", "constant_dgmap",
    "estimate_dgmap", "evaluate", "fine_tune", "generate", "hoyer_sparsity_map",
    "initial_dgmap", "initialize_factors", "match_endmembers", "objective", "rescale",
    "rmse", "run", "sad", "validate_cube",
]
