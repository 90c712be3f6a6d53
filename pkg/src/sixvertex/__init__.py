"""Stochastic six-vertex model: weights and phases, exact sums, sampling,
restriction, regularity statistics and the frame extension."""
from .errors import ExtensionError, SixVertexError
from .lattice import (BoundaryData, Ensemble, PathEnsemble, Rect, boundary_of, from_paths,
                      read_ensemble, to_paths, validate, write_ensemble)
from .sampler import DoubleSidedBernoulli, Explicit, SamplerSpec, sample, sample_many
from .weights import SlopePair, StochasticParams, WeightSystem

__version__ = "0.1.0"
