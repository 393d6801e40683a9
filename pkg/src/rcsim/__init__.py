"""Random quantum circuits: amplitude simulators and heavy-output statistics."""
from .backends import BACKENDS, amplitude
from .core import BasisState, Circuit, Gate, GridLayout, LayeredCircuit, StateVector, layering, slice_layers
from .dense import ProbList, amplitude_dense, evolve, prob_list, sample_outputs
from .ensembles import EnsembleSpec, haar_state, haar_unitary, sample, sample_mu_general, sample_mu_grid, sample_nu_grid
from .errors import CircuitError, LimitExceeded, RcsimError, SamplingError
from .gridcut import amplitude_gridcut, find_cut
from .hog import (HogInstance, HogVerdict, absorb_not_gates, adv_state, dev_state, hog_generate,
                  hog_verify, is_heavy, median_prob, uphalf)
from .paths import amplitude_paths
from .recursive import amplitude_hybrid, amplitude_savitch, amplitude_tradeoff
from .rng import RngStream

__version__ = "0.1.0"
