"""Learning sparse polynomials over {-1,+1}^n from random samples, and
recovering sparse hypergraphs from random cut queries."""

from types import ModuleType

from .errors import (
    AmbiguousHypergraph,
    BoolSketchError,
    ComponentTooLarge,
    DimensionMismatch,
    GridAmbiguous,
    Infeasible,
    LearnFailed,
    MalformedLine,
    NoConsistentHypergraph,
    SolutionCountExceeded,
)
from .fourier import (
    SparsePolynomial,
    brute_force_wht,
    eval_poly,
    has_unique_sign_property,
    is_general_position,
    is_mu_separated,
    parity_indices,
    parity_mask,
    q_inv,
    q_map,
    truth_table,
)
from .generators import (
    CONDITIONS,
    planted_polynomial,
    random_hypergraph,
    random_parities,
    separated_polynomial,
    tail_polynomial,
)
from .gf2 import BitMatrix, nullspace, rank, solve_affine_all
from .hypergraph import (
    Hypergraph,
    SketchResult,
    c_cut_polynomial,
    c_cut_value,
    cut_oracle,
    edges_from_polynomial,
    learn_graph,
)
from .ingest import (
    MessageRecord,
    SynthParams,
    WindowSpec,
    build_window_hypergraph,
    parse_log,
    synth_log,
)
from .learners import LearnConfig, LearnOutcome, learn_bool, learn_bool_noisy
from .recovery import CandidateSet, basis_pursuit, bpdn, build_design
from .sampling import NoiseSpec, SampleBatch, SampleOracle, polynomial_oracle

__version__ = "0.1.0"

__all__ = [k for k, v in dict(globals()).items() if not k.startswith("_") and not isinstance(v, ModuleType)]
