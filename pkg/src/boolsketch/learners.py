"""Learning sparse polynomials from uniform random samples.

Both learners run the same two stages:

1. support identification: look only at the samples where the observed value
   is (close to) its maximum. If the maximum pins down a single sign pattern
   of the hidden parities, every hidden parity vector p solves ``Y p = 1`` or
   ``Y p = 0`` for the GF(2) image ``Y`` of those samples, and with enough
   rows there are few solutions overall;
2. L1 recovery restricted to those candidates on fresh samples.
"""

from __future__ import annotations

import logging
import time
from dataclasses import dataclass, field, replace
from typing import Optional

from . import gf2
from .errors import Infeasible, LearnFailed, SolutionCountExceeded
from .fourier import SparsePolynomial, q_map
from .recovery import CandidateSet, basis_pursuit, bpdn, build_design
from .sampling import MaxWindow, NoiseSpec, SampleOracle, collect_max_rows, max_cluster

__all__ = [
    "LearnConfig",
    "LearnOutcome",
    "candidate_support",
    "learn_bool",
    "learn_bool_noisy",
]

log = logging.getLogger(__name__)


@dataclass(frozen=True)
class LearnConfig:
    """Learner parameters; ``None`` sample counts take their defaults for the given n.

    Defaults: ``m1 = 2 n 2^s`` identification samples, ``m = 4096 n s^2``
    recovery samples, ``cap = 2^(s+2)`` solutions per GF(2) system.
    """

    s: int
    m1: Optional[int] = None
    m: Optional[int] = None
    cap: Optional[int] = None
    noise: Optional[NoiseSpec] = None
    retries: int = 1
    threshold: float = 1e-7

    def __post_init__(self):
        if self.s < 1:
            raise ValueError("s must be >= 1")
        for name in ("m1", "m", "cap"):
            v = getattr(self, name)
            if v is not None and v < 1:
                raise ValueError(f"{name} must be >= 1")
        if self.retries < 0:
            raise ValueError("retries must be >= 0")

    def resolve(self, n: int) -> "LearnConfig":
        s = self.s
        return replace(
            self,
            m1=self.m1 if self.m1 is not None else 2 * n * 2**s,
            m=self.m if self.m is not None else 4096 * n * s * s,
            cap=self.cap if self.cap is not None else 2 ** (s + 2),
        )


@dataclass
class LearnOutcome:
    v_opt: SparsePolynomial
    candidates: CandidateSet
    diagnostics: dict = field(default_factory=dict)

    def to_json(self) -> dict:
        return {
            "polynomial": self.v_opt.to_json(),
            "candidates": self.candidates.to_json(),
            "diagnostics": self.diagnostics,
        }


def candidate_support(window: MaxWindow, cap: int) -> CandidateSet:
    """All parities constant (+1 or -1) across the rows of ``window``.

    These are the solutions of ``Y p = 0`` and ``Y p = 1`` with ``Y`` the
    GF(2) image of the window rows. The empty parity always solves the
    first system. Raises `SolutionCountExceeded` if either system has more
    than ``cap`` solutions.
    """
    if window.n_max == 0:
        raise ValueError("empty window")
    n = window.X_max.shape[1]
    Y = gf2.BitMatrix.from_array(q_map(window.X_max))
    ones = (1 << Y.nrows) - 1
    sols = gf2.solve_affine_all(Y, ones, cap) + gf2.solve_affine_all(Y, 0, cap)
    return CandidateSet.canonical(n, sols)


def _identify(oracle: SampleOracle, cfg: LearnConfig, cluster_radius: Optional[tuple], diag: dict):
    m1 = cfg.m1
    last = None
    for attempt in range(cfg.retries + 1):
        batch = oracle.draw_batch(m1)
        if cluster_radius is None:
            window = collect_max_rows(batch)
        else:
            window = max_cluster(batch, *cluster_radius)
        diag.update(
            attempts=attempt + 1,
            m1_used=m1,
            n_max=window.n_max,
            eta=window.eta,
            rank_Y=gf2.rank(q_map(window.X_max)),
        )
        try:
            return candidate_support(window, cfg.cap)
        except SolutionCountExceeded as e:
            log.info("identification attempt %d: %s (n_max=%d)", attempt + 1, e, window.n_max)
            last = e
            m1 *= 2
    raise LearnFailed("candidate_support", last)


def _run(oracle: SampleOracle, config: LearnConfig, noisy: bool) -> LearnOutcome:
    cfg = config.resolve(oracle.n)
    diag: dict = {"n": oracle.n, "s": cfg.s, "cap": cfg.cap, "m": cfg.m}
    timing = {}
    radius = None
    if noisy:
        radius = (cfg.noise.epsilon, cfg.noise.nu)
        diag.update(epsilon=cfg.noise.epsilon, nu=cfg.noise.nu)

    t0 = time.perf_counter()
    cands = _identify(oracle, cfg, radius, diag)
    timing["identify"] = time.perf_counter() - t0
    diag["candidate_count"] = len(cands)

    batch = oracle.draw_batch(cfg.m)
    t0 = time.perf_counter()
    A = build_design(batch, cands)
    try:
        if noisy:
            res = bpdn(A, batch.y, cfg.noise.epsilon + cfg.noise.nu)
        else:
            res = basis_pursuit(A, batch.y)
    except Infeasible as e:
        raise LearnFailed("recovery", e) from e
    timing["recover"] = time.perf_counter() - t0
    diag.update(solver=res.solver, solver_status=res.status, residual=res.residual, objective=res.objective)
    diag["samples_total"] = oracle.queries
    diag["timing"] = timing

    v_opt = res.polynomial(cands, threshold=0.0 if noisy else cfg.threshold)
    return LearnOutcome(v_opt, cands, diag)


def learn_bool(oracle: SampleOracle, config: LearnConfig) -> LearnOutcome:
    """Exact learner for noiseless samples of an s-sparse polynomial.

    Succeeds with high probability when the maximum of f is reached by a
    single sign pattern of its parities (for instance: coefficients in
    general position, independent parities, or all coefficients positive).
    Identification failures get ``config.retries`` fresh attempts, each with
    twice the previous m1. Raises `LearnFailed` tagged with the stage.
    """
    return _run(oracle, config, noisy=False)


def learn_bool_noisy(oracle: SampleOracle, config: LearnConfig) -> LearnOutcome:
    """Learner for approximately sparse f under bounded noise.

    ``config.noise`` must carry epsilon and nu. The max window keeps every
    row within ``2 (epsilon + nu)`` of the top value and the recovery is the
    denoising program with radius ``epsilon + nu``. The returned polynomial
    is the raw minimizer, not thresholded.
    """
    if config.noise is None:
        raise ValueError("learn_bool_noisy needs config.noise with epsilon and nu")
    return _run(oracle, config, noisy=True)
