"""L1 recovery restricted to a candidate family of parities.

Two programs over the design matrix ``A`` (rows: samples, columns: candidate
parities):

* basis pursuit, ``min ||b||_1  s.t.  A b = y``, solved as a linear program
  on the split ``b = b+ - b-``;
* basis pursuit denoising, ``min ||b||_1  s.t.  sqrt(1/m) ||A b - y||_2 <= delta``,
  solved by following the exact LASSO homotopy path down to the point where
  the residual norm reaches the constraint radius.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass, field

import numpy as np
from scipy.optimize import linprog
from sklearn.exceptions import ConvergenceWarning
from sklearn.linear_model import lars_path

from .errors import DimensionMismatch, Infeasible
from .fourier import SparsePolynomial, parity_columns, parity_indices, set_key
from .sampling import SampleBatch

__all__ = [
    "CandidateSet",
    "RecoveryResult",
    "build_design",
    "basis_pursuit",
    "bpdn",
]

EQ_TOL = 1e-8
BPDN_SLACK = 1e-6


@dataclass(frozen=True)
class CandidateSet:
    """Ordered family of distinct parity masks over n coordinates."""

    n: int
    sets: tuple = ()

    def __post_init__(self):
        sets = tuple(int(S) for S in self.sets)
        if len(set(sets)) != len(sets):
            raise ValueError("candidate parity sets must be distinct")
        if any(S < 0 or S.bit_length() > self.n for S in sets):
            raise DimensionMismatch(f"candidate set does not fit n={self.n}")
        object.__setattr__(self, "sets", sets)

    @classmethod
    def canonical(cls, n: int, sets) -> "CandidateSet":
        """Deduplicated and sorted into canonical parity order."""
        return cls(n, tuple(sorted(set(int(S) for S in sets), key=set_key)))

    def __len__(self):
        return len(self.sets)

    def __iter__(self):
        return iter(self.sets)

    def __contains__(self, S):
        return S in self.sets

    def to_json(self) -> list:
        return [list(parity_indices(S, True)) for S in self.sets]


@dataclass
class RecoveryResult:
    beta: np.ndarray
    objective: float
    residual: float
    tolerance: float
    status: str
    solver: str
    info: dict = field(default_factory=dict)

    def polynomial(self, candidates: CandidateSet, threshold: float = 0.0) -> SparsePolynomial:
        """Terms of ``beta`` with magnitude above ``threshold``."""
        return SparsePolynomial(
            candidates.n,
            {S: b for S, b in zip(candidates.sets, self.beta) if abs(b) > threshold},
        )

    def to_json(self, candidates: CandidateSet | None = None) -> dict:
        out = {
            "beta": [float(b) for b in self.beta],
            "objective": self.objective,
            "residual": self.residual,
            "tolerance": self.tolerance,
            "status": self.status,
            "solver": self.solver,
        }
        if candidates is not None:
            out["candidates"] = candidates.to_json()
        return out


def build_design(samples, candidates) -> np.ndarray:
    """Float matrix with entry (i, j) = chi_{S_j}(x_i)."""
    X = samples.X if isinstance(samples, SampleBatch) else np.asarray(samples)
    sets = candidates.sets if isinstance(candidates, CandidateSet) else list(candidates)
    if isinstance(candidates, CandidateSet) and X.shape[1] != candidates.n:
        raise DimensionMismatch(f"samples have {X.shape[1]} coordinates, candidates have n={candidates.n}")
    return parity_columns(X, sets).astype(float)


def _check_problem(A, y):
    A = np.asarray(A, dtype=float)
    y = np.asarray(y, dtype=float).ravel()
    if A.ndim != 2:
        raise DimensionMismatch("design must be 2-d")
    m, p = A.shape
    if m < 1 or p < 1:
        raise ValueError("design needs at least one row and one column")
    if y.shape[0] != m:
        raise DimensionMismatch(f"y has length {y.shape[0]}, design has {m} rows")
    return A, y


def _scaled_residual(A, beta, y) -> float:
    return float(np.linalg.norm(A @ beta - y) / np.sqrt(A.shape[0]))


def basis_pursuit(A, y, tol: float = EQ_TOL) -> RecoveryResult:
    """Minimum-L1 exact solution of ``A b = y``.

    Raises `Infeasible` when ``y`` is outside the column span (beyond
    ``tol * (1 + ||y||)``).
    """
    A, y = _check_problem(A, y)
    m, p = A.shape
    ynorm = float(np.linalg.norm(y))
    bound = tol * (1.0 + ynorm)

    ls, *_ = np.linalg.lstsq(A, y, rcond=None)
    if np.linalg.norm(A @ ls - y) > bound:
        raise Infeasible("y is not in the span of the candidate columns")
    if ynorm == 0.0:
        beta = np.zeros(p)
        return RecoveryResult(beta, 0.0, 0.0, bound / np.sqrt(m), "feasible", "trivial")

    res = linprog(
        np.ones(2 * p),
        A_eq=np.hstack([A, -A]),
        b_eq=y,
        bounds=(0, None),
        method="highs",
    )
    if res.status == 2:
        raise Infeasible(res.message)
    if res.status != 0:
        raise RuntimeError(f"LP solver failed: {res.message}")
    beta = res.x[:p] - res.x[p:]

    # The LP optimum is a vertex: the nonzeros sit on independent columns and
    # solve A_T b_T = y exactly, so a least-squares re-solve on that support
    # removes the solver's feasibility slack without moving the optimum.
    big = np.abs(beta) > 1e-10 * max(1.0, float(np.abs(beta).max()))
    if big.any():
        sub, *_ = np.linalg.lstsq(A[:, big], y, rcond=None)
        if np.all(np.sign(sub) == np.sign(beta[big])):
            polished = np.zeros(p)
            polished[big] = sub
            if np.linalg.norm(A @ polished - y) <= np.linalg.norm(A @ beta - y):
                beta = polished

    viol = float(np.linalg.norm(A @ beta - y))
    if viol > bound:
        raise Infeasible(f"constraint violation {viol:.3g} exceeds {bound:.3g}")
    return RecoveryResult(
        beta,
        float(np.abs(beta).sum()),
        viol / np.sqrt(m),
        bound / np.sqrt(m),
        "feasible",
        "highs-lp",
    )


def bpdn(A, y, delta: float) -> RecoveryResult:
    """Minimum-L1 ``b`` with ``sqrt(1/m) ||A b - y||_2 <= delta``.

    ``delta = 0`` is the exact program and defers to `basis_pursuit`.
    Otherwise the LASSO path is traced with LARS; it is piecewise linear in
    the penalty and its residual norm shrinks monotonically along it, so the
    optimum is found by solving a quadratic on the segment where the residual
    crosses ``sqrt(m) * delta``.
    """
    if delta < 0:
        raise ValueError("delta must be non-negative")
    A, y = _check_problem(A, y)
    m, p = A.shape
    if delta == 0:
        return basis_pursuit(A, y)

    target = np.sqrt(m) * delta
    ynorm = float(np.linalg.norm(y))
    if ynorm <= target:
        return RecoveryResult(np.zeros(p), 0.0, ynorm / np.sqrt(m), delta, "feasible", "trivial")

    with warnings.catch_warnings():
        warnings.simplefilter("ignore", ConvergenceWarning)
        alphas, _, coefs = lars_path(A, y, method="lasso", alpha_min=0.0, max_iter=20 * p + 100)
    res_norms = np.linalg.norm(y[:, None] - A @ coefs, axis=0)
    hits = np.flatnonzero(res_norms <= target)
    if hits.size == 0:
        ls, *_ = np.linalg.lstsq(A, y, rcond=None)
        best = float(np.linalg.norm(A @ ls - y))
        if best > target:
            raise Infeasible(
                f"distance from y to the column span is {best / np.sqrt(m):.6g} > delta={delta:.6g}"
            )
        raise RuntimeError("LASSO homotopy stopped before reaching the constraint radius")

    k = int(hits[0])
    w0, w1 = coefs[:, k - 1], coefs[:, k]
    r0 = y - A @ w0
    d = A @ (w1 - w0)
    a = float(d @ d)
    b = float(r0 @ d)
    c = float(r0 @ r0) - target**2
    if a == 0.0:
        t = 1.0
    else:
        disc = max(b * b - a * c, 0.0)
        t = float(np.clip((b - np.sqrt(disc)) / a, 0.0, 1.0))
    beta = w0 + t * (w1 - w0)
    resid = _scaled_residual(A, beta, y)
    if resid > delta * (1 + BPDN_SLACK):
        # Rounding pushed us just outside; the knot at t=1 is feasible.
        beta = w1
        resid = _scaled_residual(A, beta, y)
    return RecoveryResult(
        beta,
        float(np.abs(beta).sum()),
        resid,
        delta,
        "feasible",
        "lars-homotopy",
        {"knot": k, "alpha": float(alphas[k - 1] + t * (alphas[k] - alphas[k - 1]))},
    )
