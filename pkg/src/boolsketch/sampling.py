"""Uniform sampling of the cube, labeled-sample oracles and max-value windows.

Randomness comes from numpy's PCG64 seeded through `numpy.random.SeedSequence`.
An oracle owns one seed sequence and spawns a fresh child for every batch it
draws, so batch ``k`` of an oracle seeded with ``seed`` is always the same
regardless of what was drawn before it or how large earlier batches were.
"""

from __future__ import annotations

import csv
import io
from dataclasses import dataclass
from typing import Callable, Optional

import numpy as np

from .errors import DimensionMismatch, LearnFailed
from .fourier import SparsePolynomial

__all__ = [
    "LabeledSample",
    "SampleBatch",
    "NoiseSpec",
    "SampleOracle",
    "ReplayOracle",
    "polynomial_oracle",
    "uniform_points",
    "draw_batch",
    "MaxWindow",
    "collect_max_rows",
    "max_cluster",
]


@dataclass(frozen=True)
class LabeledSample:
    point: np.ndarray
    value: float


@dataclass(frozen=True)
class SampleBatch:
    """``m`` labeled samples: int8 sign matrix ``X`` (m x n) and values ``y``."""

    X: np.ndarray
    y: np.ndarray

    def __post_init__(self):
        if self.X.ndim != 2 or self.y.ndim != 1 or self.X.shape[0] != self.y.shape[0]:
            raise DimensionMismatch("X must be m x n and y must have length m")

    def __len__(self):
        return self.X.shape[0]

    @property
    def n(self) -> int:
        return self.X.shape[1]

    def __getitem__(self, i) -> LabeledSample:
        return LabeledSample(self.X[i].copy(), float(self.y[i]))

    def samples(self) -> list[LabeledSample]:
        return [self[i] for i in range(len(self))]

    def concat(self, other: "SampleBatch") -> "SampleBatch":
        return SampleBatch(np.concatenate([self.X, other.X]), np.concatenate([self.y, other.y]))

    def to_csv(self, fh=None) -> Optional[str]:
        """Write ``x1..xn,value`` rows; returns the text when ``fh`` is None."""
        out = fh if fh is not None else io.StringIO()
        w = csv.writer(out, lineterminator="\n")
        w.writerow([f"x{j + 1}" for j in range(self.n)] + ["value"])
        for x, v in zip(self.X, self.y):
            w.writerow([int(t) for t in x] + [repr(float(v))])
        return out.getvalue() if fh is None else None

    @classmethod
    def from_csv(cls, fh) -> "SampleBatch":
        if isinstance(fh, str):
            fh = io.StringIO(fh)
        rows = list(csv.reader(fh))
        if not rows:
            raise ValueError("empty sample file")
        header, body = rows[0], rows[1:]
        n = len(header) - 1
        X = np.empty((len(body), n), dtype=np.int8)
        y = np.empty(len(body))
        for i, row in enumerate(body):
            if len(row) != n + 1:
                raise ValueError(f"row {i + 2} has {len(row)} fields, expected {n + 1}")
            X[i] = [int(t) for t in row[:n]]
            y[i] = float(row[n])
        if X.size and not np.isin(X, (-1, 1)).all():
            raise ValueError("sign columns must hold -1 or +1")
        return cls(X, y)


@dataclass(frozen=True)
class NoiseSpec:
    """Observation model ``y = f1(x) + tail(x) + e`` with ``|e| <= epsilon``.

    ``nu`` bounds the L1 norm of ``tail``, whose parity sets must not overlap
    those of the main polynomial (checked by `polynomial_oracle`).
    """

    epsilon: float = 0.0
    nu: float = 0.0
    tail: Optional[SparsePolynomial] = None

    def __post_init__(self):
        if self.epsilon < 0 or self.nu < 0:
            raise ValueError("epsilon and nu must be non-negative")
        if self.tail is not None and self.tail.sparsity and not self.tail.l1_norm() < self.nu:
            raise ValueError(f"tail L1 norm {self.tail.l1_norm():g} is not below nu={self.nu:g}")

    @property
    def radius(self) -> float:
        return self.epsilon + self.nu


def uniform_points(rng: np.random.Generator, m: int, n: int) -> np.ndarray:
    """``m`` independent uniform points of {-1,+1}^n as an int8 matrix."""
    nbytes = (n + 7) // 8
    raw = rng.integers(0, 256, size=(m, nbytes), dtype=np.uint8)
    bits = np.unpackbits(raw, axis=1, count=n, bitorder="little")
    X = bits.view(np.int8)
    X *= -2
    X += 1
    return X


Perturbation = Callable[[np.random.Generator, np.ndarray, np.ndarray], np.ndarray]


class SampleOracle:
    """Draws labeled samples ``(x, value(x) + noise)`` with ``x`` uniform.

    ``func`` maps an (m x n) sign matrix to m clean values. ``perturb``
    replaces the default uniform [-epsilon, epsilon] noise; it receives the
    batch generator, the points and their clean values.
    """

    def __init__(
        self,
        n: int,
        func: Callable[[np.ndarray], np.ndarray],
        *,
        epsilon: float = 0.0,
        perturb: Optional[Perturbation] = None,
        seed=None,
    ):
        if n < 0:
            raise ValueError("n must be non-negative")
        if epsilon < 0:
            raise ValueError("epsilon must be non-negative")
        self.n = n
        self.func = func
        self.epsilon = epsilon
        self.perturb = perturb
        self._seq = seed if isinstance(seed, np.random.SeedSequence) else np.random.SeedSequence(seed)
        self.queries = 0

    def _label(self, rng, X) -> np.ndarray:
        y = np.asarray(self.func(X), dtype=float)
        if self.perturb is not None:
            e = np.asarray(self.perturb(rng, X, y), dtype=float)
            if np.any(np.abs(e) > self.epsilon):
                raise ValueError("perturbation exceeds the epsilon bound")
            y = y + e
        elif self.epsilon > 0:
            y = y + rng.uniform(-self.epsilon, self.epsilon, size=y.shape[0])
        return y

    def draw_batch(self, m: int, rng: Optional[np.random.Generator] = None) -> SampleBatch:
        if m < 1:
            raise ValueError("batch size must be >= 1")
        if rng is None:
            rng = np.random.default_rng(self._seq.spawn(1)[0])
        X = uniform_points(rng, m, self.n)
        self.queries += m
        return SampleBatch(X, self._label(rng, X))

    def draw(self) -> LabeledSample:
        return self.draw_batch(1)[0]


class ReplayOracle(SampleOracle):
    """Serves the rows of a recorded batch in order, each at most once."""

    def __init__(self, batch: SampleBatch):
        super().__init__(batch.n, lambda X: X, seed=0)
        self.batch = batch
        self.pos = 0

    def draw_batch(self, m: int, rng=None) -> SampleBatch:
        if m < 1:
            raise ValueError("batch size must be >= 1")
        end = self.pos + m
        if end > len(self.batch):
            raise LearnFailed(
                "sampling", f"sample file has {len(self.batch)} rows, {end} were requested"
            )
        out = SampleBatch(self.batch.X[self.pos : end], self.batch.y[self.pos : end])
        self.pos = end
        self.queries += m
        return out


def polynomial_oracle(
    f: SparsePolynomial,
    noise: Optional[NoiseSpec] = None,
    *,
    seed=None,
    perturb: Optional[Perturbation] = None,
) -> SampleOracle:
    """Oracle for ``f`` plus the tail and bounded noise described by ``noise``."""
    if noise is None or noise.tail is None or not noise.tail.sparsity:
        func = f.evaluate
    else:
        tail = noise.tail
        if tail.n != f.n:
            raise DimensionMismatch("tail and main polynomial differ in n")
        if set(tail.terms) & set(f.terms):
            raise ValueError("tail shares parity sets with the main polynomial")

        def func(X):
            return f.evaluate(X) + tail.evaluate(X)

    eps = noise.epsilon if noise is not None else 0.0
    return SampleOracle(f.n, func, epsilon=eps, perturb=perturb, seed=seed)


def draw_batch(oracle: SampleOracle, m: int, seed=None) -> SampleBatch:
    """``m`` i.i.d. samples; with ``seed`` set, independent of the oracle's own stream."""
    rng = np.random.default_rng(seed) if seed is not None else None
    return oracle.draw_batch(m, rng)


@dataclass(frozen=True)
class MaxWindow:
    """Rows of a batch whose values sit at (or near) the observed maximum."""

    X_max: np.ndarray
    eta: float
    rows: np.ndarray
    values: np.ndarray

    @property
    def n_max(self) -> int:
        return self.X_max.shape[0]


def _window(batch: SampleBatch, keep: np.ndarray, eta: float) -> MaxWindow:
    rows = np.flatnonzero(keep)
    return MaxWindow(batch.X[rows], float(eta), rows, batch.y[rows])


def collect_max_rows(batch: SampleBatch) -> MaxWindow:
    """Rows whose value equals the batch maximum exactly."""
    if len(batch) == 0:
        raise ValueError("empty batch")
    eta = batch.y.max()
    return _window(batch, batch.y == eta, eta)


def max_cluster(batch: SampleBatch, epsilon: float, nu: float) -> MaxWindow:
    """Rows within ``2 (epsilon + nu)`` below the batch maximum."""
    if epsilon + nu < 0:
        raise ValueError("epsilon + nu must be non-negative")
    if len(batch) == 0:
        raise ValueError("empty batch")
    eta = batch.y.max()
    return _window(batch, batch.y >= eta - 2.0 * (epsilon + nu), eta)
