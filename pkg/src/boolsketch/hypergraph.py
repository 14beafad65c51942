"""Hypergraph sketching from random c-cut queries.

A c-cut query assigns every vertex a sign and returns the number of
hyperedges that are monochromatic, i.e. the edge count minus the cut value.
As a function of the signs this is the sparse polynomial

    sum over edges I, over even J subset of I:  2^(1-|I|) chi_J(x)

with only positive coefficients, so its maximum (all edges monochromatic)
is reached by a single sign pattern of its parities.
"""

from __future__ import annotations

import itertools
import logging
import math
import time
from dataclasses import dataclass, field
from typing import Iterable, Optional

import numpy as np

from .errors import (
    AmbiguousHypergraph,
    ComponentTooLarge,
    DimensionMismatch,
    GridAmbiguous,
    LearnFailed,
    NoConsistentHypergraph,
)
from .fourier import SparsePolynomial, parity_indices
from .sampling import SampleBatch, SampleOracle

__all__ = [
    "Hypergraph",
    "SketchResult",
    "c_cut_value",
    "c_cut_values",
    "c_cut_polynomial",
    "cut_oracle",
    "estimate_d",
    "column_groups",
    "round_to_grid",
    "default_m1",
    "learn_graph",
    "edges_from_polynomial",
]

log = logging.getLogger(__name__)

MAX_EDGE_SIZE = 20
DEFAULT_K_CAP = 24


@dataclass(frozen=True)
class Hypergraph:
    """Simple hypergraph on vertices ``0..n-1``; every edge has >= 2 vertices."""

    n: int
    edges: frozenset = frozenset()

    def __post_init__(self):
        edges = frozenset(frozenset(int(v) for v in e) for e in self.edges)
        for e in edges:
            if len(e) < 2:
                raise ValueError(f"edge {sorted(e)} has fewer than 2 vertices")
            if min(e) < 0 or max(e) >= self.n:
                raise DimensionMismatch(f"edge {sorted(e)} has a vertex outside 0..{self.n - 1}")
        object.__setattr__(self, "edges", edges)

    @classmethod
    def from_edges(cls, n: int, edges: Iterable[Iterable[int]], one_based: bool = False) -> "Hypergraph":
        off = 1 if one_based else 0
        return cls(n, frozenset(frozenset(int(v) - off for v in e) for e in edges))

    @property
    def s(self) -> int:
        return len(self.edges)

    @property
    def d(self) -> int:
        return max((len(e) for e in self.edges), default=0)

    @property
    def relevant(self) -> frozenset:
        return frozenset().union(*self.edges) if self.edges else frozenset()

    @property
    def k(self) -> int:
        return len(self.relevant)

    def edge_list(self, one_based: bool = False) -> list[list[int]]:
        off = 1 if one_based else 0
        return sorted((sorted(v + off for v in e) for e in self.edges), key=lambda e: (len(e), e))

    def to_json(self) -> dict:
        return {"n": self.n, "edges": self.edge_list(one_based=True)}

    @classmethod
    def from_json(cls, obj) -> "Hypergraph":
        return cls.from_edges(int(obj["n"]), obj["edges"], one_based=True)


def c_cut_values(G: Hypergraph, X) -> np.ndarray:
    """Number of monochromatic edges under each row of the sign matrix ``X``."""
    X = np.asarray(X)
    if X.ndim != 2 or X.shape[1] != G.n:
        raise DimensionMismatch(f"samples must be m x {G.n}")
    out = np.zeros(X.shape[0], dtype=np.int64)
    for e in G.edges:
        cols = X[:, sorted(e)]
        out += (cols.min(axis=1) == cols.max(axis=1))
    return out


def c_cut_value(G: Hypergraph, x) -> int:
    x = np.asarray(x)
    if x.ndim != 1:
        raise DimensionMismatch("a point must be a 1-d vector")
    return int(c_cut_values(G, x[None, :])[0])


def _even_subsets(mask: int, max_size: Optional[int] = None, include_empty: bool = True):
    bits = [1 << j for j in parity_indices(mask)]
    top = len(bits) if max_size is None else min(max_size, len(bits))
    for size in range(0 if include_empty else 2, top + 1, 2):
        for combo in itertools.combinations(bits, size):
            yield sum(combo)


def c_cut_polynomial(G: Hypergraph) -> SparsePolynomial:
    """Multilinear expansion of the c-cut function of ``G``."""
    if G.d > MAX_EDGE_SIZE:
        raise ValueError(f"edge of size {G.d} exceeds the {MAX_EDGE_SIZE}-vertex limit")
    acc: dict[int, float] = {}
    for e in G.edges:
        w = 2.0 ** (1 - len(e))
        mask = sum(1 << v for v in e)
        for J in _even_subsets(mask):
            acc[J] = acc.get(J, 0.0) + w
    return SparsePolynomial(G.n, acc)


def cut_oracle(G: Hypergraph, seed=None) -> SampleOracle:
    """Noiseless c-cut query oracle on uniformly random sign assignments."""
    return SampleOracle(G.n, lambda X: c_cut_values(G, X).astype(float), seed=seed)


def estimate_d(R, n_max: Optional[int] = None) -> int:
    """max_i |{j : R(i,j) = max_j R(i,j)}| for the Gram matrix ``R`` of the max rows.

    With ``n_max`` given, the diagonal must equal it. Empty input gives 1.
    """
    R = np.asarray(R)
    if R.ndim != 2 or R.size == 0:
        return 1
    if n_max is not None and np.any(np.diag(R) != n_max):
        raise ValueError("R is not a Gram matrix of n_max sign rows")
    top = R.max(axis=1, keepdims=True)
    return int((R == top).sum(axis=1).max())


def _column_classes(X_max) -> tuple[np.ndarray, np.ndarray]:
    """Label each column of ``X_max`` by its identical-column class; also class sizes."""
    X_max = np.asarray(X_max)
    n = X_max.shape[1]
    if X_max.shape[0] == 0:
        return np.zeros(n, dtype=np.int64), np.array([n])
    packed = np.ascontiguousarray(np.packbits(X_max < 0, axis=0).T)
    keys = packed.view(np.dtype((np.void, packed.shape[1]))).ravel()
    _, labels, counts = np.unique(keys, return_inverse=True, return_counts=True)
    return labels.ravel(), counts


def column_groups(X_max, min_size: int = 2) -> list[np.ndarray]:
    """Classes of identical columns of ``X_max`` with at least ``min_size`` members.

    Column j is in the class of column i iff R(i,j) = n_max for
    R = X_max^T X_max, so the largest class size is `estimate_d` of R. This
    costs O(n n_max) instead of the O(n^2 n_max) of forming R.
    """
    labels, counts = _column_classes(X_max)
    return [np.flatnonzero(labels == c) for c in np.flatnonzero(counts >= min_size)]


def round_to_grid(v: float, d: int) -> float:
    """Nearest multiple of 2^-d, ties away from zero."""
    if d > 30:
        raise ValueError("d must be <= 30")
    scale = 2.0**d
    return math.copysign(math.floor(abs(v) * scale + 0.5), v) / scale


def _grid_ambiguous(v: float, d: int, band: float) -> bool:
    frac = abs(v) * 2.0**d % 1.0
    return abs(frac - 0.5) < band


def default_m1(n: int, s: int, d: int, k: int, c: float = 8.0) -> int:
    """max(c 2^k d log n, c 2^(2d+1) s^2 (log n + k)), natural log, log n >= 1."""
    ln = max(math.log(n), 1.0)
    return int(math.ceil(max(c * 2.0**k * d * ln, c * 2.0 ** (2 * d + 1) * s * s * (ln + k))))


@dataclass
class SketchResult:
    """Learned c-cut polynomial and its hypergraph.

    ``edges`` is None when several hypergraphs share the learned polynomial;
    they are listed under ``diagnostics["edge_candidates"]``.
    """

    c0: float
    coefficients: dict
    polynomial: SparsePolynomial
    edges: Optional[Hypergraph]
    d_est: int
    diagnostics: dict = field(default_factory=dict)

    def to_json(self) -> dict:
        return {
            "c0": self.c0,
            "polynomial": self.polynomial.to_json(),
            "edges": None if self.edges is None else self.edges.to_json(),
            "d_est": self.d_est,
            "diagnostics": self.diagnostics,
        }


class _Sampler:
    """Accumulates oracle batches and times the oracle separately."""

    def __init__(self, oracle: SampleOracle):
        self.oracle = oracle
        self.batch: Optional[SampleBatch] = None
        self.seconds = 0.0

    def __len__(self):
        return 0 if self.batch is None else len(self.batch)

    def extend_to(self, m: int):
        extra = m - len(self)
        if extra <= 0:
            return
        t0 = time.perf_counter()
        more = self.oracle.draw_batch(extra)
        self.batch = more if self.batch is None else self.batch.concat(more)
        self.seconds += time.perf_counter() - t0


def learn_graph(
    oracle: SampleOracle,
    s: int,
    d_hint: Optional[int] = None,
    *,
    m1: Optional[int] = None,
    c: float = 8.0,
    k_cap: int = DEFAULT_K_CAP,
    max_samples: int = 4_000_000,
    pilot: int = 1024,
    ambiguity_band: float = 0.1,
    max_doublings: int = 2,
    audit: bool = False,
) -> SketchResult:
    """Recover a hypergraph with ``s`` edges from its c-cut oracle.

    With ``m1`` given, exactly ``m1`` queries are made and every step runs
    once; grid ambiguity raises `GridAmbiguous`. Without it the sample size
    is chosen adaptively: a pilot batch is grown until the top value ``s``
    has been seen often enough, the relevant-vertex count and max edge size
    are read off the max rows, and the batch is extended to the sample bound
    for those values (with k capped by s*d). Ambiguous roundings then double
    the batch up to ``max_doublings`` times.

    ``d_hint`` is an upper bound on the edge size; without it the size of
    the largest class of identical max-row columns is used.
    """
    n = oracle.n
    if s < 0:
        raise ValueError("s must be non-negative")
    ln = max(math.log(n), 1.0)
    sampler = _Sampler(oracle)
    diag: dict = {"n": n, "s": s, "d_hint": d_hint, "c": c}
    alg_seconds = 0.0

    if s == 0:
        sampler.extend_to(m1 or 64)
        if np.any(sampler.batch.y != 0):
            raise LearnFailed("sampling", "oracle returned nonzero values for s = 0")
        diag.update(m1=len(sampler), timing={"oracle": sampler.seconds, "algorithm": 0.0})
        empty = SparsePolynomial(n, {})
        return SketchResult(0.0, {}, empty, Hypergraph(n), 0, diag)

    def analyse():
        return _max_row_classes(sampler.batch)

    if m1 is not None:
        sampler.extend_to(m1)
        literal = True
    else:
        literal = False
        target = pilot
        rounds = 0
        while True:
            rounds += 1
            sampler.extend_to(target)
            t0 = time.perf_counter()
            cached = (len(sampler), analyse())
            eta, rows, comps, d_raw, k_obs = cached[1]
            alg_seconds += time.perf_counter() - t0
            d_use = d_hint if d_hint is not None else max(d_raw, 2)
            need_rows = c * d_use * ln
            if eta < s or len(rows) < need_rows:
                target = 2 * len(sampler)
            else:
                k = min(s * d_use, n, max(k_obs, 2))
                target = default_m1(n, s, d_use, k, c)
                if len(sampler) >= target:
                    break
            if target > max_samples:
                raise LearnFailed(
                    "sampling",
                    f"needs {target} queries, budget is {max_samples} "
                    f"(eta={eta:g}, n_max={len(rows)})",
                )
        diag["pilot_rounds"] = rounds

    doublings = 0
    if m1 is not None:
        cached = None
    while True:
        t0 = time.perf_counter()
        try:
            if cached is None or cached[0] != len(sampler):
                cached = (len(sampler), analyse())
            result = _correlate(sampler.batch, cached[1], d_hint, k_cap, ambiguity_band, diag, audit)
            alg_seconds += time.perf_counter() - t0
            break
        except GridAmbiguous:
            alg_seconds += time.perf_counter() - t0
            if literal or doublings >= max_doublings or 2 * len(sampler) > max_samples:
                raise
            doublings += 1
            log.info("grid ambiguity, doubling to %d samples", 2 * len(sampler))
            sampler.extend_to(2 * len(sampler))

    poly, c0, coeffs, d_est = result
    t0 = time.perf_counter()
    try:
        edges = edges_from_polynomial(poly, d_est, k_cap=k_cap)
    except AmbiguousHypergraph as e:
        # the c-cut function was learned; only the edge set is not identifiable
        edges = None
        diag["edge_candidates"] = [g.edge_list(one_based=True) for g in e.candidates or []]
    alg_seconds += time.perf_counter() - t0
    diag.update(
        m1=len(sampler),
        doublings=doublings,
        timing={"oracle": sampler.seconds, "algorithm": alg_seconds},
    )
    return SketchResult(c0, coeffs, poly, edges, d_est, diag)


def _max_row_classes(batch: SampleBatch, probe: int = 64):
    """Max rows of ``batch`` and the identical-column classes they induce.

    Classes are first formed on ``probe`` max rows, which can only merge
    columns that differ later; the few columns still sharing a class are then
    re-split on all max rows. The result equals grouping on all rows at
    O(n probe + k n_max) cost instead of O(n n_max).
    """
    y = batch.y
    eta = float(y.max())
    rows = np.flatnonzero(y == eta)
    labels, counts = _column_classes(batch.X[rows[:probe]])
    cand = np.arange(batch.n)
    if rows.size > probe:
        cand = np.flatnonzero(counts[labels] >= 2)
        if cand.size == 0:
            return eta, rows, [], 1, 0
        labels, counts = _column_classes(batch.X[np.ix_(rows, cand)])
    comps = [cand[labels == c] for c in np.flatnonzero(counts >= 2)]
    d_raw = max((len(g) for g in comps), default=1)
    return eta, rows, comps, d_raw, int(sum(len(g) for g in comps))


def _correlate(batch: SampleBatch, analysis, d_hint, k_cap, band, diag, audit):
    n = batch.n
    eta, rows, comps, d_raw, k_obs = analysis
    d_est = d_hint if d_hint is not None else d_raw
    diag.update(
        n_max=int(rows.size),
        eta=eta,
        d_raw=d_raw,
        d_est=d_est,
        k_obs=k_obs,
        components=[[int(v) + 1 for v in g] for g in comps],
    )
    if rows.size < 2:
        diag["degenerate"] = True
    if audit:
        Xm = batch.X[rows].astype(float)
        R = (Xm.T @ Xm).astype(np.int64)
        diag["R"] = R.tolist()
        diag["d_from_R"] = estimate_d(R)

    y = batch.y
    c0_raw = float(y.mean())
    if _grid_ambiguous(c0_raw, d_est, band):
        raise GridAmbiguous(frozenset(), c0_raw, 2**d_est)
    c0 = round_to_grid(c0_raw, d_est)
    resid = y - c0

    X = batch.X
    coeffs: dict[int, float] = {}
    count = 0
    for g in comps:
        if len(g) > k_cap:
            raise ComponentTooLarge(len(g), k_cap)
        mask = sum(1 << int(v) for v in g)
        for M in _even_subsets(mask, max_size=d_est, include_empty=False):
            idx = list(parity_indices(M))
            chi = np.prod(X[:, idx], axis=1, dtype=np.int8)
            v = float(resid @ chi) / len(y)
            count += 1
            if _grid_ambiguous(v, d_est, band):
                raise GridAmbiguous(frozenset(idx), v, 2**d_est)
            r = round_to_grid(v, d_est)
            if r != 0.0:
                coeffs[M] = r
    diag["parities_tested"] = count
    terms = dict(coeffs)
    if c0 != 0.0:
        terms[0] = c0
    return SparsePolynomial(n, terms), c0, coeffs, d_est


def _components(masks: Iterable[int]) -> list[int]:
    """Connected components of the vertex co-occurrence graph, as masks."""
    comps: list[int] = []
    for S in masks:
        merged = S
        keep = []
        for C in comps:
            if C & merged:
                merged |= C
            else:
                keep.append(C)
        comps = keep + [merged]
    return comps


def edges_from_polynomial(p: SparsePolynomial, d: int, k_cap: int = DEFAULT_K_CAP) -> Hypergraph:
    """The unique singleton-free hypergraph whose c-cut polynomial is ``p``.

    Coefficients are scaled to integers by 2^(d-1); an edge I then adds
    2^(d-|I|) to every nonempty even J inside I. Each connected component of
    the support is solved by exhaustive search over candidate edges (subsets
    of size 2..d all of whose even subsets are in the support), pruned by
    keeping every residual coefficient non-negative. The constant term
    links the components and is checked last.
    """
    if d < 0 or d > MAX_EDGE_SIZE:
        raise ValueError(f"d must be in 0..{MAX_EDGE_SIZE}")
    scale = 2.0 ** max(d - 1, 0)
    ints: dict[int, int] = {}
    for S, cf in p.terms.items():
        v = cf * scale
        iv = round(v)
        if abs(v - iv) > 1e-6 or iv <= 0:
            raise NoConsistentHypergraph(
                f"coefficient {cf:g} on {list(parity_indices(S, True))} is not a positive multiple of 2^{1 - d}"
            )
        size = S.bit_count()
        if size % 2 or size > d:
            raise NoConsistentHypergraph(f"term {list(parity_indices(S, True))} cannot come from edges of size <= {d}")
        ints[S] = iv
    const = ints.pop(0, 0)

    per_component = []
    for comp in _components(ints):
        size = comp.bit_count()
        if size > k_cap:
            raise ComponentTooLarge(size, k_cap)
        sols = _solve_component(comp, {S: v for S, v in ints.items() if S & comp}, d)
        if not sols:
            raise NoConsistentHypergraph(f"no edge set explains component {list(parity_indices(comp, True))}")
        per_component.append(sols)

    matches = []
    for combo in itertools.product(*per_component):
        edges = [e for sol in combo for e in sol]
        if sum(2 ** (d - e.bit_count()) for e in edges) == const:
            matches.append(Hypergraph(p.n, frozenset(frozenset(parity_indices(e)) for e in edges)))
            if len(matches) > 64:
                break
    if not matches:
        raise NoConsistentHypergraph("constant term does not match any edge set")
    if len(matches) > 1:
        # e.g. {1,4},{1,2,3},{2,3,4} and {2,3},{1,2,4},{1,3,4} have the same c-cut function
        raise AmbiguousHypergraph(f"{len(matches)} edge sets match the polynomial", matches)
    return matches[0]


def _solve_component(comp: int, terms: dict, d: int, limit: int = 64) -> list[list[int]]:
    verts = [1 << j for j in parity_indices(comp)]
    cands = []
    for size in range(min(d, len(verts)), 1, -1):
        for combo in itertools.combinations(verts, size):
            I = sum(combo)
            w = 2 ** (d - size)
            subs = list(_even_subsets(I, include_empty=False))
            if all(terms.get(J, 0) >= w for J in subs):
                cands.append((I, w, subs))

    # last candidate index able to reduce each term; past it the term is frozen
    last = {J: -1 for J in terms}
    for i, (_, _, subs) in enumerate(cands):
        for J in subs:
            last[J] = i

    residual = dict(terms)
    chosen: list[int] = []
    out: list[list[int]] = []

    def search(i):
        if len(out) > limit:
            return
        for J, r in residual.items():
            if r and last[J] < i:
                return
        if i == len(cands):
            out.append(list(chosen))
            return
        I, w, subs = cands[i]
        if all(residual[J] >= w for J in subs):
            for J in subs:
                residual[J] -= w
            chosen.append(I)
            search(i + 1)
            chosen.pop()
            for J in subs:
                residual[J] += w
        search(i + 1)

    search(0)
    if len(out) > limit:
        raise AmbiguousHypergraph(f"more than {limit} edge sets explain one component")
    return out
