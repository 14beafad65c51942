"""Sparse polynomials over the Boolean cube {-1,+1}^n.

A parity set S is stored as an int bitmask: bit ``j`` is set iff coordinate
``j`` (0-based) is in S. The empty mask ``0`` is the constant parity. Human
facing formats (JSON, reprs) use 1-based sorted index lists.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from typing import Iterable, Mapping

import numpy as np

from . import gf2
from .errors import DimensionMismatch

__all__ = [
    "parity_mask",
    "parity_indices",
    "set_key",
    "eval_parity",
    "parity_columns",
    "SparsePolynomial",
    "eval_poly",
    "q_map",
    "q_inv",
    "truth_table",
    "brute_force_wht",
    "min_signed_combination",
    "is_general_position",
    "is_mu_separated",
    "realizable_patterns",
    "has_unique_sign_property",
]

WHT_MAX_N = 24
SIGN_ENUM_MAX_S = 20


def parity_mask(indices: Iterable[int], one_based: bool = True) -> int:
    off = 1 if one_based else 0
    mask = 0
    for i in indices:
        j = int(i) - off
        if j < 0:
            raise ValueError(f"index {i} out of range")
        mask |= 1 << j
    return mask


def parity_indices(mask: int, one_based: bool = False) -> tuple[int, ...]:
    off = 1 if one_based else 0
    out = []
    j = 0
    while mask:
        if mask & 1:
            out.append(j + off)
        mask >>= 1
        j += 1
    return tuple(out)


def set_key(mask: int) -> tuple[int, ...]:
    """Sort key giving the canonical term order (lexicographic index lists)."""
    return parity_indices(mask)


def _check_point(x) -> np.ndarray:
    x = np.asarray(x)
    if x.ndim != 1:
        raise DimensionMismatch("a point must be a 1-d vector")
    if not np.isin(x, (-1, 1)).all():
        raise ValueError("point entries must be -1 or +1")
    return x


def eval_parity(S: int, x) -> int:
    """chi_S(x): product of the coordinates of ``x`` indexed by ``S``."""
    x = _check_point(x)
    if S.bit_length() > x.shape[0]:
        raise DimensionMismatch(f"parity set uses coordinate {S.bit_length()}, point has {x.shape[0]}")
    neg = 0
    for j in parity_indices(S):
        neg ^= x[j] < 0
    return -1 if neg else 1


def parity_columns(X, masks: Iterable[int]) -> np.ndarray:
    """Matrix of chi_S(x_i): one row per sample, one int8 column per mask."""
    X = np.asarray(X)
    if X.ndim != 2:
        raise DimensionMismatch("samples must be a 2-d array")
    n = X.shape[1]
    neg = X < 0
    masks = list(masks)
    out = np.empty((X.shape[0], len(masks)), dtype=np.int8)
    for k, S in enumerate(masks):
        if S.bit_length() > n:
            raise DimensionMismatch(f"parity set uses coordinate {S.bit_length()}, samples have {n}")
        idx = list(parity_indices(S))
        if not idx:
            out[:, k] = 1
            continue
        odd = np.bitwise_xor.reduce(neg[:, idx], axis=1)
        out[:, k] = 1 - 2 * odd.astype(np.int8)
    return out


@dataclass(frozen=True)
class SparsePolynomial:
    """A real polynomial sum_S c_S chi_S on {-1,+1}^n with few terms.

    ``terms`` maps parity masks to nonzero coefficients. Exact zeros are
    dropped on construction and terms are kept in canonical order, which is
    also the summation order used by every evaluation routine.
    """

    n: int
    terms: Mapping[int, float] = field(default_factory=dict)

    def __post_init__(self):
        if self.n < 0:
            raise ValueError("n must be non-negative")
        clean = {}
        for S, c in self.terms.items():
            S = int(S)
            if S < 0 or S.bit_length() > self.n:
                raise DimensionMismatch(f"parity set {parity_indices(S, True)} does not fit n={self.n}")
            c = float(c)
            if c != 0.0:
                clean[S] = c
        ordered = dict(sorted(clean.items(), key=lambda kv: set_key(kv[0])))
        object.__setattr__(self, "terms", ordered)

    @classmethod
    def from_sets(cls, n: int, pairs: Iterable[tuple[Iterable[int], float]]) -> "SparsePolynomial":
        """Build from ``(1-based index list, coefficient)`` pairs; repeats add up."""
        acc: dict[int, float] = {}
        for idx, c in pairs:
            S = parity_mask(idx)
            acc[S] = acc.get(S, 0.0) + float(c)
        return cls(n, acc)

    @property
    def sparsity(self) -> int:
        return len(self.terms)

    @property
    def support(self) -> tuple[int, ...]:
        return tuple(self.terms)

    @property
    def coefficients(self) -> np.ndarray:
        return np.fromiter(self.terms.values(), dtype=float, count=len(self.terms))

    def coefficient(self, S: int) -> float:
        return self.terms.get(S, 0.0)

    def l1_norm(self) -> float:
        return float(np.abs(self.coefficients).sum()) if self.terms else 0.0

    def evaluate(self, X) -> np.ndarray:
        """Values at each row of the sample matrix ``X``."""
        X = np.asarray(X)
        if X.ndim == 1:
            X = X[None, :]
        if X.shape[1] != self.n:
            raise DimensionMismatch(f"samples have {X.shape[1]} coordinates, polynomial has n={self.n}")
        acc = np.zeros(X.shape[0])
        if not self.terms:
            return acc
        chi = parity_columns(X, self.terms)
        for k, c in enumerate(self.terms.values()):
            acc += c * chi[:, k]
        return acc

    def __call__(self, x) -> float:
        return eval_poly(self, x)

    def max_abs_error(self, other: "SparsePolynomial") -> float:
        keys = set(self.terms) | set(other.terms)
        if not keys:
            return 0.0
        return max(abs(self.coefficient(S) - other.coefficient(S)) for S in keys)

    def l2_distance(self, other: "SparsePolynomial") -> float:
        keys = set(self.terms) | set(other.terms)
        return float(np.sqrt(sum((self.coefficient(S) - other.coefficient(S)) ** 2 for S in keys)))

    def to_json(self) -> dict:
        return {
            "n": self.n,
            "terms": [{"set": list(parity_indices(S, True)), "coeff": c} for S, c in self.terms.items()],
        }

    @classmethod
    def from_json(cls, obj) -> "SparsePolynomial":
        if isinstance(obj, (str, bytes)):
            obj = json.loads(obj)
        return cls.from_sets(int(obj["n"]), ((t["set"], t["coeff"]) for t in obj["terms"]))

    def __repr__(self):
        body = " + ".join(
            f"{c:g}*chi{{{','.join(map(str, parity_indices(S, True)))}}}" for S, c in self.terms.items()
        )
        return f"SparsePolynomial(n={self.n}, {body or '0'})"


def eval_poly(f: SparsePolynomial, x) -> float:
    x = _check_point(x)
    if x.shape[0] != f.n:
        raise DimensionMismatch(f"point has {x.shape[0]} coordinates, polynomial has n={f.n}")
    acc = 0.0
    for S, c in f.terms.items():
        acc += c * eval_parity(S, x)
    return acc


def q_map(X) -> np.ndarray:
    """Sign matrix to GF(2): -1 -> 1, +1 -> 0, elementwise."""
    X = np.asarray(X)
    if X.size and not np.isin(X, (-1, 1)).all():
        raise ValueError("sign matrix entries must be -1 or +1")
    return (X < 0).astype(np.uint8)


def q_inv(Y) -> np.ndarray:
    """GF(2) to sign matrix: 1 -> -1, 0 -> +1."""
    if isinstance(Y, gf2.BitMatrix):
        Y = Y.to_array()
    Y = np.asarray(Y)
    if Y.size and not np.isin(Y, (0, 1)).all():
        raise ValueError("bit matrix entries must be 0 or 1")
    return (1 - 2 * Y.astype(np.int8)).astype(np.int8)


def _index_points(n: int) -> np.ndarray:
    """All 2^n points; row i has x_{j+1} = -1 iff bit j of i is set."""
    i = np.arange(1 << n, dtype=np.int64)[:, None]
    bits = (i >> np.arange(n, dtype=np.int64)) & 1
    return (1 - 2 * bits).astype(np.int8)


def truth_table(f: SparsePolynomial) -> np.ndarray:
    """Values of ``f`` on all 2^n points, indexed as in `brute_force_wht`."""
    if f.n > WHT_MAX_N:
        raise ValueError(f"n={f.n} exceeds the {WHT_MAX_N}-variable limit")
    return f.evaluate(_index_points(f.n))


def brute_force_wht(table, prune: float = 1e-12) -> SparsePolynomial:
    """Exact Fourier coefficients of a full truth table.

    ``table[i]`` is the value at the point whose coordinate ``j+1`` is -1
    exactly when bit ``j`` of ``i`` is set. Returns c_S = 2^-n sum_x f(x)chi_S(x)
    for every S with ``|c_S| >= prune``.
    """
    v = np.array(table, dtype=float).ravel()
    size = v.shape[0]
    n = size.bit_length() - 1
    if size == 0 or (1 << n) != size:
        raise ValueError("table length must be a power of two")
    if n > WHT_MAX_N:
        raise ValueError(f"n={n} exceeds the {WHT_MAX_N}-variable limit")
    h = 1
    while h < size:
        v = v.reshape(-1, 2, h)
        a = v[:, 0, :].copy()
        b = v[:, 1, :]
        v[:, 0, :] = a + b
        v[:, 1, :] = a - b
        v = v.reshape(size)
        h *= 2
    v /= size
    keep = np.flatnonzero(np.abs(v) >= prune)
    return SparsePolynomial(n, {int(S): float(v[S]) for S in keep})


def min_signed_combination(coeffs) -> float:
    """min |sum c_i b_i| over nonzero b in {0,1,-1}^s.

    A nonzero {0,+-1} vector is a difference of two distinct 0/1 vectors, so
    the minimum is the smallest gap between the 2^s sorted subset sums.
    """
    c = np.asarray(coeffs, dtype=float).ravel()
    s = c.shape[0]
    if s == 0:
        return float("inf")
    if s > SIGN_ENUM_MAX_S:
        raise ValueError(f"s={s} exceeds the {SIGN_ENUM_MAX_S}-coefficient limit")
    sums = np.zeros(1)
    for ci in c:
        sums = np.concatenate([sums, sums + ci])
    sums.sort()
    return float(np.diff(sums).min())


def is_general_position(coeffs, tol: float = 1e-9) -> bool:
    return min_signed_combination(coeffs) > tol


def is_mu_separated(coeffs, mu: float) -> bool:
    return min_signed_combination(coeffs) > mu


def realizable_patterns(masks) -> np.ndarray:
    """All sign patterns the parities ``masks`` jointly take, one per row.

    With r the GF(2) rank of the masks there are exactly 2^r of them: a
    basis of r independent parities takes every value in {-1,+1}^r and the
    rest are products of basis parities.
    """
    masks = [int(S) for S in masks]
    if len(masks) > SIGN_ENUM_MAX_S:
        raise ValueError(f"s={len(masks)} exceeds the {SIGN_ENUM_MAX_S}-parity limit")
    # Echelon rows keyed by leading bit. Each carries the set of chosen
    # independent masks (as a bitmask over their order) whose XOR it equals;
    # throughout the reduction v == S ^ xor(chosen masks in combo).
    basis: dict[int, tuple[int, int]] = {}
    combos = []
    for S in masks:
        v, combo = S, 0
        while v and (v.bit_length() - 1) in basis:
            bv, bc = basis[v.bit_length() - 1]
            v ^= bv
            combo ^= bc
        if v:
            k = len(basis)
            basis[v.bit_length() - 1] = (v, combo ^ (1 << k))
            combo = 1 << k
        combos.append(combo)
    r = len(basis)
    z = np.arange(1 << r, dtype=np.int64)
    out = np.empty((1 << r, len(masks)), dtype=np.int8)
    for i, combo in enumerate(combos):
        par = np.zeros(1 << r, dtype=np.int64)
        for k in range(r):
            if (combo >> k) & 1:
                par ^= (z >> k) & 1
        out[:, i] = 1 - 2 * par
    return out


def has_unique_sign_property(f: SparsePolynomial, tol: float = 1e-9) -> bool:
    """True iff the maximum of ``f`` is reached by exactly one sign pattern."""
    masks = list(f.terms)
    if not masks:
        return True
    patterns = realizable_patterns(masks)
    values = patterns @ f.coefficients
    top = values.max()
    return int(np.count_nonzero(values >= top - tol)) == 1
