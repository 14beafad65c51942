"""Random planted instances: sparse polynomials and sparse hypergraphs."""

from __future__ import annotations

import math

import numpy as np

from .fourier import SparsePolynomial, is_mu_separated
from .gf2 import linearly_independent
from .hypergraph import Hypergraph

__all__ = [
    "CONDITIONS",
    "random_parities",
    "planted_polynomial",
    "separated_polynomial",
    "tail_polynomial",
    "random_hypergraph",
]

CONDITIONS = ("perturbed", "independent", "positive")


def _random_mask(rng: np.random.Generator, n: int) -> int:
    bits = rng.integers(0, 2, size=n)
    return int(sum(1 << j for j in np.flatnonzero(bits)))


def random_parities(rng, n: int, s: int, *, independent=False, dependent=False, exclude=()) -> list[int]:
    """``s`` distinct nonzero parity masks drawn uniformly.

    ``independent`` resamples until the masks are linearly independent over
    GF(2). ``dependent`` (s >= 3) replaces the last mask by the XOR of the
    first two, so the family has rank below s.
    """
    if independent and dependent:
        raise ValueError("a family cannot be both independent and dependent")
    if s > (1 << n) - 1:
        raise ValueError("not enough distinct nonzero parities")
    exclude = set(exclude)
    while True:
        masks: list[int] = []
        while len(masks) < s:
            S = _random_mask(rng, n)
            if S and S not in masks and S not in exclude:
                masks.append(S)
        if dependent and s >= 3:
            last = masks[0] ^ masks[1]
            if last in masks[:-1] or last in exclude:
                continue
            masks[-1] = last
        if independent and not linearly_independent(masks):
            continue
        return masks


def planted_polynomial(rng, n: int, s: int, condition: str, sigma: float = 0.1) -> SparsePolynomial:
    """An s-sparse polynomial meeting one of the unique-sign sufficient conditions.

    ``perturbed``: coefficients from {-2,-1,1,2} plus N(0, sigma^2) noise on
    a rank-deficient parity family (general position holds almost surely).
    ``independent``: linearly independent parities, mixed-sign coefficients.
    ``positive``: positive coefficients on a rank-deficient family.
    """
    if condition == "perturbed":
        masks = random_parities(rng, n, s, dependent=True)
        coeffs = rng.choice([-2.0, -1.0, 1.0, 2.0], size=s) + rng.normal(0.0, sigma, size=s)
    elif condition == "independent":
        masks = random_parities(rng, n, s, independent=True)
        coeffs = rng.choice([-1.0, 1.0], size=s) * rng.uniform(0.5, 2.0, size=s)
    elif condition == "positive":
        masks = random_parities(rng, n, s, dependent=True)
        coeffs = rng.uniform(0.5, 2.0, size=s)
    else:
        raise ValueError(f"unknown condition {condition!r}; expected one of {CONDITIONS}")
    return SparsePolynomial(n, dict(zip(masks, coeffs)))


def separated_polynomial(rng, n: int, s: int, mu: float, scale: float = 10.0) -> SparsePolynomial:
    """Independent parities with mu-separated coefficients of size ~scale."""
    masks = random_parities(rng, n, s, independent=True)
    while True:
        coeffs = rng.choice([-1.0, 1.0], size=s) * rng.uniform(scale, 2 * scale, size=s)
        if is_mu_separated(coeffs, mu):
            return SparsePolynomial(n, dict(zip(masks, coeffs)))


def tail_polynomial(rng, n: int, k: int, nu: float, exclude=(), fill: float = 0.9) -> SparsePolynomial:
    """``k`` random parities outside ``exclude`` with total L1 mass ``fill * nu``."""
    masks = random_parities(rng, n, k, exclude=exclude)
    w = rng.uniform(0.2, 1.0, size=k)
    w *= fill * nu / w.sum()
    signs = rng.choice([-1.0, 1.0], size=k)
    return SparsePolynomial(n, dict(zip(masks, signs * w)))


def random_hypergraph(rng, n: int, s: int, d: int, min_size: int = 2) -> Hypergraph:
    """``s`` distinct hyperedges with sizes uniform on ``[min_size, d]``."""
    if not 2 <= min_size <= d <= n:
        raise ValueError("need 2 <= min_size <= d <= n")
    if s > sum(math.comb(n, k) for k in range(min_size, d + 1)):
        raise ValueError(f"fewer than {s} distinct edges of size {min_size}..{d} on {n} vertices")
    edges: set[frozenset] = set()
    while len(edges) < s:
        size = int(rng.integers(min_size, d + 1))
        edges.add(frozenset(int(v) for v in rng.choice(n, size=size, replace=False)))
    return Hypergraph(n, frozenset(edges))
