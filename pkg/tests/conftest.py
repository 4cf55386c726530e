"""Shared builders and independent oracles for the test suite.

Oracles here deliberately avoid the package's own algorithms: the degree
oracles count sign changes / sum raw angles from dense samples, and the
geometry oracles rasterize.  They are the second route against which the
implementation is checked.
"""

from __future__ import annotations

import math
import random

import numpy as np
import pytest

from ccdeg import expr as ex
from ccdeg.geometry import Box
from ccdeg.maps import Inequality, Piece, PiecewiseMap, Region

X = ex.Var(0)


def ivbox(a: float, b: float) -> Box:
    return Box((a,), (b,))


def linear(a: float, b: float) -> ex.Expr:
    """a*x + b as an expression tree."""
    return ex.Binary("+", ex.Binary("*", ex.Const(a), X), ex.Const(b))


def random_piecewise_map(rng: random.Random, max_pieces: int = 6,
                         lo: float = 0.0, hi: float = 1.0) -> PiecewiseMap:
    """Random piecewise constant/linear map on [lo, hi] with <= 6 pieces."""
    k = rng.randint(1, max_pieces)
    cuts = sorted(rng.uniform(lo + 0.05, hi - 0.05) for _ in range(k - 1))
    edges = [lo, *cuts, hi]
    pieces = []
    for j in range(k):
        ineqs = []
        if j > 0:
            # strictly right of the previous cut
            ineqs.append(Inequality(ex.Binary("-", ex.Const(edges[j]), X), strict=True))
        if j < k - 1:
            ineqs.append(Inequality(ex.Binary("-", X, ex.Const(edges[j + 1]))))
        if rng.random() < 0.5:
            out = ex.Const(rng.uniform(-1.5, 1.5))
        else:
            out = linear(rng.uniform(-2.0, 2.0), rng.uniform(-1.0, 1.0))
        pieces.append(Piece(Region(tuple(ineqs)), (out,)))
    return PiecewiseMap(Box((lo,), (hi,)), tuple(pieces))


def random_continuous_map(rng: random.Random, dim: int = 1) -> PiecewiseMap:
    """Single-piece smooth map: cubic polynomial plus a sine term per output."""

    def poly(var: ex.Expr) -> ex.Expr:
        c = [rng.uniform(-1.0, 1.0) for _ in range(4)]
        e: ex.Expr = ex.Const(c[0])
        for p in range(1, 4):
            e = ex.Binary("+", e, ex.Binary("*", ex.Const(c[p]), ex.Pow(var, float(p))))
        return ex.Binary(
            "+", e,
            ex.Binary("*", ex.Const(rng.uniform(-0.5, 0.5)),
                      ex.Unary("sin", ex.Binary("*", ex.Const(rng.uniform(0.5, 3.0)), var))),
        )

    box = Box((-1.0,) * dim, (1.0,) * dim)
    outs = tuple(poly(ex.Var(i % dim)) for i in range(dim))
    return PiecewiseMap(box, (Piece(Region(), outs),))


def sign_scan_degree(m: PiecewiseMap, a: float, b: float, n: int = 100001) -> int:
    """Dense-scan oracle: oriented count of sign changes of x - T(x)."""
    xs = np.linspace(a, b, n)
    g = xs - m.evaluate_batch([xs])[0]
    signs = np.sign(g)
    signs = signs[signs != 0]
    jumps = np.diff(signs)
    return int(np.sum(jumps > 0) - np.sum(jumps < 0))


def winding_oracle(m: PiecewiseMap, box: Box, n: int = 2 ** 14) -> int:
    """Raw angle-summation winding of x - T(x) over dense boundary samples."""
    total = 0.0
    pts = box.boundary_points(n)
    g = [tuple(c - v for c, v in zip(p, m.evaluate(p))) for p in pts]
    for i in range(n):
        u = g[i]
        v = g[(i + 1) % n]
        total += math.atan2(u[0] * v[1] - u[1] * v[0], u[0] * v[0] + u[1] * v[1])
    return int(round(total / (2.0 * math.pi)))


@pytest.fixture
def rng() -> random.Random:
    return random.Random(20240817)
