"""
Seeded random geometric objects

Random polynomial connections, d-vectors, scalar functions, metric pairs
and coordinate changes for the verify command and the tests.

Copyright (c) 2024.
"""

from __future__ import annotations

import itertools
import logging
from fractions import Fraction

import numpy as np

from src.lib.dtensor import DVector
from src.lib.geometry import (BLOCK_NAMES, Array, GammaConnection, JetSpace,
                              NonlinearConnection, SpatialMetric, TimeMetric,
                              block_shape, expr_array)
from src.lib.symexpr import (Expr, add, const, cos, exp, mul, power, sin,
                             var)
from src.lib.transform import CoordChange, change_of_coords

log: logging.Logger = logging.getLogger(__name__)

MAX_COEFF = 3
MAX_TERMS = 4


def random_poly(names: tuple[str, ...], rng: np.random.Generator,
                degree: int = 2, terms: int = MAX_TERMS) -> Expr:
    """
    Sum of up to `terms` monomials of total degree <= `degree` with small
    nonzero integer coefficients.
    """
    monomials = [()]
    for d in range(1, degree + 1):
        monomials += list(itertools.combinations_with_replacement(names, d))
    picks = rng.choice(len(monomials), size=min(terms, len(monomials)),
                       replace=False)
    out = []
    for k in sorted(picks):
        c = int(rng.integers(1, MAX_COEFF + 1)) * int(rng.choice((-1, 1)))
        out.append(mul(c, *(var(v) for v in monomials[k])))
    return add(*out)


def random_array(names: tuple[str, ...], shape: tuple[int, ...],
                 rng: np.random.Generator, degree: int = 2) -> Array:
    out = expr_array(shape)
    for idx in np.ndindex(shape):
        out[idx] = random_poly(names, rng, degree)
    return out


def random_nlc(space: JetSpace, rng: np.random.Generator,
               degree: int = 2) -> NonlinearConnection:
    n = space.n
    names = space.coordinates
    return NonlinearConnection(space, random_array(names, (n,), rng, degree),
                               random_array(names, (n, n), rng, degree))


def random_connection(space: JetSpace, rng: np.random.Generator,
                      degree: int = 2) -> GammaConnection:
    """Every block and the nonlinear connection random of degree <= 2."""
    nlc = random_nlc(space, rng, degree)
    blocks = {}
    for name in BLOCK_NAMES:
        shape = block_shape(name, space.n)
        if shape:
            blocks[name] = random_array(space.coordinates, shape, rng, degree)
        else:
            blocks[name] = random_poly(space.coordinates, rng, degree)
    return GammaConnection.from_blocks(nlc, blocks)


def random_dvector(space: JetSpace, rng: np.random.Generator,
                   degree: int = 2) -> DVector:
    n = space.n
    names = space.coordinates
    return DVector(space, random_poly(names, rng, degree),
                   random_array(names, (n,), rng, degree),
                   random_array(names, (n,), rng, degree))


def random_function(space: JetSpace, rng: np.random.Generator) -> Expr:
    """A polynomial times a trigonometric or exponential factor."""
    names = space.coordinates
    poly = random_poly(names, rng, 2)
    v = var(str(rng.choice(names)))
    match int(rng.integers(0, 3)):
        case 0:
            factor = sin(v)
        case 1:
            factor = cos(v)
        case _:
            factor = exp(mul(const(Fraction(1, 2)), v))
    return add(poly, mul(random_poly(names, rng, 1, 2), factor))


def random_metrics(space: JetSpace, rng: np.random.Generator
                   ) -> tuple[TimeMetric, SpatialMetric]:
    """
    h11 = c0 + c1 t^2 and a diagonally dominant phi on the sample box:
    diagonal 2 + a x_i^2 + b sin(x_j)^2, off-diagonal x_k / 4.
    """
    n = space.n
    t = space.t
    h11 = add(int(rng.integers(1, 4)), mul(int(rng.integers(1, 4)),
                                           power(t, 2)))
    phi = expr_array((n, n))
    for i in range(n):
        j = int(rng.integers(0, n))
        phi[i, i] = add(2, mul(int(rng.integers(1, 3)), power(space.x(i), 2)),
                        mul(int(rng.integers(0, 2)),
                            power(sin(space.x(j)), 2)))
    for i, j in itertools.combinations(range(n), 2):
        k = int(rng.integers(0, n))
        phi[i, j] = phi[j, i] = mul(const(Fraction(1, 4)), space.x(k))
    return TimeMetric(space, h11), SpatialMetric(space, phi)


def random_affine_change(space: JetSpace, rng: np.random.Generator
                         ) -> CoordChange:
    """t~ = a t + b, x~ = A x + c with A unimodular, inverses exact."""
    n = space.n
    a = const(Fraction(int(rng.integers(1, 4)), int(rng.integers(1, 3))))
    b = const(int(rng.integers(-1, 2)))
    A = np.eye(n, dtype=object) * Fraction(1)
    if n > 1:
        i, j = rng.choice(n, size=2, replace=False)
        A[i, j] = Fraction(int(rng.integers(-1, 2)) or 1)
    Ainv = _unimodular_inverse(A)
    c = [Fraction(int(rng.integers(-1, 2)), 2) for _ in range(n)]
    x = [space.x(i) for i in range(n)]
    x_new = [add(*(mul(const(A[k, j]), x[j]) for j in range(n)), const(c[k]))
             for k in range(n)]
    x_old = [add(*(mul(const(Ainv[k, j]), add(x[j], const(-c[j])))
                   for j in range(n)))
             for k in range(n)]
    t_new = add(mul(a, space.t), b)
    t_old = mul(power(a, -1), add(space.t, mul(-1, b)))
    return change_of_coords(space, t_new, x_new, t_old, x_old)


def _unimodular_inverse(A: Array) -> Array:
    """Inverse of I + e_ij (one off-diagonal entry)."""
    inv = A.copy()
    n = A.shape[0]
    for i, j in itertools.product(range(n), repeat=2):
        if i != j:
            inv[i, j] = -A[i, j]
    return inv

