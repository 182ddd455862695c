"""
Metric-level objects of the jet space

Jet space declaration, time and space metrics, their Christoffel symbols,
the canonical nonlinear connection, the Berwald connection and the
curvature tensor of the spatial metric.

Copyright (c) 2024.
"""

from __future__ import annotations

import itertools
import logging
from collections.abc import Callable, Mapping
from dataclasses import dataclass
from enum import Enum

import numpy as np

from src.lib import config
from src.lib.errors import (DimensionTooLarge, ShapeMismatch, SingularMetric,
                            UnknownVariable)
from src.lib.symexpr import (HALF, ZERO, Expr, SampleBox, Symbol, add,
                             differentiate, is_zero, mul, neg, power,
                             simplify)

log: logging.Logger = logging.getLogger(__name__)

Array = np.ndarray


class Kind(Enum):
    """Directions of the adapted frame, also the kinds of d-tensor indices."""

    TIME = "hR"
    SPACE = "hM"
    VERTICAL = "v"

    def extent(self, n: int) -> int:
        return 1 if self is Kind.TIME else n


KINDS = (Kind.TIME, Kind.SPACE, Kind.VERTICAL)


def expr_array(shape: tuple[int, ...], fill: Expr = ZERO) -> Array:
    """Dense object array of expressions."""
    return np.full(shape, fill, dtype=object)


def map_array(f: Callable[[Expr], Expr], arr: Array) -> Array:
    """Apply f to every component."""
    out = np.empty(arr.shape, dtype=object)
    for idx in np.ndindex(arr.shape):
        out[idx] = f(arr[idx])
    return out


@dataclass(frozen=True)
class JetSpace:
    """Coordinates (t, x^i, y^i_1) of the 1-jet space and declared parameters."""

    time_coord: str
    space_coords: tuple[str, ...]
    fiber_coords: tuple[str, ...]
    params: tuple[tuple[str, float], ...] = ()

    def __post_init__(self) -> None:
        if len(self.space_coords) < 1:
            raise ShapeMismatch("The spatial dimension must be at least 1.")
        if len(self.fiber_coords) != len(self.space_coords):
            raise ShapeMismatch(
                f"{len(self.fiber_coords)} fibre coordinates for "
                f"{len(self.space_coords)} space coordinates.")
        names = self.variables
        if len(set(names)) != len(names):
            raise ShapeMismatch(f"Coordinate names are not distinct: {names}")
        for name in names:
            if name in config.FUNCTIONS:
                raise ShapeMismatch(f"'{name}' is a function name.")

    @classmethod
    def standard(cls, n: int, params: Mapping[str, float] | None = None
                 ) -> JetSpace:
        """Jet space with coordinates t, x1..xn, y1_1..y1_n."""
        if n > config.MAX_DIMENSION:
            raise DimensionTooLarge(
                f"n = {n} exceeds the maximum of {config.MAX_DIMENSION}.")
        return cls(config.TIME_NAME,
                   tuple(f"{config.SPACE_PREFIX}{i + 1}" for i in range(n)),
                   tuple(f"{config.FIBER_PREFIX}{i + 1}" for i in range(n)),
                   tuple(sorted((params or {}).items())))

    @property
    def n(self) -> int:
        return len(self.space_coords)

    @property
    def coordinates(self) -> tuple[str, ...]:
        return (self.time_coord,) + self.space_coords + self.fiber_coords

    @property
    def variables(self) -> tuple[str, ...]:
        """Coordinates plus parameter names."""
        return self.coordinates + tuple(name for name, _ in self.params)

    @property
    def t(self) -> Symbol:
        return Symbol(self.time_coord)

    def x(self, i: int) -> Symbol:
        return Symbol(self.space_coords[i])

    def y(self, i: int) -> Symbol:
        return Symbol(self.fiber_coords[i])

    def sample_box(self) -> SampleBox:
        ranges = {self.time_coord: config.TIME_BOX}
        ranges.update({x: config.SPACE_BOX for x in self.space_coords})
        ranges.update({y: config.FIBER_BOX for y in self.fiber_coords})
        return SampleBox(ranges=ranges, fixed=dict(self.params))

    def is_zero(self, e: Expr, trials: int | None = None,
                seed: int | None = None) -> bool:
        """Zero test with this space's sample box."""
        return is_zero(e, trials, seed, self.sample_box())

    def check_depends(self, e: Expr, allowed: tuple[str, ...], what: str
                      ) -> None:
        """Raise UnknownVariable if e depends on more than allowed + params."""
        extra = e.free_symbols - set(allowed) - {p for p, _ in self.params}
        if extra:
            raise UnknownVariable(
                f"{what} depends on {', '.join(sorted(extra))}.")


@dataclass(frozen=True, eq=False)
class TimeMetric:
    """Riemannian metric h11(t) of the time axis."""

    space: JetSpace
    h11: Expr

    def __post_init__(self) -> None:
        self.space.check_depends(self.h11, (self.space.time_coord,),
                                 "The time metric")
        if self.space.is_zero(self.h11):
            raise SingularMetric("The time metric vanishes identically.")


@dataclass(frozen=True, eq=False)
class SpatialMetric:
    """Semi-Riemannian metric phi_ij(x) of the space manifold."""

    space: JetSpace
    phi: Array

    def __post_init__(self) -> None:
        n = self.space.n
        if self.phi.shape != (n, n):
            raise ShapeMismatch(f"phi has shape {self.phi.shape}, "
                                f"expected {(n, n)}.")
        for i, j in itertools.product(range(n), repeat=2):
            self.space.check_depends(self.phi[i, j], self.space.space_coords,
                                     f"phi[{i + 1}][{j + 1}]")
            if self.phi[i, j] != self.phi[j, i]:
                raise ShapeMismatch(
                    f"phi is not symmetric: phi[{i + 1}][{j + 1}] = "
                    f"{self.phi[i, j]} but phi[{j + 1}][{i + 1}] = "
                    f"{self.phi[j, i]}.")


@dataclass(frozen=True, eq=False)
class NonlinearConnection:
    """
    Temporal components M[i] = M_(1)1^(i) and spatial components
    N[i][j] = N_(1)j^(i) (row = upper index).
    """

    space: JetSpace
    M: Array
    N: Array

    def __post_init__(self) -> None:
        n = self.space.n
        if self.M.shape != (n,) or self.N.shape != (n, n):
            raise ShapeMismatch(
                f"Nonlinear connection blocks have shapes {self.M.shape} and "
                f"{self.N.shape}, expected {(n,)} and {(n, n)}.")

    @classmethod
    def zero(cls, space: JetSpace) -> NonlinearConnection:
        return cls(space, expr_array((space.n,)), expr_array((space.n,) * 2))


BLOCK_NAMES = ("Gbar", "G", "Gv", "Lbar", "L", "Lv", "Cbar", "C", "Cv")


def block_shape(name: str, n: int) -> tuple[int, ...]:
    """Shape of a connection block, Gbar is a scalar."""
    return {"Gbar": (), "G": (n, n), "Gv": (n, n), "Lbar": (n,),
            "L": (n, n, n), "Lv": (n, n, n), "Cbar": (n,),
            "C": (n, n, n), "Cv": (n, n, n)}[name]


@dataclass(frozen=True, eq=False)
class GammaConnection:
    """
    Nine adapted coefficient blocks of a Gamma-linear connection.

    G[k][i] = G^k_i1, Gv[k][i] = G_(1)(i)1^(k)(1), Lbar[j] = Lbar^1_1j,
    L[k][i][j] = L^k_ij (upper, lower, derivative), Lv likewise,
    Cbar[k] = Cbar^1_1(k), C[k][i][j] = C^k_i(j), Cv[k][i][j].
    """

    nlc: NonlinearConnection
    Gbar: Expr
    G: Array
    Gv: Array
    Lbar: Array
    L: Array
    Lv: Array
    Cbar: Array
    C: Array
    Cv: Array

    def __post_init__(self) -> None:
        n = self.space.n
        for name in BLOCK_NAMES[1:]:
            shape = getattr(self, name).shape
            if shape != block_shape(name, n):
                raise ShapeMismatch(f"Block {name} has shape {shape}, "
                                    f"expected {block_shape(name, n)}.")

    @property
    def space(self) -> JetSpace:
        return self.nlc.space

    @classmethod
    def from_blocks(cls, nlc: NonlinearConnection,
                    blocks: Mapping[str, Array | Expr]) -> GammaConnection:
        """Build from a (partial) mapping of block names, missing blocks are 0."""
        n = nlc.space.n
        args = {}
        for name in BLOCK_NAMES:
            if name == "Gbar":
                value = blocks.get("Gbar", ZERO)
                args[name] = value[()] if isinstance(value, np.ndarray) \
                    else value
            else:
                args[name] = blocks.get(name, expr_array(block_shape(name, n)))
        return cls(nlc, **args)

    @classmethod
    def zero(cls, space: JetSpace) -> GammaConnection:
        return cls.from_blocks(NonlinearConnection.zero(space), {})

    def blocks(self) -> dict[str, Array]:
        """All nine blocks as arrays, Gbar as a 0-d array."""
        out = {}
        for name in BLOCK_NAMES:
            value = getattr(self, name)
            if name == "Gbar":
                arr = np.empty((), dtype=object)
                arr[()] = value
                value = arr
            out[name] = value
        return out

    def coefficients(self, direction: Kind, kind: Kind) -> Array:
        """
        Coefficients Gamma^a_{b,p} of nabla along the `direction` frame
        vectors acting on the `kind` frame vectors, as an array [a][b][p]
        with extents (kind, kind, direction).
        """
        n = self.space.n
        name = _BLOCK_OF[(direction, kind)]
        value = self.blocks()[name]
        return value.reshape(kind.extent(n), kind.extent(n),
                             direction.extent(n))


_BLOCK_OF = {
    (Kind.TIME, Kind.TIME): "Gbar", (Kind.TIME, Kind.SPACE): "G",
    (Kind.TIME, Kind.VERTICAL): "Gv", (Kind.SPACE, Kind.TIME): "Lbar",
    (Kind.SPACE, Kind.SPACE): "L", (Kind.SPACE, Kind.VERTICAL): "Lv",
    (Kind.VERTICAL, Kind.TIME): "Cbar", (Kind.VERTICAL, Kind.SPACE): "C",
    (Kind.VERTICAL, Kind.VERTICAL): "Cv",
}


# LINEAR ALGEBRA---------------------------------------------------------------

def determinant(m: Array) -> Expr:
    """Determinant by cofactor expansion along the first row."""
    n = m.shape[0]
    if n > config.MAX_DIMENSION:
        raise DimensionTooLarge(
            f"n = {n} exceeds the maximum of {config.MAX_DIMENSION}.")
    if n == 1:
        return m[0, 0]
    parts = []
    for j in range(n):
        if m[0, j].is_literal_zero():
            continue
        minor = np.delete(np.delete(m, 0, axis=0), j, axis=1)
        sign = 1 if j % 2 == 0 else -1
        parts.append(mul(sign, m[0, j], determinant(minor)))
    return simplify(add(*parts))


def inverse_matrix(m: Array, space: JetSpace) -> Array:
    """
    Symbolic inverse as adjugate over determinant.

    :param m: Square object array
    :param space: Jet space providing the sample box of the zero test
    :return: Inverse matrix
    """
    n = m.shape[0]
    det = determinant(m)
    if space.is_zero(det):
        raise SingularMetric(f"Determinant {det} vanishes identically.")
    if n == 1:
        return np.array([[simplify(power(det, -1))]], dtype=object)
    inv_det = power(det, -1)
    inv = expr_array((n, n))
    for i, j in itertools.product(range(n), repeat=2):
        minor = np.delete(np.delete(m, j, axis=0), i, axis=1)
        sign = 1 if (i + j) % 2 == 0 else -1
        inv[i, j] = simplify(mul(sign, determinant(minor), inv_det))
    return inv


# CHRISTOFFEL SYMBOLS----------------------------------------------------------

def christoffel_time(h: TimeMetric) -> Expr:
    """H^1_11 = (h^11 / 2) dh11/dt."""
    return simplify(mul(HALF, power(h.h11, -1),
                        differentiate(h.h11, h.space.time_coord)))


def christoffel_spatial(phi: SpatialMetric) -> Array:
    """
    gamma^i_jk = (phi^im / 2)(d_j phi_km + d_k phi_jm - d_m phi_jk),
    stored as gamma[i][j][k] and symmetric in (j, k).
    """
    space = phi.space
    n = space.n
    inv = inverse_matrix(phi.phi, space)
    # d[a][b][c] = d phi_bc / d x^a
    d = expr_array((n, n, n))
    for a, b, c in itertools.product(range(n), repeat=3):
        d[a, b, c] = differentiate(phi.phi[b, c], space.space_coords[a])
    gamma = expr_array((n, n, n))
    for i, j in itertools.product(range(n), repeat=2):
        for k in range(j, n):
            g = simplify(mul(HALF, add(*(
                mul(inv[i, m], add(d[j, k, m], d[k, j, m], neg(d[m, j, k])))
                for m in range(n)))))
            gamma[i, j, k] = g
            gamma[i, k, j] = g
    return gamma


def canonical_nlc(h: TimeMetric, phi: SpatialMetric) -> NonlinearConnection:
    """M_(1)1^(j) = -H y_j and N_(1)i^(j) = gamma^j_im y_m."""
    space = phi.space
    n = space.n
    H = christoffel_time(h)
    gamma = christoffel_spatial(phi)
    M = expr_array((n,))
    N = expr_array((n, n))
    for j in range(n):
        M[j] = simplify(neg(mul(H, space.y(j))))
        for i in range(n):
            N[j, i] = simplify(add(*(mul(gamma[j, i, m], space.y(m))
                                     for m in range(n))))
    return NonlinearConnection(space, M, N)


def berwald_connection(h: TimeMetric, phi: SpatialMetric) -> GammaConnection:
    """Berwald connection of the metric pair."""
    space = phi.space
    n = space.n
    H = christoffel_time(h)
    gamma = christoffel_spatial(phi)
    Gv = expr_array((n, n))
    for k in range(n):
        Gv[k, k] = neg(H)
    log.debug(f"Berwald connection built for n = {n}.")
    return GammaConnection.from_blocks(canonical_nlc(h, phi), {
        "Gbar": H, "Gv": Gv, "L": gamma, "Lv": gamma.copy()})


def spatial_riemann(phi: SpatialMetric) -> Array:
    """
    r[k][m][i][j] = d_j gamma^k_im - d_i gamma^k_jm
                    + gamma^k_jr gamma^r_im - gamma^k_ir gamma^r_jm,

    the sign convention under which R_(1)ij^(k) = r^k_mij y_m holds for the
    canonical nonlinear connection. Antisymmetric in (i, j).
    """
    space = phi.space
    n = space.n
    gamma = christoffel_spatial(phi)
    r = expr_array((n, n, n, n))
    for k, m in itertools.product(range(n), repeat=2):
        for i in range(n):
            for j in range(i + 1, n):
                value = simplify(add(
                    differentiate(gamma[k, i, m], space.space_coords[j]),
                    neg(differentiate(gamma[k, j, m], space.space_coords[i])),
                    *(add(mul(gamma[k, j, s], gamma[s, i, m]),
                          neg(mul(gamma[k, i, s], gamma[s, j, m])))
                      for s in range(n))))
                r[k, m, i, j] = value
                r[k, m, j, i] = neg(value)
    return r
