"""
d-tensor fields and their covariant derivatives

A DTensor stores its components densely, one array axis per index slot,
TIME slots with extent 1. The three covariant derivatives along the
adapted frame follow the (h_R), (h_M) and (v) rules of a Gamma-linear
connection: one correction term per slot, added for upper slots and
subtracted for lower slots.

Copyright (c) 2024.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass
from enum import Enum

import numpy as np

from src.lib.errors import IndexOutOfRange, ShapeMismatch, SignatureMismatch
from src.lib.frames import (FrameOp, apply_frame, space_op, time_op,
                            vertical_op)
from src.lib.geometry import (KINDS, Array, GammaConnection, JetSpace, Kind,
                              NonlinearConnection, expr_array, map_array)
from src.lib.symexpr import ONE, ZERO, Expr, add, mul, neg, simplify

log: logging.Logger = logging.getLogger(__name__)


class Variance(Enum):
    UP = "up"
    DOWN = "down"


@dataclass(frozen=True)
class IndexSlot:
    kind: Kind
    variance: Variance

    def extent(self, n: int) -> int:
        return self.kind.extent(n)


def up(kind: Kind) -> IndexSlot:
    return IndexSlot(kind, Variance.UP)


def down(kind: Kind) -> IndexSlot:
    return IndexSlot(kind, Variance.DOWN)


Signature = tuple[IndexSlot, ...]


@dataclass(frozen=True, eq=False)
class DTensor:
    """Components of a d-tensor field, array shape given by the signature."""

    space: JetSpace
    signature: Signature
    components: Array

    def __post_init__(self) -> None:
        shape = tuple(s.extent(self.space.n) for s in self.signature)
        if self.components.shape != shape:
            raise ShapeMismatch(f"Components of shape "
                                f"{self.components.shape} for signature "
                                f"with shape {shape}.")

    @classmethod
    def zeros(cls, space: JetSpace, signature: Signature) -> DTensor:
        return cls(space, tuple(signature),
                   expr_array(tuple(s.extent(space.n) for s in signature)))

    @classmethod
    def scalar(cls, space: JetSpace, value: Expr) -> DTensor:
        arr = np.empty((), dtype=object)
        arr[()] = value
        return cls(space, (), arr)

    @property
    def rank(self) -> int:
        return len(self.signature)

    def __getitem__(self, idx) -> Expr:
        return self.components[idx]

    def map(self, f) -> DTensor:
        return DTensor(self.space, self.signature,
                       map_array(f, self.components))

    def simplify(self) -> DTensor:
        return self.map(simplify)

    def __neg__(self) -> DTensor:
        return self.map(neg)

    def __add__(self, other: DTensor) -> DTensor:
        return dtensor_add(self, other)

    def __sub__(self, other: DTensor) -> DTensor:
        return dtensor_add(self, -other)


@dataclass(frozen=True, eq=False)
class DVector:
    """d-vector field X = X1 d/dt + Xi d/dx^i + Xv d/dy^i_1."""

    space: JetSpace
    X1: Expr
    Xi: Array
    Xv: Array

    def __post_init__(self) -> None:
        n = self.space.n
        if self.Xi.shape != (n,) or self.Xv.shape != (n,):
            raise ShapeMismatch(f"d-vector parts of shapes {self.Xi.shape} "
                                f"and {self.Xv.shape}, expected {(n,)}.")

    @classmethod
    def frame(cls, space: JetSpace, kind: Kind, i: int = 0) -> DVector:
        """The adapted frame vector (kind, i) as a d-vector."""
        n = space.n
        if not 0 <= i < kind.extent(n):
            raise IndexOutOfRange(f"Index {i} out of range for {kind.name}.")
        Xi, Xv = expr_array((n,)), expr_array((n,))
        X1 = ONE if kind is Kind.TIME else ZERO
        if kind is Kind.SPACE:
            Xi[i] = ONE
        elif kind is Kind.VERTICAL:
            Xv[i] = ONE
        return cls(space, X1, Xi, Xv)

    def part(self, kind: Kind) -> DTensor:
        """One part as a single upper-slot d-tensor."""
        match kind:
            case Kind.TIME:
                comps = np.array([self.X1], dtype=object)
            case Kind.SPACE:
                comps = self.Xi.copy()
            case _:
                comps = self.Xv.copy()
        return DTensor(self.space, (up(kind),), comps)

    def parts(self) -> tuple[DTensor, DTensor, DTensor]:
        return tuple(self.part(k) for k in KINDS)

    def simplify(self) -> DVector:
        return DVector(self.space, simplify(self.X1),
                       map_array(simplify, self.Xi),
                       map_array(simplify, self.Xv))


def from_parts(space: JetSpace, parts: dict[Kind, Array]) -> DVector:
    n = space.n
    t = parts.get(Kind.TIME)
    return DVector(space, ZERO if t is None else t[0],
                   parts.get(Kind.SPACE, expr_array((n,))),
                   parts.get(Kind.VERTICAL, expr_array((n,))))


def lift(T: DTensor) -> DVector:
    """Embed a single upper-slot d-tensor as a d-vector."""
    if T.rank != 1 or T.signature[0].variance is not Variance.UP:
        raise SignatureMismatch("Only one upper index can be lifted.")
    return from_parts(T.space, {T.signature[0].kind: T.components})


def liouville(space: JetSpace) -> DTensor:
    """Canonical Liouville d-tensor C_(1)^(i) = y^i_1."""
    return DTensor(space, (up(Kind.VERTICAL),),
                   np.array([space.y(i) for i in range(space.n)],
                            dtype=object))


# COVARIANT DERIVATIVES--------------------------------------------------------

def _frame(direction: Kind, p: int, nlc: NonlinearConnection) -> FrameOp:
    match direction:
        case Kind.TIME:
            return time_op(nlc)
        case Kind.SPACE:
            return space_op(nlc, p)
    return vertical_op(nlc, p)


def _derivative(T: DTensor, direction: Kind, p: int,
                conn: GammaConnection) -> DTensor:
    n = T.space.n
    if not 0 <= p < direction.extent(n):
        raise IndexOutOfRange(
            f"Derivative index {p} out of range for {direction.name} with "
            f"n = {n}.")
    op = _frame(direction, p, conn.nlc)
    coeffs = {k: conn.coefficients(direction, k)[..., p] for k in KINDS}
    out = expr_array(T.components.shape)
    for idx in np.ndindex(T.components.shape):
        terms = [apply_frame(op, T.components[idx])]
        for pos, slot in enumerate(T.signature):
            gamma = coeffs[slot.kind]
            for r in range(slot.extent(n)):
                other = T.components[idx[:pos] + (r,) + idx[pos + 1:]]
                if other.is_literal_zero():
                    continue
                if slot.variance is Variance.UP:
                    terms.append(mul(other, gamma[idx[pos], r]))
                else:
                    terms.append(neg(mul(other, gamma[r, idx[pos]])))
        out[idx] = simplify(add(*terms))
    return DTensor(T.space, T.signature, out)


def cov_time(T: DTensor, conn: GammaConnection) -> DTensor:
    """R-horizontal covariant derivative T_/1, same signature."""
    return _derivative(T, Kind.TIME, 0, conn)


def cov_space(T: DTensor, p: int, conn: GammaConnection) -> DTensor:
    """M-horizontal covariant derivative T_|p, same signature."""
    return _derivative(T, Kind.SPACE, p, conn)


def cov_vert(T: DTensor, p: int, conn: GammaConnection) -> DTensor:
    """Vertical covariant derivative T|_(p), same signature."""
    return _derivative(T, Kind.VERTICAL, p, conn)


def covariant(T: DTensor, direction: Kind, conn: GammaConnection
              ) -> DTensor:
    """
    All covariant derivatives along one kind of frame vector, appended as a
    new lower slot of that kind.

    :param T: d-tensor
    :param direction: Kind of the derivative slot
    :param conn: Gamma-linear connection
    :return: d-tensor with signature T.signature + (down(direction),)
    """
    n = T.space.n
    parts = [_derivative(T, direction, p, conn).components
             for p in range(direction.extent(n))]
    return DTensor(T.space, T.signature + (down(direction),),
                   np.stack(parts, axis=-1))


# ALGEBRA----------------------------------------------------------------------

def tensor_product(A: DTensor, B: DTensor) -> DTensor:
    """Outer product with concatenated signature."""
    out = expr_array(A.components.shape + B.components.shape)
    for ia in np.ndindex(A.components.shape):
        for ib in np.ndindex(B.components.shape):
            out[ia + ib] = mul(A.components[ia], B.components[ib])
    return DTensor(A.space, A.signature + B.signature, out)


def dtensor_add(A: DTensor, B: DTensor) -> DTensor:
    """Componentwise sum of two d-tensors of the same signature."""
    if A.signature != B.signature:
        raise SignatureMismatch(
            f"Cannot add d-tensors of signatures "
            f"{_sig_str(A.signature)} and {_sig_str(B.signature)}.")
    out = expr_array(A.components.shape)
    for idx in np.ndindex(out.shape):
        out[idx] = add(A.components[idx], B.components[idx])
    return DTensor(A.space, A.signature, out)


def _sig_str(sig: Signature) -> str:
    return "[" + ", ".join(
        f"{s.kind.value}{'^' if s.variance is Variance.UP else '_'}"
        for s in sig) + "]"


# VECTOR FIELDS----------------------------------------------------------------

def nabla(V: DVector, W: DVector, conn: GammaConnection) -> DVector:
    """nabla_V W = V1 W_/1 + V^p W_|p + V^(p) W|_(p)."""
    n = V.space.n
    weights = {Kind.TIME: [V.X1], Kind.SPACE: list(V.Xi),
               Kind.VERTICAL: list(V.Xv)}
    parts = {}
    for kind in KINDS:
        W_part = W.part(kind)
        acc = expr_array((kind.extent(n),))
        for direction in KINDS:
            for p, weight in enumerate(weights[direction]):
                if weight.is_literal_zero():
                    continue
                d = _derivative(W_part, direction, p, conn).components
                for a in range(kind.extent(n)):
                    acc[a] = add(acc[a], mul(weight, d[a]))
        parts[kind] = map_array(simplify, acc)
    return from_parts(V.space, parts)


def _action(V: DVector, f: Expr, nlc: NonlinearConnection) -> Expr:
    """The vector field V applied to a scalar."""
    n = V.space.n
    terms = [mul(V.X1, apply_frame(time_op(nlc), f))]
    terms += [mul(V.Xi[i], apply_frame(space_op(nlc, i), f)) for i in range(n)]
    terms += [mul(V.Xv[i], apply_frame(vertical_op(nlc, i), f))
              for i in range(n)]
    return add(*terms)


def lie_bracket(V: DVector, W: DVector, nlc: NonlinearConnection
                ) -> DVector:
    """
    Adapted components of [V, W], computed from its action on the
    coordinate functions.
    """
    space = V.space
    n = space.n

    def on(f: Expr) -> Expr:
        return add(_action(V, _action(W, f, nlc), nlc),
                   neg(_action(W, _action(V, f, nlc), nlc)))

    X1 = simplify(on(space.t))
    Xi = np.array([simplify(on(space.x(i))) for i in range(n)], dtype=object)
    Xv = expr_array((n,))
    for r in range(n):
        Xv[r] = simplify(add(on(space.y(r)), mul(X1, nlc.M[r]),
                             *(mul(Xi[i], nlc.N[r, i]) for i in range(n))))
    return DVector(space, X1, Xi, Xv)


def frame_vectors(space: JetSpace, kind: Kind) -> list[DVector]:
    return [DVector.frame(space, kind, i) for i in range(kind.extent(space.n))]
