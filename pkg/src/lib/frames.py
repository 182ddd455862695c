"""
Adapted frame operators and Poisson brackets

The frame vector fields d/dt, d/dx^i and d/dy^i_1 adapted to a nonlinear
connection act on scalar expressions. Their brackets produce the d-tensors
R_(1)1j^(r) and R_(1)ij^(r).

Copyright (c) 2024.
"""

from __future__ import annotations

import itertools
import logging
from dataclasses import dataclass

from src.lib.errors import IndexOutOfRange
from src.lib.geometry import Array, Kind, NonlinearConnection, expr_array
from src.lib.symexpr import Expr, add, differentiate, mul, neg, simplify

log: logging.Logger = logging.getLogger(__name__)


@dataclass(frozen=True, eq=False)
class FrameOp:
    """
    One adapted frame vector field.

    kind TIME: d/dt - M^k d/dy_k (index is ignored)
    kind SPACE: d/dx^i - N^k_i d/dy_k
    kind VERTICAL: d/dy_i
    """

    kind: Kind
    index: int
    nlc: NonlinearConnection

    def __post_init__(self) -> None:
        if not 0 <= self.index < self.kind.extent(self.nlc.space.n):
            raise IndexOutOfRange(
                f"Index {self.index} out of range for a {self.kind.name} "
                f"frame vector with n = {self.nlc.space.n}.")

    def __str__(self) -> str:
        match self.kind:
            case Kind.TIME:
                return f"d/d{self.nlc.space.time_coord}"
            case Kind.SPACE:
                return f"d/d{self.nlc.space.space_coords[self.index]}"
        return f"d/d{self.nlc.space.fiber_coords[self.index]}"


def time_op(nlc: NonlinearConnection) -> FrameOp:
    return FrameOp(Kind.TIME, 0, nlc)


def space_op(nlc: NonlinearConnection, i: int) -> FrameOp:
    return FrameOp(Kind.SPACE, i, nlc)


def vertical_op(nlc: NonlinearConnection, i: int) -> FrameOp:
    return FrameOp(Kind.VERTICAL, i, nlc)


def apply_frame(op: FrameOp, f: Expr) -> Expr:
    """
    Apply a frame vector field to a scalar expression.

    :param op: Frame operator
    :param f: Expression over (t, x, y)
    :return: Canonical (not expanded) result
    """
    space = op.nlc.space
    if op.kind is Kind.VERTICAL:
        return differentiate(f, space.fiber_coords[op.index])
    if op.kind is Kind.TIME:
        lead = differentiate(f, space.time_coord)
        coeffs = op.nlc.M
    else:
        lead = differentiate(f, space.space_coords[op.index])
        coeffs = op.nlc.N[:, op.index]
    return add(lead, *(neg(mul(coeffs[k], differentiate(f, y)))
                       for k, y in enumerate(space.fiber_coords)
                       if y in f.free_symbols))


def bracket(a: FrameOp, b: FrameOp, f: Expr) -> Expr:
    """[A, B] f = A(B f) - B(A f)."""
    return add(apply_frame(a, apply_frame(b, f)),
               neg(apply_frame(b, apply_frame(a, f))))


def bracket_tensors(nlc: NonlinearConnection) -> tuple[Array, Array]:
    """
    R1[r][j] = dM^r/dx^j - dN^r_j/dt and
    Rij[r][i][j] = dN^r_i/dx^j - dN^r_j/dx^i (adapted derivatives).

    Rij is antisymmetric in (i, j) with a literal 0 diagonal.
    """
    n = nlc.space.n
    t = time_op(nlc)
    xs = [space_op(nlc, j) for j in range(n)]
    R1 = expr_array((n, n))
    Rij = expr_array((n, n, n))
    for r in range(n):
        for j in range(n):
            R1[r, j] = simplify(add(apply_frame(xs[j], nlc.M[r]),
                                    neg(apply_frame(t, nlc.N[r, j]))))
        for i in range(n):
            for j in range(i + 1, n):
                value = simplify(add(apply_frame(xs[j], nlc.N[r, i]),
                                     neg(apply_frame(xs[i], nlc.N[r, j]))))
                Rij[r, i, j] = value
                Rij[r, j, i] = neg(value)
    return R1, Rij


def bracket_residuals(nlc: NonlinearConnection, f: Expr
                      ) -> list[tuple[str, Expr]]:
    """
    Residuals of the six bracket identities of the adapted frame on f.

    Each residual vanishes identically for every nonlinear connection.
    """
    space = nlc.space
    n = space.n
    R1, Rij = bracket_tensors(nlc)
    t = time_op(nlc)
    xs = [space_op(nlc, j) for j in range(n)]
    ys = [vertical_op(nlc, j) for j in range(n)]
    dfy = [differentiate(f, y) for y in space.fiber_coords]

    def along_fiber(coeffs) -> Expr:
        return add(*(mul(c, d) for c, d in zip(coeffs, dfy)))

    out: list[tuple[str, Expr]] = [
        (f"[{t}, {t}]", bracket(t, t, f))]
    for j in range(n):
        out.append((f"[{t}, {xs[j]}]", add(
            bracket(t, xs[j], f), neg(along_fiber(R1[:, j])))))
        out.append((f"[{t}, {ys[j]}]", add(
            bracket(t, ys[j], f),
            neg(along_fiber([differentiate(m, space.fiber_coords[j])
                             for m in nlc.M])))))
    for i, j in itertools.product(range(n), repeat=2):
        out.append((f"[{xs[i]}, {ys[j]}]", add(
            bracket(xs[i], ys[j], f),
            neg(along_fiber([differentiate(nlc.N[r, i],
                                           space.fiber_coords[j])
                             for r in range(n)])))))
        out.append((f"[{ys[i]}, {ys[j]}]", bracket(ys[i], ys[j], f)))
        if i < j:
            out.append((f"[{xs[i]}, {xs[j]}]", add(
                bracket(xs[i], xs[j], f), neg(along_fiber(Rij[:, i, j])))))
    log.debug(f"{len(out)} bracket residuals built.")
    return out
