"""
Coordinate changes of the 1-jet space

A change t~ = t~(t), x~ = x~(x) comes with user supplied inverses written in
the new coordinates. Objects of the old chart are pushed forward and
re-expressed in the new chart, which reuses the coordinate names of the
old one.

Copyright (c) 2024.
"""

from __future__ import annotations

import itertools
import logging
from dataclasses import dataclass

import numpy as np

from src.lib import config
from src.lib.curvtor import (CurvatureSet, TorsionSet, curvature_components,
                             torsion_components)
from src.lib.dtensor import DTensor, Variance, covariant
from src.lib.errors import (EvaluationSingularity, JacobianSingular,
                            NotProductChange, ShapeMismatch)
from src.lib.geometry import (BLOCK_NAMES, KINDS, Array, GammaConnection,
                              JetSpace, Kind, NonlinearConnection,
                              SpatialMetric, TimeMetric, determinant,
                              expr_array, map_array)
from src.lib.identities import (DeflectionSet, IdentityReport,
                                check_residual, deflection_tensors)
from src.lib.symexpr import (Expr, SampleBox, add, differentiate, evaluate,
                             mul, neg, power, sample_points, simplify,
                             substitute)

log: logging.Logger = logging.getLogger(__name__)


@dataclass(frozen=True, eq=False)
class Jacobian:
    """
    dtdt_new = dt~/dt, its derivative and J[k][j] = dx~^k/dx^j with the
    second derivatives H[s][i][j] of x~, all in the old chart, and
    Jinv[i][l] = dx^i/dx~^l in the new chart.
    """

    dtdt_new: Expr
    d2t_new: Expr
    J: Array
    hessian: Array
    Jinv: Array


@dataclass(frozen=True, eq=False)
class CoordChange:
    space: JetSpace
    t_new: Expr
    x_new: Array
    t_old: Expr
    x_old: Array
    jacobian: Jacobian

    def to_new(self, e: Expr) -> Expr:
        """Re-express an old chart function over (t, x, y) in the new chart."""
        space = self.space
        n = space.n
        tp = substitute(self.jacobian.dtdt_new,
                        {space.time_coord: self.t_old})
        mapping: dict[str, Expr] = {space.time_coord: self.t_old}
        for i in range(n):
            mapping[space.space_coords[i]] = self.x_old[i]
        for j in range(n):
            mapping[space.fiber_coords[j]] = add(*(
                mul(self.jacobian.Jinv[j, i], tp, space.y(i))
                for i in range(n)))
        return simplify(substitute(e, mapping))

    def map_point(self, p: dict[str, float]) -> dict[str, float]:
        """Image of an old chart point (fibre coordinates included)."""
        space = self.space
        q = {name: value for name, value in p.items()
             if name not in space.coordinates}
        q[space.time_coord] = evaluate(self.t_new, p)
        for i, x in enumerate(space.space_coords):
            q[x] = evaluate(self.x_new[i], p)
        fiber = transform_fiber(self)
        for k, y in enumerate(space.fiber_coords):
            q[y] = evaluate(fiber[k], p)
        return q


# CONSTRUCTION-----------------------------------------------------------------

def _check_depends(space: JetSpace, e: Expr, allowed: tuple[str, ...],
                   what: str) -> None:
    extra = e.free_symbols - set(allowed) - {p for p, _ in space.params}
    if extra:
        raise NotProductChange(
            f"{what} = {e} depends on {', '.join(sorted(extra))}; only "
            f"t~(t), x~(x) changes are allowed.")


def _corners(space: JetSpace, box: SampleBox) -> list[dict[str, float]]:
    names = (space.time_coord,) + space.space_coords
    ranges = [box.ranges.get(name, box.default) for name in names]
    out = []
    for corner in itertools.product(*ranges):
        p = dict(box.fixed)
        p.update(zip(names, corner))
        out.append(p)
    return out


def _nonvanishing(e: Expr, points: list[dict[str, float]], what: str
                  ) -> None:
    """Raise JacobianSingular unless e keeps one sign away from 0."""
    signs = set()
    for p in points:
        try:
            v = evaluate(e, p)
        except EvaluationSingularity as err:
            raise JacobianSingular(f"{what} is singular: {err}") from err
        if abs(v) < config.JACOBIAN_EPS:
            raise JacobianSingular(f"{what} = {e} vanishes near {p}.")
        signs.add(v > 0)
    if len(signs) > 1:
        raise JacobianSingular(f"{what} = {e} changes sign on the box.")


def change_of_coords(space: JetSpace, t_new: Expr, x_new, t_old: Expr,
                     x_old, box: SampleBox | None = None,
                     samples: int | None = None,
                     seed: int | None = None) -> CoordChange:
    """
    Validate a change of coordinates and cache its Jacobian.

    :param space: Jet space of the old chart
    :param t_new: t~ in terms of t
    :param x_new: x~^i in terms of x
    :param t_old: t in terms of t~ (written with the name of t)
    :param x_old: x^i in terms of x~ (written with the names of x)
    :param box: [optional] Sample box of the old chart
    :return: CoordChange
    """
    n = space.n
    x_new = np.asarray(x_new, dtype=object)
    x_old = np.asarray(x_old, dtype=object)
    if x_new.shape != (n,) or x_old.shape != (n,):
        raise ShapeMismatch(f"Expected {n} spatial components, got "
                            f"{x_new.shape} and {x_old.shape}.")
    t = (space.time_coord,)
    _check_depends(space, t_new, t, "t_new")
    _check_depends(space, t_old, t, "t_old")
    for i in range(n):
        _check_depends(space, x_new[i], space.space_coords,
                       f"x_new[{i + 1}]")
        _check_depends(space, x_old[i], space.space_coords,
                       f"x_old[{i + 1}]")
    tp = simplify(differentiate(t_new, space.time_coord))
    J = expr_array((n, n))
    Jinv = expr_array((n, n))
    hessian = expr_array((n, n, n))
    for k, j in itertools.product(range(n), repeat=2):
        J[k, j] = simplify(differentiate(x_new[k], space.space_coords[j]))
        Jinv[k, j] = simplify(differentiate(x_old[k], space.space_coords[j]))
    for s, i, j in itertools.product(range(n), repeat=3):
        hessian[s, i, j] = simplify(differentiate(J[s, i],
                                                  space.space_coords[j]))
    jac = Jacobian(tp, simplify(differentiate(tp, space.time_coord)), J,
                   hessian, Jinv)

    box = space.sample_box() if box is None else box
    samples = config.DEFAULT_SAMPLES if samples is None else samples
    seed = config.DEFAULT_SEED if seed is None else seed
    base = (space.time_coord,) + space.space_coords
    points = _corners(space, box) + sample_points(base, samples, seed, box)
    _nonvanishing(tp, points, "dt_new/dt")
    _nonvanishing(determinant(J), points, "det(dx_new/dx)")
    ch = CoordChange(space, t_new, x_new, t_old, x_old, jac)
    _check_inverse(ch, points)
    log.debug(f"Coordinate change validated on {len(points)} points.")
    return ch


def _check_inverse(ch: CoordChange, points: list[dict[str, float]]) -> None:
    """Round trip old -> new -> old and J . Jinv = 1 at every point."""
    space = ch.space
    n = space.n
    for p in points:
        try:
            q = dict(p)
            q[space.time_coord] = evaluate(ch.t_new, p)
            for i, x in enumerate(space.space_coords):
                q[x] = evaluate(ch.x_new[i], p)
            back = [evaluate(ch.t_old, q)] + [evaluate(ch.x_old[i], q)
                                              for i in range(n)]
            J = np.array([[evaluate(ch.jacobian.J[k, j], p)
                           for j in range(n)] for k in range(n)])
            Jinv = np.array([[evaluate(ch.jacobian.Jinv[k, j], q)
                              for j in range(n)] for k in range(n)])
        except EvaluationSingularity as err:
            raise JacobianSingular(
                f"Inverse change is singular: {err}") from err
        orig = [p[space.time_coord]] + [p[x] for x in space.space_coords]
        for a, b in zip(back, orig):
            if abs(a - b) > config.TOLERANCE * (1.0 + abs(b)):
                raise JacobianSingular(
                    f"Supplied inverse does not invert the change at {p}.")
        if not np.allclose(J @ Jinv, np.eye(n), atol=config.TOLERANCE,
                           rtol=config.TOLERANCE):
            raise JacobianSingular(
                f"J . Jinv differs from the identity at {p}.")


def identity_change(space: JetSpace) -> CoordChange:
    xs = np.array([space.x(i) for i in range(space.n)], dtype=object)
    return change_of_coords(space, space.t, xs, space.t, xs.copy())


def affine_time_change(space: JetSpace, k: int = 2) -> CoordChange:
    """t~ = k t, x~ = x."""
    xs = np.array([space.x(i) for i in range(space.n)], dtype=object)
    return change_of_coords(space, mul(k, space.t), xs,
                            mul(power(k, -1), space.t), xs.copy())


def compose(first: CoordChange, second: CoordChange) -> CoordChange:
    """The change `first` followed by `second`."""
    space = first.space
    old = {space.time_coord: first.t_new}
    old.update(zip(space.space_coords, first.x_new))
    new = {space.time_coord: second.t_old}
    new.update(zip(space.space_coords, second.x_old))
    return change_of_coords(
        space, simplify(substitute(second.t_new, old)),
        [simplify(substitute(e, old)) for e in second.x_new],
        simplify(substitute(first.t_old, new)),
        [simplify(substitute(e, new)) for e in first.x_old])


# PUSH FORWARD-----------------------------------------------------------------

def transform_fiber(ch: CoordChange) -> Array:
    """y~^k = (dx~^k/dx^j)(dt/dt~) y^j, in the old chart."""
    space = ch.space
    n = space.n
    a = power(ch.jacobian.dtdt_new, -1)
    return np.array([simplify(mul(a, add(*(mul(ch.jacobian.J[k, j],
                                               space.y(j))
                                           for j in range(n)))))
                     for k in range(n)], dtype=object)


def transform_nlc(nlc: NonlinearConnection, ch: CoordChange
                  ) -> NonlinearConnection:
    """
    M~^k = a^2 J^k_j M^j - a dy~^k/dt,
    N~^k_l = dx^i/dx~^l (a J^k_j N^j_i - dy~^k/dx^i), with a = dt/dt~.
    """
    space = ch.space
    n = space.n
    jac = ch.jacobian
    a = power(jac.dtdt_new, -1)
    fiber = transform_fiber(ch)
    M = expr_array((n,))
    N = expr_array((n, n))
    for k in range(n):
        M[k] = ch.to_new(add(
            mul(power(a, 2), add(*(mul(jac.J[k, j], nlc.M[j])
                                   for j in range(n)))),
            neg(mul(a, differentiate(fiber[k], space.time_coord)))))
        inner = [ch.to_new(add(
            mul(a, add(*(mul(jac.J[k, j], nlc.N[j, i]) for j in range(n)))),
            neg(differentiate(fiber[k], space.space_coords[i]))))
            for i in range(n)]
        for l in range(n):
            N[k, l] = simplify(add(*(mul(jac.Jinv[i, l], inner[i])
                                     for i in range(n))))
    return NonlinearConnection(space, M, N)


def _push(ch: CoordChange, arr: Array, up_axes: list[int],
          down_axes: list[int], scale: Expr) -> Array:
    """
    scale * J^{up}... arr ... Jinv_{down} with arr re-expressed in the new
    chart; up axes take J (old chart, re-expressed), down axes Jinv.
    """
    out = np.empty(arr.shape, dtype=object)
    for idx in np.ndindex(arr.shape):
        out[idx] = ch.to_new(mul(scale, arr[idx]))
    J_new = np.empty(ch.jacobian.J.shape, dtype=object)
    for idx in np.ndindex(J_new.shape):
        J_new[idx] = ch.to_new(ch.jacobian.J[idx])
    for axis in up_axes:
        out = _apply_axis(out, axis, J_new)
    for axis in down_axes:
        out = _apply_axis(out, axis, ch.jacobian.Jinv.T)
    return map_array(simplify, out)


def _apply_axis(arr: Array, axis: int, F: Array) -> Array:
    """Contract F[new][old] with one axis of arr."""
    moved = np.moveaxis(arr, axis, 0)
    out = expr_array((F.shape[0],) + moved.shape[1:])
    for idx in np.ndindex(moved.shape[1:]):
        for p in range(F.shape[0]):
            out[(p,) + idx] = add(*(mul(F[p, r], moved[(r,) + idx])
                                    for r in range(F.shape[1])))
    return np.moveaxis(out, 0, axis)


def transform_connection(conn: GammaConnection, ch: CoordChange
                         ) -> GammaConnection:
    """Push the nine adapted blocks forward, inhomogeneous terms included."""
    space = ch.space
    n = space.n
    jac = ch.jacobian
    a = power(jac.dtdt_new, -1)
    b = jac.dtdt_new
    da = differentiate(a, space.time_coord)
    blocks = {}
    blocks["Gbar"] = ch.to_new(mul(a, add(conn.Gbar,
                                          neg(mul(a, jac.d2t_new)))))
    blocks["G"] = _push(ch, conn.G, [0], [1], a)
    Gv = _push(ch, conn.Gv, [0], [1], a)
    shift = ch.to_new(da)
    for k in range(n):
        Gv[k, k] = simplify(add(Gv[k, k], neg(shift)))
    blocks["Gv"] = Gv
    blocks["Lbar"] = _push(ch, conn.Lbar, [], [0], 1)
    for name in ("L", "Lv"):
        inhom = expr_array((n, n, n))
        for s, i, j in itertools.product(range(n), repeat=3):
            inhom[s, i, j] = add(
                *(mul(jac.J[s, r], getattr(conn, name)[r, i, j])
                  for r in range(n)), neg(jac.hessian[s, i, j]))
        # The J factor of the upper index is already applied above.
        blocks[name] = _push(ch, inhom, [], [1, 2], 1)
    blocks["Cbar"] = _push(ch, conn.Cbar, [], [0], b)
    blocks["C"] = _push(ch, conn.C, [0], [1, 2], b)
    blocks["Cv"] = _push(ch, conn.Cv, [0], [1, 2], b)
    return GammaConnection.from_blocks(transform_nlc(conn.nlc, ch), blocks)


def transform_metrics(h: TimeMetric, phi: SpatialMetric, ch: CoordChange
                      ) -> tuple[TimeMetric, SpatialMetric]:
    """h~ = h (dt/dt~)^2, phi~_pq = phi_ij dx^i/dx~^p dx^j/dx~^q."""
    space = ch.space
    n = space.n
    a = power(ch.jacobian.dtdt_new, -1)
    h_new = ch.to_new(mul(h.h11, power(a, 2)))
    pushed = _push(ch, phi.phi, [], [0, 1], 1)
    for p in range(n):
        for q in range(p + 1, n):
            pushed[q, p] = pushed[p, q]
    return TimeMetric(space, h_new), SpatialMetric(space, pushed)


def transform_christoffel_time(H: Expr, ch: CoordChange) -> Expr:
    """H~ = H dt/dt~ + (dt~/dt) d^2t/dt~^2."""
    space = ch.space
    t = space.time_coord
    a_new = simplify(differentiate(ch.t_old, t))
    b_new = simplify(power(a_new, -1))
    return simplify(add(mul(ch.to_new(H), a_new),
                        mul(b_new, differentiate(a_new, t))))


def transform_christoffel_spatial(gamma: Array, ch: CoordChange) -> Array:
    """
    gamma~^p_qr = gamma^i_jk J^p_i Jinv^j_q Jinv^k_r
                  + J^p_l d^2 x^l / dx~^q dx~^r.
    """
    space = ch.space
    n = space.n
    out = _push(ch, gamma, [0], [1, 2], 1)
    for p, q, r in itertools.product(range(n), repeat=3):
        extra = add(*(mul(ch.to_new(ch.jacobian.J[p, l]),
                          differentiate(ch.jacobian.Jinv[l, q],
                                        space.space_coords[r]))
                      for l in range(n)))
        out[p, q, r] = simplify(add(out[p, q, r], extra))
    return out


def _slot_factors(ch: CoordChange) -> dict[tuple[Kind, Variance], Array]:
    jac = ch.jacobian
    n = ch.space.n
    b = ch.to_new(jac.dtdt_new)
    a = simplify(power(b, -1))
    J_new = np.empty((n, n), dtype=object)
    for idx in np.ndindex((n, n)):
        J_new[idx] = ch.to_new(jac.J[idx])

    def scaled(s: Expr, F: Array) -> Array:
        return map_array(lambda e: simplify(mul(s, e)), F)

    return {
        (Kind.TIME, Variance.UP): np.array([[b]], dtype=object),
        (Kind.TIME, Variance.DOWN): np.array([[a]], dtype=object),
        (Kind.SPACE, Variance.UP): J_new,
        (Kind.SPACE, Variance.DOWN): jac.Jinv.T.copy(),
        (Kind.VERTICAL, Variance.UP): scaled(a, J_new),
        (Kind.VERTICAL, Variance.DOWN): scaled(b, jac.Jinv.T),
    }


def transform_dtensor(T: DTensor, ch: CoordChange) -> DTensor:
    """The d-tensor law: one Jacobian type factor per index slot."""
    factors = _slot_factors(ch)
    out = np.empty(T.components.shape, dtype=object)
    for idx in np.ndindex(out.shape):
        out[idx] = ch.to_new(T.components[idx])
    for axis, slot in enumerate(T.signature):
        out = _apply_axis(out, axis, factors[(slot.kind, slot.variance)])
    return DTensor(T.space, T.signature, map_array(simplify, out))


# COVARIANCE-------------------------------------------------------------------

def _family_residuals(before: dict[str, DTensor], after: dict[str, DTensor],
                      ch: CoordChange, prefix: str
                      ) -> list[tuple[str, Array]]:
    out = []
    for name, tensor in before.items():
        pushed = transform_dtensor(tensor, ch).components
        direct = after[name].components
        residual = np.empty(pushed.shape, dtype=object)
        for idx in np.ndindex(pushed.shape):
            residual[idx] = add(pushed[idx], neg(direct[idx]))
        out.append((f"{prefix}/{name}", residual))
    return out


def covariance_check(obj: DTensor | TorsionSet | CurvatureSet | DeflectionSet,
                     conn: GammaConnection, ch: CoordChange,
                     samples: int | None = None, seed: int | None = None,
                     tol: float | None = None) -> IdentityReport:
    """
    Compare compute-then-transform with transform-then-compute.

    For a DTensor the computation is the covariant derivative along each
    kind of frame vector; for a torsion, curvature or deflection set it is
    the construction of the set from the connection.
    """
    conn_new = transform_connection(conn, ch)
    cases: list[tuple[str, Array]] = []
    if isinstance(obj, DTensor):
        T_new = transform_dtensor(obj, ch)
        for kind in KINDS:
            direct = covariant(T_new, kind, conn_new)
            pushed = transform_dtensor(covariant(obj, kind, conn), ch)
            residual = np.empty(direct.components.shape, dtype=object)
            for idx in np.ndindex(residual.shape):
                residual[idx] = add(pushed.components[idx],
                                    neg(direct.components[idx]))
            cases.append((f"covariance/derivative/{kind.value}", residual))
    elif isinstance(obj, TorsionSet):
        cases = _family_residuals(obj.families(),
                                  torsion_components(conn_new).families(),
                                  ch, "covariance/torsion")
    elif isinstance(obj, CurvatureSet):
        cases = _family_residuals(
            obj.families(), curvature_components(conn_new).families(), ch,
            "covariance/curvature")
    else:
        after = deflection_tensors(conn_new)
        cases = _family_residuals(
            {"Dbar": obj.Dbar, "D": obj.D, "d": obj.d},
            {"Dbar": after.Dbar, "D": after.D, "d": after.d}, ch,
            "covariance/deflection")
    return IdentityReport.of(
        check_residual(name, residual, ch.space, samples, seed, tol)
        for name, residual in cases)


def connection_difference(a: GammaConnection, b: GammaConnection
                          ) -> list[tuple[str, Array]]:
    """Componentwise differences of two connections, nonlinear part first."""
    out = [("M", _diff(a.nlc.M, b.nlc.M)), ("N", _diff(a.nlc.N, b.nlc.N))]
    ba, bb = a.blocks(), b.blocks()
    out += [(name, _diff(ba[name], bb[name])) for name in BLOCK_NAMES]
    return out


def _diff(x: Array, y: Array) -> Array:
    out = np.empty(x.shape, dtype=object)
    for idx in np.ndindex(x.shape):
        out[idx] = add(x[idx], neg(y[idx]))
    return out
