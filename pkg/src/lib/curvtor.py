"""
Torsion and curvature d-tensors of a Gamma-linear connection

Every family is a DTensor. Torsion families have signature
[out^, B_, C_] and hold the components of T(Y_C, Y_B); curvature families
have signature [E^, E_, B_, C_] and hold the components of
R(Y_C, Y_B) Y_E, where Y_B, Y_C, Y_E run through the adapted frame.

Copyright (c) 2024.
"""

from __future__ import annotations

import itertools
import logging
from dataclasses import dataclass, fields

import numpy as np

from src.lib.dtensor import (DTensor, DVector, cov_space, cov_time, down,
                             lie_bracket, nabla, up)
from src.lib.frames import apply_frame, bracket_tensors, space_op, time_op
from src.lib.geometry import (Array, GammaConnection, Kind, expr_array,
                              map_array)
from src.lib.helpers import progress
from src.lib.symexpr import add, differentiate, mul, neg, simplify

log: logging.Logger = logging.getLogger(__name__)

T, S, V = Kind.TIME, Kind.SPACE, Kind.VERTICAL

# Rows of the torsion and curvature tables as (C, B) kinds.
TABLE_ROWS = ((T, T), (S, T), (S, S), (V, T), (V, S), (V, V))

# (name, out, B, C) in table order.
TORSION_FAMILIES = (
    ("Tbar1j", T, T, S), ("T1j", S, T, S), ("R1j", V, T, S),
    ("Tij", S, S, S), ("Rij", V, S, S),
    ("Pbar", T, T, V), ("P1j", V, T, V),
    ("Pij", S, S, V), ("Pijv", V, S, V),
    ("S", V, V, V),
)

# (name, E, B, C) in table order.
CURVATURE_FAMILIES = (
    ("Rbar11k", T, T, S), ("Ril1k", S, T, S), ("Rv1", V, T, S),
    ("Rbar1jk", T, S, S), ("Rlijk", S, S, S), ("Rvjk", V, S, S),
    ("Pbar11k", T, T, V), ("Pli1k", S, T, V), ("Pv11k", V, T, V),
    ("Pbar1jk", T, S, V), ("Plijk", S, S, V), ("Pvjk", V, S, V),
    ("Sbar1jk", T, V, V), ("Slijk", S, V, V), ("Svijk", V, V, V),
)


@dataclass(frozen=True, eq=False)
class TorsionSet:
    Tbar1j: DTensor
    T1j: DTensor
    R1j: DTensor
    Tij: DTensor
    Rij: DTensor
    Pbar: DTensor
    P1j: DTensor
    Pij: DTensor
    Pijv: DTensor
    S: DTensor

    def families(self) -> dict[str, DTensor]:
        return {f.name: getattr(self, f.name) for f in fields(self)}


@dataclass(frozen=True, eq=False)
class CurvatureSet:
    Rbar11k: DTensor
    Ril1k: DTensor
    Rv1: DTensor
    Rbar1jk: DTensor
    Rlijk: DTensor
    Rvjk: DTensor
    Pbar11k: DTensor
    Pli1k: DTensor
    Pv11k: DTensor
    Pbar1jk: DTensor
    Plijk: DTensor
    Pvjk: DTensor
    Sbar1jk: DTensor
    Slijk: DTensor
    Svijk: DTensor

    def families(self) -> dict[str, DTensor]:
        return {f.name: getattr(self, f.name) for f in fields(self)}


def _torsion_signature(out: Kind, b: Kind, c: Kind):
    return (up(out), down(b), down(c))


def _curvature_signature(e: Kind, b: Kind, c: Kind):
    return (up(e), down(e), down(b), down(c))


# TORSION----------------------------------------------------------------------

def torsion_components(conn: GammaConnection) -> TorsionSet:
    """
    The ten torsion families from the adapted coefficients.

    :param conn: Gamma-linear connection
    :return: TorsionSet
    """
    space = conn.space
    n = space.n
    nlc = conn.nlc
    ys = space.fiber_coords
    R1, Rij = bracket_tensors(nlc)
    arrays = {name: expr_array((o.extent(n), b.extent(n), c.extent(n)))
              for name, o, b, c in TORSION_FAMILIES}
    for j in range(n):
        arrays["Tbar1j"][0, 0, j] = conn.Lbar[j]
        arrays["Pbar"][0, 0, j] = conn.Cbar[j]
        for r in range(n):
            arrays["T1j"][r, 0, j] = neg(conn.G[r, j])
            arrays["R1j"][r, 0, j] = R1[r, j]
            arrays["P1j"][r, 0, j] = simplify(add(
                differentiate(nlc.M[r], ys[j]), neg(conn.Gv[r, j])))
    arrays["Rij"] = Rij
    arrays["Pij"] = conn.C.copy()
    for r, i, j in itertools.product(range(n), repeat=3):
        arrays["Pijv"][r, i, j] = simplify(add(
            differentiate(nlc.N[r, i], ys[j]), neg(conn.Lv[r, j, i])))
        if i < j:
            tij = simplify(add(conn.L[r, i, j], neg(conn.L[r, j, i])))
            arrays["Tij"][r, i, j], arrays["Tij"][r, j, i] = tij, neg(tij)
            s = simplify(add(conn.Cv[r, i, j], neg(conn.Cv[r, j, i])))
            arrays["S"][r, i, j], arrays["S"][r, j, i] = s, neg(s)
    return TorsionSet(**{
        name: DTensor(space, _torsion_signature(o, b, c), arrays[name])
        for name, o, b, c in TORSION_FAMILIES})


def torsion_lookup(ts: TorsionSet, out: Kind, b: Kind, c: Kind) -> Array:
    """
    Components T^F_{BC} for any triple of kinds as an array [f][b][c],
    including the structural zeros and the (B, C) swapped entries.
    """
    families = ts.families()
    for name, o, fb, fc in TORSION_FAMILIES:
        if o is not out:
            continue
        if (fb, fc) == (b, c):
            return families[name].components
        if (fb, fc) == (c, b):
            return map_array(
                neg, np.transpose(families[name].components, (0, 2, 1)))
    n = families["Tij"].space.n
    return expr_array((out.extent(n), b.extent(n), c.extent(n)))


# CURVATURE--------------------------------------------------------------------

def _c_block_tensor(conn: GammaConnection, kind: Kind) -> DTensor:
    """The C-block of `kind` as a d-tensor of signature [K^, K_, v_]."""
    return DTensor(conn.space, (up(kind), down(kind), down(V)),
                   conn.coefficients(V, kind).copy())


def _family(conn: GammaConnection, ts: TorsionSet, kind: Kind, b: Kind,
            c: Kind) -> Array:
    """One curvature family with E of the given kind, built literally."""
    space = conn.space
    n = space.n
    nlc = conn.nlc
    e = kind.extent(n)
    ys = space.fiber_coords
    GT = conn.coefficients(T, kind)[..., 0]
    LS = conn.coefficients(S, kind)
    CV = conn.coefficients(V, kind)
    R1 = ts.R1j.components[:, 0, :]
    Rij = ts.Rij.components
    P1j = ts.P1j.components[:, 0, :]
    Pijv = ts.Pijv.components
    # Products of the coefficients cancel in the one-dimensional time rows.
    products = kind is not T
    out = expr_array((e, e, b.extent(n), c.extent(n)))

    def cv_term(l: int, i: int, tensor_column) -> list:
        return [mul(CV[l, i, r], tensor_column[r]) for r in range(n)]

    if (b, c) == (T, S):
        dt = time_op(nlc)
        for l, i, k in itertools.product(range(e), range(e), range(n)):
            terms = [apply_frame(space_op(nlc, k), GT[l, i]),
                     neg(apply_frame(dt, LS[l, i, k]))]
            if products:
                terms += [add(mul(GT[r, i], LS[l, r, k]),
                              neg(mul(LS[r, i, k], GT[l, r])))
                          for r in range(e)]
            terms += cv_term(l, i, R1[:, k])
            out[l, i, 0, k] = simplify(add(*terms))
    elif (b, c) == (S, S):
        for l, i in itertools.product(range(e), repeat=2):
            for j in range(n):
                for k in range(j + 1, n):
                    terms = [apply_frame(space_op(nlc, k), LS[l, i, j]),
                             neg(apply_frame(space_op(nlc, j), LS[l, i, k]))]
                    if products:
                        terms += [add(mul(LS[r, i, j], LS[l, r, k]),
                                      neg(mul(LS[r, i, k], LS[l, r, j])))
                                  for r in range(e)]
                    terms += cv_term(l, i, Rij[:, j, k])
                    value = simplify(add(*terms))
                    out[l, i, j, k], out[l, i, k, j] = value, neg(value)
    elif (b, c) == (T, V):
        c_dt = cov_time(_c_block_tensor(conn, kind), conn).components
        for l, i, k in itertools.product(range(e), range(e), range(n)):
            terms = [differentiate(GT[l, i], ys[k]), neg(c_dt[l, i, k])]
            terms += cv_term(l, i, P1j[:, k])
            out[l, i, 0, k] = simplify(add(*terms))
    elif (b, c) == (S, V):
        c_tensor = _c_block_tensor(conn, kind)
        for j in range(n):
            c_dj = cov_space(c_tensor, j, conn).components
            for l, i, k in itertools.product(range(e), range(e), range(n)):
                terms = [differentiate(LS[l, i, j], ys[k]),
                         neg(c_dj[l, i, k])]
                terms += cv_term(l, i, Pijv[:, j, k])
                out[l, i, j, k] = simplify(add(*terms))
    else:
        for l, i in itertools.product(range(e), repeat=2):
            for j in range(n):
                for k in range(j + 1, n):
                    terms = [differentiate(CV[l, i, j], ys[k]),
                             neg(differentiate(CV[l, i, k], ys[j]))]
                    if products:
                        terms += [add(mul(CV[r, i, j], CV[l, r, k]),
                                      neg(mul(CV[r, i, k], CV[l, r, j])))
                                  for r in range(e)]
                    value = simplify(add(*terms))
                    out[l, i, j, k], out[l, i, k, j] = value, neg(value)
    return out


def curvature_components(conn: GammaConnection,
                         ts: TorsionSet | None = None) -> CurvatureSet:
    """
    The fifteen curvature families from their explicit expressions.

    :param conn: Gamma-linear connection
    :param ts: [optional] Torsion of conn, computed if not given
    :return: CurvatureSet
    """
    ts = torsion_components(conn) if ts is None else ts
    families = {}
    for name, kind, b, c in progress(CURVATURE_FAMILIES, "curvature"):
        families[name] = DTensor(conn.space, _curvature_signature(kind, b, c),
                                 _family(conn, ts, kind, b, c))
        log.debug(f"Curvature family {name} done.")
    return CurvatureSet(**families)


def curvature_lookup(cs: CurvatureSet, kind: Kind, b: Kind, c: Kind
                     ) -> Array:
    """Components R^A_{EBC} for any kinds as an array [a][e][b][c]."""
    families = cs.families()
    for name, fe, fb, fc in CURVATURE_FAMILIES:
        if fe is not kind:
            continue
        if (fb, fc) == (b, c):
            return families[name].components
        if (fb, fc) == (c, b):
            return map_array(
                neg, np.transpose(families[name].components, (0, 1, 3, 2)))
    n = families["Rlijk"].space.n
    e = kind.extent(n)
    return expr_array((e, e, b.extent(n), c.extent(n)))


# DEFINITIONS------------------------------------------------------------------

def _frame(conn: GammaConnection, kind: Kind) -> list[DVector]:
    return [DVector.frame(conn.space, kind, i)
            for i in range(kind.extent(conn.space.n))]


def torsion_from_definition(conn: GammaConnection) -> TorsionSet:
    """Torsion families from T(X, Y) = nabla_X Y - nabla_Y X - [X, Y]."""
    space = conn.space
    n = space.n
    families = {}
    for name, o, b, c in TORSION_FAMILIES:
        arr = expr_array((o.extent(n), b.extent(n), c.extent(n)))
        for (ib, Yb), (ic, Yc) in itertools.product(
                enumerate(_frame(conn, b)), enumerate(_frame(conn, c))):
            forward = nabla(Yc, Yb, conn).part(o).components
            backward = nabla(Yb, Yc, conn).part(o).components
            br = lie_bracket(Yc, Yb, conn.nlc).part(o).components
            for a in range(o.extent(n)):
                arr[a, ib, ic] = simplify(add(forward[a], neg(backward[a]),
                                              neg(br[a])))
        families[name] = DTensor(space, _torsion_signature(o, b, c), arr)
    return TorsionSet(**families)


def curvature_from_definition(conn: GammaConnection) -> CurvatureSet:
    """
    Curvature families from
    R(X, Y) Z = nabla_X nabla_Y Z - nabla_Y nabla_X Z - nabla_[X,Y] Z.
    """
    space = conn.space
    n = space.n
    families = {}
    for name, kind, b, c in progress(CURVATURE_FAMILIES, "curvature"):
        e = kind.extent(n)
        arr = expr_array((e, e, b.extent(n), c.extent(n)))
        for (ib, Yb), (ic, Yc) in itertools.product(
                enumerate(_frame(conn, b)), enumerate(_frame(conn, c))):
            br = lie_bracket(Yc, Yb, conn.nlc)
            for ie, Ye in enumerate(_frame(conn, kind)):
                first = nabla(Yc, nabla(Yb, Ye, conn), conn).part(kind)
                second = nabla(Yb, nabla(Yc, Ye, conn), conn).part(kind)
                third = nabla(br, Ye, conn).part(kind)
                for a in range(e):
                    arr[a, ie, ib, ic] = simplify(add(
                        first.components[a], neg(second.components[a]),
                        neg(third.components[a])))
        families[name] = DTensor(space, _curvature_signature(kind, b, c),
                                 arr)
    return CurvatureSet(**families)
