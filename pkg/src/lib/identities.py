"""
Ricci identities, deflection d-tensors and the electromagnetic 2-form

Copyright (c) 2024.
"""

from __future__ import annotations

import itertools
import logging
from dataclasses import dataclass, field

import numpy as np

from src.lib import config
from src.lib.curvtor import (CurvatureSet, TorsionSet, curvature_components,
                             curvature_lookup, torsion_components,
                             torsion_lookup)
from src.lib.dtensor import (DTensor, DVector, Variance, cov_space, cov_time,
                             cov_vert, covariant, down, liouville, up)
from src.lib.errors import InputError, InternalInconsistency, ShapeMismatch
from src.lib.geometry import (KINDS, Array, GammaConnection, JetSpace, Kind,
                              expr_array, map_array)
from src.lib.helpers import progress
from src.lib.symexpr import (HALF, ONE, ZERO, Expr, add, check_zero, mul,
                             neg, simplify)

log: logging.Logger = logging.getLogger(__name__)

T, S, V = Kind.TIME, Kind.SPACE, Kind.VERTICAL

# (B, C) pairs of the five commutators per d-vector part.
COMMUTATOR_PAIRS = ((T, S), (S, S), (T, V), (S, V), (V, V))


@dataclass(frozen=True, eq=False)
class IdentityResult:
    """Verdict on one identity, residual given per component."""

    name: str
    residual: Array
    verdict: bool
    path: str
    max_residual: float
    samples: int
    seed: int


@dataclass(frozen=True)
class IdentityReport:
    results: tuple[IdentityResult, ...] = field(default_factory=tuple)

    @classmethod
    def of(cls, results) -> IdentityReport:
        return cls(tuple(sorted(results, key=lambda r: r.name)))

    @property
    def passed(self) -> bool:
        return all(r.verdict for r in self.results)

    def failed(self) -> list[IdentityResult]:
        return [r for r in self.results if not r.verdict]

    def __add__(self, other: IdentityReport) -> IdentityReport:
        return IdentityReport.of(self.results + other.results)

    def __iter__(self):
        return iter(self.results)

    def __len__(self) -> int:
        return len(self.results)


def check_residual(name: str, residual: Array, space: JetSpace,
                   samples: int | None = None, seed: int | None = None,
                   tol: float | None = None) -> IdentityResult:
    """
    Zero test of every component of a residual array.

    The path is 'symbolic' if every component simplified to a literal 0.
    """
    samples = config.DEFAULT_SAMPLES if samples is None else samples
    seed = config.DEFAULT_SEED if seed is None else seed
    if samples < 1:
        raise InputError("At least one sample is required.")
    box = space.sample_box()
    verdict, numeric, worst, used = True, False, 0.0, 0
    for e in np.asarray(residual, dtype=object).flat:
        zc = check_zero(e, samples, seed, box, tol)
        verdict = verdict and zc.verdict
        numeric = numeric or zc.path == "numeric"
        worst = max(worst, zc.max_residual)
        used = max(used, zc.samples)
    result = IdentityResult(name, residual, verdict,
                            "numeric" if numeric else "symbolic", worst, used,
                            seed)
    if not verdict:
        log.error(f"Identity {name} fails, max residual {worst:.3e}.")
    else:
        log.debug(f"Identity {name} holds ({result.path}).")
    return result


# RICCI IDENTITIES-------------------------------------------------------------

class CovariantCache:
    """First and second covariant derivatives of one d-tensor, memoized."""

    def __init__(self, T_: DTensor, conn: GammaConnection) -> None:
        self.T_ = T_
        self.conn = conn
        self._memo: dict[tuple[Kind, ...], DTensor] = {}

    def __call__(self, *path: Kind) -> DTensor:
        """T_ differentiated along path[0], then path[1], ..."""
        if path not in self._memo:
            base = self.T_ if len(path) == 1 else self(*path[:-1])
            self._memo[path] = covariant(base, path[-1], self.conn)
        return self._memo[path]


def commutator_residual(T_: DTensor, dir_b: Kind, dir_c: Kind,
                        conn: GammaConnection,
                        ts: TorsionSet | None = None,
                        cs: CurvatureSet | None = None,
                        cache: CovariantCache | None = None) -> DTensor:
    """
    X_{:B:C} - X_{:C:B} - (curvature terms) + X_{:F} T^F_{BC} for a d-tensor
    of any signature. Upper slots contribute +X^F R^A_{FBC}, lower slots
    -X_F R^F_{ABC}.

    :param T_: d-tensor
    :param dir_b: Kind of the first derivative
    :param dir_c: Kind of the second derivative
    :param conn: Gamma-linear connection
    :param ts: [optional] Torsion families of conn
    :param cs: [optional] Curvature families of conn
    :param cache: [optional] Derivatives of T_ shared between calls
    :return: Residual with signature T_.signature + (B_, C_)
    """
    ts = torsion_components(conn) if ts is None else ts
    cs = curvature_components(conn, ts) if cs is None else cs
    cache = CovariantCache(T_, conn) if cache is None else cache
    space = T_.space
    n = space.n
    first = cache(dir_b, dir_c).components
    second = cache(dir_c, dir_b).components
    first_order = {k: cache(k).components for k in KINDS}
    torsion = {k: torsion_lookup(ts, k, dir_b, dir_c) for k in KINDS}
    curvature = {slot.kind: curvature_lookup(cs, slot.kind, dir_b, dir_c)
                 for slot in T_.signature}
    shape = T_.components.shape
    out = expr_array(shape + (dir_b.extent(n), dir_c.extent(n)))
    for idx in np.ndindex(shape):
        for b, c in itertools.product(range(dir_b.extent(n)),
                                      range(dir_c.extent(n))):
            terms = [first[idx + (b, c)], neg(second[idx + (c, b)])]
            for pos, slot in enumerate(T_.signature):
                R = curvature[slot.kind]
                for f in range(slot.extent(n)):
                    x = T_.components[idx[:pos] + (f,) + idx[pos + 1:]]
                    if slot.variance is Variance.UP:
                        terms.append(neg(mul(x, R[idx[pos], f, b, c])))
                    else:
                        terms.append(mul(x, R[f, idx[pos], b, c]))
            for k in KINDS:
                for f in range(k.extent(n)):
                    terms.append(mul(first_order[k][idx + (f,)],
                                     torsion[k][f, b, c]))
            out[idx + (b, c)] = simplify(add(*terms))
    return DTensor(space, T_.signature + (down(dir_b), down(dir_c)), out)


def ricci_name(part: Kind, b: Kind, c: Kind) -> str:
    return f"ricci/{part.value}/{b.value}{c.value}"


def ricci_check(conn: GammaConnection, X: DVector,
                samples: int | None = None, seed: int | None = None,
                tol: float | None = None, ts: TorsionSet | None = None,
                cs: CurvatureSet | None = None) -> IdentityReport:
    """
    Residuals of the fifteen Ricci identities of a d-vector field.

    :param conn: Gamma-linear connection
    :param X: d-vector field
    :param samples: Sample points per component
    :param seed: Seed of the sample points
    :param tol: [optional] Tolerance
    :param ts: [optional] Torsion of conn, computed if not given
    :param cs: [optional] Curvature of conn, computed if not given
    :return: IdentityReport
    """
    ts = torsion_components(conn) if ts is None else ts
    cs = curvature_components(conn, ts) if cs is None else cs
    caches = {part: CovariantCache(X.part(part), conn) for part in KINDS}
    results = []
    cases = list(itertools.product(KINDS, COMMUTATOR_PAIRS))
    for part, (b, c) in progress(cases, "ricci"):
        residual = commutator_residual(caches[part].T_, b, c, conn, ts,
                                       cs, caches[part])
        results.append(check_residual(ricci_name(part, b, c),
                                      residual.components, conn.space,
                                      samples, seed, tol))
    return IdentityReport.of(results)


# DEFLECTION-------------------------------------------------------------------

@dataclass(frozen=True, eq=False)
class DeflectionSet:
    """
    Dbar [v^, hR_] (shape (n, 1)), D [v^, hM_] and d [v^, v_], the
    covariant derivatives of the Liouville d-tensor.
    """

    Dbar: DTensor
    D: DTensor
    d: DTensor


def _closed_forms(conn: GammaConnection) -> DeflectionSet:
    space = conn.space
    n = space.n
    y = [space.y(r) for r in range(n)]
    Dbar = expr_array((n, 1))
    D = expr_array((n, n))
    d = expr_array((n, n))
    for i in range(n):
        Dbar[i, 0] = simplify(add(neg(conn.nlc.M[i]),
                                  *(mul(conn.Gv[i, r], y[r])
                                    for r in range(n))))
        for j in range(n):
            D[i, j] = simplify(add(neg(conn.nlc.N[i, j]),
                                   *(mul(conn.Lv[i, r, j], y[r])
                                     for r in range(n))))
            d[i, j] = simplify(add(ONE if i == j else ZERO,
                                   *(mul(conn.Cv[i, r, j], y[r])
                                     for r in range(n))))
    return DeflectionSet(
        DTensor(space, (up(V), down(T)), Dbar),
        DTensor(space, (up(V), down(S)), D),
        DTensor(space, (up(V), down(V)), d))


def deflection_tensors(conn: GammaConnection) -> DeflectionSet:
    """
    Deflection d-tensors from their closed forms, cross-checked against the
    covariant derivatives of the Liouville d-tensor.

    :raises InternalInconsistency: if the two constructions disagree
    """
    closed = _closed_forms(conn)
    C = liouville(conn.space)
    box = conn.space.sample_box()
    for name, kind in (("Dbar", T), ("D", S), ("d", V)):
        derived = covariant(C, kind, conn).components
        expected = getattr(closed, name).components
        for idx in np.ndindex(expected.shape):
            zc = check_zero(add(derived[idx], neg(expected[idx])), box=box)
            if not zc.verdict:
                raise InternalInconsistency(
                    f"Deflection {name}{list(idx)}: covariant derivative "
                    f"{derived[idx]} differs from closed form "
                    f"{expected[idx]}.")
    return closed


def deflection_name(b: Kind, c: Kind) -> str:
    return f"deflection/{b.value}{c.value}"


def deflection_identities_check(conn: GammaConnection,
                                samples: int | None = None,
                                seed: int | None = None,
                                tol: float | None = None) -> IdentityReport:
    """
    Residuals of the five identities satisfied by the deflection d-tensors.

    Written directly in terms of Dbar, D and d so that they serve as an
    oracle for the Ricci identities of the Liouville d-tensor.
    """
    space = conn.space
    n = space.n
    y = [space.y(r) for r in range(n)]
    defl = deflection_tensors(conn)
    Dbar, D, d = defl.Dbar, defl.D, defl.d
    ts = torsion_components(conn)
    cs = curvature_components(conn, ts)
    tor = ts.families()
    cur = cs.families()

    def contract(left: Array, right: Array) -> Expr:
        return add(*(mul(a, b) for a, b in zip(left, right)))

    res = {pair: expr_array((n, pair[0].extent(n), pair[1].extent(n)))
           for pair in COMMUTATOR_PAIRS}
    d_time = cov_time(d, conn).components
    D_time = cov_time(D, conn).components
    D_space = [cov_space(D, k, conn).components for k in range(n)]
    d_space = [cov_space(d, j, conn).components for j in range(n)]
    d_vert = [cov_vert(d, k, conn).components for k in range(n)]
    D_vert = [cov_vert(D, k, conn).components for k in range(n)]
    for i, k in itertools.product(range(n), repeat=2):
        Dbar_k = cov_space(Dbar, k, conn).components[i, 0]
        res[(T, S)][i, 0, k] = add(
            Dbar_k, neg(D_time[i, k]),
            neg(contract(y, cur["Rv1"].components[i, :, 0, k])),
            mul(Dbar.components[i, 0], tor["Tbar1j"].components[0, 0, k]),
            contract(D.components[i, :], tor["T1j"].components[:, 0, k]),
            contract(d.components[i, :], tor["R1j"].components[:, 0, k]))
        Dbar_vk = cov_vert(Dbar, k, conn).components[i, 0]
        res[(T, V)][i, 0, k] = add(
            Dbar_vk, neg(d_time[i, k]),
            neg(contract(y, cur["Pv11k"].components[i, :, 0, k])),
            mul(Dbar.components[i, 0], tor["Pbar"].components[0, 0, k]),
            contract(d.components[i, :], tor["P1j"].components[:, 0, k]))
        for j in range(n):
            res[(S, S)][i, j, k] = add(
                D_space[k][i, j], neg(D_space[j][i, k]),
                neg(contract(y, cur["Rvjk"].components[i, :, j, k])),
                contract(D.components[i, :], tor["Tij"].components[:, j, k]),
                contract(d.components[i, :], tor["Rij"].components[:, j, k]))
            res[(S, V)][i, j, k] = add(
                D_vert[k][i, j], neg(d_space[j][i, k]),
                neg(contract(y, cur["Pvjk"].components[i, :, j, k])),
                contract(D.components[i, :], tor["Pij"].components[:, j, k]),
                contract(d.components[i, :],
                         tor["Pijv"].components[:, j, k]))
            res[(V, V)][i, j, k] = add(
                d_vert[k][i, j], neg(d_vert[j][i, k]),
                neg(contract(y, cur["Svijk"].components[i, :, j, k])),
                contract(d.components[i, :], tor["S"].components[:, j, k]))
    results = [check_residual(deflection_name(b, c),
                              map_array(simplify, res[(b, c)]),
                              space, samples, seed, tol)
               for b, c in COMMUTATOR_PAIRS]
    return IdentityReport.of(results)


# ELECTROMAGNETISM-------------------------------------------------------------

def em_two_form(Dlow: Array) -> Array:
    """F[i][j] = (Dlow[i][j] - Dlow[j][i]) / 2, antisymmetric."""
    Dlow = np.asarray(Dlow, dtype=object)
    n = Dlow.shape[0]
    if Dlow.shape != (n, n):
        raise ShapeMismatch(f"Dlow must be square, got shape {Dlow.shape}.")
    F = expr_array((n, n))
    for i in range(n):
        for j in range(i + 1, n):
            value = simplify(mul(HALF, add(Dlow[i, j], neg(Dlow[j, i]))))
            F[i, j], F[j, i] = value, neg(value)
    return F
