"""
Command line interface

jetgeo compute   --config F --what {christoffel|nlc|connection|torsion|
                                    curvature|deflection|em}
jetgeo verify    --config F --what {ricci|deflection|brackets|covariance|
                                    definition|all}
jetgeo transform --config F --change G --what {nlc|connection|check}

Exit code 0 if every identity holds, 1 on an identity failure, 2 on an
input error.

Copyright (c) 2024.
"""

from __future__ import annotations

import argparse
import logging
import time
from dataclasses import replace

import numpy as np

from src.lib import config
from src.lib.curvtor import (curvature_components, curvature_from_definition,
                             torsion_components, torsion_from_definition)
from src.lib.errors import (EvaluationError, InputError,
                            InternalInconsistency, MissingSection)
from src.lib.frames import bracket_residuals
from src.lib.geometry import (GammaConnection, berwald_connection,
                              canonical_nlc, christoffel_spatial,
                              christoffel_time)
from src.lib.helpers import print_time, progress
from src.lib.identities import (IdentityReport, check_residual,
                                deflection_identities_check,
                                deflection_tensors, em_two_form, ricci_check)
from src.lib.randomized import random_dvector, random_function
from src.lib.report import (MACHINE, TEXT, Report, christoffel_section,
                            connection_section, curvature_section,
                            deflection_section, em_section, nlc_section,
                            render_report, torsion_section)
from src.lib.scene import SceneConfig, load_change, load_config, scene_seed
from src.lib.symexpr import add, neg
from src.lib.transform import (CoordChange, affine_time_change,
                               connection_difference, covariance_check,
                               transform_christoffel_spatial,
                               transform_christoffel_time,
                               transform_connection, transform_metrics,
                               transform_nlc)

log: logging.Logger = logging.getLogger(__name__)

COMPUTE_CHOICES = ("christoffel", "nlc", "connection", "torsion",
                   "curvature", "deflection", "em")
VERIFY_CHOICES = ("ricci", "deflection", "brackets", "covariance",
                  "definition", "all")
TRANSFORM_CHOICES = ("nlc", "connection", "check")
RANDOM_DVECTORS = 3
RANDOM_FUNCTIONS = 5

EXIT_OK = 0
EXIT_FAILED = 1
EXIT_INPUT = 2


def get_parser() -> argparse.ArgumentParser:
    """Return the argument parser of jetgeo."""
    parser = argparse.ArgumentParser(
        prog="jetgeo",
        description="Gamma-linear connections on the 1-jet space")
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p: argparse.ArgumentParser) -> None:
        p.add_argument("--config", required=True, type=str,
                       help="Scene file (or machine-mode report).")
        p.add_argument("--connection", choices=("berwald", "file"),
                       default="berwald",
                       help="Berwald connection of the metrics or the "
                            "connection given in the scene file.")
        p.add_argument("--out", type=str, default=None,
                       help="Write the report to this file instead of "
                            "stdout.")
        p.add_argument("--machine", action="store_true",
                       help="Machine readable (JSON) report.")

    compute = sub.add_parser("compute", help="Compute geometric objects.")
    common(compute)
    compute.add_argument("--what", required=True, choices=COMPUTE_CHOICES)

    verify = sub.add_parser("verify", help="Verify identities.")
    common(verify)
    verify.add_argument("--what", required=True, choices=VERIFY_CHOICES)
    verify.add_argument("--samples", type=int, default=None,
                        help="Sample points per residual component.")
    verify.add_argument("--seed", type=int, default=None,
                        help="Seed of sample points and random objects.")
    verify.add_argument("--tol", type=float, default=None,
                        help="Tolerance of the zero test.")
    verify.add_argument("--change", type=str, default=None,
                        help="Change file for the covariance check "
                             "(default t~ = 2t).")

    transform = sub.add_parser("transform",
                               help="Apply a change of coordinates.")
    common(transform)
    transform.add_argument("--change", required=True, type=str,
                           help="Change file.")
    transform.add_argument("--what", required=True,
                           choices=TRANSFORM_CHOICES)
    transform.add_argument("--samples", type=int, default=None)
    transform.add_argument("--seed", type=int, default=None)
    transform.add_argument("--tol", type=float, default=None)
    return parser


# COMPUTE----------------------------------------------------------------------

def compute(scene: SceneConfig, what: str, which: str) -> Report:
    report = Report(f"compute {what}", scene.space)
    match what:
        case "christoffel":
            if not scene.has_metrics:
                raise MissingSection("Christoffel symbols need h11 and phi.")
            report.add(christoffel_section(christoffel_time(scene.h),
                                           christoffel_spatial(scene.phi)))
        case "nlc":
            report.add(nlc_section(scene.connection(which).nlc
                                   if which == "file" else scene.nlc()))
        case "connection":
            conn = scene.connection(which)
            report.add(nlc_section(conn.nlc))
            report.add(connection_section(conn))
        case "torsion":
            report.add(torsion_section(
                torsion_components(scene.connection(which))))
        case "curvature":
            report.add(curvature_section(
                curvature_components(scene.connection(which))))
        case "deflection":
            report.add(deflection_section(
                deflection_tensors(scene.connection(which))))
        case "em":
            if scene.dlow is None:
                raise MissingSection("The em 2-form needs Dlow[i][j] "
                                     "entries.")
            report.add(em_section(em_two_form(scene.dlow)))
    return report


# VERIFY-----------------------------------------------------------------------

def _suffixed(rep: IdentityReport, suffix: str) -> IdentityReport:
    return IdentityReport.of(replace(r, name=f"{r.name}{suffix}")
                             for r in rep)


def verify_ricci(scene: SceneConfig, conn: GammaConnection, samples: int,
                 seed: int, tol: float | None) -> IdentityReport:
    """Ricci identities of the scene's d-vector, else of random ones."""
    ts = torsion_components(conn)
    cs = curvature_components(conn, ts)
    if scene.dvector is not None:
        return ricci_check(conn, scene.dvector, samples, seed, tol, ts, cs)
    rng = np.random.default_rng(seed)
    rep = IdentityReport()
    for k in range(RANDOM_DVECTORS):
        X = random_dvector(scene.space, rng)
        rep = rep + _suffixed(ricci_check(conn, X, samples, seed, tol, ts,
                                          cs), f"[X{k + 1}]")
    return rep


def verify_brackets(scene: SceneConfig, conn: GammaConnection, samples: int,
                    seed: int, tol: float | None) -> IdentityReport:
    rng = np.random.default_rng(seed)
    results = []
    for k in range(RANDOM_FUNCTIONS):
        f = random_function(scene.space, rng)
        for name, residual in bracket_residuals(conn.nlc, f):
            arr = np.empty((), dtype=object)
            arr[()] = residual
            results.append(check_residual(f"brackets/{name}[f{k + 1}]", arr,
                                          scene.space, samples, seed, tol))
    return IdentityReport.of(results)


def verify_definition(conn: GammaConnection, samples: int, seed: int,
                      tol: float | None) -> IdentityReport:
    """Formula families against the torsion and curvature definitions."""
    results = []
    pairs = (("torsion", torsion_components(conn).families(),
              torsion_from_definition(conn).families()),
             ("curvature", curvature_components(conn).families(),
              curvature_from_definition(conn).families()))
    for label, formula, definition in pairs:
        for name, T in formula.items():
            residual = np.empty(T.components.shape, dtype=object)
            for idx in np.ndindex(residual.shape):
                residual[idx] = add(T.components[idx],
                                    neg(definition[name].components[idx]))
            results.append(check_residual(f"definition/{label}/{name}",
                                          residual, conn.space, samples,
                                          seed, tol))
    return IdentityReport.of(results)


def verify_covariance(scene: SceneConfig, conn: GammaConnection,
                      ch: CoordChange, samples: int, seed: int,
                      tol: float | None) -> IdentityReport:
    """
    Compute-then-transform against transform-then-compute for the metric
    level objects (if any), the torsion, curvature and deflection sets.
    """
    space = scene.space
    results = []
    if scene.has_metrics:
        h_new, phi_new = transform_metrics(scene.h, scene.phi, ch)
        H = christoffel_time(scene.h)
        arr = np.empty((), dtype=object)
        arr[()] = add(transform_christoffel_time(H, ch),
                      neg(christoffel_time(h_new)))
        results.append(check_residual("covariance/christoffel/H", arr, space,
                                      samples, seed, tol))
        pushed = transform_christoffel_spatial(christoffel_spatial(scene.phi),
                                               ch)
        direct = christoffel_spatial(phi_new)
        gamma = np.empty(pushed.shape, dtype=object)
        for idx in np.ndindex(gamma.shape):
            gamma[idx] = add(pushed[idx], neg(direct[idx]))
        results.append(check_residual("covariance/christoffel/gamma", gamma,
                                      space, samples, seed, tol))
        nlc_new = transform_nlc(canonical_nlc(scene.h, scene.phi), ch)
        canon = canonical_nlc(h_new, phi_new)
        for name, a, b in (("M", nlc_new.M, canon.M),
                           ("N", nlc_new.N, canon.N)):
            diff = np.empty(a.shape, dtype=object)
            for idx in np.ndindex(a.shape):
                diff[idx] = add(a[idx], neg(b[idx]))
            results.append(check_residual(f"covariance/canonical/{name}",
                                          diff, space, samples, seed, tol))
        berwald = transform_connection(berwald_connection(scene.h, scene.phi),
                                       ch)
        for name, diff in connection_difference(
                berwald, berwald_connection(h_new, phi_new)):
            results.append(check_residual(f"covariance/berwald/{name}", diff,
                                          space, samples, seed, tol))
    ts = torsion_components(conn)
    rep = IdentityReport.of(results)
    rep = rep + covariance_check(ts, conn, ch, samples, seed, tol)
    rep = rep + covariance_check(curvature_components(conn, ts), conn, ch,
                                 samples, seed, tol)
    rep = rep + covariance_check(deflection_tensors(conn), conn, ch, samples,
                                 seed, tol)
    return rep


def verify(scene: SceneConfig, args: argparse.Namespace) -> Report:
    conn = scene.connection(args.connection)
    samples = args.samples if args.samples is not None else (
        scene.samples if scene.samples is not None
        else config.DEFAULT_SAMPLES)
    seed = scene_seed(scene, args.seed)
    tol = args.tol if args.tol is not None else scene.tolerance
    what = ("ricci", "deflection", "brackets", "covariance", "definition") \
        if args.what == "all" else (args.what,)
    report = Report(f"verify {args.what}", scene.space)
    rep = IdentityReport()
    for item in progress(what, "verify"):
        start = time.monotonic()
        match item:
            case "ricci":
                rep = rep + verify_ricci(scene, conn, samples, seed, tol)
            case "deflection":
                rep = rep + deflection_identities_check(conn, samples, seed,
                                                        tol)
            case "brackets":
                rep = rep + verify_brackets(scene, conn, samples, seed, tol)
            case "covariance":
                ch = load_change(args.change, scene.space) \
                    if args.change else affine_time_change(scene.space)
                rep = rep + verify_covariance(scene, conn, ch, samples, seed,
                                              tol)
            case "definition":
                rep = rep + verify_definition(conn, samples, seed, tol)
        log.info(f"Verified {item} in "
                 f"{print_time(time.monotonic() - start)}.")
    report.identities = rep
    return report


# TRANSFORM--------------------------------------------------------------------

def transform(scene: SceneConfig, args: argparse.Namespace) -> Report:
    ch = load_change(args.change, scene.space)
    report = Report(f"transform {args.what}", scene.space)
    conn = scene.connection(args.connection)
    match args.what:
        case "nlc":
            nlc = scene.nlc() if args.connection == "berwald" else conn.nlc
            report.add(nlc_section(transform_nlc(nlc, ch)))
        case "connection":
            new = transform_connection(conn, ch)
            report.add(nlc_section(new.nlc))
            report.add(connection_section(new))
        case "check":
            samples = args.samples if args.samples is not None else (
                scene.samples if scene.samples is not None
                else config.DEFAULT_SAMPLES)
            tol = args.tol if args.tol is not None else scene.tolerance
            report.identities = verify_covariance(
                scene, conn, ch, samples, scene_seed(scene, args.seed), tol)
    return report


# MAIN-------------------------------------------------------------------------

def _emit(text: str, out: str | None) -> None:
    if out is None:
        print(text, end="")
    else:
        with open(out, "w") as fd:
            fd.write(text)
        log.info(f"Report written to {out}.")


def main(args: list[str]) -> int:
    """
    Run one jetgeo command.

    :param args: Command line arguments (argv[1:])
    :return: Exit code
    """
    args = get_parser().parse_args(args)
    start = time.monotonic()
    try:
        scene = load_config(args.config)
        match args.command:
            case "compute":
                report = compute(scene, args.what, args.connection)
            case "verify":
                report = verify(scene, args)
            case _:
                report = transform(scene, args)
        _emit(render_report(report, MACHINE if args.machine else TEXT),
              args.out)
    except (InputError, EvaluationError) as e:
        log.error(f"{args.command} failed: {e}")
        return EXIT_INPUT
    except InternalInconsistency as e:
        log.error(f"{args.command}: {e}")
        return EXIT_FAILED
    log.info(f"{args.command} {args.what} done in "
             f"{print_time(time.monotonic() - start)}.")
    if not report.passed:
        log.error(f"{len(report.identities.failed())} identities failed.")
        return EXIT_FAILED
    return EXIT_OK
