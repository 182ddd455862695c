"""
Reports of computed objects and identity verdicts

Component names encode the index decoration of the object: lower indices
in the first bracket, upper indices after '^', a time index printed as t,
a vertical index i as (i). Every vertical upper index adds a '(1)' to a
leading decoration bracket, every vertical lower index a '(1)' to the upper
bracket, e.g. P[(1)][t,(2)]^[(1),(1)].

Copyright (c) 2024.
"""

from __future__ import annotations

import json
import logging
from dataclasses import dataclass, field

import numpy as np

from src.lib.curvtor import CurvatureSet, TorsionSet
from src.lib.dtensor import DTensor, Variance
from src.lib.geometry import (BLOCK_NAMES, Array, GammaConnection, JetSpace,
                              Kind, NonlinearConnection)
from src.lib.identities import DeflectionSet, IdentityReport, IdentityResult
from src.lib.scene import describe
from src.lib.symexpr import Expr, render

log: logging.Logger = logging.getLogger(__name__)

TORSION_LETTERS = {
    "Tbar1j": "Tbar", "T1j": "T", "R1j": "R", "Tij": "T", "Rij": "R",
    "Pbar": "Pbar", "P1j": "P", "Pij": "P", "Pijv": "P", "S": "S",
}
CURVATURE_LETTERS = {
    "Rbar11k": "Rbar", "Ril1k": "R", "Rv1": "R", "Rbar1jk": "Rbar",
    "Rlijk": "R", "Rvjk": "R", "Pbar11k": "Pbar", "Pli1k": "P", "Pv11k": "P",
    "Pbar1jk": "Pbar", "Plijk": "P", "Pvjk": "P", "Sbar1jk": "Sbar",
    "Slijk": "S", "Svijk": "S",
}
TEXT = "text"
MACHINE = "machine"


@dataclass
class Section:
    title: str
    entries: list[tuple[str, str]] = field(default_factory=list)


@dataclass
class Report:
    """Named component sections plus identity verdicts of one command."""

    command: str
    space: JetSpace
    sections: list[Section] = field(default_factory=list)
    identities: IdentityReport = field(default_factory=IdentityReport)

    @property
    def passed(self) -> bool:
        return self.identities.passed

    def add(self, section: Section) -> None:
        self.sections.append(section)

    def components(self) -> dict[str, dict[str, str]]:
        return {s.title: dict(s.entries) for s in self.sections}


# NAMING-----------------------------------------------------------------------

def index_label(kind: Kind, i: int) -> str:
    match kind:
        case Kind.TIME:
            return "t"
        case Kind.SPACE:
            return str(i + 1)
    return f"({i + 1})"


def component_name(letter: str, T: DTensor, idx: tuple[int, ...]) -> str:
    uppers = [index_label(s.kind, i) for s, i in zip(T.signature, idx)
              if s.variance is Variance.UP]
    lowers = [index_label(s.kind, i) for s, i in zip(T.signature, idx)
              if s.variance is Variance.DOWN]
    v_up = sum(1 for s in T.signature
               if s.kind is Kind.VERTICAL and s.variance is Variance.UP)
    v_down = sum(1 for s in T.signature
                 if s.kind is Kind.VERTICAL and s.variance is Variance.DOWN)
    name = letter
    if v_up:
        name += "[" + ",".join(["(1)"] * v_up) + "]"
    name += "[" + ",".join(lowers) + "]"
    uppers += ["(1)"] * v_down
    if uppers:
        name += "^[" + ",".join(uppers) + "]"
    return name


def key_name(key: str, idx: tuple[int, ...]) -> str:
    """Config style name, e.g. L[1][2][1]."""
    return key + "".join(f"[{i + 1}]" for i in idx)


def _entries(key: str, arr: Array) -> list[tuple[str, str]]:
    return [(key_name(key, idx), render(arr[idx]))
            for idx in np.ndindex(arr.shape)]


def _dtensor_entries(letter: str, T: DTensor) -> list[tuple[str, str]]:
    return [(component_name(letter, T, idx), render(T.components[idx]))
            for idx in np.ndindex(T.components.shape)]


# SECTIONS---------------------------------------------------------------------

def christoffel_section(H: Expr, gamma: Array) -> Section:
    return Section("christoffel", [("H", render(H))]
                   + _entries("gamma", gamma))


def nlc_section(nlc: NonlinearConnection) -> Section:
    return Section("nlc", _entries("M", nlc.M) + _entries("N", nlc.N))


def connection_section(conn: GammaConnection) -> Section:
    """The nine blocks named as in scene files, Gbar without index."""
    entries = []
    for name, block in conn.blocks().items():
        entries += _entries(name, block)
    return Section("connection", entries)


def torsion_section(ts: TorsionSet) -> Section:
    entries = []
    for name, T in ts.families().items():
        entries += _dtensor_entries(TORSION_LETTERS[name], T)
    return Section("torsion", entries)


def curvature_section(cs: CurvatureSet) -> Section:
    entries = []
    for name, T in cs.families().items():
        entries += _dtensor_entries(CURVATURE_LETTERS[name], T)
    return Section("curvature", entries)


def deflection_section(ds: DeflectionSet) -> Section:
    return Section("deflection", _dtensor_entries("Dbar", ds.Dbar)
                   + _dtensor_entries("D", ds.D)
                   + _dtensor_entries("d", ds.d))


def em_section(F: Array) -> Section:
    n = F.shape[0]
    return Section("em", [(f"F[{i + 1},{j + 1}]", render(F[i, j]))
                          for i in range(n) for j in range(n)])


# RENDERING--------------------------------------------------------------------

def _verdict_line(r: IdentityResult) -> str:
    return (f"{'PASS' if r.verdict else 'FAIL'} {r.name} {r.path} "
            f"max_residual={r.max_residual:.3e} samples={r.samples} "
            f"seed={r.seed}")


def _verdict_dict(r: IdentityResult) -> dict:
    return {"name": r.name, "verdict": r.verdict, "path": r.path,
            "max_residual": float(f"{r.max_residual:.3e}"),
            "samples": r.samples, "seed": r.seed}


def render_text(r: Report) -> str:
    space = r.space
    lines = [f"# jetgeo {r.command}",
             f"# space {space.time_coord} | {' '.join(space.space_coords)} "
             f"| {' '.join(space.fiber_coords)}"]
    for name, value in space.params:
        lines.append(f"# param {name} = {value!r}")
    for section in r.sections:
        lines.append(f"## {section.title}")
        lines += [f"{name} = {expr}" for name, expr in section.entries]
    if len(r.identities):
        lines.append("## identities")
        lines += [_verdict_line(res) for res in r.identities]
        lines.append(f"# {len(r.identities) - len(r.identities.failed())} "
                     f"passed, {len(r.identities.failed())} failed")
    return "\n".join(lines) + "\n"


def render_machine(r: Report) -> str:
    doc = {"command": r.command, "scene": describe(r.space),
           "sections": r.components()}
    if len(r.identities):
        doc["identities"] = [_verdict_dict(res) for res in r.identities]
        doc["passed"] = r.passed
    return json.dumps(doc, indent=2) + "\n"


def render_report(r: Report, mode: str = TEXT) -> str:
    """
    Render a report.

    :param r: Report
    :param mode: 'text' (one NAME = EXPR line per component) or 'machine'
        (JSON with the same names)
    :return: Report text
    """
    if mode == MACHINE:
        return render_machine(r)
    return render_text(r)
