"""
Scene configuration files

A scene declares the jet space and either a metric pair (h11, phi) or an
explicit connection, optionally a d-vector, a lowered deflection array and
verification parameters. A change file declares a coordinate change with
its inverse. Machine-mode (JSON) reports are accepted as scenes.

Copyright (c) 2024.
"""

from __future__ import annotations

import json
import logging
from dataclasses import dataclass

import pyparsing as pp

from src.lib import config
from src.lib.dtensor import DVector
from src.lib.errors import (ConfigSyntax, InputError, MissingSection,
                            ShapeMismatch)
from src.lib.geometry import (BLOCK_NAMES, Array, GammaConnection, JetSpace,
                              NonlinearConnection, SpatialMetric, TimeMetric,
                              berwald_connection, block_shape, canonical_nlc,
                              expr_array)
from src.lib.symexpr import ZERO, parse
from src.lib.transform import CoordChange, change_of_coords

log: logging.Logger = logging.getLogger(__name__)

DIRECTIVES = ("time", "space", "fiber", "param", "samples", "seed",
              "tolerance")

# Keys accepted in scene and change files.
CONNECTION_KEYS = BLOCK_NAMES + ("M", "N")
OTHER_KEYS = ("h11", "phi", "X1", "X", "Xv", "Dlow")
CHANGE_KEYS = ("t_new", "x_new", "t_old", "x_old")


def _key_shape(key: str, n: int) -> tuple[int, ...]:
    if key in BLOCK_NAMES:
        return block_shape(key, n)
    return {"M": (n,), "N": (n, n), "h11": (), "phi": (n, n), "X1": (),
            "X": (n,), "Xv": (n,), "Dlow": (n, n), "t_new": (), "t_old": (),
            "x_new": (n,), "x_old": (n,)}[key]


def _build_key_grammar() -> pp.ParserElement:
    """key := name ('[' integer ']')* '=' rest"""
    name = pp.Word(pp.alphas + "_", pp.alphanums + "_")("name")
    index = pp.Suppress("[") + pp.common.integer + pp.Suppress("]")
    return (name + pp.Group(pp.ZeroOrMore(index))("indices")
            + pp.Suppress("=") + pp.rest_of_line("rhs"))


_KEY = _build_key_grammar()


@dataclass
class Assignment:
    key: str
    indices: tuple[int, ...]
    rhs: str
    line: int | None


@dataclass(frozen=True, eq=False)
class SceneConfig:
    """Validated contents of a scene file."""

    space: JetSpace
    h: TimeMetric | None = None
    phi: SpatialMetric | None = None
    explicit: GammaConnection | None = None
    dvector: DVector | None = None
    dlow: Array | None = None
    samples: int | None = None
    seed: int | None = None
    tolerance: float | None = None
    source: str = ""

    @property
    def has_metrics(self) -> bool:
        return self.h is not None

    def connection(self, which: str = "berwald") -> GammaConnection:
        """
        The connection of the scene: 'file' is the explicit one, 'berwald'
        the Berwald connection of the metric pair. A scene that only has one
        of the two always yields that one.
        """
        if self.explicit is not None and (which == "file"
                                          or not self.has_metrics):
            return self.explicit
        if which == "file":
            raise MissingSection(f"{self.source}: no connection blocks.")
        return berwald_connection(self.h, self.phi)

    def nlc(self) -> NonlinearConnection:
        if self.has_metrics:
            return canonical_nlc(self.h, self.phi)
        return self.explicit.nlc


# PARSING----------------------------------------------------------------------

def _split_directive(line: str) -> tuple[str, list[str]]:
    words = line.replace("=", " = ").split()
    if len(words) > 1 and words[1] == "=" and words[0] != "param":
        words = [words[0]] + words[2:]
    return words[0], words[1:]


def _parse_assignment(line: str, lineno: int | None) -> Assignment:
    try:
        res = _KEY.parse_string(line, parse_all=True)
    except pp.ParseBaseException as e:
        raise ConfigSyntax(f"Cannot read '{line}': {e.msg}", lineno) from e
    return Assignment(res["name"], tuple(res.get("indices", [])),
                      res["rhs"].strip(), lineno)


def _read_lines(text: str) -> tuple[dict[str, list], list[Assignment]]:
    directives: dict[str, list] = {}
    assignments = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        head = line.split()[0].split("=")[0]
        if head in DIRECTIVES:
            word, args = _split_directive(line)
            directives.setdefault(word, []).append((args, lineno))
        else:
            assignments.append(_parse_assignment(line, lineno))
    return directives, assignments


def _single(directives: dict[str, list], word: str) -> tuple[list, int]:
    entries = directives.get(word, [])
    if len(entries) > 1:
        raise ConfigSyntax(f"'{word}' declared twice.", entries[1][1])
    return entries[0] if entries else (None, None)


def _space_from_directives(directives: dict[str, list]) -> JetSpace:
    t_args, t_line = _single(directives, "time")
    s_args, s_line = _single(directives, "space")
    if t_args is None:
        raise MissingSection("No 'time' declaration.")
    if s_args is None:
        raise MissingSection("No 'space' declaration.")
    if len(t_args) != 1:
        raise ConfigSyntax("Expected 'time NAME'.", t_line)
    try:
        n = int(s_args[0])
    except (IndexError, ValueError) as e:
        raise ConfigSyntax("Expected 'space N [NAMES...]'.", s_line) from e
    params = {}
    for args, lineno in directives.get("param", []):
        if len(args) != 3 or args[1] != "=":
            raise ConfigSyntax("Expected 'param NAME = VALUE'.", lineno)
        try:
            params[args[0]] = float(args[2])
        except ValueError as e:
            raise ConfigSyntax(f"'{args[2]}' is not a number.", lineno) from e
    if n < 1:
        raise ShapeMismatch(f"Spatial dimension {n} is not positive.")
    base = JetSpace.standard(n, params)
    space_names = tuple(s_args[1:]) or base.space_coords
    if len(space_names) != n:
        raise ShapeMismatch(f"'space {n}' names {len(space_names)} "
                            f"coordinates.")
    f_args, _ = _single(directives, "fiber")
    fiber_names = tuple(f_args) if f_args else base.fiber_coords
    return JetSpace(t_args[0], space_names, fiber_names, base.params)


def _number(directives: dict[str, list], word: str, kind: type):
    args, lineno = _single(directives, word)
    if args is None:
        return None
    try:
        return kind(args[0])
    except (IndexError, ValueError) as e:
        raise ConfigSyntax(f"Expected '{word} VALUE'.", lineno) from e


def _collect(space: JetSpace, assignments: list[Assignment],
             allowed: tuple[str, ...]) -> dict[str, Array]:
    """Parse the right hand sides into one array per key."""
    n = space.n
    arrays: dict[str, Array] = {}
    seen: dict[tuple, Assignment] = {}
    for a in assignments:
        if a.key not in allowed:
            raise ConfigSyntax(f"Unknown key '{a.key}'.", a.line)
        shape = _key_shape(a.key, n)
        if len(a.indices) != len(shape):
            raise ShapeMismatch(
                f"line {a.line}: {a.key} takes {len(shape)} indices, got "
                f"{len(a.indices)}.")
        if any(not 1 <= i <= n for i in a.indices):
            raise ShapeMismatch(f"line {a.line}: index out of range in "
                                f"{a.key}{list(a.indices)} for n = {n}.")
        if (a.key, a.indices) in seen:
            raise ConfigSyntax(f"{a.key}{list(a.indices)} assigned twice.",
                               a.line)
        seen[(a.key, a.indices)] = a
        try:
            value = parse(a.rhs, space.variables)
        except InputError as e:
            raise ConfigSyntax(str(e), a.line) from e
        arr = arrays.setdefault(a.key, expr_array(shape))
        arr[tuple(i - 1 for i in a.indices)] = value
    return arrays


def _symmetric_phi(space: JetSpace, assignments: list[Assignment],
                   phi: Array) -> Array:
    """Fill the lower triangle from the upper one, checking given pairs."""
    n = space.n
    given = {a.indices for a in assignments if a.key == "phi"}
    for i in range(n):
        if (i + 1, i + 1) not in given:
            raise MissingSection(f"No entry phi[{i + 1}][{i + 1}].")
        for j in range(i + 1, n):
            upper, lower = (i + 1, j + 1) in given, (j + 1, i + 1) in given
            if upper and lower and phi[i, j] != phi[j, i]:
                raise ShapeMismatch(
                    f"phi[{i + 1}][{j + 1}] = {phi[i, j]} differs from "
                    f"phi[{j + 1}][{i + 1}] = {phi[j, i]}.")
            if lower and not upper:
                phi[i, j] = phi[j, i]
            else:
                phi[j, i] = phi[i, j]
    return phi


def _scene(space: JetSpace, directives: dict[str, list],
           assignments: list[Assignment], source: str) -> SceneConfig:
    arrays = _collect(space, assignments, CONNECTION_KEYS + OTHER_KEYS)
    has_metrics = "h11" in arrays or "phi" in arrays
    has_connection = any(k in arrays for k in CONNECTION_KEYS)
    if has_metrics and has_connection:
        raise ConfigSyntax("A scene declares either a metric pair or a "
                           "connection, not both.")
    if not has_metrics and not has_connection:
        raise MissingSection("Neither a metric pair nor a connection is "
                             "declared.")
    h = phi = explicit = None
    if has_metrics:
        if "h11" not in arrays:
            raise MissingSection("No entry h11.")
        if "phi" not in arrays:
            raise MissingSection("No entries phi[i][j].")
        h = TimeMetric(space, arrays["h11"][()])
        phi = SpatialMetric(space, _symmetric_phi(space, assignments,
                                                  arrays["phi"]))
    else:
        n = space.n
        nlc = NonlinearConnection(space,
                                  arrays.get("M", expr_array((n,))),
                                  arrays.get("N", expr_array((n, n))))
        explicit = GammaConnection.from_blocks(
            nlc, {k: v for k, v in arrays.items() if k in BLOCK_NAMES})
    dvector = None
    if any(k in arrays for k in ("X1", "X", "Xv")):
        n = space.n
        X1 = arrays.get("X1")
        dvector = DVector(space, ZERO if X1 is None else X1[()],
                          arrays.get("X", expr_array((n,))),
                          arrays.get("Xv", expr_array((n,))))
    scene = SceneConfig(space, h, phi, explicit, dvector, arrays.get("Dlow"),
                        _number(directives, "samples", int),
                        _number(directives, "seed", int),
                        _number(directives, "tolerance", float), source)
    log.debug(f"Loaded scene {source} with n = {space.n}.")
    return scene


def _json_scene(doc: dict, source: str) -> SceneConfig:
    """A machine-mode report with 'scene' and connection sections."""
    try:
        sc = doc["scene"]
        sections = doc["sections"]
        space = JetSpace(sc["time"], tuple(sc["space"]), tuple(sc["fiber"]),
                         tuple(sorted(sc.get("params", {}).items())))
    except (KeyError, TypeError) as e:
        raise MissingSection(f"{source}: report lacks {e}.") from e
    assignments = []
    for section in ("nlc", "connection"):
        for key, rhs in sections.get(section, {}).items():
            assignments.append(_parse_assignment(f"{key} = {rhs}", None))
    if not assignments:
        raise MissingSection(f"{source}: report has no connection section.")
    return _scene(space, {}, assignments, source)


def load_config(path: str) -> SceneConfig:
    """
    Load and validate a scene file.

    :param path: Path of a line-oriented scene or a JSON report
    :return: SceneConfig
    """
    try:
        with open(path, "r") as fd:
            text = fd.read()
    except OSError as e:
        raise MissingSection(f"Cannot read {path}: {e.strerror}") from e
    return loads_config(text, path)


def loads_config(text: str, source: str = "<string>") -> SceneConfig:
    """Like load_config, from the file contents."""
    if text.lstrip().startswith("{"):
        try:
            doc = json.loads(text)
        except json.JSONDecodeError as e:
            raise ConfigSyntax(f"Invalid JSON: {e.msg}", e.lineno) from e
        return _json_scene(doc, source)
    directives, assignments = _read_lines(text)
    space = _space_from_directives(directives)
    return _scene(space, directives, assignments, source)


def load_change(path: str, space: JetSpace) -> CoordChange:
    """
    Load a coordinate change file:

        t_new = 2*t
        x_new[1] = x1
        t_old = t/2
        x_old[1] = x1

    The inverses are written in the new coordinates using the old names.
    """
    try:
        with open(path, "r") as fd:
            text = fd.read()
    except OSError as e:
        raise MissingSection(f"Cannot read {path}: {e.strerror}") from e
    return loads_change(text, space)


def loads_change(text: str, space: JetSpace) -> CoordChange:
    directives, assignments = _read_lines(text)
    if directives:
        word = next(iter(directives))
        raise ConfigSyntax(f"'{word}' is not allowed in a change file.",
                           directives[word][0][1])
    arrays = _collect(space, assignments, CHANGE_KEYS)
    for key in CHANGE_KEYS:
        if key not in arrays:
            raise MissingSection(f"No entry {key}.")
    for key in ("x_new", "x_old"):
        given = {a.indices for a in assignments if a.key == key}
        for i in range(space.n):
            if (i + 1,) not in given:
                raise MissingSection(f"No entry {key}[{i + 1}].")
    return change_of_coords(space, arrays["t_new"][()], arrays["x_new"],
                            arrays["t_old"][()], arrays["x_old"])


def scene_seed(scene: SceneConfig, override: int | None) -> int:
    """Command line seed, else the scene's, else the configured default."""
    if override is not None:
        return override
    return config.DEFAULT_SEED if scene.seed is None else scene.seed


def describe(space: JetSpace) -> dict:
    """JSON-ready description of a jet space."""
    return {"time": space.time_coord, "space": list(space.space_coords),
            "fiber": list(space.fiber_coords), "params": dict(space.params)}

