"""Custom spacetime files.

Format (``#`` starts a comment, blank lines ignored)::

    name = my-spacetime
    coordinates = t, r, th, ph

    [metric]                 # all ten g<m><n> with m <= n are required
    g00 = 1 - 2/r
    g11 = -1/(1 - 2/r)
    g22 = -r^2
    g33 = -r^2*sin(th)^2
    g01 = 0
    ...

    [domain]                 # optional
    predicate = r - 2        # the point is in the domain iff this is > 0
    r = 4, 50                # sampling range per coordinate, default -10, 10

    [tetrad]                 # optional; h<a><m> is h^a_m, omitted entries are 0
    h00 = sqrt(1 - 2/r)
    ...

Without a [tetrad] section a Gram-Schmidt tetrad of the coordinate basis is used.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from . import dsl
from .geometry import Spacetime, Tetrad, gram_schmidt_tetrad, require_tetrad


class ConfigError(ValueError):
    def __init__(self, message: str, path: str = "<config>", line: int | None = None,
                 column: int | None = None):
        self.path, self.line, self.column = path, line, column
        loc = path
        if line is not None:
            loc += f":{line}"
            if column is not None:
                loc += f":{column}"
        super().__init__(f"{loc}: {message}")


_SECTION = re.compile(r"^\[\s*([A-Za-z_]+)\s*\]$")
_KEY = re.compile(r"^([A-Za-z_][A-Za-z_0-9]*)\s*=")
_COMPONENT = re.compile(r"^([gh])([0-3])([0-3])$")


@dataclass(frozen=True)
class _Entry:
    value: str
    line: int
    column: int  # 1-based column of the first value character


def _read(text: str, path: str) -> dict[str, dict[str, _Entry]]:
    sections: dict[str, dict[str, _Entry]] = {"": {}}
    current = ""
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].rstrip()
        stripped = line.lstrip()
        if not stripped:
            continue
        indent = len(line) - len(stripped)
        m = _SECTION.match(stripped)
        if m:
            current = m.group(1).lower()
            if current not in ("metric", "domain", "tetrad"):
                raise ConfigError(f"unknown section [{current}]", path, lineno, indent + 1)
            if current in sections:
                raise ConfigError(f"duplicate section [{current}]", path, lineno, indent + 1)
            sections[current] = {}
            continue
        m = _KEY.match(stripped)
        if not m:
            raise ConfigError("expected 'key = value' or '[section]'", path, lineno, indent + 1)
        key = m.group(1)
        rest = stripped[m.end():]
        value = rest.strip()
        col = indent + m.end() + (len(rest) - len(rest.lstrip())) + 1
        if key in sections[current]:
            raise ConfigError(f"duplicate key {key!r}", path, lineno, indent + 1)
        if not value:
            raise ConfigError(f"empty value for {key!r}", path, lineno, col)
        sections[current][key] = _Entry(value, lineno, col)
    return sections


def _expr(entry: _Entry, table, path: str) -> dsl.Expr:
    try:
        return dsl.parse(entry.value, table)
    except dsl.ExpressionError as exc:
        offset = exc.offset or 0
        raise ConfigError(str(exc).split(" (at offset")[0], path, entry.line, entry.column + offset) from None


def parse_config(text: str, path: str = "<config>") -> tuple[Spacetime, Tetrad]:
    sections = _read(text, path)
    top = sections[""]
    for key, entry in top.items():
        if key not in ("name", "coordinates"):
            raise ConfigError(f"unknown top-level key {key!r}", path, entry.line, 1)
    name = top["name"].value if "name" in top else Path(path).stem
    coords = dsl.DEFAULT_COORDINATES
    if "coordinates" in top:
        entry = top["coordinates"]
        coords = tuple(c.strip() for c in entry.value.split(","))
        if len(coords) != 4 or not all(re.fullmatch(r"[A-Za-z_][A-Za-z_0-9]*", c) for c in coords):
            raise ConfigError("coordinates must be four comma-separated identifiers", path,
                              entry.line, entry.column)
    try:
        table = dsl.coordinate_table(coords)
    except ValueError as exc:
        raise ConfigError(str(exc), path, top["coordinates"].line, 1) from None

    if "metric" not in sections:
        raise ConfigError("missing [metric] section", path)
    components = {}
    for key, entry in sections["metric"].items():
        m = _COMPONENT.match(key)
        if not m or m.group(1) != "g":
            raise ConfigError(f"unknown metric key {key!r}", path, entry.line, 1)
        i, j = sorted((int(m.group(2)), int(m.group(3))))
        if (i, j) in components:
            raise ConfigError(f"component g{i}{j} given twice", path, entry.line, 1)
        components[(i, j)] = _expr(entry, table, path)
    missing = [f"g{i}{j}" for i in range(4) for j in range(i, 4) if (i, j) not in components]
    if missing:
        raise ConfigError(f"missing metric components: {', '.join(missing)}", path)

    box = np.array([[-10.0, 10.0]] * 4)
    predicate = None
    for key, entry in sections.get("domain", {}).items():
        if key == "predicate":
            predicate = _expr(entry, table, path)
        elif key in table:
            try:
                lo, hi = (float(v) for v in entry.value.split(","))
            except ValueError:
                raise ConfigError("range must be 'low, high'", path, entry.line, entry.column) from None
            if not lo < hi:
                raise ConfigError("range needs low < high", path, entry.line, entry.column)
            box[table[key]] = (lo, hi)
        else:
            raise ConfigError(f"unknown domain key {key!r}", path, entry.line, 1)

    spec = dsl.MetricSpec(name, components, predicate, coords)

    def domain(x):
        if not spec.in_domain(x):
            return False
        try:
            spec.metric(x)
        except dsl.DomainError:
            return False
        return True

    spacetime = Spacetime(name=name, metric_fn=spec.metric, domain_fn=domain, box=box,
                          coordinates=coords)

    probe = box.mean(axis=1)
    if not domain(probe):
        raise ConfigError(f"probe point {probe.tolist()} (centre of the sampling box) is outside the domain", path)
    try:
        spec.check_signature(probe)
    except dsl.SignatureViolation as exc:
        raise ConfigError(str(exc), path) from None

    if "tetrad" in sections:
        entries = {}
        for key, entry in sections["tetrad"].items():
            m = _COMPONENT.match(key)
            if not m or m.group(1) != "h":
                raise ConfigError(f"unknown tetrad key {key!r}", path, entry.line, 1)
            entries[(int(m.group(2)), int(m.group(3)))] = _expr(entry, table, path)

        def h(x):
            out = np.zeros((4, 4))
            for (a, mu), e in entries.items():
                out[a, mu] = dsl.evaluate(e, x)
            return out

        tetrad = Tetrad("config", h)
        try:
            require_tetrad(spacetime, tetrad, probe)
        except ValueError as exc:
            raise ConfigError(str(exc), path) from None
    else:
        tetrad = gram_schmidt_tetrad(spacetime)
    return spacetime, tetrad


def load_custom_spacetime(path) -> tuple[Spacetime, Tetrad]:
    p = Path(path)
    try:
        text = p.read_text(encoding="utf-8")
    except OSError as exc:
        raise ConfigError(f"cannot read file: {exc.strerror}", str(path)) from None
    return parse_config(text, str(path))
