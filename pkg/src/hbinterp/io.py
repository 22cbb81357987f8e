"""Node files (JSON) and result tables (CSV).

Node file, ``format_version`` 1::

    {
      "format_version": 1,
      "manifold": {"kind": "sphere", "radius": 1.0},
      "chart": {"kind": "stereographic", "center": [0.0, 0.0, 1.0]},
      "patch_radius": 0.8,
      "weights": {"mu": 3.0, "delta": null, "bump_exponent": null,
                  "near_node_tol": 1e-12, "mode": "global"},
      "nodes": [
        {"position": [0.0, 0.0, 1.0], "data": {"0,0": 1.0, "1,0": 0.0, "0,1": 0.0}}
      ]
    }

``manifold`` is ``{"kind": "sphere", "radius": R}``,
``{"kind": "torus", "periods": [P_1, ...]}`` or
``{"kind": "euclidean", "dim": m}``.  The patch is the geodesic ball of
radius ``patch_radius`` around the chart centre (``null``: whole manifold,
Lagrange data only).  Data keys are comma-joined multi-indices and the
values are partial derivatives with respect to the chart coordinates.

Result tables are CSV with ``#`` comment lines above the header row and,
for convergence runs, a final ``# fit: {...}`` JSON footer.  Floats are
written with 17 significant digits so that they read back bit-exactly.
"""

from __future__ import annotations

import csv
import json
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from hbinterp.basis import WeightConfig, check_distinct
from hbinterp.errors import (
    FileIOError,
    HBError,
    InvalidNodeSetError,
    InvalidPointError,
    ParseError,
    ValidationError,
)
from hbinterp.geometry import Chart, Manifold, Patch
from hbinterp.interpolant import GLOBAL, LOCALIZED, HermiteNode
from hbinterp.multiindex import MultiIndexSet, format_index, parse_index, zero_index

FORMAT_VERSION = 1

CONVERGENCE_COLUMNS = ("level", "n", "h", "max_err", "rms_err")

_CHART_KINDS = {"sphere": "stereographic", "torus": "unwrap", "euclidean": "identity"}


@dataclass(eq=False)
class NodeFile:
    manifold: Manifold
    chart: Chart
    patch: Patch
    weights: WeightConfig
    mode: str
    nodes: list


def _get(obj, key, where, kind=None, optional=False):
    if not isinstance(obj, dict):
        raise ParseError("expected an object", field=where)
    name = f"{where}.{key}" if where else key
    if key not in obj or (obj[key] is None and not optional):
        if optional:
            return None
        raise ParseError("missing field", field=name)
    value = obj[key]
    if value is None:
        return None
    if kind == "number":
        if isinstance(value, bool) or not isinstance(value, (int, float)) or not np.isfinite(value):
            raise ParseError(f"expected a finite number, got {value!r}", field=name)
    elif kind == "vector":
        if (not isinstance(value, list) or not value
                or not all(isinstance(x, (int, float)) and not isinstance(x, bool) for x in value)):
            raise ParseError(f"expected a list of numbers, got {value!r}", field=name)
    elif kind == "int":
        if isinstance(value, bool) or not isinstance(value, int):
            raise ParseError(f"expected an integer, got {value!r}", field=name)
    elif kind == "str":
        if not isinstance(value, str):
            raise ParseError(f"expected a string, got {value!r}", field=name)
    return value


def _parse_manifold(obj):
    kind = _get(obj, "kind", "manifold", "str")
    try:
        if kind == "sphere":
            return Manifold.sphere(_get(obj, "radius", "manifold", "number"))
        if kind == "torus":
            return Manifold.torus(_get(obj, "periods", "manifold", "vector"))
        if kind == "euclidean":
            return Manifold.euclidean(_get(obj, "dim", "manifold", "int"))
    except ParseError:
        raise
    except ValidationError as exc:
        raise ParseError(str(exc), field="manifold") from None
    raise ParseError(f"unknown manifold kind {kind!r}", field="manifold.kind")


def _parse_weights(obj):
    if obj is None:
        return WeightConfig(), GLOBAL
    mode = _get(obj, "mode", "weights", "str", optional=True) or GLOBAL
    if mode not in (GLOBAL, LOCALIZED):
        raise ParseError(f"mode must be 'global' or 'localized', got {mode!r}", field="weights.mode")
    tol = _get(obj, "near_node_tol", "weights", "number", optional=True)
    cfg = WeightConfig(
        mu=_get(obj, "mu", "weights", "number", optional=True),
        delta=_get(obj, "delta", "weights", "number", optional=True),
        bump_exponent=_get(obj, "bump_exponent", "weights", "int", optional=True),
        near_node_tol=1e-12 if tol is None else float(tol),
    )
    return cfg, mode


def node_file_from_dict(doc):
    """Validate a decoded node-file document."""
    version = _get(doc, "format_version", "", "int")
    if version != FORMAT_VERSION:
        raise ParseError(f"unsupported format_version {version}", field="format_version")
    manifold = _parse_manifold(_get(doc, "manifold", ""))
    chart_obj = _get(doc, "chart", "")
    chart_kind = _get(chart_obj, "kind", "chart", "str")
    if chart_kind != _CHART_KINDS[manifold.kind]:
        raise ParseError(f"chart kind {chart_kind!r} is not available on a {manifold.kind}",
                         field="chart.kind")
    try:
        center = manifold.validate_points(_get(chart_obj, "center", "chart", "vector"))
        radius = _get(doc, "patch_radius", "", "number", optional=True)
        patch = Patch(manifold, center, radius)
        chart = Chart(manifold, center, chart_kind)
    except ParseError:
        raise
    except ValidationError as exc:
        raise ParseError(str(exc), field="chart.center") from None
    weights, mode = _parse_weights(_get(doc, "weights", "", optional=True))

    raw_nodes = _get(doc, "nodes", "")
    if not isinstance(raw_nodes, list) or not raw_nodes:
        raise ParseError("expected a nonempty list of nodes", field="nodes")
    m = manifold.dim
    nodes = []
    for i, raw in enumerate(raw_nodes):
        where = f"nodes[{i}]"
        pos = _get(raw, "position", where, "vector")
        try:
            pos = manifold.validate_points(pos)
        except InvalidPointError as exc:
            raise InvalidPointError(f"{where}.position: off-manifold point: {exc}") from None
        data = _get(raw, "data", where)
        if not isinstance(data, dict) or not data:
            raise ParseError("expected a nonempty object", field=f"{where}.data")
        values = {}
        for key, value in data.items():
            try:
                beta = parse_index(key, m)
            except ValidationError as exc:
                raise ParseError(f"dimension mismatch or malformed key: {exc}",
                                 field=f"{where}.data[{key!r}]") from None
            _get(data, key, f"{where}.data", "number")
            values[beta] = float(value)
        if zero_index(m) not in values:
            raise ParseError(f"missing zero index {format_index(zero_index(m))!r}",
                             field=f"{where}.data")
        nodes.append(HermiteNode(pos, MultiIndexSet(list(values), m), values))
    try:
        check_distinct(np.array([n.point for n in nodes]), manifold)
    except InvalidNodeSetError as exc:
        raise InvalidNodeSetError(f"nodes: {exc}") from None
    return NodeFile(manifold, chart, patch, weights, mode, nodes)


def read_nodes(path):
    """Load and validate a node file.

    Raises
    ------
    FileIOError
        The file cannot be read.
    ParseError
        Malformed JSON or a missing / mistyped field; the field is named.
    ValidationError
        Off-manifold points, missing zero index, duplicate nodes.
    """
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise FileIOError(f"cannot read node file {path}: {exc}") from None
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ParseError(f"invalid JSON: {exc.msg}", line=exc.lineno) from None
    return node_file_from_dict(doc)


def node_file_to_dict(nf):
    M = nf.manifold
    if M.kind == "sphere":
        manifold = {"kind": "sphere", "radius": M.radius}
    elif M.kind == "torus":
        manifold = {"kind": "torus", "periods": list(M.periods)}
    else:
        manifold = {"kind": "euclidean", "dim": M.dim}
    w = nf.weights
    return {
        "format_version": FORMAT_VERSION,
        "manifold": manifold,
        "chart": {"kind": nf.chart.kind, "center": nf.chart.center.tolist()},
        "patch_radius": nf.patch.radius,
        "weights": {"mu": w.mu, "delta": w.delta, "bump_exponent": w.bump_exponent,
                    "near_node_tol": w.near_node_tol, "mode": nf.mode},
        "nodes": [{"position": node.point.tolist(),
                   "data": {format_index(b): node.values[b] for b in node.delta_set}}
                  for node in nf.nodes],
    }


def write_nodes(path, nf):
    try:
        Path(path).write_text(json.dumps(node_file_to_dict(nf), indent=1) + "\n", encoding="utf-8")
    except OSError as exc:
        raise FileIOError(f"cannot write node file {path}: {exc}") from None


def format_float(x):
    return "%.17g" % x


def format_cell(x):
    if isinstance(x, (int, np.integer)) and not isinstance(x, bool):
        return str(int(x))
    return format_float(float(x))


def write_results(path, rows, columns, comments=(), footer=None):
    """Write a CSV table.

    Parameters
    ----------
    rows : iterable of sequences
        Numeric rows in ``columns`` order.
    comments : iterable of str
        Lines written above the header, each prefixed by ``# ``.
    footer : dict, optional
        Written as a final ``# fit: <json>`` line.
    """
    try:
        with open(path, "w", newline="", encoding="utf-8") as fh:
            for line in comments:
                fh.write(f"# {line}\n")
            writer = csv.writer(fh, lineterminator="\n")
            writer.writerow(columns)
            for row in rows:
                writer.writerow([format_cell(x) for x in row])
            if footer is not None:
                fh.write("# fit: " + json.dumps(footer, sort_keys=True) + "\n")
    except OSError as exc:
        raise FileIOError(f"cannot write results to {path}: {exc}") from None


def read_results(path):
    """Read a table written by :func:`write_results`.

    Returns ``(columns, rows, comments, footer)`` with ``rows`` a float array.
    """
    comments, footer, lines = [], None, []
    try:
        with open(path, encoding="utf-8") as fh:
            for line in fh:
                if line.startswith("# fit: "):
                    footer = json.loads(line[len("# fit: "):])
                elif line.startswith("#"):
                    comments.append(line[2:].rstrip("\n"))
                elif line.strip():
                    lines.append(line)
    except OSError as exc:
        raise FileIOError(f"cannot read results from {path}: {exc}") from None
    table = list(csv.reader(lines))
    if not table:
        raise ParseError("results file has no header row")
    columns = table[0]
    rows = np.array([[float(x) for x in r] for r in table[1:]]).reshape(-1, len(columns))
    return columns, rows, comments, footer


def convergence_rows(records):
    return [(r.level, r.n_nodes, r.h, r.max_error, r.rms_error) for r in records]


def read_points(path, manifold):
    """Points file: one point per line, comma- or whitespace-separated
    ambient coordinates; ``#`` starts a comment."""
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise FileIOError(f"cannot read points file {path}: {exc}") from None
    pts = []
    for lineno, line in enumerate(text.splitlines(), 1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        try:
            pts.append([float(x) for x in line.replace(",", " ").split()])
        except ValueError:
            raise ParseError("non-numeric coordinate", line=lineno) from None
        if len(pts[-1]) != manifold.ambient_dim:
            raise ParseError(f"expected {manifold.ambient_dim} coordinates", line=lineno)
    try:
        return manifold.validate_points(np.array(pts).reshape(-1, manifold.ambient_dim))
    except HBError as exc:
        raise InvalidPointError(f"{path}: {exc}") from None
