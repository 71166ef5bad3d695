"""Instance file parsing and report serialization.

Two input formats: whitespace edge lists (one edge per line, ``#`` comments,
arbitrary string labels) and a pragmatic subset of the common graph-markup
format (``node [ id N ... ]`` / ``edge [ source A target B ... ]`` blocks,
everything else ignored, undirected interpretation forced).

Reports are flat ``key: value`` text documents with one line per community,
written so that a report can be parsed back losslessly.
"""

from __future__ import annotations

import re
import shlex
from typing import Iterable

from .graphs import Graph, graph_from_edges


class ParseError(ValueError):
    def __init__(self, message: str, line: int | None = None):
        self.line = line
        super().__init__(message if line is None else f"line {line}: {message}")


def parse_edgelist(text: str) -> tuple[Graph, list[str]]:
    """Parse an edge list; labels are mapped to ids in first-appearance order."""
    labels: list[str] = []
    index: dict[str, int] = {}

    def vid(label: str) -> int:
        if label not in index:
            index[label] = len(labels)
            labels.append(label)
        return index[label]

    edges: list[tuple[int, int]] = []
    for ln, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        parts = line.split()
        if len(parts) != 2:
            raise ParseError(f"expected two labels, got {len(parts)}", ln)
        edges.append((vid(parts[0]), vid(parts[1])))
    n = len(labels)
    g = graph_from_edges(n, edges)
    return g, labels


_GML_TOKEN = re.compile(r'"[^"]*"|\[|\]|[^\s\[\]]+')


def _gml_tokens(text: str) -> list[str]:
    out = []
    for raw in text.splitlines():
        line = raw.split("#", 1)[0]
        out.extend(_GML_TOKEN.findall(line))
    return out


def parse_gml_subset(text: str) -> tuple[Graph, list[str]]:
    """Parse node/edge blocks out of a graph-markup document.

    Node ids may be arbitrary integers or strings; labels, when present,
    become the external names.  Unknown keys and nested blocks are skipped.
    """
    toks = _gml_tokens(text)
    pos = 0

    def skip_block(i: int) -> int:
        depth = 1
        while i < len(toks) and depth:
            if toks[i] == "[":
                depth += 1
            elif toks[i] == "]":
                depth -= 1
            i += 1
        return i

    nodes: list[tuple[str, str | None]] = []  # (gml id, label)
    raw_edges: list[tuple[str | None, str | None]] = []
    while pos < len(toks):
        tok = toks[pos]
        if tok in ("node", "edge") and pos + 1 < len(toks) and toks[pos + 1] == "[":
            kind = tok
            pos += 2
            fields: dict[str, str] = {}
            while pos < len(toks) and toks[pos] != "]":
                if toks[pos] == "[":
                    pos = skip_block(pos + 1)
                    continue
                key = toks[pos]
                if pos + 1 < len(toks) and toks[pos + 1] not in ("[", "]"):
                    val = toks[pos + 1]
                    if val.startswith('"') and val.endswith('"'):
                        val = val[1:-1]
                    if key not in fields:
                        fields[key] = val
                    pos += 2
                elif pos + 1 < len(toks) and toks[pos + 1] == "[":
                    pos = skip_block(pos + 2)
                else:
                    pos += 1
            pos += 1  # closing bracket
            if kind == "node":
                if "id" not in fields:
                    raise ParseError("node block without id")
                nodes.append((fields["id"], fields.get("label")))
            else:
                if "source" not in fields or "target" not in fields:
                    raise ParseError("edge block missing source or target")
                raw_edges.append((fields["source"], fields["target"]))
        else:
            pos += 1

    index: dict[str, int] = {}
    labels: list[str] = []
    for gml_id, label in nodes:
        if gml_id in index:
            raise ParseError(f"duplicate node id {gml_id}")
        index[gml_id] = len(labels)
        labels.append(label if label is not None else gml_id)
    edges = []
    for s, t in raw_edges:
        if s not in index or t not in index:
            raise ParseError(f"edge endpoint {s if s not in index else t} is not a declared node")
        edges.append((index[s], index[t]))
    if len(index) < 2:
        raise ParseError("fewer than two nodes declared")
    g = graph_from_edges(len(index), edges)
    return g, labels


def _fmt(value) -> str:
    if isinstance(value, float):
        return repr(value)
    return str(value)


def write_report(fields: dict, communities: Iterable[Iterable[str]]) -> str:
    """Serialize a run record; labels are quoted so parsing is lossless."""
    lines = ["moddens-report-version: 1"]
    for key, value in fields.items():
        lines.append(f"{key}: {_fmt(value)}")
    for k, members in enumerate(communities, start=1):
        quoted = " ".join(shlex.quote(str(x)) for x in members)
        lines.append(f"community {k}: {quoted}")
    return "\n".join(lines) + "\n"


def parse_report(text: str) -> tuple[dict[str, str], list[list[str]]]:
    fields: dict[str, str] = {}
    communities: list[list[str]] = []
    for ln, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line:
            continue
        if ":" not in line:
            raise ParseError("expected 'key: value'", ln)
        key, value = line.split(":", 1)
        key = key.strip()
        value = value.strip()
        if key.startswith("community "):
            communities.append(shlex.split(value))
        else:
            fields[key] = value
    return fields, communities


LOG_HEADER = "node,ell,master_objective,columns_added,pricing_rounds,promoted,equality_size"


def write_iteration_log(events) -> str:
    lines = [LOG_HEADER]
    for e in events:
        lines.append(
            f"{e.node},{e.ell},{e.master_objective!r},{e.columns_added},"
            f"{e.pricing_rounds},{e.promoted},{e.equality_size}"
        )
    return "\n".join(lines) + "\n"
