"""Text formats for automorphisms and graph maps.

Automorphism blocks::

    # comment
    label: tribonacci
    rank: 3
    images: ab ac a
    inverse_images: c Ca Cb

Blocks are separated by a blank line or a line ``---``.  ``inverse_images``
is optional.  Image lists are split on commas when a comma is present and
on whitespace otherwise, so token-syntax words (rank > 26) are written
``images: x1 x2, x3, ...``.  The identity word is ``1``.

Graph map blocks use the keys ``label``, ``rank``, ``vertices`` (names),
``edges`` (``a=u>v`` entries, edges named by letters in order), ``tree``
(edge names, optional), ``marking`` (``a=w`` entries, optional),
``images`` (``a=path`` entries), ``vertex_map`` (``u=v`` entries,
optional) and ``induced`` / ``induced_inverse`` (image lists, optional).
"""

import hashlib
from pathlib import Path

from .automorphisms import Automorphism
from .errors import FgadynError, ParseError
from .fixtures import builtin
from .graphs import GraphSelfMap, MarkedGraph
from .words import format_codes, parse_letters, parse_word

AUTO_KEYS = {"label", "rank", "images", "inverse_images"}
GRAPH_KEYS = {"label", "rank", "vertices", "edges", "tree", "marking", "images",
              "vertex_map", "induced", "induced_inverse"}


def _blocks(text):
    """Split into blocks of (line_number, key, value)."""
    blocks, cur = [], []
    for n, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line or line == "---":
            if cur:
                blocks.append(cur)
                cur = []
            continue
        if ":" not in line:
            raise ParseError(f"expected 'key: value', got {line!r}", n)
        key, value = line.split(":", 1)
        cur.append((n, key.strip().lower(), value.strip()))
    if cur:
        blocks.append(cur)
    return blocks


def _fields(block, allowed):
    out = {}
    for n, key, value in block:
        if key not in allowed:
            raise ParseError(f"unknown key {key!r}", n)
        if key in out:
            raise ParseError(f"duplicate key {key!r}", n)
        out[key] = (n, value)
    return out


def _split_list(value):
    parts = value.split(",") if "," in value else value.split()
    return [p.strip() for p in parts if p.strip()]


def _rank(fields, first_line):
    if "rank" not in fields:
        raise ParseError("missing 'rank'", first_line)
    n, value = fields["rank"]
    try:
        rank = int(value)
    except ValueError:
        raise ParseError(f"rank must be an integer, got {value!r}", n) from None
    if rank < 1:
        raise ParseError("rank must be positive", n)
    return rank


def _words(fields, key, rank):
    n, value = fields[key]
    try:
        words = [parse_word(w, rank) for w in _split_list(value)]
    except ParseError as exc:
        raise ParseError(str(exc), n) from None
    if len(words) != rank:
        raise ParseError(f"{key} lists {len(words)} words, rank is {rank}", n)
    return words


def parse_automorphisms(text):
    """All automorphism blocks in ``text``; verification errors keep their type."""
    out = []
    for block in _blocks(text):
        first = block[0][0]
        fields = _fields(block, AUTO_KEYS)
        rank = _rank(fields, first)
        if "images" not in fields:
            raise ParseError("missing 'images'", first)
        images = _words(fields, "images", rank)
        inverse = _words(fields, "inverse_images", rank) if "inverse_images" in fields else None
        label = fields.get("label", (0, ""))[1]
        try:
            out.append(Automorphism(images, inverse, rank=rank, label=label))
        except FgadynError as exc:
            exc.args = (f"line {first}: {exc}",)
            raise
    if not out:
        raise ParseError("no automorphism blocks found", 1)
    return out


def _pairs(fields, key):
    n, value = fields[key]
    out = []
    for item in value.split():
        if "=" not in item:
            raise ParseError(f"expected name=value in {key}, got {item!r}", n)
        a, b = item.split("=", 1)
        out.append((a, b))
    return n, out


def parse_graph_maps(text):
    out = []
    for block in _blocks(text):
        first = block[0][0]
        fields = _fields(block, GRAPH_KEYS)
        rank = _rank(fields, first)
        for key in ("vertices", "edges", "images"):
            if key not in fields:
                raise ParseError(f"missing {key!r}", first)
        vertices = fields["vertices"][1].split()
        n, edge_items = _pairs(fields, "edges")
        E = len(edge_items)
        names = {}
        edges = []
        for k, (name, ends) in enumerate(edge_items):
            if name != format_codes([2 * k], E):
                raise ParseError(f"edge {k + 1} must be named {format_codes([2 * k], E)!r}", n)
            if ">" not in ends:
                raise ParseError(f"edge {name} needs endpoints u>v", n)
            o, t = ends.split(">", 1)
            edges.append((o, t))
            names[name] = k
        tree = None
        if "tree" in fields:
            tn, tv = fields["tree"]
            try:
                tree = [names[x] for x in tv.split()]
            except KeyError as exc:
                raise ParseError(f"unknown tree edge {exc}", tn) from None
        marking = None
        if "marking" in fields:
            mn, items = _pairs(fields, "marking")
            marking = [None] * E
            for name, w in items:
                if name not in names:
                    raise ParseError(f"unknown edge {name!r} in marking", mn)
                marking[names[name]] = parse_word(w, rank)
            if any(m is None for m in marking):
                raise ParseError("marking must list every edge", mn)
        try:
            graph = MarkedGraph(vertices, edges, tree=tree, marking=marking, rank=rank)
        except FgadynError as exc:
            raise ParseError(str(exc), n) from None
        iname, items = _pairs(fields, "images")
        images = [None] * E
        for name, w in items:
            if name not in names:
                raise ParseError(f"unknown edge {name!r} in images", iname)
            try:
                images[names[name]] = parse_letters(w, E)
            except ParseError as exc:
                raise ParseError(str(exc), iname) from None
        if any(img is None for img in images):
            raise ParseError("images must list every edge", iname)
        vmap = None
        if "vertex_map" in fields:
            vn, items = _pairs(fields, "vertex_map")
            d = dict(items)
            try:
                vmap = [d[v] for v in vertices]
            except KeyError as exc:
                raise ParseError(f"vertex_map misses vertex {exc}", vn) from None
        induced = None
        if "induced" in fields:
            ind = _words(fields, "induced", rank)
            inv = _words(fields, "induced_inverse", rank) if "induced_inverse" in fields else None
            induced = Automorphism(ind, inv, rank=rank)
        label = fields.get("label", (0, ""))[1]
        try:
            out.append(GraphSelfMap(graph, images, vertex_map=vmap, induced_class=induced,
                                    label=label))
        except FgadynError as exc:
            exc.args = (f"line {first}: {exc}",)
            raise
    if not out:
        raise ParseError("no graph map blocks found", 1)
    return out


def is_graph_text(text):
    return any(key == "edges" for block in _blocks(text) for _, key, _ in block)


def read_source(source):
    """Text and sha256 digest of a file path or ``builtin:NAME``."""
    if source.startswith("builtin:"):
        name = source.split(":", 1)[1]
        text = "\n---\n".join(format_automorphism(a) for a in builtin(name))
    else:
        text = Path(source).read_text()
    return text, hashlib.sha256(text.encode()).hexdigest()


def load_automorphisms(source):
    text, _ = read_source(source)
    return parse_automorphisms(text)


def format_automorphism(phi):
    sep = ", " if phi.rank > 26 else " "
    lines = []
    if phi.label:
        lines.append(f"label: {phi.label}")
    lines.append(f"rank: {phi.rank}")
    lines.append("images: " + sep.join(str(w) for w in phi.images))
    lines.append("inverse_images: " + sep.join(str(w) for w in phi.inverse_images))
    return "\n".join(lines) + "\n"
