"""Hypernym-graph analytics: literalness, compound classes, taxonomic distance.

The taxonomy is a DAG of (child, parent) concept edges (multiple inheritance
allowed, cycles rejected at load). A reuse item is literal when its concept
is a strict descendant of an existing sense of the reused form; a compound is
endocentric when its head word stands in that relation to the concept. Depth
counts nodes on the longest root path (roots have depth 1); the two distance
measures follow the conventions documented on each function.
"""

from __future__ import annotations

import csv
import math
from pathlib import Path

from lexeff.lexicon import (Encoding, EncodingItem, Form, Lexicon,
                            LexiconError, STRATEGY_REUSE, Universe)


class TaxonomyError(ValueError):
    """The taxonomy file or a query on it is invalid."""


class TaxonomyGraph:
    """Immutable hypernym DAG with memoized closure and depth queries."""

    def __init__(self, edges, universe: Universe | None = None):
        parents: dict[str, set[str]] = {}
        children: dict[str, set[str]] = {}
        nodes: set[str] = set()
        for child, parent in edges:
            if child == parent:
                raise TaxonomyError(f"self-edge on {child!r}")
            nodes.add(child)
            nodes.add(parent)
            parents.setdefault(child, set()).add(parent)
            children.setdefault(parent, set()).add(child)
        if universe is not None:
            for node in nodes:
                if node not in universe:
                    raise TaxonomyError(
                        f"taxonomy references unknown concept {node!r}")
        self.nodes = frozenset(nodes)
        self._parents = {n: frozenset(parents.get(n, ())) for n in nodes}
        self._children = {n: frozenset(children.get(n, ())) for n in nodes}
        self.roots = frozenset(n for n in nodes if not self._parents[n])
        self._check_acyclic()
        self._depth = self._compute_depths()
        self.max_depth = max(self._depth.values(), default=0)
        self._ancestor_cache: dict[str, frozenset[str]] = {}
        self._updist_cache: dict[str, dict[str, int]] = {}

    @classmethod
    def load(cls, path, universe: Universe | None = None) -> "TaxonomyGraph":
        """Read (child_id, parent_id) edges from a two-column TSV."""
        path = Path(path)
        if not path.exists():
            raise TaxonomyError(f"file not found: {path}")
        edges = []
        with open(path, encoding="utf-8", newline="") as handle:
            reader = csv.reader(handle, delimiter="\t")
            for lineno, row in enumerate(reader, start=1):
                if not row or (len(row) == 1 and not row[0].strip()):
                    continue
                if lineno == 1 and row[:2] == ["child_id", "parent_id"]:
                    continue
                if len(row) != 2:
                    raise TaxonomyError(
                        f"{path}:{lineno}: expected two tab-separated ids")
                edges.append((row[0], row[1]))
        return cls(edges, universe)

    def _check_acyclic(self):
        # Iterative DFS over parent edges; a back edge exposes the cycle path.
        WHITE, GREY, BLACK = 0, 1, 2
        color = {n: WHITE for n in self.nodes}
        for start in sorted(self.nodes):
            if color[start] != WHITE:
                continue
            stack = [(start, iter(sorted(self._parents[start])))]
            color[start] = GREY
            path = [start]
            while stack:
                node, it = stack[-1]
                advanced = False
                for parent in it:
                    if color[parent] == GREY:
                        cycle = path[path.index(parent):] + [parent]
                        raise TaxonomyError(
                            "taxonomy contains a cycle: " + " -> ".join(cycle))
                    if color[parent] == WHITE:
                        color[parent] = GREY
                        stack.append((parent, iter(sorted(self._parents[parent]))))
                        path.append(parent)
                        advanced = True
                        break
                if not advanced:
                    color[node] = BLACK
                    stack.pop()
                    path.pop()

    def _compute_depths(self) -> dict[str, int]:
        # Longest path from a root, in nodes; roots have depth 1.
        depth: dict[str, int] = {}
        order = []
        indegree = {n: len(self._parents[n]) for n in self.nodes}
        frontier = sorted(self.roots)
        while frontier:
            node = frontier.pop()
            order.append(node)
            for child in self._children[node]:
                indegree[child] -= 1
                if indegree[child] == 0:
                    frontier.append(child)
        for node in order:
            ps = self._parents[node]
            depth[node] = 1 + max((depth[p] for p in ps), default=0)
        return depth

    def __contains__(self, node: str) -> bool:
        return node in self.nodes

    def parents(self, node: str) -> frozenset[str]:
        return self._parents.get(node, frozenset())

    def depth(self, node: str) -> int:
        try:
            return self._depth[node]
        except KeyError:
            raise TaxonomyError(f"concept {node!r} is not in the taxonomy") from None

    def ancestors(self, node: str, include_self: bool = False) -> frozenset[str]:
        """Transitive hypernym closure of a node (empty for unknown nodes)."""
        if node not in self.nodes:
            return frozenset([node]) if include_self else frozenset()
        cached = self._ancestor_cache.get(node)
        if cached is None:
            closure: set[str] = set()
            stack = list(self._parents[node])
            while stack:
                current = stack.pop()
                if current not in closure:
                    closure.add(current)
                    stack.extend(self._parents[current])
            cached = frozenset(closure)
            self._ancestor_cache[node] = cached
        return cached | {node} if include_self else cached

    def is_strict_descendant(self, node: str, ancestor: str) -> bool:
        return ancestor in self.ancestors(node)

    def _up_distances(self, node: str) -> dict[str, int]:
        """Minimum edge counts from a node up to each inclusive ancestor."""
        cached = self._updist_cache.get(node)
        if cached is None:
            cached = {node: 0}
            frontier = [node]
            while frontier:
                nxt = []
                for current in frontier:
                    for parent in self._parents.get(current, ()):
                        if parent not in cached:
                            cached[parent] = cached[current] + 1
                            nxt.append(parent)
                frontier = nxt
            self._updist_cache[node] = cached
        return cached


def _common_ancestors(graph: TaxonomyGraph, c1: str, c2: str) -> frozenset[str]:
    for node in (c1, c2):
        if node not in graph:
            raise TaxonomyError(f"concept {node!r} is not in the taxonomy")
    return graph.ancestors(c1, include_self=True) & graph.ancestors(c2, include_self=True)


def wu_palmer(c1: str, c2: str, graph: TaxonomyGraph) -> float:
    """2 * depth(lcs) / (depth(c1) + depth(c2)); 1 exactly for a self-pair.

    The lcs is the deepest common ancestor (inclusive), ties broken by id.
    """
    common = _common_ancestors(graph, c1, c2)
    if not common:
        raise TaxonomyError(f"{c1!r} and {c2!r} share no ancestor")
    lcs = min(common, key=lambda n: (-graph.depth(n), n))
    return 2.0 * graph.depth(lcs) / (graph.depth(c1) + graph.depth(c2))


def leacock_chodorow(c1: str, c2: str, graph: TaxonomyGraph) -> float:
    """-log2(len / (2 * D)) for the shortest up-down taxonomy path.

    ``len`` counts nodes on the shortest path that climbs from one concept
    to a common ancestor and descends to the other (a self-path has len 1);
    D is the taxonomy's maximum depth.
    """
    if graph.max_depth < 1:
        raise TaxonomyError("taxonomy is empty")
    common = _common_ancestors(graph, c1, c2)
    if not common:
        raise TaxonomyError(f"{c1!r} and {c2!r} share no ancestor")
    up1 = graph._up_distances(c1)
    up2 = graph._up_distances(c2)
    shortest = min(up1[a] + up2[a] for a in common)
    return -math.log2((shortest + 1) / (2.0 * graph.max_depth))


def is_literal(concept_id: str, form: Form, lexicon: Lexicon,
               graph: TaxonomyGraph) -> bool:
    """True when the concept strictly descends from a sense of the form.

    Strict descent: a concept equal to an existing sense does not count.
    """
    if form.is_combination:
        raise LexiconError(
            f"literalness is defined for atomic forms, got {form.surface!r}")
    if form.surface not in lexicon:
        raise LexiconError(f"form {form.surface!r} not in lexicon")
    ancestors = graph.ancestors(concept_id)
    return any(sense in ancestors for sense, _ in lexicon.senses(form.surface))


ENDOCENTRIC = "endocentric"
EXOCENTRIC = "exocentric"


def classify_compound(concept_id: str, form: Form, lexicon: Lexicon,
                      graph: TaxonomyGraph) -> str:
    """Endocentric when the head word is a literal label of the concept."""
    if not form.is_combination:
        raise LexiconError(f"{form.surface!r} is not a compound")
    head = lexicon.head_constituent(form)
    if head not in lexicon:
        raise LexiconError(f"head constituent {head!r} not in lexicon")
    literal = is_literal(concept_id, lexicon.form(head), lexicon, graph)
    return ENDOCENTRIC if literal else EXOCENTRIC


def augment_reuse_with_heads(encoding: Encoding, lexicon: Lexicon):
    """Reuse-style encoding pairing each concept with its compound's head.

    Returns (encoding, dropped_concept_ids); compounds whose head word is
    absent from the lexicon are dropped and reported, not errors.
    """
    items = []
    dropped = []
    for item in encoding.items:
        if not item.form.is_combination:
            raise LexiconError(
                f"{item.form.surface!r} is not a compound; augmentation "
                "applies to compound encodings")
        head = lexicon.head_constituent(item.form)
        if head not in lexicon:
            dropped.append(item.concept_id)
            continue
        items.append(EncodingItem(concept_id=item.concept_id,
                                  form=lexicon.form(head),
                                  strategy=STRATEGY_REUSE))
    return Encoding(tuple(items)), tuple(dropped)
