"""
Random Instance Generators
Small random hypergraphs, simple number functions and laminar families for
tests, the randomized suites and `generate --random`.
"""

from typing import List, Optional, Sequence, Tuple
import logging

import numpy as np

from hyperdetach import DetachConfig
from hyperdetach.hypergraph import Hypergraph, NumberFunction
from hyperdetach.laminar import LaminarFamily

logger = logging.getLogger(__name__)


def make_rng(seed=None) -> np.random.Generator:
    return np.random.default_rng(seed)


def random_hypergraph(
    rng: np.random.Generator,
    max_vertices: Optional[int] = None,
    max_edges: Optional[int] = None,
    max_hinges: Optional[int] = None,
    max_colors: Optional[int] = None,
    colored: Optional[bool] = None,
) -> Hypergraph:
    """
    Random hypergraph on vertices 0..v−1 with edges 0..e−1

    Each edge gets between 1 and max_hinges hinges on vertices drawn with
    replacement, so loops and repeated incidences occur. Colored with
    k ≤ max_colors colors unless ``colored`` is False.
    """
    max_vertices = max_vertices or DetachConfig.MAX_VERTICES
    max_edges = max_edges or DetachConfig.MAX_EDGES
    max_hinges = max_hinges or DetachConfig.MAX_HINGES_PER_EDGE
    max_colors = max_colors or DetachConfig.MAX_COLORS

    n_vertices = int(rng.integers(1, max_vertices + 1))
    n_edges = int(rng.integers(1, max_edges + 1))
    edges = {
        e: [int(v) for v in rng.integers(0, n_vertices, size=int(rng.integers(1, max_hinges + 1)))]
        for e in range(n_edges)
    }

    if colored is None:
        colored = bool(rng.integers(0, 4))
    if not colored:
        return Hypergraph.from_edges(range(n_vertices), edges)
    k = int(rng.integers(1, max_colors + 1))
    coloring = {e: int(rng.integers(1, k + 1)) for e in edges}
    return Hypergraph.from_edges(range(n_vertices), edges, coloring=coloring, num_colors=k)


def random_simple_number_function(
    hypergraph: Hypergraph,
    rng: np.random.Generator,
    max_number: Optional[int] = None,
) -> NumberFunction:
    """g(v) drawn from [max_e |H(v,e)|, max_number], so g is simple"""
    max_number = max_number or DetachConfig.MAX_NUMBER
    values = {}
    for vertex in hypergraph.vertices:
        floor = max((hypergraph.signature(e).multiplicity(vertex) for e in hypergraph.incident_edges(vertex)), default=1)
        floor = max(floor, 1)
        values[vertex] = int(rng.integers(floor, max(floor, max_number) + 1))
    return NumberFunction(values)


def random_laminar_family(
    ground: Sequence,
    rng: np.random.Generator,
    max_sets: Optional[int] = None,
) -> LaminarFamily:
    """
    Random laminar family by nested interval splitting of a shuffled ground set

    Blocks are cut into consecutive pieces; a piece is kept as a member with
    probability 3/4 and split further. Pieces of one block never cross.
    """
    max_sets = max_sets or DetachConfig.LAMINAR_MAX_SETS
    order = [ground[i] for i in rng.permutation(len(ground))]
    sets: List[frozenset] = []
    stack: List[list] = [order]
    while stack and len(sets) < max_sets:
        block = stack.pop()
        if not block:
            continue
        if len(block) == 1:
            if rng.random() < 0.5:
                sets.append(frozenset(block))
            continue
        cuts = sorted(set(int(c) for c in rng.integers(1, len(block), size=int(rng.integers(1, 3)))))
        bounds = [0] + cuts + [len(block)]
        for start, stop in zip(bounds, bounds[1:]):
            piece = block[start:stop]
            if len(sets) < max_sets and rng.random() < 0.75:
                sets.append(frozenset(piece))
            stack.append(piece)
    return LaminarFamily(frozenset(ground), tuple(sets))


def random_split_instance(
    rng: np.random.Generator,
    max_ground: Optional[int] = None,
    max_parts: Optional[int] = None,
) -> Tuple[frozenset, LaminarFamily, LaminarFamily, int]:
    """(S, A, B, n) with |S| ≤ max_ground and n ≤ max_parts"""
    max_ground = max_ground or DetachConfig.LAMINAR_MAX_GROUND
    max_parts = max_parts or DetachConfig.LAMINAR_MAX_PARTS
    ground = list(range(int(rng.integers(0, max_ground + 1))))
    family_a = random_laminar_family(ground, rng)
    family_b = random_laminar_family(ground, rng)
    parts = int(rng.integers(1, max_parts + 1))
    return frozenset(ground), family_a, family_b, parts


def random_instance(seed: Optional[int] = None, **bounds) -> Tuple[Hypergraph, NumberFunction]:
    """A random hypergraph with a random simple number function"""
    rng = make_rng(seed)
    max_number = bounds.pop('max_number', None)
    hypergraph = random_hypergraph(rng, **bounds)
    return hypergraph, random_simple_number_function(hypergraph, rng, max_number)
