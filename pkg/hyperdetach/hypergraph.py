"""
Hinge Hypergraph Model
Vertices, edges and hinges with incidence maps ψ (hinge → vertex) and
φ (hinge → edge), optional k-edge-coloring, and amalgamation.
"""

from collections import Counter, defaultdict
from dataclasses import dataclass
from functools import cached_property
from types import MappingProxyType
from typing import Dict, FrozenSet, Iterable, Iterator, List, Mapping, Optional, Sequence, Tuple, Union
import logging

import pandas as pd

from hyperdetach.exceptions import DomainError, PreconditionError

logger = logging.getLogger(__name__)

VertexId = Union[int, str]
EdgeId = Union[int, str]
HingeId = Tuple[EdgeId, int]


def id_key(value: Union[int, str]) -> Tuple[int, int, str]:
    """Sort key for vertex and edge ids: ints numerically, then strings"""
    if isinstance(value, bool) or not isinstance(value, (int, str)):
        raise DomainError(f"Ids must be int or str, got {value!r}")
    if isinstance(value, int):
        return (0, value, "")
    return (1, 0, value)


def hinge_key(hinge: HingeId) -> Tuple[Tuple[int, int, str], int]:
    """Sort key for hinge ids (edge id, ordinal)"""
    return (id_key(hinge[0]), hinge[1])


def sorted_ids(values: Iterable[Union[int, str]]) -> List[Union[int, str]]:
    return sorted(values, key=id_key)


def multiset_key(multiset: 'VertexMultiset') -> List[Tuple[Tuple[int, int, str], int]]:
    """Sort key for vertex multisets: entry by entry"""
    return [(id_key(v), m) for v, m in multiset.entries]


@dataclass(frozen=True)
class VertexMultiset:
    """Canonical multiset of vertices: (vertex, multiplicity) sorted by id"""

    entries: Tuple[Tuple[VertexId, int], ...] = ()

    def __post_init__(self):
        seen = set()
        previous = None
        for vertex, mult in self.entries:
            if vertex in seen:
                raise DomainError(f"Duplicate vertex {vertex!r} in multiset")
            if not isinstance(mult, int) or mult < 1:
                raise DomainError(f"Multiplicity of {vertex!r} must be >= 1, got {mult!r}")
            key = id_key(vertex)
            if previous is not None and key < previous:
                raise DomainError("Multiset entries must be sorted by vertex id")
            previous = key
            seen.add(vertex)

    @classmethod
    def from_counts(cls, counts: Mapping[VertexId, int]) -> 'VertexMultiset':
        """Build from a vertex → multiplicity mapping, dropping zero entries"""
        items = [(v, m) for v, m in counts.items() if m]
        items.sort(key=lambda item: id_key(item[0]))
        return cls(tuple(items))

    @classmethod
    def from_vertices(cls, vertices: Iterable[VertexId]) -> 'VertexMultiset':
        """Build from a list of (not necessarily distinct) vertices"""
        return cls.from_counts(Counter(vertices))

    @property
    def size(self) -> int:
        """|U| = Σ multiplicities"""
        return sum(m for _, m in self.entries)

    def multiplicity(self, vertex: VertexId) -> int:
        """μ_U(v)"""
        for v, m in self.entries:
            if v == vertex:
                return m
        return 0

    def vertices(self) -> Tuple[VertexId, ...]:
        return tuple(v for v, _ in self.entries)

    def as_dict(self) -> Dict[VertexId, int]:
        return dict(self.entries)

    def union(self, other: 'VertexMultiset') -> 'VertexMultiset':
        """Multiset union adding multiplicities"""
        counts = Counter(self.as_dict())
        counts.update(other.as_dict())
        return VertexMultiset.from_counts(counts)

    def split_off(self, vertex: VertexId) -> Tuple[int, 'VertexMultiset']:
        """Return (μ_U(vertex), U without vertex)"""
        rest = tuple((v, m) for v, m in self.entries if v != vertex)
        return self.multiplicity(vertex), VertexMultiset(rest)

    def to_list(self) -> List[List[Union[VertexId, int]]]:
        return [[v, m] for v, m in self.entries]

    def __iter__(self) -> Iterator[Tuple[VertexId, int]]:
        return iter(self.entries)

    def __len__(self) -> int:
        return len(self.entries)

    def __str__(self) -> str:
        parts = [f"{v}^{m}" if m > 1 else f"{v}" for v, m in self.entries]
        return "{" + ", ".join(parts) + "}"


class NumberFunction:
    """Total map vertex → positive integer (the g of a g-detachment)"""

    def __init__(self, values: Mapping[VertexId, int]):
        for vertex, value in values.items():
            if isinstance(value, bool) or not isinstance(value, int) or value < 1:
                raise DomainError(f"g({vertex!r}) must be a positive integer, got {value!r}")
        self._values = dict(values)

    @classmethod
    def constant(cls, vertices: Iterable[VertexId], value: int) -> 'NumberFunction':
        return cls({v: value for v in vertices})

    def __getitem__(self, vertex: VertexId) -> int:
        try:
            return self._values[vertex]
        except KeyError:
            raise DomainError(f"Number function is not defined on vertex {vertex!r}") from None

    def __contains__(self, vertex: VertexId) -> bool:
        return vertex in self._values

    def __eq__(self, other: object) -> bool:
        return isinstance(other, NumberFunction) and self._values == other._values

    def __repr__(self) -> str:
        return f"NumberFunction({self.as_dict()!r})"

    def items(self) -> List[Tuple[VertexId, int]]:
        return [(v, self._values[v]) for v in sorted_ids(self._values)]

    def vertices(self) -> List[VertexId]:
        return sorted_ids(self._values)

    def as_dict(self) -> Dict[VertexId, int]:
        return dict(self.items())

    def excess(self) -> int:
        """Σ (g(v) − 1), the number of splitting steps a detachment takes"""
        return sum(value - 1 for value in self._values.values())

    def total(self) -> int:
        return sum(self._values.values())

    def with_value(self, vertex: VertexId, value: int) -> 'NumberFunction':
        values = dict(self._values)
        values[vertex] = value
        return NumberFunction(values)


class AmalgamationMap:
    """Total map Ψ from detached vertices onto amalgamated vertices"""

    def __init__(self, mapping: Mapping[VertexId, VertexId]):
        self._mapping = dict(mapping)

    @classmethod
    def identity(cls, vertices: Iterable[VertexId]) -> 'AmalgamationMap':
        return cls({v: v for v in vertices})

    def __getitem__(self, vertex: VertexId) -> VertexId:
        try:
            return self._mapping[vertex]
        except KeyError:
            raise DomainError(f"Amalgamation map is not defined on vertex {vertex!r}") from None

    def __contains__(self, vertex: VertexId) -> bool:
        return vertex in self._mapping

    def __eq__(self, other: object) -> bool:
        return isinstance(other, AmalgamationMap) and self._mapping == other._mapping

    def __repr__(self) -> str:
        return f"AmalgamationMap({self.as_dict()!r})"

    def items(self) -> List[Tuple[VertexId, VertexId]]:
        return [(v, self._mapping[v]) for v in sorted_ids(self._mapping)]

    def as_dict(self) -> Dict[VertexId, VertexId]:
        return dict(self.items())

    def domain(self) -> List[VertexId]:
        return sorted_ids(self._mapping)

    def image(self) -> List[VertexId]:
        return sorted_ids(set(self._mapping.values()))

    def preimage(self, target: VertexId) -> List[VertexId]:
        """Ψ⁻¹(target), sorted"""
        return sorted_ids(v for v, u in self._mapping.items() if u == target)

    def fibres(self) -> Dict[VertexId, List[VertexId]]:
        fibres: Dict[VertexId, List[VertexId]] = defaultdict(list)
        for v in self.domain():
            fibres[self._mapping[v]].append(v)
        return {u: fibres[u] for u in sorted_ids(fibres)}

    def number_function(self) -> NumberFunction:
        """The induced g(w) = |Ψ⁻¹(w)|"""
        return NumberFunction({u: len(vs) for u, vs in self.fibres().items()})

    def extended(self, vertex: VertexId, target: VertexId) -> 'AmalgamationMap':
        mapping = dict(self._mapping)
        mapping[vertex] = target
        return AmalgamationMap(mapping)

    def then(self, outer: 'AmalgamationMap') -> 'AmalgamationMap':
        """Composition outer ∘ self"""
        return AmalgamationMap({v: outer[u] for v, u in self._mapping.items()})


class Hypergraph:
    """
    Hypergraph (V, E, H, ψ, φ) with first-class hinges

    Instances are immutable after construction; every operation that changes
    incidence returns a new Hypergraph with the same edge and hinge ids.
    """

    def __init__(
        self,
        vertices: Iterable[VertexId],
        psi: Mapping[HingeId, VertexId],
        phi: Mapping[HingeId, EdgeId],
        coloring: Optional[Mapping[EdgeId, int]] = None,
        edges: Optional[Iterable[EdgeId]] = None,
        num_colors: Optional[int] = None,
    ):
        """
        Initialize hypergraph

        Args:
            vertices: Vertex ids (isolated vertices allowed)
            psi: Hinge → vertex map, total on hinges
            phi: Hinge → edge map, surjective onto the edge set
            coloring: Optional edge → color index in 1..k
            edges: Optional explicit edge set, checked against the image of phi
            num_colors: Number of colors k (defaults to the largest color used)
        """
        self._vertices = tuple(sorted_ids(set(vertices)))
        vertex_set = set(self._vertices)

        if set(psi) != set(phi):
            raise DomainError("psi and phi must be defined on the same hinge set")

        for hinge, vertex in psi.items():
            if vertex not in vertex_set:
                raise DomainError(f"Hinge {hinge!r} is attached to unknown vertex {vertex!r}")

        image = set(phi.values())
        if edges is not None:
            edge_set = set(edges)
            bare = edge_set - image
            if bare:
                raise DomainError(
                    f"Edges {sorted_ids(bare)!r} have no hinges (phi must be surjective)"
                )
            if image - edge_set:
                raise DomainError(f"Hinges reference unknown edges {sorted_ids(image - edge_set)!r}")
        self._edges = tuple(sorted_ids(image))
        self._hinges = tuple(sorted(psi, key=hinge_key))
        self._psi = MappingProxyType(dict(psi))
        self._phi = MappingProxyType(dict(phi))

        self._coloring: Optional[Mapping[EdgeId, int]] = None
        self._num_colors = 1
        if coloring is not None:
            missing = image - set(coloring)
            if missing:
                raise DomainError(f"Coloring misses edges {sorted_ids(missing)!r}")
            extra = set(coloring) - image
            if extra:
                raise DomainError(f"Coloring names unknown edges {sorted_ids(extra)!r}")
            for edge, color in coloring.items():
                if isinstance(color, bool) or not isinstance(color, int) or color < 1:
                    raise DomainError(f"Color of edge {edge!r} must be a positive integer, got {color!r}")
            largest = max(coloring.values(), default=1)
            k = num_colors if num_colors is not None else largest
            if k < largest:
                raise DomainError(f"Coloring uses color {largest} but only {k} colors were declared")
            self._coloring = MappingProxyType(dict(coloring))
            self._num_colors = k
        elif num_colors not in (None, 1):
            raise DomainError("num_colors given without a coloring")

    # ── construction helpers ───────────────────────────────────────────

    @classmethod
    def from_edges(
        cls,
        vertices: Iterable[VertexId],
        edges: Mapping[EdgeId, Sequence[VertexId]],
        coloring: Optional[Mapping[EdgeId, int]] = None,
        num_colors: Optional[int] = None,
    ) -> 'Hypergraph':
        """
        Build from edge id → list of vertices, one hinge per list entry

        Hinge ids are assigned as (edge id, ordinal) in list order.
        """
        psi: Dict[HingeId, VertexId] = {}
        phi: Dict[HingeId, EdgeId] = {}
        for edge, joined in edges.items():
            if not joined:
                raise DomainError(f"Edge {edge!r} has no hinges (phi must be surjective)")
            for ordinal, vertex in enumerate(joined):
                psi[(edge, ordinal)] = vertex
                phi[(edge, ordinal)] = edge
        return cls(vertices, psi, phi, coloring=coloring, edges=edges.keys(), num_colors=num_colors)

    # ── basic accessors ────────────────────────────────────────────────

    @property
    def vertices(self) -> Tuple[VertexId, ...]:
        return self._vertices

    @property
    def edges(self) -> Tuple[EdgeId, ...]:
        return self._edges

    @property
    def hinges(self) -> Tuple[HingeId, ...]:
        return self._hinges

    @property
    def psi(self) -> Mapping[HingeId, VertexId]:
        return self._psi

    @property
    def phi(self) -> Mapping[HingeId, EdgeId]:
        return self._phi

    @property
    def coloring(self) -> Optional[Mapping[EdgeId, int]]:
        return self._coloring

    @property
    def is_colored(self) -> bool:
        return self._coloring is not None

    @property
    def num_colors(self) -> int:
        """k; a colorless hypergraph counts as one color class"""
        return self._num_colors

    def color(self, edge: EdgeId) -> int:
        """Color of an edge, 1 for colorless hypergraphs"""
        self._require_edge(edge)
        if self._coloring is None:
            return 1
        return self._coloring[edge]

    # ── indices ────────────────────────────────────────────────────────

    @cached_property
    def _hinges_at(self) -> Dict[VertexId, Tuple[HingeId, ...]]:
        index: Dict[VertexId, List[HingeId]] = {v: [] for v in self._vertices}
        for hinge in self._hinges:
            index[self._psi[hinge]].append(hinge)
        return {v: tuple(hs) for v, hs in index.items()}

    @cached_property
    def _hinges_on(self) -> Dict[EdgeId, Tuple[HingeId, ...]]:
        index: Dict[EdgeId, List[HingeId]] = {e: [] for e in self._edges}
        for hinge in self._hinges:
            index[self._phi[hinge]].append(hinge)
        return {e: tuple(hs) for e, hs in index.items()}

    @cached_property
    def _signatures(self) -> Dict[EdgeId, VertexMultiset]:
        return {
            e: VertexMultiset.from_vertices(self._psi[h] for h in hs)
            for e, hs in self._hinges_on.items()
        }

    @cached_property
    def _edges_by_signature(self) -> Dict[VertexMultiset, FrozenSet[EdgeId]]:
        groups: Dict[VertexMultiset, List[EdgeId]] = defaultdict(list)
        for edge, signature in self._signatures.items():
            groups[signature].append(edge)
        return {sig: frozenset(es) for sig, es in groups.items()}

    def _require_vertex(self, vertex: VertexId) -> None:
        if vertex not in self._hinges_at:
            raise DomainError(f"Unknown vertex {vertex!r}")

    def _require_edge(self, edge: EdgeId) -> None:
        if edge not in self._hinges_on:
            raise DomainError(f"Unknown edge {edge!r}")

    # ── queries ────────────────────────────────────────────────────────

    def degree(self, vertex: VertexId) -> int:
        """d(v) = |ψ⁻¹(v)|"""
        self._require_vertex(vertex)
        return len(self._hinges_at[vertex])

    def edge_size(self, edge: EdgeId) -> int:
        """|e|: the number of distinct vertices incident with e"""
        self._require_edge(edge)
        return len(self._signatures[edge])

    def hinge_count(self, edge: EdgeId) -> int:
        """|φ⁻¹(e)|"""
        self._require_edge(edge)
        return len(self._hinges_on[edge])

    def signature(self, edge: EdgeId) -> VertexMultiset:
        """The unique multiset U with e ∈ E(U)"""
        self._require_edge(edge)
        return self._signatures[edge]

    def signature_counts(self) -> Dict[VertexMultiset, int]:
        """m(U) for every realized multiset U"""
        return {sig: len(es) for sig, es in self._edges_by_signature.items()}

    def edges_joining(self, multiset: VertexMultiset) -> FrozenSet[EdgeId]:
        """E(U): edges whose hinge distribution equals U exactly"""
        return self._edges_by_signature.get(multiset, frozenset())

    def multiplicity(self, multiset: VertexMultiset) -> int:
        """m(U) = |E(U)|"""
        return len(self.edges_joining(multiset))

    def hinge_set(self, vertex: VertexId, edge: Optional[EdgeId] = None) -> FrozenSet[HingeId]:
        """H(v), or H(v, e) when an edge is given"""
        self._require_vertex(vertex)
        if edge is None:
            return frozenset(self._hinges_at[vertex])
        self._require_edge(edge)
        return frozenset(h for h in self._hinges_on[edge] if self._psi[h] == vertex)

    def hinge_set_of_multiset(self, vertex: VertexId, rest: VertexMultiset, t: int = 1) -> FrozenSet[HingeId]:
        """H(u^t, U): hinges at u on the edges of E({u^t} ∪ U)"""
        self._require_vertex(vertex)
        if rest.multiplicity(vertex):
            raise DomainError(f"U must not contain {vertex!r} itself")
        target = rest.union(VertexMultiset(((vertex, t),))) if t else rest
        hinges = set()
        for edge in self.edges_joining(target):
            hinges.update(h for h in self._hinges_on[edge] if self._psi[h] == vertex)
        return frozenset(hinges)

    def incident_edges(self, vertex: VertexId) -> List[EdgeId]:
        self._require_vertex(vertex)
        return sorted_ids({self._phi[h] for h in self._hinges_at[vertex]})

    def hinges_of_edge(self, edge: EdgeId) -> Tuple[HingeId, ...]:
        self._require_edge(edge)
        return self._hinges_on[edge]

    def color_class(self, color: int) -> 'Hypergraph':
        """G(j): the spanning sub-hypergraph of color-j edges with their hinges"""
        if self._coloring is None:
            raise DomainError("Hypergraph has no coloring")
        if not 1 <= color <= self._num_colors:
            raise DomainError(f"Color {color} outside 1..{self._num_colors}")
        hinges = [h for h in self._hinges if self._coloring[self._phi[h]] == color]
        edges = {self._phi[h] for h in hinges}
        return Hypergraph(
            self._vertices,
            {h: self._psi[h] for h in hinges},
            {h: self._phi[h] for h in hinges},
            coloring={e: color for e in edges},
            num_colors=self._num_colors,
        )

    def effective_color_classes(self) -> List['Hypergraph']:
        """Color classes 1..k, the whole hypergraph when colorless"""
        if self._coloring is None:
            return [self]
        return [self.color_class(j) for j in range(1, self._num_colors + 1)]

    def simplicity_violations(self, g: Optional[NumberFunction] = None) -> List[Tuple[VertexId, EdgeId, int]]:
        """Every (v, e, |H(v,e)|) with |H(v,e)| > g(v); g ≡ 1 when omitted"""
        violations = []
        for edge in self._edges:
            for vertex, count in self._signatures[edge]:
                limit = 1 if g is None else g[vertex]
                if count > limit:
                    violations.append((vertex, edge, count))
        return violations

    def is_simple_function(self, g: NumberFunction) -> bool:
        """True iff |H(v,e)| ≤ g(v) for every vertex v and edge e"""
        missing = [v for v in self._vertices if v not in g]
        if missing:
            raise PreconditionError(f"Number function misses vertices {missing!r}")
        return not self.simplicity_violations(g)

    def is_simple(self) -> bool:
        return not self.simplicity_violations()

    def is_regular(self, degree: Optional[int] = None) -> bool:
        """True iff every vertex has the same degree (equal to ``degree`` when given)"""
        degrees = {len(hs) for hs in self._hinges_at.values()}
        if degree is not None:
            return degrees <= {degree}
        return len(degrees) <= 1

    # ── transformations ────────────────────────────────────────────────

    def amalgamate(self, amalgamation: AmalgamationMap) -> 'Hypergraph':
        """Image under Ψ: same edges and hinges, ψ replaced by Ψ∘ψ"""
        missing = [v for v in self._vertices if v not in amalgamation]
        if missing:
            raise PreconditionError(f"Amalgamation map misses vertices {missing!r}")
        targets = {amalgamation[v] for v in self._vertices}
        return Hypergraph(
            targets,
            {h: amalgamation[v] for h, v in self._psi.items()},
            self._phi,
            coloring=self._coloring,
            num_colors=self._num_colors if self._coloring is not None else None,
        )

    def relabel(self, mapping: Mapping[VertexId, VertexId]) -> 'Hypergraph':
        """Rename vertices through a bijection"""
        if len(set(mapping.values())) != len(mapping):
            raise DomainError("Relabeling must be injective")
        return self.amalgamate(AmalgamationMap(mapping))

    def with_hinges_moved(self, hinges: Iterable[HingeId], target: VertexId) -> 'Hypergraph':
        """Re-seat the given hinges on target, adding target as a vertex if new"""
        psi = dict(self._psi)
        for hinge in hinges:
            if hinge not in psi:
                raise DomainError(f"Unknown hinge {hinge!r}")
            psi[hinge] = target
        return Hypergraph(
            set(self._vertices) | {target},
            psi,
            self._phi,
            coloring=self._coloring,
            num_colors=self._num_colors if self._coloring is not None else None,
        )

    def with_coloring(self, coloring: Mapping[EdgeId, int], num_colors: Optional[int] = None) -> 'Hypergraph':
        return Hypergraph(self._vertices, self._psi, self._phi, coloring=coloring, num_colors=num_colors)

    # ── comparison and reporting ───────────────────────────────────────

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, Hypergraph):
            return NotImplemented
        return (
            self._vertices == other._vertices
            and dict(self._psi) == dict(other._psi)
            and dict(self._phi) == dict(other._phi)
            and self._coloring_dict() == other._coloring_dict()
        )

    __hash__ = None

    def _coloring_dict(self) -> Optional[Dict[EdgeId, int]]:
        return None if self._coloring is None else dict(self._coloring)

    def is_isomorphic_fixing_ids(self, other: 'Hypergraph') -> bool:
        """
        Isomorphism that fixes every edge and hinge id

        Such an isomorphism is forced on non-isolated vertices by the hinges,
        so it suffices to check that the induced vertex map is a consistent
        bijection and that isolated vertex counts agree.
        """
        if dict(self._phi) != dict(other._phi) or self._coloring_dict() != other._coloring_dict():
            return False
        forward: Dict[VertexId, VertexId] = {}
        backward: Dict[VertexId, VertexId] = {}
        for hinge, vertex in self._psi.items():
            image = other._psi[hinge]
            if forward.setdefault(vertex, image) != image:
                return False
            if backward.setdefault(image, vertex) != vertex:
                return False
        return len(self._vertices) - len(forward) == len(other._vertices) - len(backward)

    def degree_table(self) -> pd.DataFrame:
        """Per-vertex degrees overall and per color class"""
        rows = []
        for vertex in self._vertices:
            row = {'vertex': vertex, 'degree': len(self._hinges_at[vertex])}
            per_color = Counter(self.color(self._phi[h]) for h in self._hinges_at[vertex])
            for j in range(1, self._num_colors + 1):
                row[f'color_{j}'] = per_color.get(j, 0)
            rows.append(row)
        columns = ['vertex', 'degree'] + [f'color_{j}' for j in range(1, self._num_colors + 1)]
        return pd.DataFrame(rows, columns=columns)

    def __repr__(self) -> str:
        return (
            f"Hypergraph(|V|={len(self._vertices)}, |E|={len(self._edges)}, "
            f"|H|={len(self._hinges)}, k={self._num_colors if self.is_colored else 0})"
        )


def amalgamate(hypergraph: Hypergraph, amalgamation: AmalgamationMap) -> Hypergraph:
    """Functional form of Hypergraph.amalgamate"""
    return hypergraph.amalgamate(amalgamation)


def example_hypergraph() -> Hypergraph:
    """The five-vertex, three-edge, seven-hinge hypergraph used in the docs"""
    vertices = ['v1', 'v2', 'v3', 'v4', 'v5']
    edges = {
        'e1': ['v1', 'v1', 'v2', 'v3'],
        'e2': ['v3', 'v4'],
        'e3': ['v5'],
    }
    return Hypergraph.from_edges(vertices, edges)


if __name__ == "__main__":
    G = example_hypergraph()
    print(G)
    print(G.degree_table())
    for e in G.edges:
        print(f"|{e}| = {G.edge_size(e)}, hinges = {G.hinge_count(e)}, U = {G.signature(e)}")
