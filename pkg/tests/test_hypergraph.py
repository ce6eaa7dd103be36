"""
Unit tests for the hinge hypergraph model.

The five-vertex example (edges e1 = {v1, v1, v2, v3}, e2 = {v3, v4},
e3 = {v5}) carries hinges (e1, 0..3), (e2, 0..1) and (e3, 0).
"""

import pytest

from hyperdetach.exceptions import DomainError, PreconditionError
from hyperdetach.hypergraph import (
    AmalgamationMap,
    Hypergraph,
    NumberFunction,
    VertexMultiset,
    amalgamate,
    example_hypergraph,
    sorted_ids,
)


# ── helpers ─────────────────────────────────────────────────────────────

def _ms(*vertices):
    return VertexMultiset.from_vertices(vertices)


def _make_colored_example():
    """The example with e1, e3 in color 1 and e2 in color 2."""
    return example_hypergraph().with_coloring({'e1': 1, 'e2': 2, 'e3': 1})


# ── example query tests ─────────────────────────────────────────────────

class TestExampleQueries:
    def setup_method(self):
        self.G = example_hypergraph()

    def test_edge_sizes(self):
        assert self.G.edge_size('e1') == 3
        assert self.G.edge_size('e2') == 2
        assert self.G.edge_size('e3') == 1

    def test_degrees(self):
        assert self.G.degree('v1') == 2
        assert self.G.degree('v3') == 2
        for v in ('v2', 'v4', 'v5'):
            assert self.G.degree(v) == 1

    def test_edges_joining(self):
        assert self.G.edges_joining(_ms('v1', 'v2', 'v3')) == frozenset()
        assert self.G.edges_joining(_ms('v1', 'v1', 'v2', 'v3')) == frozenset({'e1'})

    def test_multiplicities(self):
        assert self.G.multiplicity(_ms('v1', 'v2', 'v3')) == 0
        assert self.G.multiplicity(_ms('v1', 'v1', 'v2', 'v3')) == 1
        assert self.G.multiplicity(_ms('v3', 'v4')) == 1
        assert self.G.multiplicity(_ms('v5')) == 1

    def test_hinge_sets(self):
        assert self.G.hinge_set('v3', 'e1') == frozenset({('e1', 3)})
        assert self.G.hinge_set('v3', 'e3') == frozenset()
        assert self.G.hinge_set('v1') == frozenset({('e1', 0), ('e1', 1)})

    def test_hinge_set_of_multiset(self):
        assert self.G.hinge_set_of_multiset('v1', _ms('v2', 'v3'), 2) == frozenset({('e1', 0), ('e1', 1)})
        assert self.G.hinge_set_of_multiset('v1', _ms('v2', 'v3'), 1) == frozenset()
        assert self.G.hinge_set_of_multiset('v3', _ms('v1', 'v1', 'v2'), 1) == frozenset({('e1', 3)})

    def test_hinge_set_of_multiset_rejects_vertex_in_rest(self):
        with pytest.raises(DomainError):
            self.G.hinge_set_of_multiset('v1', _ms('v1', 'v2'), 1)

    def test_hinge_count_differs_from_edge_size(self):
        assert self.G.hinge_count('e1') == 4
        assert self.G.edge_size('e1') == 3

    def test_signature(self):
        assert self.G.signature('e1') == VertexMultiset((('v1', 2), ('v2', 1), ('v3', 1)))
        assert str(self.G.signature('e1')) == "{v1^2, v2, v3}"

    def test_degree_sum_equals_hinge_count(self):
        assert sum(self.G.degree(v) for v in self.G.vertices) == len(self.G.hinges) == 7

    def test_every_edge_has_one_signature(self):
        total = sum(self.G.signature_counts().values())
        assert total == len(self.G.edges)

    def test_unknown_ids_raise(self):
        with pytest.raises(DomainError):
            self.G.degree('v9')
        with pytest.raises(DomainError):
            self.G.edge_size('e9')

    def test_isolated_vertex_has_degree_zero(self):
        G = Hypergraph.from_edges(['a', 'b'], {'e': ['a']})
        assert G.degree('b') == 0


# ── construction tests ──────────────────────────────────────────────────

class TestConstruction:
    def test_edge_without_hinges_rejected(self):
        with pytest.raises(DomainError):
            Hypergraph.from_edges(['a'], {'e': []})

    def test_hinge_on_unknown_vertex_rejected(self):
        with pytest.raises(DomainError):
            Hypergraph.from_edges(['a'], {'e': ['b']})

    def test_psi_and_phi_must_share_hinges(self):
        with pytest.raises(DomainError):
            Hypergraph(['a'], {('e', 0): 'a'}, {('e', 1): 'e'})

    def test_coloring_must_cover_every_edge(self):
        with pytest.raises(DomainError):
            Hypergraph.from_edges(['a'], {'e': ['a'], 'f': ['a']}, coloring={'e': 1})

    def test_declared_colors_cover_used_colors(self):
        with pytest.raises(DomainError):
            Hypergraph.from_edges(['a'], {'e': ['a']}, coloring={'e': 3}, num_colors=2)

    def test_mixed_id_types_sort_ints_first(self):
        assert sorted_ids(['b', 3, 'a', 1]) == [1, 3, 'a', 'b']

    def test_multiset_entries_must_be_sorted(self):
        with pytest.raises(DomainError):
            VertexMultiset((('b', 1), ('a', 1)))

    def test_multiset_union_adds_multiplicities(self):
        assert _ms('a', 'b').union(_ms('a')) == VertexMultiset((('a', 2), ('b', 1)))
        assert _ms('a', 'a', 'b').size == 3


# ── coloring tests ──────────────────────────────────────────────────────

class TestColoring:
    def setup_method(self):
        self.G = _make_colored_example()

    def test_color_class_is_spanning(self):
        first = self.G.color_class(1)
        assert first.vertices == self.G.vertices
        assert first.edges == ('e1', 'e3')
        assert first.degree('v4') == 0

    def test_degree_additivity(self):
        classes = self.G.effective_color_classes()
        for v in self.G.vertices:
            assert sum(c.degree(v) for c in classes) == self.G.degree(v)

    def test_multiplicity_additivity(self):
        classes = self.G.effective_color_classes()
        for U, m in self.G.signature_counts().items():
            assert sum(c.multiplicity(U) for c in classes) == m

    def test_color_out_of_range(self):
        with pytest.raises(DomainError):
            self.G.color_class(3)

    def test_uncolored_has_no_color_class(self):
        with pytest.raises(DomainError):
            example_hypergraph().color_class(1)
        assert example_hypergraph().num_colors == 1

    def test_degree_table(self):
        table = self.G.degree_table()
        assert list(table.columns) == ['vertex', 'degree', 'color_1', 'color_2']
        row = table[table['vertex'] == 'v3'].iloc[0]
        assert (row['degree'], row['color_1'], row['color_2']) == (2, 1, 1)


# ── simplicity tests ────────────────────────────────────────────────────

class TestSimplicity:
    def setup_method(self):
        self.G = example_hypergraph()

    def test_example_is_not_simple(self):
        assert not self.G.is_simple()
        assert self.G.simplicity_violations() == [('v1', 'e1', 2)]

    def test_simple_function(self):
        g = NumberFunction({'v1': 2, 'v2': 1, 'v3': 1, 'v4': 1, 'v5': 1})
        assert self.G.is_simple_function(g)
        assert not self.G.is_simple_function(g.with_value('v1', 1))

    def test_partial_function_raises(self):
        with pytest.raises(PreconditionError):
            self.G.is_simple_function(NumberFunction({'v1': 2}))

    def test_number_function_values_positive(self):
        with pytest.raises(DomainError):
            NumberFunction({'a': 0})
        assert NumberFunction({'a': 3, 'b': 1}).excess() == 2

    def test_is_regular(self):
        K = Hypergraph.from_edges([0, 1, 2], {0: [0, 1], 1: [1, 2], 2: [0, 2]})
        assert K.is_regular()
        assert K.is_regular(2)
        assert not K.is_regular(3)
        assert not self.G.is_regular()


# ── amalgamation tests ──────────────────────────────────────────────────

class TestAmalgamation:
    def setup_method(self):
        self.G = _make_colored_example()

    def test_identity_returns_equal_hypergraph(self):
        assert amalgamate(self.G, AmalgamationMap.identity(self.G.vertices)) == self.G

    def test_merging_adds_degrees(self):
        Psi = AmalgamationMap({'v1': 'w', 'v2': 'w', 'v3': 'v3', 'v4': 'v4', 'v5': 'v5'})
        F = self.G.amalgamate(Psi)
        assert F.degree('w') == self.G.degree('v1') + self.G.degree('v2')
        assert F.signature('e1') == VertexMultiset((('v3', 1), ('w', 3)))

    def test_preserves_edges_hinges_and_colors(self):
        F = self.G.amalgamate(AmalgamationMap({v: 'w' for v in self.G.vertices}))
        assert F.edges == self.G.edges
        assert F.hinges == self.G.hinges
        assert dict(F.coloring) == dict(self.G.coloring)
        for e in F.edges:
            assert F.hinge_count(e) == self.G.hinge_count(e)
        assert F.vertices == ('w',)

    def test_partial_map_raises(self):
        with pytest.raises(PreconditionError):
            self.G.amalgamate(AmalgamationMap({'v1': 'w'}))

    def test_number_function_of_map(self):
        Psi = AmalgamationMap({'a': 'x', 'b': 'x', 'c': 'y'})
        assert Psi.number_function() == NumberFunction({'x': 2, 'y': 1})
        assert Psi.preimage('x') == ['a', 'b']

    def test_relabel_must_be_injective(self):
        with pytest.raises(DomainError):
            self.G.relabel({'v1': 'a', 'v2': 'a', 'v3': 'c', 'v4': 'd', 'v5': 'e'})

    def test_relabel_is_isomorphic(self):
        H = self.G.relabel({v: i for i, v in enumerate(self.G.vertices)})
        assert H != self.G
        assert H.is_isomorphic_fixing_ids(self.G)
