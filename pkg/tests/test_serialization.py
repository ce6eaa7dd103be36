"""
Unit tests for the JSON codec and the artifact store.
"""

import pytest

from hyperdetach.designs import DesignSpec, FactorSpec, build_design
from hyperdetach.exceptions import SchemaError
from hyperdetach.hypergraph import AmalgamationMap, NumberFunction, VertexMultiset, example_hypergraph
from hyperdetach.serialization import (
    ArtifactStore,
    artifact_kind,
    canonical,
    design_artifact,
    dumps,
    emit_amalgamation,
    emit_hypergraph,
    emit_number_function,
    loads,
    parse_amalgamation,
    parse_design_spec,
    parse_factor_spec,
    parse_hypergraph,
    parse_number_function,
    parse_split_request,
)


# ── helpers ─────────────────────────────────────────────────────────────

def _make_example_document():
    """The five-vertex example as written by hand, edges out of order."""
    return {
        'vertices': ['v5', 'v4', 'v3', 'v2', 'v1'],
        'edges': [
            {'id': 'e3', 'hinges': [{'vertex': 'v5'}]},
            {'id': 'e1', 'hinges': [{'vertex': 'v1'}, {'vertex': 'v1'}, {'vertex': 'v2'}, {'vertex': 'v3'}]},
            {'id': 'e2', 'hinges': [{'vertex': 'v3'}, {'vertex': 'v4'}]},
        ],
    }


# ── hypergraph codec tests ──────────────────────────────────────────────

class TestHypergraphCodec:
    def test_parses_example(self):
        G = parse_hypergraph(_make_example_document())
        assert G == example_hypergraph()
        assert G.multiplicity(VertexMultiset.from_vertices(['v1', 'v1', 'v2', 'v3'])) == 1
        assert G.hinge_set('v3', 'e1') == frozenset({('e1', 3)})

    def test_emit_is_canonical(self):
        document = canonical(_make_example_document())
        assert document['vertices'] == ['v1', 'v2', 'v3', 'v4', 'v5']
        assert [e['id'] for e in document['edges']] == ['e1', 'e2', 'e3']
        assert 'colors' not in document
        assert canonical(document) == document

    def test_round_trip_colored(self):
        G = example_hypergraph().with_coloring({'e1': 1, 'e2': 2, 'e3': 2}, 3)
        document = emit_hypergraph(G)
        assert document['colors'] == 3
        assert document['edges'][0]['color'] == 1
        assert parse_hypergraph(document) == G

    def test_integer_ids(self):
        G = build_design(DesignSpec.complete(3, [2], [1]))
        assert parse_hypergraph(loads(dumps(emit_hypergraph(G)))) == G

    def test_dumps_is_stable(self):
        text = dumps(emit_hypergraph(example_hypergraph()))
        assert text.endswith("}\n")
        assert text == dumps(canonical(loads(text)))


# ── schema error tests ──────────────────────────────────────────────────

class TestSchemaErrors:
    def test_malformed_json_has_position(self):
        with pytest.raises(SchemaError) as info:
            loads('{\n  "vertices": ]\n}')
        assert info.value.line == 2
        assert info.value.column is not None
        assert info.value.to_dict()['error'] == 'schema'

    def test_missing_key(self):
        with pytest.raises(SchemaError) as info:
            parse_hypergraph({'vertices': []})
        assert info.value.path == "$"

    def test_unknown_vertex_path(self):
        document = _make_example_document()
        document['edges'][1]['hinges'][2]['vertex'] = 'v9'
        with pytest.raises(SchemaError) as info:
            parse_hypergraph(document)
        assert info.value.path == "$.edges[1].hinges[2].vertex"

    def test_edge_without_hinges(self):
        document = _make_example_document()
        document['edges'][0]['hinges'] = []
        with pytest.raises(SchemaError):
            parse_hypergraph(document)

    def test_duplicate_edge_id(self):
        document = _make_example_document()
        document['edges'][2]['id'] = 'e3'
        with pytest.raises(SchemaError):
            parse_hypergraph(document)

    def test_boolean_id_rejected(self):
        with pytest.raises(SchemaError):
            parse_hypergraph({'vertices': [True], 'edges': []})

    def test_partial_coloring_rejected(self):
        document = _make_example_document()
        document['edges'][0]['color'] = 1
        with pytest.raises(SchemaError):
            parse_hypergraph(document)

    def test_unknown_artifact_kind(self):
        with pytest.raises(SchemaError):
            artifact_kind({'kind': 'poster'})


# ── function and spec codec tests ───────────────────────────────────────

class TestOtherDocuments:
    def test_number_function(self):
        g = NumberFunction({'a': 2, 'b': 1})
        assert parse_number_function(emit_number_function(g)) == g
        with pytest.raises(SchemaError):
            parse_number_function({'g': [{'vertex': 'a', 'value': 0}]})

    def test_amalgamation(self):
        Psi = AmalgamationMap({'a~1': 'a', 'a': 'a'})
        document = emit_amalgamation(Psi)
        assert document['psi'][0] == {'vertex': 'a', 'image': 'a'}
        assert parse_amalgamation(document) == Psi

    def test_design_spec(self):
        spec = parse_design_spec({'n': 4, 'H': [2], 'lambda': [1], 'parts': [2, 2, 2, 2]})
        assert spec == DesignSpec.partite(4, [2], [1], 2)
        with pytest.raises(SchemaError):
            parse_design_spec({'n': 3, 'H': [4], 'lambda': [1]})

    def test_factor_spec(self):
        assert parse_factor_spec({'R': [1, 1]}) == FactorSpec((1, 1))
        assert parse_factor_spec(FactorSpec.almost_of([2]).to_dict()) == FactorSpec.almost_of([2])
        assert parse_factor_spec({'kind': 'QR', 'R': [2], 'Q': [1]}).Q == (1,)
        with pytest.raises(SchemaError):
            parse_factor_spec({'kind': 'QR', 'R': [1], 'Q': [2]})

    def test_split_request(self):
        ground, A, B, n = parse_split_request({'ground': [1, 2, 3], 'A': [[1, 2]], 'B': [[3]], 'n': 2})
        assert ground == frozenset({1, 2, 3})
        assert A.sets == (frozenset({1, 2}),)
        assert n == 2
        with pytest.raises(SchemaError):
            parse_split_request({'ground': [1], 'A': [[2]], 'n': 2})


# ── ArtifactStore tests ─────────────────────────────────────────────────

class TestArtifactStore:
    def setup_method(self):
        spec = DesignSpec.complete(3, [2], [1])
        self.document = design_artifact(spec, build_design(spec))

    def test_save_and_load(self, tmp_path):
        store = ArtifactStore(str(tmp_path))
        store.save(self.document, 'k3', metadata={'note': 'triangle'})
        assert store.load('k3') == self.document
        metadata = store.load_metadata('k3')
        assert metadata['kind'] == 'design'
        assert metadata['note'] == 'triangle'

    def test_list_available(self, tmp_path):
        store = ArtifactStore(str(tmp_path))
        store.save(self.document, 'k3')
        listed = store.list_available()
        assert [(e['name'], e['kind']) for e in listed] == [('k3', 'design')]

    def test_missing_artifact(self, tmp_path):
        with pytest.raises(FileNotFoundError):
            ArtifactStore(str(tmp_path)).load('nothing')

    def test_rejects_document_without_kind(self, tmp_path):
        with pytest.raises(SchemaError):
            ArtifactStore(str(tmp_path)).save({'vertices': []}, 'bare')

    def test_name_is_not_a_prefix_match(self, tmp_path):
        store = ArtifactStore(str(tmp_path))
        larger = DesignSpec.complete(5, [2], [1])
        store.save(self.document, 'k')
        store.save(design_artifact(larger, build_design(larger)), 'k_big')
        assert store.load('k') == self.document
        assert store.load_metadata('k')['name'] == 'k'
        assert store.load_metadata('k_big')['name'] == 'k_big'
