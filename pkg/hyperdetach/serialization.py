"""
JSON Codec and Artifact Store
Canonical JSON documents for hypergraphs, number functions, amalgamation
maps, specs and the artifacts the CLI reads and writes.

Hypergraph document:
    {"vertices": [id, ...],
     "colors": k,                      (colored hypergraphs only)
     "edges": [{"id": id, "color": j, "hinges": [{"vertex": id}, ...]}, ...]}

Hinge ids are (edge id, ordinal) with ordinals following list order.
"""

from datetime import datetime
from pathlib import Path
from typing import Any, Dict, Iterable, List, Optional, Tuple
import json
import logging
import os
import re

import joblib

from hyperdetach.designs import DesignSpec, FactorSpec
from hyperdetach.exceptions import DomainError, SchemaError
from hyperdetach.hypergraph import (
    AmalgamationMap,
    Hypergraph,
    NumberFunction,
    hinge_key,
)
from hyperdetach.laminar import LaminarFamily, SplitCertificate, element_key

logger = logging.getLogger(__name__)

ARTIFACT_KINDS = ('design', 'detachment', 'factorization', 'split', 'instance')


# ── text layer ─────────────────────────────────────────────────────────


def dumps(document: Any) -> str:
    """Canonical text: sorted keys, two-space indent, trailing newline"""
    return json.dumps(document, sort_keys=True, indent=2, ensure_ascii=False) + "\n"


def loads(text: str) -> Any:
    """Parse JSON text, reporting malformed input with its position"""
    try:
        return json.loads(text)
    except json.JSONDecodeError as e:
        raise SchemaError(e.msg, line=e.lineno, column=e.colno) from None


def read_document(path: str) -> Any:
    with open(path, encoding='utf-8') as handle:
        return loads(handle.read())


def write_document(document: Any, path: Optional[str]) -> str:
    """Write canonical JSON to path, returning the text"""
    text = dumps(document)
    if path:
        Path(path).parent.mkdir(parents=True, exist_ok=True)
        with open(path, 'w', encoding='utf-8') as handle:
            handle.write(text)
        logger.info(f"Wrote {path}")
    return text


def write_json_lines(records: Iterable[Any], path: Optional[str]) -> str:
    """One compact, key-sorted JSON object per line; written to path when given"""
    text = "".join(json.dumps(record, sort_keys=True, ensure_ascii=False) + "\n" for record in records)
    if path:
        Path(path).parent.mkdir(parents=True, exist_ok=True)
        with open(path, 'w', encoding='utf-8') as handle:
            handle.write(text)
        logger.info(f"Wrote {path}")
    return text


# ── schema helpers ─────────────────────────────────────────────────────


def _require(document: Any, key: str, path: str) -> Any:
    if not isinstance(document, dict):
        raise SchemaError("expected an object", path)
    if key not in document:
        raise SchemaError(f"missing key {key!r}", path)
    return document[key]


def _list(value: Any, path: str) -> List[Any]:
    if not isinstance(value, list):
        raise SchemaError("expected an array", path)
    return value


def _id(value: Any, path: str):
    if isinstance(value, bool) or not isinstance(value, (int, str)):
        raise SchemaError(f"ids must be integers or strings, got {value!r}", path)
    return value


def _int(value: Any, path: str, minimum: int = 0) -> int:
    if isinstance(value, bool) or not isinstance(value, int) or value < minimum:
        raise SchemaError(f"expected an integer >= {minimum}, got {value!r}", path)
    return value


def _int_list(value: Any, path: str, minimum: int = 0) -> Tuple[int, ...]:
    return tuple(_int(x, f"{path}[{i}]", minimum) for i, x in enumerate(_list(value, path)))


# ── hypergraphs ────────────────────────────────────────────────────────


def parse_hypergraph(document: Any, path: str = "$") -> Hypergraph:
    """
    Build a Hypergraph from its JSON document

    Args:
        document: Parsed JSON value
        path: JSON path of the document, used in error messages

    Returns:
        Hypergraph with hinge ids (edge id, ordinal)
    """
    vertices = [
        _id(v, f"{path}.vertices[{i}]")
        for i, v in enumerate(_list(_require(document, 'vertices', path), f"{path}.vertices"))
    ]
    if len(set(vertices)) != len(vertices):
        raise SchemaError("duplicate vertex ids", f"{path}.vertices")
    known = set(vertices)

    edges: Dict[Any, List[Any]] = {}
    coloring: Dict[Any, int] = {}
    raw_edges = _list(_require(document, 'edges', path), f"{path}.edges")
    for i, raw in enumerate(raw_edges):
        edge_path = f"{path}.edges[{i}]"
        edge = _id(_require(raw, 'id', edge_path), f"{edge_path}.id")
        if edge in edges:
            raise SchemaError(f"duplicate edge id {edge!r}", f"{edge_path}.id")
        hinges = _list(_require(raw, 'hinges', edge_path), f"{edge_path}.hinges")
        if not hinges:
            raise SchemaError("edge has no hinges (phi must be surjective)", f"{edge_path}.hinges")
        joined = []
        for ordinal, hinge in enumerate(hinges):
            hinge_path = f"{edge_path}.hinges[{ordinal}]"
            vertex = _id(_require(hinge, 'vertex', hinge_path), f"{hinge_path}.vertex")
            if vertex not in known:
                raise SchemaError(f"unknown vertex {vertex!r}", f"{hinge_path}.vertex")
            joined.append(vertex)
        edges[edge] = joined
        if 'color' in raw:
            coloring[edge] = _int(raw['color'], f"{edge_path}.color", minimum=1)

    if coloring and len(coloring) != len(edges):
        raise SchemaError("either every edge or no edge carries a color", f"{path}.edges")
    num_colors = None
    if isinstance(document, dict) and 'colors' in document:
        num_colors = _int(document['colors'], f"{path}.colors", minimum=1)
        if not coloring and edges:
            raise SchemaError("'colors' given but no edge is colored", f"{path}.colors")

    try:
        if coloring or (num_colors is not None and not edges):
            return Hypergraph.from_edges(vertices, edges, coloring=coloring, num_colors=num_colors)
        return Hypergraph.from_edges(vertices, edges)
    except DomainError as e:
        raise SchemaError(str(e), path) from None


def emit_hypergraph(G: Hypergraph) -> Dict[str, Any]:
    """Canonical document: ids sorted, hinges in ordinal order"""
    edges = []
    for edge in G.edges:
        hinges = sorted(G.hinges_of_edge(edge), key=hinge_key)
        entry: Dict[str, Any] = {'id': edge, 'hinges': [{'vertex': G.psi[h]} for h in hinges]}
        if G.is_colored:
            entry['color'] = G.color(edge)
        edges.append(entry)
    document: Dict[str, Any] = {'vertices': list(G.vertices), 'edges': edges}
    if G.is_colored:
        document['colors'] = G.num_colors
    return document


def canonical(document: Any) -> Dict[str, Any]:
    """emit ∘ parse"""
    return emit_hypergraph(parse_hypergraph(document))


# ── number functions, maps and specs ───────────────────────────────────


def parse_number_function(document: Any, path: str = "$") -> NumberFunction:
    values: Dict[Any, int] = {}
    for i, entry in enumerate(_list(_require(document, 'g', path), f"{path}.g")):
        entry_path = f"{path}.g[{i}]"
        vertex = _id(_require(entry, 'vertex', entry_path), f"{entry_path}.vertex")
        if vertex in values:
            raise SchemaError(f"duplicate vertex {vertex!r}", entry_path)
        values[vertex] = _int(_require(entry, 'value', entry_path), f"{entry_path}.value", minimum=1)
    return NumberFunction(values)


def emit_number_function(g: NumberFunction) -> Dict[str, Any]:
    return {'g': [{'vertex': v, 'value': value} for v, value in g.items()]}


def parse_amalgamation(document: Any, path: str = "$") -> AmalgamationMap:
    mapping: Dict[Any, Any] = {}
    for i, entry in enumerate(_list(_require(document, 'psi', path), f"{path}.psi")):
        entry_path = f"{path}.psi[{i}]"
        vertex = _id(_require(entry, 'vertex', entry_path), f"{entry_path}.vertex")
        if vertex in mapping:
            raise SchemaError(f"duplicate vertex {vertex!r}", entry_path)
        mapping[vertex] = _id(_require(entry, 'image', entry_path), f"{entry_path}.image")
    return AmalgamationMap(mapping)


def emit_amalgamation(psi: AmalgamationMap) -> Dict[str, Any]:
    return {'psi': [{'vertex': v, 'image': u} for v, u in psi.items()]}


def parse_design_spec(document: Any, path: str = "$") -> DesignSpec:
    n = _int(_require(document, 'n', path), f"{path}.n", minimum=1)
    H = _int_list(_require(document, 'H', path), f"{path}.H", minimum=1)
    Lambda = _int_list(_require(document, 'lambda', path), f"{path}.lambda", minimum=1)
    parts = None
    if 'parts' in document:
        parts = _int_list(document['parts'], f"{path}.parts", minimum=1)
    try:
        return DesignSpec(n, H, Lambda, parts)
    except DomainError as e:
        raise SchemaError(str(e), path) from None


def parse_factor_spec(document: Any, path: str = "$") -> FactorSpec:
    R = _int_list(_require(document, 'R', path), f"{path}.R", minimum=1)
    kind = document.get('kind', 'R')
    try:
        if kind == 'almost':
            return FactorSpec.almost_of(R)
        if kind == 'QR':
            return FactorSpec(R, _int_list(_require(document, 'Q', path), f"{path}.Q"))
        if kind == 'R':
            return FactorSpec(R)
    except DomainError as e:
        raise SchemaError(str(e), path) from None
    raise SchemaError(f"unknown factor kind {kind!r}", f"{path}.kind")


# ── artifacts ──────────────────────────────────────────────────────────


def artifact_kind(document: Any) -> str:
    kind = _require(document, 'kind', "$")
    if kind not in ARTIFACT_KINDS:
        raise SchemaError(f"unknown artifact kind {kind!r}", "$.kind")
    return kind


def design_artifact(spec: DesignSpec, G: Hypergraph) -> Dict[str, Any]:
    return {'kind': 'design', 'spec': spec.to_dict(), 'hypergraph': emit_hypergraph(G)}


def instance_artifact(F: Hypergraph, g: NumberFunction, seed: Optional[int] = None) -> Dict[str, Any]:
    document = {'kind': 'instance', 'hypergraph': emit_hypergraph(F), **emit_number_function(g)}
    if seed is not None:
        document['seed'] = seed
    return document


def detachment_artifact(F: Hypergraph, g: NumberFunction, G: Hypergraph, psi: AmalgamationMap,
                        steps: int, seed: Optional[int] = None) -> Dict[str, Any]:
    return {
        'kind': 'detachment',
        'input': emit_hypergraph(F),
        'g': emit_number_function(g)['g'],
        'hypergraph': emit_hypergraph(G),
        'psi': emit_amalgamation(psi)['psi'],
        'steps': steps,
        'seed': seed,
    }


def factorization_artifact(factorization) -> Dict[str, Any]:
    """Design, coloring, per-factor degree table and the matrix A"""
    G = factorization.hypergraph
    degrees = []
    for vertex in G.vertices:
        counts = [0] * factorization.factor_spec.k
        for hinge in G.hinge_set(vertex):
            counts[G.color(G.phi[hinge]) - 1] += 1
        degrees.append({'vertex': vertex, 'degrees': counts})
    return {
        'kind': 'factorization',
        'spec': factorization.spec.to_dict(),
        'factors': factorization.factor_spec.to_dict(),
        'matrix': {'A': factorization.matrix.to_list(), 'H': list(factorization.spec.H)},
        'hypergraph': emit_hypergraph(factorization.hypergraph),
        'degrees': degrees,
    }


def _elements(values: Iterable[Any]) -> List[Any]:
    return sorted(values, key=element_key)


def parse_split_request(document: Any) -> Tuple[frozenset, LaminarFamily, LaminarFamily, int]:
    """{"ground": [...], "A": [[...]], "B": [[...]], "n": int}"""
    ground = frozenset(_id(x, f"$.ground[{i}]") for i, x in enumerate(_list(_require(document, 'ground', "$"), "$.ground")))
    families = []
    for name in ('A', 'B'):
        sets = []
        for i, members in enumerate(_list(document.get(name, []), f"$.{name}")):
            sets.append(frozenset(_id(x, f"$.{name}[{i}][{j}]") for j, x in enumerate(_list(members, f"$.{name}[{i}]"))))
        try:
            families.append(LaminarFamily(ground, tuple(sets)))
        except DomainError as e:
            raise SchemaError(str(e), f"$.{name}") from None
    parts = _int(_require(document, 'n', "$"), "$.n", minimum=1)
    return ground, families[0], families[1], parts


def split_artifact(ground, family_a: LaminarFamily, family_b: LaminarFamily,
                   certificate: SplitCertificate) -> Dict[str, Any]:
    return {
        'kind': 'split',
        'ground': _elements(ground),
        'A': [_elements(s) for s in family_a.sets],
        'B': [_elements(s) for s in family_b.sets],
        'n': certificate.parts,
        'Z': certificate.sorted_subset(),
        'checked': certificate.checked,
        'valid': certificate.valid,
    }


class ArtifactStore:
    """Manages storage and retrieval of JSON artifacts"""

    def __init__(self, base_path: Optional[str] = None):
        """
        Initialize artifact store

        Args:
            base_path: Base path for artifact storage
        """
        self.base_path = base_path or os.path.join(os.getcwd(), 'artifacts')
        self._ensure_directories()

    def _ensure_directories(self):
        Path(self.base_path).mkdir(parents=True, exist_ok=True)
        Path(os.path.join(self.base_path, "documents")).mkdir(exist_ok=True)
        Path(os.path.join(self.base_path, "metadata")).mkdir(exist_ok=True)

    def save(self, document: Dict[str, Any], name: str, metadata: Optional[Dict] = None) -> str:
        """
        Save an artifact document

        Args:
            document: Artifact with a "kind" field
            name: Artifact name
            metadata: Optional metadata dictionary

        Returns:
            Path to the saved document
        """
        kind = artifact_kind(document)
        timestamp = datetime.now().strftime("%Y%m%d_%H%M%S_%f")
        filepath = os.path.join(self.base_path, "documents", f"{name}_{timestamp}.json")
        write_document(document, filepath)

        metadata = dict(metadata or {})
        metadata.update({'name': name, 'kind': kind, 'timestamp': timestamp})
        joblib.dump(metadata, os.path.join(self.base_path, "metadata", f"{name}_{timestamp}_metadata.pkl"))

        logger.info(f"Saved {kind} artifact to {filepath}")
        return filepath

    def _latest(self, folder: str, name: str, suffix: str) -> str:
        directory = os.path.join(self.base_path, folder)
        # "k" must not pick up "k_big_<timestamp>"
        pattern = re.compile(rf"{re.escape(name)}_\d{{8}}_\d{{6}}_\d{{6}}{re.escape(suffix)}")
        matching = sorted(f for f in os.listdir(directory) if pattern.fullmatch(f))
        if not matching:
            raise FileNotFoundError(f"No artifacts found for {name}")
        return os.path.join(directory, matching[-1])

    def load(self, name: str, version: str = "latest") -> Dict[str, Any]:
        """
        Load an artifact document

        Args:
            name: Artifact name
            version: Version timestamp or "latest"

        Returns:
            Artifact document
        """
        if version == "latest":
            filepath = self._latest("documents", name, ".json")
        else:
            filepath = os.path.join(self.base_path, "documents", f"{name}_{version}.json")
        if not os.path.exists(filepath):
            raise FileNotFoundError(f"Artifact file not found: {filepath}")
        document = read_document(filepath)
        logger.info(f"Loaded artifact from {filepath}")
        return document

    def load_metadata(self, name: str, version: str = "latest") -> Dict[str, Any]:
        if version == "latest":
            filepath = self._latest("metadata", name, "_metadata.pkl")
        else:
            filepath = os.path.join(self.base_path, "metadata", f"{name}_{version}_metadata.pkl")
        if not os.path.exists(filepath):
            raise FileNotFoundError(f"Metadata file not found: {filepath}")
        return joblib.load(filepath)

    def list_available(self) -> List[Dict[str, Any]]:
        """
        List all stored artifacts, newest first

        Returns:
            List of artifact information
        """
        directory = os.path.join(self.base_path, "metadata")
        entries = []
        for filename in os.listdir(directory):
            if filename.endswith("_metadata.pkl"):
                metadata = joblib.load(os.path.join(directory, filename))
                entries.append({k: metadata[k] for k in ('name', 'kind', 'timestamp')})
        entries.sort(key=lambda x: x['timestamp'], reverse=True)
        return entries


if __name__ == "__main__":
    from hyperdetach.hypergraph import example_hypergraph

    print(dumps(emit_hypergraph(example_hypergraph())))
