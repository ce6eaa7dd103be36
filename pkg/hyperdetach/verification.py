"""
Verification Module
Solver-free validation of designs, detachments and factorizations.

Every check recounts from the raw incidence maps ψ and φ; nothing here calls
the detachment engine, the split solver or the design builders.
"""

from collections import Counter, defaultdict
from dataclasses import asdict, dataclass, field
from itertools import combinations, product
from math import comb, prod
from typing import Any, Dict, FrozenSet, List, Mapping, Optional, Tuple
import logging

import pandas as pd

from hyperdetach.arithmetic import approx_ratio, fair_bounds
from hyperdetach.hypergraph import AmalgamationMap, Hypergraph, NumberFunction, hinge_key, id_key, sorted_ids

logger = logging.getLogger(__name__)

Census = Dict[FrozenSet[Tuple[Any, int]], int]


@dataclass(frozen=True)
class Check:
    """One evaluated check with the exact integers behind it"""
    name: str
    passed: bool
    details: Dict[str, Any] = field(default_factory=dict)

    def to_dict(self) -> Dict[str, Any]:
        return asdict(self)


class VerificationReport:
    """
    Outcome of a verification run

    Failures are kept individually; passing instances are tallied per check
    name so that reports on large designs stay small.
    """

    def __init__(self, subject: str):
        self.subject = subject
        self.failures: List[Check] = []
        self._tally: Dict[str, List[int]] = {}

    def record(self, name: str, passed: bool, **details) -> bool:
        tally = self._tally.setdefault(name, [0, 0])
        tally[0] += 1
        if not passed:
            tally[1] += 1
            self.failures.append(Check(name, False, details))
        return passed

    def approx(self, name: str, lhs: int, p: int, q: int, lhs_den: int = 1, **details) -> bool:
        """Record lhs/lhs_den ≈ p/q"""
        lower, upper = fair_bounds(p, q)
        passed = approx_ratio(lhs, lhs_den, p, q)
        return self.record(name, passed, lhs=lhs, lhs_den=lhs_den, lower=lower, upper=upper, **details)

    def merge(self, other: 'VerificationReport') -> None:
        for name, (instances, failed) in other._tally.items():
            tally = self._tally.setdefault(name, [0, 0])
            tally[0] += instances
            tally[1] += failed
        self.failures.extend(other.failures)

    @property
    def passed(self) -> bool:
        return not self.failures

    @property
    def checks(self) -> List[Check]:
        """One summary check per name"""
        return [
            Check(name, failed == 0, {'instances': instances, 'failures': failed})
            for name, (instances, failed) in self._tally.items()
        ]

    def failed_names(self) -> List[str]:
        return sorted({check.name for check in self.failures})

    def to_frame(self) -> pd.DataFrame:
        rows = [
            {'check': c.name, 'passed': c.passed, **c.details}
            for c in self.checks
        ]
        return pd.DataFrame(rows, columns=['check', 'passed', 'instances', 'failures'])

    def to_dict(self) -> Dict[str, Any]:
        return {
            'kind': 'verification',
            'subject': self.subject,
            'passed': self.passed,
            'checks': [c.to_dict() for c in self.checks],
            'failures': [c.to_dict() for c in self.failures],
        }

    def __repr__(self) -> str:
        return f"VerificationReport({self.subject}, passed={self.passed}, failures={len(self.failures)})"


# ── raw recounts ───────────────────────────────────────────────────────


def _edge_incidence(G: Hypergraph) -> Dict[Any, Counter]:
    incidence: Dict[Any, Counter] = defaultdict(Counter)
    for hinge, edge in G.phi.items():
        incidence[edge][G.psi[hinge]] += 1
    return incidence


def _census(G: Hypergraph, color: Optional[int] = None) -> Census:
    counts: Census = Counter()
    for edge, vertices in _edge_incidence(G).items():
        if color is not None and (G.coloring or {}).get(edge, 1) != color:
            continue
        counts[frozenset(vertices.items())] += 1
    return counts


def _degrees(G: Hypergraph, color: Optional[int] = None) -> Counter:
    degrees: Counter = Counter()
    for hinge, vertex in G.psi.items():
        if color is not None and (G.coloring or {}).get(G.phi[hinge], 1) != color:
            continue
        degrees[vertex] += 1
    return degrees


def _describe(multiset: FrozenSet[Tuple[Any, int]]) -> List[List[Any]]:
    counts = dict(multiset)
    return [[v, counts[v]] for v in sorted_ids(counts)]


def _colors(G: Hypergraph) -> List[Optional[int]]:
    return list(range(1, G.num_colors + 1)) if G.is_colored else [None]


# ── designs ────────────────────────────────────────────────────────────


def _required(spec) -> Census:
    parts = spec.canonical_parts()
    required: Census = {}
    for h, lam in zip(spec.H, spec.Lambda):
        for chosen_parts in combinations(range(len(parts)), h):
            for chosen in product(*(parts[a] for a in chosen_parts)):
                required[frozenset((v, 1) for v in chosen)] = lam
    return required


def verify_design(G: Hypergraph, spec) -> VerificationReport:
    """
    Exhaustive multiplicity census against a design specification

    Args:
        G: Hypergraph on the canonical vertex ids of the spec
        spec: DesignSpec

    Returns:
        VerificationReport
    """
    report = VerificationReport('design')
    parts = spec.canonical_parts()
    expected = [v for part in parts for v in part]
    report.record('vertex_set', sorted_ids(G.vertices) == expected,
                  expected=len(expected), actual=len(G.vertices))

    census = _census(G)
    required = _required(spec)
    for multiset, lam in required.items():
        got = census.get(multiset, 0)
        report.record('multiplicity', got == lam, multiset=_describe(multiset), lhs=got, expected=lam)
    for multiset, got in census.items():
        if multiset not in required:
            report.record('extraneous', False, multiset=_describe(multiset), lhs=got, expected=0)
    report.record('edge_count', len(G.edges) == sum(required.values()),
                  lhs=len(G.edges), expected=sum(required.values()))

    if spec.parts is not None:
        part_of = {v: a for a, part in enumerate(parts) for v in part}
        for edge, vertices in _edge_incidence(G).items():
            touched = Counter(part_of.get(v) for v in vertices.elements())
            crowded = [a for a, count in touched.items() if count > 1]
            report.record('transversal', not crowded, edge=edge,
                          parts=sorted((a + 1 for a in crowded if a is not None)))

    _log(report)
    return report


# ── factorizations ─────────────────────────────────────────────────────


def verify_factorization(subject, spec, fs) -> VerificationReport:
    """
    Check that the color classes form the requested factorization

    Args:
        subject: Colored Hypergraph, or any object with a ``hypergraph`` attribute
        spec: DesignSpec of the underlying design
        fs: FactorSpec with R and optional Q

    Returns:
        VerificationReport covering the factors and the underlying design
    """
    G: Hypergraph = getattr(subject, 'hypergraph', subject)
    report = VerificationReport('factorization')
    k = len(fs.R)
    lower = fs.R if fs.Q is None else fs.Q
    coloring: Mapping = G.coloring or {}

    if not report.record('colored', G.is_colored, edges=len(G.edges)):
        report.merge(verify_design(G, spec))
        _log(report)
        return report

    for edge in G.edges:
        color = coloring.get(edge)
        report.record('color_range', isinstance(color, int) and 1 <= color <= k, edge=edge, color=color, k=k)

    for i in range(1, k + 1):
        degrees = _degrees(G, i)
        for vertex in G.vertices:
            d = degrees.get(vertex, 0)
            report.record('factor_degree', lower[i - 1] <= d <= fs.R[i - 1],
                          factor=i, vertex=vertex, lhs=d, lower=lower[i - 1], upper=fs.R[i - 1])

    report.merge(verify_design(G, spec))
    _log(report)
    return report


# ── detachments ────────────────────────────────────────────────────────


def _lift_counts(census_F: Census, census_G: Census, fibres: Dict[Any, List[Any]],
                 g: Dict[Any, int], report: VerificationReport, name: str, color: Optional[int]) -> None:
    for multiset, m_F in census_F.items():
        entries = sorted(multiset, key=lambda item: id_key(item[0]))
        if any(m > g.get(u, 0) for u, m in entries):
            report.record(name, False, multiset=_describe(multiset), color=color, reason='g not simple')
            continue
        denominator = prod(comb(g[u], m) for u, m in entries)
        choices = [combinations(fibres.get(u, []), m) for u, m in entries]
        for chosen in product(*choices):
            lift = frozenset((v, 1) for group in chosen for v in group)
            report.approx(name, census_G.get(lift, 0), m_F, denominator,
                          multiset=_describe(lift), image=_describe(multiset), color=color)


def verify_detachment(F: Hypergraph, G: Hypergraph, Psi: AmalgamationMap, g: NumberFunction) -> VerificationReport:
    """
    Check a g-detachment against the fair-share degree and multiplicity bounds

    Args:
        F: The amalgamated hypergraph
        G: The claimed detachment
        Psi: Map V(G) → V(F)
        g: Number function on V(F)

    Returns:
        VerificationReport with checks for the map, simplicity and every bound
    """
    report = VerificationReport('detachment')
    mapping = Psi.as_dict()
    values = g.as_dict()

    report.record('amalgamation_domain', set(mapping) == set(G.vertices),
                  missing=sorted_ids(set(G.vertices) - set(mapping)),
                  extra=sorted_ids(set(mapping) - set(G.vertices)))
    report.record('amalgamation_image', set(mapping.values()) == set(F.vertices),
                  missing=sorted_ids(set(F.vertices) - set(mapping.values())))

    fibres: Dict[Any, List[Any]] = defaultdict(list)
    for v in sorted_ids(mapping):
        fibres[mapping[v]].append(v)
    for u in F.vertices:
        report.record('number_function', len(fibres.get(u, [])) == values.get(u),
                      vertex=u, lhs=len(fibres.get(u, [])), expected=values.get(u),
                      reason='number function mismatch')

    same_hinges = set(G.phi) == set(F.phi) and all(G.phi[h] == F.phi[h] for h in F.phi)
    report.record('same_edges_and_hinges', same_hinges)
    report.record('same_coloring', dict(G.coloring or {}) == dict(F.coloring or {}))
    if not same_hinges:
        _log(report)
        return report
    for hinge in sorted(F.psi, key=hinge_key):
        image = mapping.get(G.psi[hinge])
        report.record('amalgamates_to_input', image == F.psi[hinge],
                      hinge=list(hinge), lhs=image, expected=F.psi[hinge])

    for edge, vertices in _edge_incidence(G).items():
        for vertex, count in vertices.items():
            report.record('simple', count <= 1, edge=edge, vertex=vertex, lhs=count)

    if report.failed_names():
        # The bounds presuppose a consistent map.
        _log(report)
        return report

    for color in _colors(F):
        name_degree = 'A1' if color is None else 'A2'
        name_mult = 'A3' if color is None else 'A4'
        degrees_F, degrees_G = _degrees(F, color), _degrees(G, color)
        for u in F.vertices:
            for v in fibres[u]:
                report.approx(name_degree, degrees_G.get(v, 0), degrees_F.get(u, 0), values[u],
                              vertex=v, image=u, color=color)
        _lift_counts(_census(F, color), _census(G, color), fibres, values, report, name_mult, color)
    if F.is_colored:
        degrees_F, degrees_G = _degrees(F), _degrees(G)
        for u in F.vertices:
            for v in fibres[u]:
                report.approx('A1', degrees_G.get(v, 0), degrees_F.get(u, 0), values[u], vertex=v, image=u)
        _lift_counts(_census(F), _census(G), fibres, values, report, 'A3', None)

    _log(report)
    return report


def verify_split(ground, family_a, family_b, parts: int, subset) -> VerificationReport:
    """Recount |Z ∩ P| for every P ∈ A ∪ B ∪ {S}; families are plain iterables of sets"""
    report = VerificationReport('split')
    ground = frozenset(ground)
    chosen = frozenset(subset)
    report.record('subset_of_ground', chosen <= ground, extra=len(chosen - ground))
    for name, members in [('S', ground)] + [('A', s) for s in family_a] + [('B', s) for s in family_b]:
        members = frozenset(members)
        report.approx(f'fair_{name}', len(chosen & members), len(members), parts, size=len(members))
    _log(report)
    return report


def _log(report: VerificationReport) -> None:
    if report.passed:
        logger.info(f"Verified {report.subject}: all {sum(c.details['instances'] for c in report.checks)} checks pass")
    else:
        logger.warning(f"Verification of {report.subject} failed: {report.failed_names()}")
