"""
Detachment Engine
Builds a simple g-detachment by repeatedly splitting one vertex α with
g(α) ≥ 2 into α and a fresh vertex, choosing the fresh vertex's hinges with
a fair split over two laminar families of hinges at α.
"""

from collections import defaultdict
from dataclasses import dataclass, field
from typing import TYPE_CHECKING, Dict, FrozenSet, List, Optional, Tuple
import logging
import random

from hyperdetach import DetachConfig
from hyperdetach.exceptions import DomainError, PreconditionError
from hyperdetach.hypergraph import (
    AmalgamationMap,
    HingeId,
    Hypergraph,
    NumberFunction,
    VertexId,
    VertexMultiset,
    hinge_key,
    multiset_key,
    sorted_ids,
)
from hyperdetach.laminar import LaminarFamily, SplitCertificate, fair_split

if TYPE_CHECKING:
    from hyperdetach.audit import StepAudit

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class DetachmentState:
    """F_i, g_i and Ψ_i after i splitting steps"""

    hypergraph: Hypergraph
    g: NumberFunction
    psi: AmalgamationMap
    step: int = 0
    alpha: Optional[VertexId] = None
    split_off: Optional[VertexId] = None
    certificate: Optional[SplitCertificate] = None

    @classmethod
    def initial(cls, hypergraph: Hypergraph, g: NumberFunction) -> 'DetachmentState':
        return cls(hypergraph, g, AmalgamationMap.identity(hypergraph.vertices))

    @property
    def remaining(self) -> int:
        """Σ (g_i(v) − 1), which equals n − i"""
        return self.g.excess()

    def original_number_function(self) -> NumberFunction:
        """Recover g: each original u carries Σ g_i over Ψ_i⁻¹(u)"""
        totals: Dict[VertexId, int] = defaultdict(int)
        for vertex, target in self.psi.items():
            totals[target] += self.g[vertex]
        return NumberFunction(dict(totals))


@dataclass
class DetachmentRun:
    """Every state of one detachment, plus audits when requested"""

    states: List[DetachmentState] = field(default_factory=list)
    audits: List['StepAudit'] = field(default_factory=list)

    @property
    def initial(self) -> DetachmentState:
        return self.states[0]

    @property
    def final(self) -> DetachmentState:
        return self.states[-1]

    @property
    def passed(self) -> bool:
        return all(audit.passed for audit in self.audits)


def build_split_families(
    hypergraph: Hypergraph,
    alpha: VertexId,
    num_colors: Optional[int] = None,
) -> Tuple[LaminarFamily, LaminarFamily]:
    """
    Build the two laminar families of hinges at α

    A holds H(α), each nonempty H_{F(j)}(α) and each H(α, e); B holds every
    realized H(α^t, U) and H_{F(j)}(α^t, U), grouped by edge signature.

    Args:
        hypergraph: F_i
        alpha: The vertex being split
        num_colors: k (defaults to the hypergraph's color count)

    Returns:
        Tuple of (A, B) over the ground set H(α)
    """
    ground = hypergraph.hinge_set(alpha)
    k = num_colors or hypergraph.num_colors

    per_edge: Dict = defaultdict(set)
    per_color: Dict[int, set] = defaultdict(set)
    per_signature: Dict[VertexMultiset, set] = defaultdict(set)
    per_signature_color: Dict[Tuple[VertexMultiset, int], set] = defaultdict(set)

    for hinge in sorted(ground, key=hinge_key):
        edge = hypergraph.phi[hinge]
        color = hypergraph.color(edge)
        signature = hypergraph.signature(edge)
        per_edge[edge].add(hinge)
        per_color[color].add(hinge)
        per_signature[signature].add(hinge)
        per_signature_color[(signature, color)].add(hinge)

    sets_a: List[FrozenSet[HingeId]] = [frozenset(ground)]
    sets_a += [frozenset(per_color[j]) for j in range(1, k + 1) if per_color.get(j)]
    sets_a += [frozenset(per_edge[e]) for e in sorted_ids(per_edge)]

    signatures = sorted(per_signature, key=multiset_key)
    sets_b: List[FrozenSet[HingeId]] = [frozenset(per_signature[s]) for s in signatures]
    sets_b += [
        frozenset(per_signature_color[(s, j)])
        for s in signatures
        for j in range(1, k + 1)
        if per_signature_color.get((s, j))
    ]

    family_a = LaminarFamily(frozenset(ground), tuple(sets_a))
    family_b = LaminarFamily(frozenset(ground), tuple(sets_b))
    if not family_a.is_laminar() or not family_b.is_laminar():
        raise RuntimeError(f"Split families at {alpha!r} are not laminar")
    return family_a, family_b


def fresh_vertex_id(hypergraph: Hypergraph, alpha: VertexId, counter: int) -> str:
    """A vertex id "<alpha>~<counter>" not yet used in the hypergraph"""
    used = set(hypergraph.vertices)
    candidate = f"{alpha}{DetachConfig.VERTEX_ID_SEPARATOR}{counter}"
    while candidate in used:
        counter += 1
        candidate = f"{alpha}{DetachConfig.VERTEX_ID_SEPARATOR}{counter}"
    return candidate


def detach_step(state: DetachmentState, alpha: VertexId, audit: bool = False) -> DetachmentState:
    """
    Split off one vertex from α

    Args:
        state: DetachmentState at step i
        alpha: Vertex with g_i(α) ≥ 2
        audit: Recount the fair-split certificate by a second code path

    Returns:
        DetachmentState at step i + 1
    """
    hypergraph = state.hypergraph
    if alpha not in state.g:
        raise DomainError(f"Unknown vertex {alpha!r}")
    parts = state.g[alpha]
    if parts < 2:
        raise PreconditionError(f"Cannot split {alpha!r}: g({alpha!r}) = {parts} < 2")

    family_a, family_b = build_split_families(hypergraph, alpha)
    certificate = fair_split(family_a.ground, family_a, family_b, parts, audit=audit)

    counter = len(state.psi.preimage(state.psi[alpha]))
    new_vertex = fresh_vertex_id(hypergraph, alpha, counter)

    detached = hypergraph.with_hinges_moved(certificate.subset, new_vertex)
    g_next = state.g.with_value(alpha, parts - 1).with_value(new_vertex, 1)
    psi_next = state.psi.extended(new_vertex, state.psi[alpha])

    logger.debug(
        f"Step {state.step + 1}: split {new_vertex!r} off {alpha!r} "
        f"(g={parts}, d={len(family_a.ground)}, |Z|={len(certificate.subset)}, "
        f"|A|={len(family_a)}, |B|={len(family_b)})"
    )
    return DetachmentState(
        detached, g_next, psi_next, state.step + 1,
        alpha=alpha, split_off=new_vertex, certificate=certificate,
    )


def selection_order(hypergraph: Hypergraph, g: NumberFunction, seed: Optional[int] = None) -> List[VertexId]:
    """Vertices to split, smallest id first unless a seed permutes them"""
    order = [v for v in hypergraph.vertices if g[v] >= 2]
    if seed is not None:
        random.Random(seed).shuffle(order)
    return order


def _check_number_function(hypergraph: Hypergraph, g: NumberFunction) -> None:
    missing = [v for v in hypergraph.vertices if v not in g]
    if missing:
        raise PreconditionError(f"g is not defined on vertices {missing!r}")
    extra = [v for v in g.vertices() if v not in set(hypergraph.vertices)]
    if extra:
        raise DomainError(f"g is defined on unknown vertices {extra!r}")
    violations = hypergraph.simplicity_violations(g)
    if violations:
        vertex, edge, count = violations[0]
        raise PreconditionError(
            f"g is not simple: |H({vertex!r}, {edge!r})| = {count} > g({vertex!r}) = {g[vertex]}"
        )


def run_detachment(
    hypergraph: Hypergraph,
    g: NumberFunction,
    seed: Optional[int] = None,
    audit: Optional[bool] = None,
) -> DetachmentRun:
    """
    Run the full construction and keep every intermediate state

    Args:
        hypergraph: F
        g: Simple number function on V(F)
        seed: Optional seed permuting the α-selection order
        audit: Evaluate step and cumulative audits (defaults to the
               HYPERDETACH_AUDIT environment variable)

    Returns:
        DetachmentRun with states F_0..F_n and audits if requested
    """
    from hyperdetach.audit import audit_cumulative, audit_step

    _check_number_function(hypergraph, g)
    if audit is None:
        audit = DetachConfig.audit_enabled()

    state = DetachmentState.initial(hypergraph, g)
    run = DetachmentRun(states=[state])
    if audit:
        run.audits.append(audit_cumulative(hypergraph, state))

    for alpha in selection_order(hypergraph, g, seed):
        while state.g[alpha] >= 2:
            following = detach_step(state, alpha, audit=audit)
            if audit:
                run.audits.append(audit_step(state, following, alpha))
                run.audits.append(audit_cumulative(hypergraph, following))
            state = following
            run.states.append(state)

    if state.remaining != 0:
        raise RuntimeError(f"Construction stopped with {state.remaining} splits outstanding")

    failed = [a for a in run.audits if not a.passed]
    logger.info(
        f"Detached {len(hypergraph.vertices)} vertices into {len(state.hypergraph.vertices)} "
        f"in {state.step} steps" + (f", {len(failed)} failing audits" if audit else "")
    )
    return run


def detach(
    hypergraph: Hypergraph,
    g: NumberFunction,
    seed: Optional[int] = None,
    audit: Optional[bool] = None,
) -> Tuple[Hypergraph, AmalgamationMap]:
    """
    Simple g-detachment satisfying the fair-share degree and multiplicity bounds

    Returns:
        Tuple of (G, Ψ) with Ψ mapping V(G) onto V(F)
    """
    run = run_detachment(hypergraph, g, seed=seed, audit=audit)
    return run.final.hypergraph, run.final.psi


if __name__ == "__main__":
    F = Hypergraph.from_edges(['v'], {e: ['v', 'v'] for e in range(6)})
    G, Psi = detach(F, NumberFunction({'v': 4}))
    print(G)
    print(G.signature_counts())
    print(Psi.as_dict())
