"""
Fair Splitting over Two Laminar Families

Given laminar families A and B over a finite set S and n ≥ 1, find Z ⊆ S with
⌊|P|/n⌋ ≤ |Z ∩ P| ≤ ⌈|P|/n⌉ for every P in A ∪ B ∪ {S}.

The constraints are solved as a feasible circulation: the A-family is laid out
as a forest from the source down to the elements and the B-family as a forest
from the elements up to the sink. Each set P becomes one arc whose flow is
|Z ∩ P|, bounded by the fair-share bounds, so integrality of network flows
gives an integral Z.
"""

from dataclasses import dataclass, field
from typing import Dict, FrozenSet, Hashable, Iterable, List, Optional, Sequence, Tuple
import logging

import networkx as nx
import numpy as np

from hyperdetach import DetachConfig
from hyperdetach.arithmetic import approx, fair_bounds
from hyperdetach.exceptions import DomainError
from hyperdetach.hypergraph import hinge_key, id_key

logger = logging.getLogger(__name__)

Element = Hashable


def element_key(element: Element):
    """Sort key for ground elements: hinge ids or plain ids"""
    if isinstance(element, tuple):
        return (1, hinge_key(element))
    return (0, id_key(element))


def _set_key(members: FrozenSet[Element]):
    return (-len(members), sorted(element_key(x) for x in members))


@dataclass(frozen=True)
class LaminarFamily:
    """A family of subsets of a finite ground set"""

    ground: FrozenSet[Element]
    sets: Tuple[FrozenSet[Element], ...] = ()

    def __post_init__(self):
        object.__setattr__(self, 'ground', frozenset(self.ground))
        object.__setattr__(self, 'sets', tuple(frozenset(s) for s in self.sets))
        for members in self.sets:
            outside = members - self.ground
            if outside:
                raise DomainError(
                    f"Family member contains elements outside the ground set: "
                    f"{sorted(outside, key=element_key)!r}"
                )

    @classmethod
    def of(cls, ground: Iterable[Element], sets: Iterable[Iterable[Element]]) -> 'LaminarFamily':
        return cls(frozenset(ground), tuple(frozenset(s) for s in sets))

    def crossing_pair(self) -> Optional[Tuple[FrozenSet[Element], FrozenSet[Element]]]:
        """A pair that is neither nested nor disjoint, if any"""
        for i, first in enumerate(self.sets):
            for second in self.sets[i + 1:]:
                if first <= second or second <= first or not (first & second):
                    continue
                return first, second
        return None

    def is_laminar(self) -> bool:
        return self.crossing_pair() is None

    def nonempty_sets(self) -> List[FrozenSet[Element]]:
        """Distinct nonempty members, largest first"""
        return sorted({s for s in self.sets if s}, key=_set_key)

    def __len__(self) -> int:
        return len(self.sets)


def is_laminar(family: LaminarFamily) -> bool:
    """True iff every pair of member sets is nested or disjoint"""
    return family.is_laminar()


@dataclass(frozen=True)
class Violation:
    """One member P with |Z ∩ P| outside [⌊|P|/n⌋, ⌈|P|/n⌉]"""
    members: Tuple[Element, ...]
    count: int
    lower: int
    upper: int


@dataclass(frozen=True)
class SplitCertificate:
    """Witness for a fair split: Z and every violated constraint"""

    subset: FrozenSet[Element]
    parts: int
    checked: int
    violations: Tuple[Violation, ...] = field(default_factory=tuple)

    @property
    def valid(self) -> bool:
        return not self.violations

    def sorted_subset(self) -> List[Element]:
        return sorted(self.subset, key=element_key)


def certify(
    subset: Iterable[Element],
    constraints: Sequence[FrozenSet[Element]],
    parts: int,
) -> SplitCertificate:
    """Recount |Z ∩ P| for every constraint and collect the violations"""
    chosen = frozenset(subset)
    violations = []
    for members in constraints:
        count = len(chosen & members)
        if not approx(count, len(members), parts):
            violations.append(Violation(
                tuple(sorted(members, key=element_key)), count, *fair_bounds(len(members), parts)
            ))
    return SplitCertificate(chosen, parts, len(constraints), tuple(violations))


def _check_inputs(
    ground: FrozenSet[Element],
    family_a: LaminarFamily,
    family_b: LaminarFamily,
    parts: int,
) -> None:
    if isinstance(parts, bool) or not isinstance(parts, int) or parts < 1:
        raise DomainError(f"n must be a positive integer, got {parts!r}")
    for name, family in (('A', family_a), ('B', family_b)):
        for members in family.sets:
            if not members <= ground:
                raise DomainError(f"Family {name} has a member outside the ground set")


def _forest(sets: List[FrozenSet[Element]]) -> Tuple[List[Optional[int]], Dict[Element, int]]:
    """
    Parent index of every set and the smallest set owning each element

    Sets must be laminar, distinct and sorted largest first; then the last
    set written over an element is the smallest one containing it.
    """
    owner: Dict[Element, int] = {}
    parents: List[Optional[int]] = []
    for index, members in enumerate(sets):
        probe = next(iter(members))
        parents.append(owner.get(probe))
        for element in members:
            owner[element] = index
    return parents, owner


def _solve_by_flow(
    elements: List[Element],
    sets_a: List[FrozenSet[Element]],
    sets_b: List[FrozenSet[Element]],
    parts: int,
) -> FrozenSet[Element]:
    source, sink = ('source',), ('sink',)
    graph = nx.DiGraph()
    demand: Dict[Hashable, int] = {}

    def add_arc(tail, head, lower: int, upper: int, weight: int = 0) -> None:
        graph.add_edge(tail, head, capacity=upper - lower, weight=weight)
        demand[tail] = demand.get(tail, 0) + lower
        demand[head] = demand.get(head, 0) - lower

    graph.add_node(source)
    graph.add_node(sink)

    parents_a, owner_a = _forest(sets_a)
    for index, members in enumerate(sets_a):
        parent = parents_a[index]
        tail = source if parent is None else ('A', parent)
        add_arc(tail, ('A', index), *fair_bounds(len(members), parts))

    parents_b, owner_b = _forest(sets_b)
    for index, members in enumerate(sets_b):
        parent = parents_b[index]
        head = sink if parent is None else ('B', parent)
        add_arc(('B', index), head, *fair_bounds(len(members), parts))

    # Lower positions are cheaper so ties break towards the first elements.
    for position, element in enumerate(elements):
        node = ('x', position)
        add_arc(('A', owner_a[element]), node, 0, 1, weight=position)
        head = ('B', owner_b[element]) if element in owner_b else sink
        add_arc(node, head, 0, 1)

    graph.add_edge(sink, source, weight=0)
    nx.set_node_attributes(graph, {node: demand.get(node, 0) for node in graph.nodes}, 'demand')

    try:
        flow = nx.min_cost_flow(graph)
    except nx.NetworkXUnfeasible as exc:
        raise RuntimeError("No fair split exists for laminar input; this is a solver bug") from exc

    return frozenset(
        element for position, element in enumerate(elements)
        if flow[('A', owner_a[element])][('x', position)] == 1
    )


def _recount_with_matrix(
    elements: List[Element],
    subset: FrozenSet[Element],
    constraints: List[FrozenSet[Element]],
    parts: int,
) -> bool:
    """Independent incidence-matrix recount used in audit mode"""
    if not constraints:
        return True
    incidence = np.array(
        [[1 if x in members else 0 for x in elements] for members in constraints],
        dtype=np.int64,
    )
    chosen = np.array([1 if x in subset else 0 for x in elements], dtype=np.int64)
    counts = incidence @ chosen
    sizes = incidence.sum(axis=1)
    return bool(np.all(parts * (counts + 1) > sizes) and np.all(parts * (counts - 1) < sizes))


def fair_split(
    ground: Iterable[Element],
    family_a: LaminarFamily,
    family_b: LaminarFamily,
    parts: int,
    audit: bool = False,
) -> SplitCertificate:
    """
    Find Z ⊆ S with |Z ∩ P| ≈ |P|/n for every P ∈ A ∪ B ∪ {S}

    Args:
        ground: The set S
        family_a: First laminar family over S
        family_b: Second laminar family over S
        parts: n ≥ 1
        audit: Recount the certificate through a second code path

    Returns:
        A certificate with no violations; its ``subset`` is Z
    """
    ground = frozenset(ground)
    _check_inputs(ground, family_a, family_b, parts)
    for name, family in (('A', family_a), ('B', family_b)):
        crossing = family.crossing_pair()
        if crossing is not None:
            first, second = (sorted(s, key=element_key) for s in crossing)
            raise DomainError(f"Family {name} is not laminar: {first!r} and {second!r} cross")

    elements = sorted(ground, key=element_key)
    sets_a = sorted({s for s in family_a.sets if s} | ({ground} if ground else set()), key=_set_key)
    sets_b = family_b.nonempty_sets()

    if not elements:
        subset: FrozenSet[Element] = frozenset()
    elif parts == 1:
        subset = ground
    else:
        subset = _solve_by_flow(elements, sets_a, sets_b, parts)

    constraints = sets_a + sets_b
    certificate = certify(subset, constraints, parts)
    if not certificate.valid:
        raise RuntimeError(f"Fair split violates {len(certificate.violations)} constraints")
    if audit and not _recount_with_matrix(elements, subset, constraints, parts):
        raise RuntimeError("Fair split certificate disagrees with the matrix recount")

    logger.debug(f"Fair split: |S|={len(elements)}, n={parts}, |Z|={len(subset)}, constraints={len(constraints)}")
    return certificate


_POPCOUNT16: Optional[np.ndarray] = None


def _popcount(values: np.ndarray) -> np.ndarray:
    global _POPCOUNT16
    if _POPCOUNT16 is None:
        table = np.zeros(1 << 16, dtype=np.int64)
        for bit in range(16):
            table[1 << bit:1 << (bit + 1)] = table[:1 << bit] + 1
        _POPCOUNT16 = table
    return _POPCOUNT16[values & 0xFFFF] + _POPCOUNT16[values >> 16]


def brute_force_split(
    ground: Iterable[Element],
    family_a: LaminarFamily,
    family_b: LaminarFamily,
    parts: int,
    chunk_bits: int = 20,
) -> Optional[FrozenSet[Element]]:
    """
    Exhaustively search subsets of S for a fair split

    Laminarity is not required here. Returns the first valid subset in
    bitmask order, or None when no subset satisfies every constraint.
    """
    ground = frozenset(ground)
    _check_inputs(ground, family_a, family_b, parts)
    if len(ground) > DetachConfig.BRUTE_FORCE_MAX_GROUND:
        raise DomainError(
            f"Ground set of {len(ground)} elements exceeds the enumeration bound "
            f"of {DetachConfig.BRUTE_FORCE_MAX_GROUND}"
        )

    elements = sorted(ground, key=element_key)
    position = {x: i for i, x in enumerate(elements)}
    constraints = [ground] + [s for s in family_a.sets if s] + [s for s in family_b.sets if s]
    masks = []
    for members in constraints:
        mask = 0
        for x in members:
            mask |= 1 << position[x]
        lower, upper = fair_bounds(len(members), parts)
        masks.append((mask, lower, upper))

    total = 1 << len(elements)
    step = 1 << chunk_bits
    for start in range(0, total, step):
        candidates = np.arange(start, min(start + step, total), dtype=np.int64)
        ok = np.ones(len(candidates), dtype=bool)
        for mask, lower, upper in masks:
            counts = _popcount(candidates & mask)
            ok &= (counts >= lower) & (counts <= upper)
        hits = np.flatnonzero(ok)
        if len(hits):
            winner = int(candidates[hits[0]])
            return frozenset(x for x in elements if winner >> position[x] & 1)
    return None


if __name__ == "__main__":
    S = set(range(1, 7))
    A = LaminarFamily.of(S, [{1, 2}, {3, 4}, {1, 2, 3, 4}, S])
    B = LaminarFamily.of(S, [{1, 3, 5}, {2, 4, 6}])
    cert = fair_split(S, A, B, 2)
    print(f"Z = {cert.sorted_subset()}, valid = {cert.valid}")
    print(f"Brute force: {sorted(brute_force_split(S, A, B, 2))}")
