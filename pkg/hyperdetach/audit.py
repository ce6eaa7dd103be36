"""
Detachment Audits
Re-evaluates the per-step and cumulative fair-share conditions on the states
of a running detachment. Each condition instance becomes one AuditCheck with
its recomputed left-hand side and bounds.

Tags: B1-B5 (step, whole hypergraph), C1-C5 (step, per color class),
D1-D2 (cumulative, whole hypergraph), E1-E2 (cumulative, per color class).
"""

from dataclasses import asdict, dataclass, field
from itertools import combinations, product
from typing import Any, Dict, List, Optional, Set, Tuple
import logging

import pandas as pd

from hyperdetach.arithmetic import approx_ratio, binomial_product, fair_bounds
from hyperdetach.detachment import DetachmentState
from hyperdetach.hypergraph import Hypergraph, NumberFunction, VertexId, VertexMultiset, multiset_key

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class AuditCheck:
    """lhs / lhs_den ≈ p/q, stored as the bounds (⌊p/q⌋, ⌈p/q⌉)"""
    condition: str
    instance: str
    passed: bool
    lhs: int
    lower: int
    upper: int
    lhs_den: int = 1

    def to_dict(self) -> Dict[str, Any]:
        return asdict(self)


@dataclass
class StepAudit:
    """All checks evaluated for one step (or one cumulative snapshot)"""

    step: int
    kind: str
    checks: List[AuditCheck] = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return all(check.passed for check in self.checks)

    def failures(self) -> List[AuditCheck]:
        return [check for check in self.checks if not check.passed]

    def conditions(self) -> Set[str]:
        return {check.condition for check in self.checks}

    def to_dict(self) -> Dict[str, Any]:
        return {
            'step': self.step,
            'kind': self.kind,
            'passed': self.passed,
            'checks': [check.to_dict() for check in self.checks],
        }

    def to_frame(self) -> pd.DataFrame:
        rows = [dict(check.to_dict(), step=self.step, kind=self.kind) for check in self.checks]
        return pd.DataFrame(rows, columns=[
            'step', 'kind', 'condition', 'instance', 'passed', 'lhs', 'lhs_den', 'lower', 'upper',
        ])


def _check(condition: str, instance: str, lhs: int, p: int, q: int, lhs_den: int = 1) -> AuditCheck:
    lower, upper = fair_bounds(p, q)
    passed = approx_ratio(lhs, lhs_den, p, q)
    return AuditCheck(condition, instance, passed, lhs, lower, upper, lhs_den)


def _layers(before: Hypergraph, after: Hypergraph, overall: str, per_color: str) -> List[Tuple[str, str, Hypergraph, Hypergraph]]:
    """(tag prefix, label, before, after) for the whole graph and each color class"""
    layers = [(overall, "", before, after)]
    if before.is_colored:
        for j in range(1, before.num_colors + 1):
            layers.append((per_color, f"color {j}: ", before.color_class(j), after.color_class(j)))
    return layers


# ── per-step conditions ────────────────────────────────────────────────


def _step_checks(prefix: str, label: str, F: Hypergraph, G: Hypergraph,
                 alpha: VertexId, new: VertexId, parts: int) -> List[AuditCheck]:
    checks = []
    d_alpha = F.degree(alpha)

    checks.append(_check(f"{prefix}1", f"{label}d'({alpha})", G.degree(alpha), d_alpha * (parts - 1), parts))
    checks.append(_check(f"{prefix}2", f"{label}d'({new})", G.degree(new), d_alpha, parts))

    # Only signatures carrying the new vertex at two or more hinges can violate this.
    for signature in sorted(G.signature_counts(), key=multiset_key):
        if signature.multiplicity(new) >= 2:
            checks.append(_check(f"{prefix}3", f"{label}m'({signature}) with {new} twice",
                                 G.multiplicity(signature), 0, 1))

    # Realized (t, U) pairs: U avoids α and the new vertex.
    pairs_alpha: Set[Tuple[int, VertexMultiset]] = set()
    pairs_new: Set[Tuple[int, VertexMultiset]] = set()
    for signature in F.signature_counts():
        t, rest = signature.split_off(alpha)
        if t >= 1:
            pairs_alpha.add((t, rest))
            pairs_new.add((t - 1, rest))
    for signature in G.signature_counts():
        if signature.multiplicity(new) == 0:
            t, rest = signature.split_off(alpha)
            if t >= 1:
                pairs_alpha.add((t, rest))
        elif signature.multiplicity(new) == 1:
            _, without_new = signature.split_off(new)
            t, rest = without_new.split_off(alpha)
            pairs_new.add((t, rest))

    for t, rest in sorted(pairs_alpha, key=lambda pair: (pair[0], multiset_key(pair[1]))):
        if t > parts:
            continue
        lifted = rest.union(VertexMultiset(((alpha, t),)))
        checks.append(_check(
            f"{prefix}4", f"{label}m'({lifted})",
            G.multiplicity(lifted), F.multiplicity(lifted) * (parts - t), parts,
        ))

    for t, rest in sorted(pairs_new, key=lambda pair: (pair[0], multiset_key(pair[1]))):
        with_alpha = VertexMultiset(((alpha, t),)) if t else VertexMultiset()
        lifted = rest.union(with_alpha).union(VertexMultiset(((new, 1),)))
        source = rest.union(VertexMultiset(((alpha, t + 1),)))
        checks.append(_check(
            f"{prefix}5", f"{label}m'({lifted})",
            G.multiplicity(lifted), (t + 1) * F.multiplicity(source), parts,
        ))
    return checks


def audit_step(before: DetachmentState, after: DetachmentState, alpha: Optional[VertexId] = None) -> StepAudit:
    """
    Check one splitting step F_i → F_{i+1}

    Args:
        before: State at step i
        after: State at step i + 1
        alpha: The split vertex (defaults to the one recorded in ``after``)

    Returns:
        StepAudit with B-tagged and, for colored input, C-tagged checks
    """
    alpha = after.alpha if alpha is None else alpha
    added = [v for v in after.hypergraph.vertices if v not in set(before.hypergraph.vertices)]
    if len(added) != 1:
        raise RuntimeError(f"Expected exactly one new vertex after a step, found {added!r}")
    new = added[0]
    parts = before.g[alpha]

    audit = StepAudit(step=after.step, kind='step')
    for prefix, label, F, G in _layers(before.hypergraph, after.hypergraph, 'B', 'C'):
        audit.checks.extend(_step_checks(prefix, label, F, G, alpha, new, parts))

    if not audit.passed:
        logger.warning(f"Step {after.step} audit failed: {[c.condition for c in audit.failures()]}")
    return audit


# ── cumulative conditions ──────────────────────────────────────────────


def _lifts(signature: VertexMultiset, fibres: Dict[VertexId, List[VertexId]],
           g_now: NumberFunction) -> List[Tuple[VertexMultiset, int]]:
    """
    Lifts {u_j^{a_j}} ∪ U_j of a realized multiset {u_j^{m_j}}

    U_j ranges over subsets of the split-offs of u_j with a_j = m_j − |U_j|
    and 0 ≤ a_j ≤ g_i(u_j). Returns (lift, Π C(g_i(u_j), a_j)).
    """
    choices = []
    for u, m in signature:
        options = []
        split_offs = [v for v in fibres[u] if v != u]
        for size in range(0, min(m, len(split_offs)) + 1):
            a = m - size
            if a > g_now[u]:
                continue
            for chosen in combinations(split_offs, size):
                options.append((u, a, chosen))
        choices.append(options)

    lifts = []
    for combo in product(*choices):
        counts: Dict[VertexId, int] = {}
        pairs = []
        for u, a, chosen in combo:
            if a:
                counts[u] = a
            for v in chosen:
                counts[v] = 1
            pairs.append((g_now[u], a))
        lifts.append((VertexMultiset.from_counts(counts), binomial_product(pairs)))
    return lifts


def _cumulative_checks(prefix: str, label: str, F: Hypergraph, Fi: Hypergraph,
                       state: DetachmentState, g: NumberFunction) -> List[AuditCheck]:
    checks = []
    fibres = state.psi.fibres()
    for u in F.vertices:
        d_u = F.degree(u)
        for v in fibres[u]:
            checks.append(_check(
                f"{prefix}1", f"{label}d({v})/g({v}) vs d({u})/g({u})",
                Fi.degree(v), d_u, g[u], lhs_den=state.g[v],
            ))

    for signature in sorted(F.signature_counts(), key=multiset_key):
        if any(m > g[u] for u, m in signature):
            continue
        m_F = F.multiplicity(signature)
        den_F = binomial_product((g[u], m) for u, m in signature)
        for lift, den in _lifts(signature, fibres, state.g):
            checks.append(_check(
                f"{prefix}2", f"{label}m({lift}) lifting {signature}",
                Fi.multiplicity(lift), m_F, den_F, lhs_den=den,
            ))
    return checks


def audit_cumulative(original: Hypergraph, state: DetachmentState) -> StepAudit:
    """
    Check F_i against F after i steps

    Args:
        original: F
        state: DetachmentState at step i

    Returns:
        StepAudit with D-tagged and, for colored input, E-tagged checks
    """
    g = state.original_number_function()
    audit = StepAudit(step=state.step, kind='cumulative')
    for prefix, label, F, Fi in _layers(original, state.hypergraph, 'D', 'E'):
        audit.checks.extend(_cumulative_checks(prefix, label, F, Fi, state, g))

    if not audit.passed:
        logger.warning(f"Cumulative audit at step {state.step} failed: {[c.condition for c in audit.failures()]}")
    return audit


def audits_to_frame(audits: List[StepAudit]) -> pd.DataFrame:
    """Concatenate audit tables, one row per check"""
    frames = [audit.to_frame() for audit in audits]
    if not frames:
        return StepAudit(step=0, kind='step').to_frame()
    return pd.concat(frames, ignore_index=True)
