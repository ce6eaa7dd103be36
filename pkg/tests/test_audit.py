"""
Unit tests for the step and cumulative detachment audits.

Mutations tamper with a correct step and must be caught by at least one
audit check.
"""

from dataclasses import replace

import pytest

from hyperdetach import DetachConfig
from hyperdetach.audit import audit_cumulative, audit_step, audits_to_frame
from hyperdetach.detachment import run_detachment
from hyperdetach.generators import random_instance
from hyperdetach.hypergraph import Hypergraph, NumberFunction, VertexMultiset, example_hypergraph


# ── helpers ─────────────────────────────────────────────────────────────

def _make_loops(count=6, colors=None):
    edges = {e: ['v', 'v'] for e in range(count)}
    if colors is None:
        return Hypergraph.from_edges(['v'], edges)
    return Hypergraph.from_edges(['v'], edges, coloring={e: e % colors + 1 for e in edges}, num_colors=colors)


def _make_first_step(F=None, g=None):
    """(F, before, after) for the first splitting step of a run."""
    F = F if F is not None else _make_loops(6, colors=2)
    g = g if g is not None else NumberFunction({'v': 4})
    run = run_detachment(F, g)
    return F, run.states[0], run.states[1]


def _moved(state, hinges, target):
    return replace(state, hypergraph=state.hypergraph.with_hinges_moved(hinges, target))


def _reseat(state, hinges):
    """Put every hinge back on α, then move the given hinges to the split-off."""
    reset = _moved(state, state.hypergraph.hinge_set(state.split_off), state.alpha)
    return _moved(reset, hinges, state.split_off)


def _edges_at(state):
    return sorted(state.hypergraph.incident_edges(state.split_off))


def _first_edge(G, vertices):
    return sorted(G.edges_joining(VertexMultiset.from_vertices(vertices)))[0]


# ── mutations ───────────────────────────────────────────────────────────

def _mutate_move_everything(before, after):
    """All hinges at α go to the new vertex."""
    return _moved(after, before.hypergraph.hinge_set('v'), after.split_off)


def _mutate_move_nothing(before, after):
    """The new vertex takes no hinges."""
    return _moved(after, after.hypergraph.hinge_set(after.split_off), 'v')


def _mutate_one_extra_hinge(before, after):
    """The new vertex takes one more hinge than its share."""
    spare = sorted(after.hypergraph.hinge_set('v'))
    return _moved(after, spare[:2], after.split_off)


def _mutate_both_hinges_of_a_loop(before, after):
    """The new vertex takes both hinges of one loop."""
    G = after.hypergraph
    edge = G.incident_edges(after.split_off)[0]
    return _moved(after, G.hinges_of_edge(edge), after.split_off)


def _mutate_one_color_only(before, after):
    """The new vertex takes its share from color 1 only."""
    G = before.hypergraph
    share = G.degree('v') // before.g['v']
    color_one = sorted(h for h in G.hinge_set('v') if G.color(G.phi[h]) == 1)
    reset = _moved(after, after.hypergraph.hinge_set(after.split_off), 'v')
    return _moved(reset, color_one[:share], after.split_off)


def _mutate_color_two_only(before, after):
    """The new vertex takes one hinge from each color-2 loop."""
    G = before.hypergraph
    loops = [e for e in G.edges if G.color(e) == 2]
    return _reseat(after, [min(G.hinges_of_edge(e)) for e in loops])


def _mutate_four_loops(before, after):
    """The new vertex takes one hinge from four loops instead of three."""
    return _reseat(after, [(e, 0) for e in range(4)])


def _mutate_two_loops(before, after):
    """The new vertex takes one hinge from two loops only."""
    return _reseat(after, [(e, 0) for e in range(2)])


def _mutate_doubled_keeping_degrees(before, after):
    """One edge gets both hinges on the new vertex, another gives one back."""
    G = after.hypergraph
    first, second = _edges_at(after)[:2]
    tampered = _moved(after, G.hinge_set('v', first), after.split_off)
    return _moved(tampered, G.hinge_set(after.split_off, second), 'v')


def _mutate_recolor_new_edges(before, after):
    """Edges at the new vertex all become color 1, the rest color 2."""
    at_new = set(_edges_at(after))
    G = after.hypergraph
    coloring = {e: 1 if e in at_new else 2 for e in G.edges}
    return replace(after, hypergraph=G.with_coloring(coloring, 2))


def _mutate_recolor_one_new_edge(before, after):
    """One edge at the new vertex switches color."""
    G = after.hypergraph
    edge = _edges_at(after)[0]
    coloring = dict(G.coloring)
    coloring[edge] = 3 - coloring[edge]
    return replace(after, hypergraph=G.with_coloring(coloring, 2))


def _mutate_recolor_untouched_loop(before, after):
    """A loop still wholly on α switches color."""
    G = after.hypergraph
    edge = next(e for e in G.edges if e not in set(_edges_at(after)))
    coloring = dict(G.coloring)
    coloring[edge] = 3 - coloring[edge]
    return replace(after, hypergraph=G.with_coloring(coloring, 2))


def _mutate_new_vertex_number(before, after):
    """The new vertex keeps g = 2 instead of 1."""
    return replace(after, g=after.g.with_value(after.split_off, 2))


MUTATIONS = [
    _mutate_move_everything,
    _mutate_move_nothing,
    _mutate_one_extra_hinge,
    _mutate_both_hinges_of_a_loop,
    _mutate_one_color_only,
    _mutate_color_two_only,
    _mutate_four_loops,
    _mutate_two_loops,
    _mutate_doubled_keeping_degrees,
    _mutate_recolor_new_edges,
    _mutate_recolor_one_new_edge,
    _mutate_recolor_untouched_loop,
    _mutate_new_vertex_number,
]


# ── tampered runs on other instances ────────────────────────────────────
# Each builder returns (F, before, tampered).

def _make_mixed():
    """v joined to u by four edges and carrying four loops, g(v) = 2."""
    edges = {e: ['v', 'u'] for e in range(4)}
    edges.update({e: ['v', 'v'] for e in range(4, 8)})
    F = Hypergraph.from_edges(['u', 'v'], edges)
    return _make_first_step(F, NumberFunction({'u': 1, 'v': 2}))


def _tamper_signature_skew():
    """Degrees stay fair but every v–u edge moves to the new vertex."""
    F, before, after = _make_mixed()
    return F, before, _reseat(after, [(e, 0) for e in range(6)])


def _tamper_bystander_hinge():
    """The new vertex also takes the hinge of u in one edge."""
    F, before, after = _make_mixed()
    return F, before, _moved(after, [(0, 1)], after.split_off)


def _tamper_per_color_multiplicity():
    """Color 1 keeps fair degrees with one loop doubled on each side."""
    F, before, after = _make_first_step(_make_loops(4, colors=2), NumberFunction({'v': 2}))
    return F, before, _reseat(after, [(0, 0), (0, 1), (1, 0), (3, 0)])


def _make_second_step():
    """F and the states after one and two splits of six loops with g(v) = 4."""
    F = _make_loops(6)
    run = run_detachment(F, NumberFunction({'v': 4}))
    return F, run.states[1], run.states[2]


def _tamper_mid_run_swap():
    """Swap hinges so m(v²) drops to 0 while every degree is kept."""
    F, before, after = _make_second_step()
    G = after.hypergraph
    first, second = before.split_off, after.split_off
    loop = _first_edge(G, ['v', 'v'])
    across = _first_edge(G, [first, second])
    tampered = _moved(after, sorted(G.hinge_set('v', loop))[:1], second)
    return F, before, _moved(tampered, G.hinge_set(second, across), 'v')


def _tamper_mid_run_shift():
    """One hinge moves between the two split-offs."""
    F, before, after = _make_second_step()
    G = after.hypergraph
    hinge = sorted(G.hinge_set(before.split_off))[0]
    return F, before, _moved(after, [hinge], after.split_off)


def _tamper_mid_run_doubled_split_off():
    """The edge across both split-offs lands twice on the newer one."""
    F, before, after = _make_second_step()
    G = after.hypergraph
    first, second = before.split_off, after.split_off
    across = _first_edge(G, [first, second])
    spoke = _first_edge(G, ['v', second])
    tampered = _moved(after, G.hinge_set(first, across), second)
    return F, before, _moved(tampered, G.hinge_set(second, spoke), first)


def _tamper_example_edge():
    """Both v1 hinges of e1 go to the new vertex."""
    g = NumberFunction({'v1': 2, 'v2': 1, 'v3': 2, 'v4': 1, 'v5': 1})
    F, before, after = _make_first_step(example_hypergraph(), g)
    return F, before, _moved(after, before.hypergraph.hinge_set('v1'), after.split_off)


TAMPERED_RUNS = [
    _tamper_signature_skew,
    _tamper_bystander_hinge,
    _tamper_per_color_multiplicity,
    _tamper_mid_run_swap,
    _tamper_mid_run_shift,
    _tamper_mid_run_doubled_split_off,
    _tamper_example_edge,
]


def _failed(audit):
    return {check.condition for check in audit.failures()}


# ── step audit tests ────────────────────────────────────────────────────

class TestStepAudit:
    def setup_method(self):
        self.F, self.before, self.after = _make_first_step()

    def test_correct_step_passes(self):
        audit = audit_step(self.before, self.after, 'v')
        assert audit.passed
        assert {'B1', 'B2', 'B4', 'B5'} <= audit.conditions()
        assert {'C1', 'C2', 'C4', 'C5'} <= audit.conditions()

    def test_alpha_defaults_to_recorded_vertex(self):
        assert audit_step(self.before, self.after).passed

    @pytest.mark.parametrize('mutate', MUTATIONS, ids=lambda m: m.__name__)
    def test_mutation_caught(self, mutate):
        tampered = mutate(self.before, self.after)
        step = audit_step(self.before, tampered, 'v')
        cumulative = audit_cumulative(self.F, tampered)
        assert not (step.passed and cumulative.passed)

    def test_moving_everything_fails_degree_checks(self):
        tampered = _mutate_move_everything(self.before, self.after)
        assert {'B1', 'B2'} <= _failed(audit_step(self.before, tampered))

    def test_share_count_is_exact(self):
        for mutate in (_mutate_four_loops, _mutate_two_loops):
            assert 'B2' in _failed(audit_step(self.before, mutate(self.before, self.after)))

    def test_recoloring_keeps_total_degrees(self):
        tampered = _mutate_recolor_new_edges(self.before, self.after)
        failed = _failed(audit_step(self.before, tampered))
        assert 'C2' in failed
        assert not {'B1', 'B2'} & failed
        assert 'E1' in _failed(audit_cumulative(self.F, tampered))

    def test_recolored_untouched_loop_fails_alpha_color_degree(self):
        tampered = _mutate_recolor_untouched_loop(self.before, self.after)
        failed = _failed(audit_step(self.before, tampered))
        assert 'C1' in failed
        assert not {'B1', 'B2'} & failed

    def test_doubled_incidence_with_fair_degrees(self):
        tampered = _mutate_doubled_keeping_degrees(self.before, self.after)
        failed = _failed(audit_step(self.before, tampered))
        assert 'B3' in failed
        assert not {'B1', 'B2'} & failed

    def test_doubling_is_only_checked_where_it_occurs(self):
        assert 'B3' not in audit_step(self.before, self.after).conditions()
        tampered = _mutate_doubled_keeping_degrees(self.before, self.after)
        doubled = [c for c in audit_step(self.before, tampered).checks if c.condition == 'B3']
        assert len(doubled) == 1
        assert doubled[0].lhs == 1
        assert not doubled[0].passed

    def test_frame_has_one_row_per_check(self):
        audit = audit_step(self.before, self.after)
        frame = audit.to_frame()
        assert len(frame) == len(audit.checks)
        assert frame['passed'].all()


# ── tampered runs on other instances ────────────────────────────────────

class TestTamperedRuns:
    @pytest.mark.parametrize('build', TAMPERED_RUNS, ids=lambda b: b.__name__)
    def test_tampering_caught(self, build):
        F, before, tampered = build()
        step = audit_step(before, tampered)
        cumulative = audit_cumulative(F, tampered)
        assert not (step.passed and cumulative.passed)

    def test_untampered_instances_pass(self):
        for F, before, after in (_make_mixed(), _make_second_step()):
            assert audit_step(before, after).passed
            assert audit_cumulative(F, after).passed

    def test_signature_skew_fails_multiplicities_only(self):
        _, before, tampered = _tamper_signature_skew()
        failed = _failed(audit_step(before, tampered))
        assert {'B4', 'B5'} <= failed
        assert not {'B1', 'B2', 'B3'} & failed

    def test_per_color_multiplicity_skew(self):
        F, before, tampered = _tamper_per_color_multiplicity()
        assert not {'C1', 'C2'} & _failed(audit_step(before, tampered))
        failed = _failed(audit_cumulative(F, tampered))
        assert 'E2' in failed
        assert 'E1' not in failed

    def test_mid_run_swap_fails_binomial_multiplicity(self):
        F, _, tampered = _tamper_mid_run_swap()
        audit = audit_cumulative(F, tampered)
        assert audit.step == 2
        assert _failed(audit) == {'D2'}
        # m(v²) is measured against C(g₂(v), 2) = 1
        loop = next(c for c in audit.failures() if c.instance.startswith("m({v^2})"))
        assert (loop.lhs, loop.lower, loop.upper, loop.lhs_den) == (0, 1, 1, 1)

    def test_mid_run_shift_fails_degrees(self):
        F, _, tampered = _tamper_mid_run_shift()
        assert 'D1' in _failed(audit_cumulative(F, tampered))


# ── cumulative audit tests ──────────────────────────────────────────────

class TestCumulativeAudit:
    def test_initial_state_passes(self):
        F, before, _ = _make_first_step()
        audit = audit_cumulative(F, before)
        assert audit.passed
        assert audit.kind == 'cumulative'
        assert {'D1', 'D2', 'E1', 'E2'} <= audit.conditions()

    def test_tampered_degree_fails(self):
        F, before, after = _make_first_step()
        tampered = _mutate_move_everything(before, after)
        assert 'D1' in _failed(audit_cumulative(F, tampered))

    def test_new_vertex_number_fails_degrees(self):
        F, before, after = _make_first_step()
        assert 'D1' in _failed(audit_cumulative(F, _mutate_new_vertex_number(before, after)))


# ── audited run tests ───────────────────────────────────────────────────

class TestAuditedRuns:
    def test_audited_run_passes(self):
        g = NumberFunction({'v1': 2, 'v2': 1, 'v3': 2, 'v4': 1, 'v5': 1})
        run = run_detachment(example_hypergraph(), g, audit=True)
        assert run.passed
        # initial cumulative, then step + cumulative per step
        assert [a.kind for a in run.audits] == ['cumulative', 'step', 'cumulative', 'step', 'cumulative']

    def test_environment_switches_audits_on(self, monkeypatch):
        monkeypatch.setenv(DetachConfig.AUDIT_ENV_VAR, '1')
        run = run_detachment(_make_loops(6), NumberFunction({'v': 3}))
        assert run.audits
        assert run.passed

    def test_explicit_flag_overrides_environment(self, monkeypatch):
        monkeypatch.setenv(DetachConfig.AUDIT_ENV_VAR, 'yes')
        assert run_detachment(_make_loops(6), NumberFunction({'v': 3}), audit=False).audits == []

    def test_random_audited_runs(self):
        for seed in range(8):
            F, g = random_instance(seed, max_vertices=4, max_edges=12)
            assert run_detachment(F, g, seed=seed, audit=True).passed

    def test_frame_concatenates_audits(self):
        run = run_detachment(_make_loops(6, colors=2), NumberFunction({'v': 4}), audit=True)
        frame = audits_to_frame(run.audits)
        assert len(frame) == sum(len(a.checks) for a in run.audits)
        assert audits_to_frame([]).empty
