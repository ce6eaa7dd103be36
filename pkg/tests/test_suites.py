"""
Smoke tests for the randomized suites and their runner script.
"""

import os
import subprocess
import sys
from pathlib import Path

from hyperdetach.suites import (
    detachment_case,
    laminar_case,
    run_audit_suite,
    run_detachment_suite,
    run_laminar_suite,
    summarize,
)
from scripts.run_suites import main


# ── case tests ──────────────────────────────────────────────────────────

class TestCases:
    def test_laminar_case_is_reproducible(self):
        assert laminar_case(3, 0) == laminar_case(3, 0)

    def test_detachment_case_row(self):
        row = detachment_case(0, 1)
        assert row['verified']
        assert row['reamalgamates']
        assert row['audits'] == 0


# ── suite tests ─────────────────────────────────────────────────────────

class TestSuites:
    def test_laminar_suite(self):
        frame = run_laminar_suite(size=5, seed=1, n_jobs=1)
        assert len(frame) == 5
        assert frame['valid'].all()
        assert frame['oracle_feasible'].all()

    def test_detachment_suite(self):
        frame = run_detachment_suite(size=5, seed=2, n_jobs=1)
        assert frame['verified'].all()
        assert frame['reamalgamates'].all()

    def test_audit_suite(self):
        frame = run_audit_suite(size=2, seed=3, n_jobs=1)
        assert frame['audits_passed'].all()
        assert (frame['failed_checks'] == 0).all()
        assert (frame['audits'] >= 1).all()

    def test_summarize_counts_booleans(self):
        summary = summarize(run_laminar_suite(size=3, seed=4, n_jobs=1))
        assert summary['cases'] == 3
        assert summary['valid'] == 3
        assert 'ground' not in summary


# ── runner tests ────────────────────────────────────────────────────────

class TestRunner:
    def test_single_suite(self, capsys):
        assert main(['laminar', '--size', '3', '--jobs', '1']) == 0
        assert 'laminar' in capsys.readouterr().out

    def test_runs_standalone_outside_the_repo(self, tmp_path):
        script = Path(__file__).resolve().parents[1] / 'scripts' / 'run_suites.py'
        env = {k: v for k, v in os.environ.items() if k != 'PYTHONPATH'}
        result = subprocess.run([sys.executable, str(script), 'laminar', '--size', '2', '--jobs', '1'],
                                cwd=tmp_path, env=env, capture_output=True, text=True)
        assert result.returncode == 0, result.stderr
        assert 'laminar' in result.stdout
