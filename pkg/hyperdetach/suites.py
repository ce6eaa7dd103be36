"""
Randomized Suites
Seeded batches of random instances checked against the oracles, run in
parallel with joblib. Every runner returns one DataFrame row per case.
"""

from typing import Any, Dict, Optional
import logging

import pandas as pd
from joblib import Parallel, delayed

from hyperdetach import DetachConfig
from hyperdetach.detachment import run_detachment
from hyperdetach.generators import make_rng, random_hypergraph, random_simple_number_function, random_split_instance
from hyperdetach.laminar import brute_force_split, fair_split
from hyperdetach.verification import verify_detachment, verify_split

logging.basicConfig(level=logging.INFO)
logger = logging.getLogger(__name__)


def laminar_case(seed: int, case: int) -> Dict[str, Any]:
    """fair_split against the verifier and the brute-force oracle"""
    rng = make_rng([seed, case])
    ground, family_a, family_b, parts = random_split_instance(rng)
    certificate = fair_split(ground, family_a, family_b, parts, audit=True)
    report = verify_split(ground, family_a.sets, family_b.sets, parts, certificate.subset)
    oracle = brute_force_split(ground, family_a, family_b, parts)
    return {
        'case': case,
        'ground': len(ground),
        'sets_a': len(family_a),
        'sets_b': len(family_b),
        'parts': parts,
        'valid': certificate.valid and report.passed,
        'oracle_feasible': oracle is not None,
    }


def detachment_case(seed: int, case: int, audit: bool = False) -> Dict[str, Any]:
    """detach on a random colored hypergraph, verified and re-amalgamated"""
    rng = make_rng([seed, case])
    F = random_hypergraph(rng)
    g = random_simple_number_function(F, rng)
    run = run_detachment(F, g, seed=int(rng.integers(0, 2 ** 31)), audit=audit)
    G, psi = run.final.hypergraph, run.final.psi
    report = verify_detachment(F, G, psi, g)
    failed_checks = sum(len(a.failures()) for a in run.audits)
    return {
        'case': case,
        'vertices': len(F.vertices),
        'edges': len(F.edges),
        'colors': F.num_colors if F.is_colored else 0,
        'steps': run.final.step,
        'verified': report.passed,
        'reamalgamates': G.amalgamate(psi) == F,
        'audits': len(run.audits),
        'failed_checks': failed_checks,
        'audits_passed': run.passed,
    }


def _run(name: str, job, size: int, seed: int, n_jobs: Optional[int], **kwargs) -> pd.DataFrame:
    n_jobs = n_jobs or DetachConfig.SUITE_N_JOBS
    logger.info(f"Running {name} suite: {size} cases, seed {seed}")
    rows = Parallel(n_jobs=n_jobs)(delayed(job)(seed, case, **kwargs) for case in range(size))
    frame = pd.DataFrame(rows)
    logger.info(f"{name} suite finished: {len(frame)} cases")
    return frame


def run_laminar_suite(size: Optional[int] = None, seed: int = 0, n_jobs: Optional[int] = None) -> pd.DataFrame:
    """Fair splits on random laminar instances; every row should be valid and feasible"""
    return _run('laminar', laminar_case, size or DetachConfig.LAMINAR_SUITE_SIZE, seed, n_jobs)


def run_detachment_suite(size: Optional[int] = None, seed: int = 0, n_jobs: Optional[int] = None) -> pd.DataFrame:
    """Detachments of random colored hypergraphs; every row should verify"""
    return _run('detachment', detachment_case, size or DetachConfig.DETACHMENT_SUITE_SIZE, seed, n_jobs)


def run_audit_suite(size: Optional[int] = None, seed: int = 0, n_jobs: Optional[int] = None) -> pd.DataFrame:
    """Audited detachments; every audit check should pass"""
    return _run('audit', detachment_case, size or DetachConfig.AUDIT_SUITE_SIZE, seed, n_jobs, audit=True)


def summarize(frame: pd.DataFrame) -> Dict[str, Any]:
    """Pass counts for the boolean columns of a suite frame"""
    summary: Dict[str, Any] = {'cases': len(frame)}
    for column in frame.columns:
        if frame[column].dtype == bool:
            summary[column] = int(frame[column].sum())
    return summary
