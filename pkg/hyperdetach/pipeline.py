"""
Factorization Pipeline State Machine Controller
Orchestrates the amalgamate → color → detach workflow for designs
"""

from dataclasses import dataclass, field
from typing import Any, Dict, List, Optional, Union
import logging

import pandas as pd

from hyperdetach import DetachConfig, PipelineState
from hyperdetach.audit import StepAudit
from hyperdetach.designs import (
    DesignSpec,
    DistributionMatrix,
    FactorSpec,
    Infeasible,
    check_necessary,
    solve_distribution_matrix,
)
from hyperdetach.detachment import run_detachment
from hyperdetach.exceptions import DomainError, FactorizationRefused, HyperdetachError, Refusal
from hyperdetach.hypergraph import AmalgamationMap, Hypergraph, NumberFunction
from hyperdetach.verification import VerificationReport, verify_factorization

logging.basicConfig(level=logging.INFO)
logger = logging.getLogger(__name__)

AMALGAMATED_VERTEX = 'v'


@dataclass
class Factorization:
    """A colored design whose color classes are the factors"""

    hypergraph: Hypergraph
    spec: DesignSpec
    factor_spec: FactorSpec
    matrix: DistributionMatrix
    psi: AmalgamationMap
    audits: List[StepAudit] = field(default_factory=list)
    report: Optional[VerificationReport] = None

    @property
    def kind(self) -> str:
        return self.factor_spec.kind

    @property
    def factors(self) -> List[Hypergraph]:
        return [self.hypergraph.color_class(i) for i in range(1, self.factor_spec.k + 1)]

    @property
    def audits_passed(self) -> bool:
        return all(audit.passed for audit in self.audits)

    def degree_table(self) -> pd.DataFrame:
        return self.hypergraph.degree_table()


def amalgamated_design(spec: DesignSpec, matrix: DistributionMatrix) -> Hypergraph:
    """
    Single-vertex amalgamation of the (stage-one) design, colored from A

    Size class j contributes λ_j·C(n, h_j)·p^{h_j} loops with h_j hinges each;
    the first a_1j get color 1, the next a_2j color 2, and so on in edge-id order.
    """
    A = matrix.to_list()
    edges: Dict[int, List[str]] = {}
    coloring: Dict[int, int] = {}
    for j, h in enumerate(spec.H):
        for i, row in enumerate(A, start=1):
            for _ in range(row[j]):
                edge = len(edges)
                edges[edge] = [AMALGAMATED_VERTEX] * h
                coloring[edge] = i
    return Hypergraph.from_edges([AMALGAMATED_VERTEX], edges, coloring=coloring, num_colors=len(A))


def _engine_refusal(stage: str, parts: int, error: HyperdetachError) -> Refusal:
    """A detachment run that raised, reported like a failed condition"""
    return Refusal(
        condition=stage,
        relation='g-detachment exists',
        lhs=None,
        rhs=parts,
        reason=f"{stage} failed: {error}",
        detail={'error': type(error).__name__},
    )


def _canonical_relabel(psi: AmalgamationMap, parts: List[List[int]], targets: List[Any]) -> Dict[Any, int]:
    """Send the fibre over targets[a] onto the ids of part a, in id order"""
    mapping: Dict[Any, int] = {}
    fibres = psi.fibres()
    for target, ids in zip(targets, parts):
        fibre = fibres.get(target, [])
        if len(fibre) != len(ids):
            raise RuntimeError(f"Fibre over {target!r} has {len(fibre)} vertices, expected {len(ids)}")
        mapping.update(zip(fibre, ids))
    return mapping


class FactorizationPipeline:
    """
    State machine-based factorization of complete designs
    Follows the workflow: IDLE -> CHECK -> SOLVE -> COLOR -> DETACH -> EXPAND -> VERIFY -> COMPLETE
    Any failed necessary condition ends in REFUSED.
    """

    def __init__(
        self,
        spec: DesignSpec,
        factor_spec: FactorSpec,
        seed: Optional[int] = None,
        audit: Optional[bool] = None,
    ):
        """
        Initialize factorization pipeline

        Args:
            spec: Design to factorize
            factor_spec: R, optional Q, or almost-R
            seed: Optional seed for the α-selection order
            audit: Evaluate detachment audits (defaults to HYPERDETACH_AUDIT)
        """
        self.state = PipelineState.IDLE
        self.spec = spec
        self.factor_spec = factor_spec
        self.seed = seed
        self.audit = DetachConfig.audit_enabled() if audit is None else audit

        self.refusals: List[Refusal] = []
        self.matrix: Optional[DistributionMatrix] = None
        self.amalgamated: Optional[Hypergraph] = None
        self.stage_one: Optional[Hypergraph] = None
        self.result: Optional[Hypergraph] = None
        self.psi: Optional[AmalgamationMap] = None
        self.audits: List[StepAudit] = []
        self.report: Optional[VerificationReport] = None

    def transition_to(self, new_state: PipelineState) -> None:
        """
        Transition to a new state

        Args:
            new_state: Target state
        """
        logger.info(f"State transition: {self.state.value} -> {new_state.value}")
        self.state = new_state

    def _banner(self, title: str) -> None:
        logger.info("=" * 60)
        logger.info(f"STARTING {title} STATE")
        logger.info("=" * 60)

    def _refuse(self, refusals: List[Refusal]) -> bool:
        self.refusals.extend(refusals)
        self.transition_to(PipelineState.REFUSED)
        for refusal in refusals:
            logger.warning(f"Refused: {refusal.reason} ({refusal.relation}: {refusal.lhs} vs {refusal.rhs})")
        return False

    def run_check_state(self) -> bool:
        """
        CHECK state: necessary degree-sum and equal-parts conditions

        Returns:
            Success status
        """
        self._banner("CHECK")
        self.transition_to(PipelineState.CHECK)

        verdict = check_necessary(self.spec, self.factor_spec)
        if not verdict.passed:
            return self._refuse(verdict.refusals)

        logger.info(f"Design degree {self.spec.regularity()}, factor bounds {self.factor_spec.bounds()}")
        return True

    def run_solve_state(self) -> bool:
        """
        SOLVE state: find the distribution matrix A

        Returns:
            Success status
        """
        self._banner("SOLVE")
        self.transition_to(PipelineState.SOLVE)

        result: Union[DistributionMatrix, Infeasible] = solve_distribution_matrix(self.spec, self.factor_spec)
        if isinstance(result, Infeasible):
            return self._refuse([result.refusal])

        self.matrix = result
        logger.info(f"\nDistribution matrix:\n{result.to_frame().to_string()}")
        return True

    def run_color_state(self) -> bool:
        """
        COLOR state: build the colored single-vertex amalgamation

        Returns:
            Success status
        """
        self._banner("COLOR")
        self.transition_to(PipelineState.COLOR)

        if self.matrix is None:
            logger.error("No distribution matrix available for coloring")
            return False

        self.amalgamated = amalgamated_design(self.spec, self.matrix)
        logger.info(f"Amalgamated design: {self.amalgamated}")
        return True

    def run_detach_state(self) -> bool:
        """
        DETACH state: split the single vertex into n vertices

        Returns:
            Success status
        """
        self._banner("DETACH")
        self.transition_to(PipelineState.DETACH)

        if self.amalgamated is None:
            logger.error("No amalgamated design available for detachment")
            return False

        try:
            g = NumberFunction({AMALGAMATED_VERTEX: self.spec.n})
            run = run_detachment(self.amalgamated, g, seed=self.seed, audit=self.audit)
        except HyperdetachError as e:
            logger.error(f"Error in DETACH state: {e}")
            return self._refuse([_engine_refusal('detach', self.spec.n, e)])

        self.audits.extend(run.audits)
        fibre = run.final.psi.preimage(AMALGAMATED_VERTEX)
        self.stage_one = run.final.hypergraph.relabel({v: a for a, v in enumerate(fibre)})
        self.psi = AmalgamationMap({a: AMALGAMATED_VERTEX for a in range(self.spec.n)})
        logger.info(f"Stage one design: {self.stage_one}")
        return True

    def run_expand_state(self) -> bool:
        """
        EXPAND state: detach every stage-one vertex into its part of p vertices

        Returns:
            Success status
        """
        self._banner("EXPAND")
        self.transition_to(PipelineState.EXPAND)

        if self.stage_one is None:
            logger.error("No stage-one design available for expansion")
            return False

        p = self.spec.part_size
        if not self.spec.is_partite:
            self.result = self.stage_one
            logger.info("Nothing to expand")
            return True
        if p == 1:
            self.result = self.stage_one
            self.psi = AmalgamationMap.identity(self.stage_one.vertices)
            logger.info("Parts of size 1, nothing to expand")
            return True

        try:
            g = NumberFunction.constant(self.stage_one.vertices, p)
            run = run_detachment(self.stage_one, g, seed=self.seed, audit=self.audit)
        except HyperdetachError as e:
            logger.error(f"Error in EXPAND state: {e}")
            return self._refuse([_engine_refusal('expand', p, e)])

        self.audits.extend(run.audits)
        mapping = _canonical_relabel(run.final.psi, self.spec.canonical_parts(), list(range(self.spec.n)))
        self.result = run.final.hypergraph.relabel(mapping)
        self.psi = AmalgamationMap({new: run.final.psi[old] for old, new in mapping.items()})
        logger.info(f"Expanded design: {self.result}")
        return True

    def run_verify_state(self) -> bool:
        """
        VERIFY state: independent factor and design checks

        Returns:
            Success status
        """
        self._banner("VERIFY")
        self.transition_to(PipelineState.VERIFY)

        if self.result is None:
            logger.error("No factorization available to verify")
            return False

        self.report = verify_factorization(self.result, self.spec, self.factor_spec)
        logger.info(f"\nVerification summary:\n{self.report.to_frame().to_string(index=False)}")

        failed_audits = [a for a in self.audits if not a.passed]
        if failed_audits:
            logger.error(f"{len(failed_audits)} detachment audits failed")
        return self.report.passed and not failed_audits

    def run_complete_pipeline(self) -> bool:
        """
        Run the complete factorization from start to finish

        Returns:
            Success status (False on refusal or failed verification)
        """
        logger.info("\n" + "=" * 60)
        logger.info(f"STARTING FACTORIZATION PIPELINE ({self.factor_spec.kind})")
        logger.info("=" * 60 + "\n")

        steps = [
            ('CHECK', self.run_check_state),
            ('SOLVE', self.run_solve_state),
            ('COLOR', self.run_color_state),
            ('DETACH', self.run_detach_state),
            ('EXPAND', self.run_expand_state),
            ('VERIFY', self.run_verify_state),
        ]
        for name, step in steps:
            if not step():
                logger.error(f"Pipeline failed at {name} state")
                return False

        self.transition_to(PipelineState.COMPLETE)

        logger.info("\n" + "=" * 60)
        logger.info("PIPELINE COMPLETED SUCCESSFULLY")
        logger.info("=" * 60)
        return True

    def get_factorization(self) -> Optional[Factorization]:
        """The factorization once the pipeline has produced one"""
        if self.result is None or self.matrix is None:
            return None
        return Factorization(
            hypergraph=self.result,
            spec=self.spec,
            factor_spec=self.factor_spec,
            matrix=self.matrix,
            psi=self.psi,
            audits=list(self.audits),
            report=self.report,
        )

    def get_pipeline_status(self) -> Dict[str, Any]:
        """
        Get current pipeline status

        Returns:
            Status dictionary
        """
        return {
            'state': self.state.value,
            'kind': self.factor_spec.kind,
            'refusals': [r.reason for r in self.refusals],
            'matrix': self.matrix.to_list() if self.matrix is not None else None,
            'vertices': len(self.result.vertices) if self.result is not None else 0,
            'edges': len(self.result.edges) if self.result is not None else 0,
            'audits': len(self.audits),
            'failed_audits': sum(1 for a in self.audits if not a.passed),
            'verified': self.report.passed if self.report is not None else None,
        }


def factorize(
    spec: DesignSpec,
    factor_spec: FactorSpec,
    seed: Optional[int] = None,
    audit: Optional[bool] = None,
) -> Factorization:
    """
    Run the pipeline and return its factorization

    Raises:
        FactorizationRefused: A necessary condition or the matrix step failed
    """
    pipeline = FactorizationPipeline(spec, factor_spec, seed=seed, audit=audit)
    pipeline.run_complete_pipeline()
    if pipeline.state == PipelineState.REFUSED:
        raise FactorizationRefused(pipeline.refusals)
    factorization = pipeline.get_factorization()
    if factorization is None:
        raise RuntimeError(f"Pipeline stopped in state {pipeline.state.value} without a result")
    return factorization


def r_factorize(spec: DesignSpec, R, seed: Optional[int] = None, audit: Optional[bool] = None) -> Factorization:
    """R-factorization of ΛK_n^H (or of a partite design)"""
    return factorize(spec, FactorSpec(tuple(R)), seed=seed, audit=audit)


def partite_r_factorize(spec: DesignSpec, R, seed: Optional[int] = None, audit: Optional[bool] = None) -> Factorization:
    """R-factorization of ΛK^H_{p_1,...,p_n}; unequal parts are refused"""
    if not spec.is_partite:
        raise DomainError("partite_r_factorize needs a spec with part sizes")
    return factorize(spec, FactorSpec(tuple(R)), seed=seed, audit=audit)


def qr_factorize(spec: DesignSpec, Q, R, seed: Optional[int] = None, audit: Optional[bool] = None) -> Factorization:
    """(Q,R)-factorization: factor i has every degree in [q_i, r_i]"""
    return factorize(spec, FactorSpec(tuple(R), tuple(Q)), seed=seed, audit=audit)


def almost_factorize(spec: DesignSpec, R, seed: Optional[int] = None, audit: Optional[bool] = None) -> Factorization:
    """Almost R-factorization: the (R − J_k, R)-factorization"""
    return factorize(spec, FactorSpec.almost_of(R), seed=seed, audit=audit)


if __name__ == "__main__":
    pipeline = FactorizationPipeline(DesignSpec.complete(4, [2], [1]), FactorSpec((1, 1, 1)))

    success = pipeline.run_complete_pipeline()

    if success:
        status = pipeline.get_pipeline_status()
        print("\nPipeline Status:")
        for key, value in status.items():
            print(f"  {key}: {value}")
