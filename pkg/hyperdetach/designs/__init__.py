"""
Designs
Complete and partite designs, necessary conditions and distribution matrices
"""

from hyperdetach.designs.base import BaseDesign, DesignSpec, FactorSpec
from hyperdetach.designs.complete import CompleteDesign, build_design
from hyperdetach.designs.conditions import (
    Verdict,
    baranyai_condition,
    check_necessary,
    partite_baranyai_condition,
)
from hyperdetach.designs.matrix import (
    DistributionMatrix,
    Infeasible,
    MatrixProblem,
    solve_distribution_matrix,
)
from hyperdetach.designs.partite import PartiteDesign, build_partite_design


def design_for(spec: DesignSpec) -> BaseDesign:
    """The design class matching the spec"""
    return PartiteDesign(spec) if spec.is_partite else CompleteDesign(spec)


__all__ = [
    'BaseDesign', 'DesignSpec', 'FactorSpec',
    'CompleteDesign', 'PartiteDesign', 'build_design', 'build_partite_design', 'design_for',
    'Verdict', 'check_necessary', 'baranyai_condition', 'partite_baranyai_condition',
    'DistributionMatrix', 'Infeasible', 'MatrixProblem', 'solve_distribution_matrix',
]
