"""
Necessary Conditions for Factorizations
Degree-sum conditions and the equal-parts requirement. Matrix feasibility is
decided separately by the distribution matrix solver.
"""

from dataclasses import dataclass, field
from math import comb
from typing import Any, Dict, List
import logging

from hyperdetach.arithmetic import divides
from hyperdetach.designs.base import DesignSpec, FactorSpec
from hyperdetach.exceptions import Refusal

logger = logging.getLogger(__name__)


@dataclass
class Verdict:
    """Outcome of the necessary-condition check"""

    refusals: List[Refusal] = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return not self.refusals

    def reasons(self) -> List[str]:
        return [r.reason for r in self.refusals]

    def to_dict(self) -> Dict[str, Any]:
        return {'passed': self.passed, 'refusals': [r.to_dict() for r in self.refusals]}


def equal_parts_refusal(spec: DesignSpec) -> List[Refusal]:
    """Refuse partite specs whose parts differ in size"""
    if spec.parts is None or spec.is_uniform:
        return []
    first = spec.parts[0]
    index = next(i for i, p in enumerate(spec.parts) if p != first)
    return [Refusal(
        condition='equal_parts',
        relation='p_a = p_b',
        lhs=first,
        rhs=spec.parts[index],
        reason='unequal part sizes',
        detail={'parts': list(spec.parts), 'a': 1, 'b': index + 1},
    )]


def check_necessary(spec: DesignSpec, fac: FactorSpec) -> Verdict:
    """
    Evaluate the degree-sum conditions for an R-, (Q,R)- or almost-R-factorization

    Args:
        spec: Design specification
        fac: Factor specification

    Returns:
        Verdict carrying one Refusal per failed condition
    """
    verdict = Verdict(equal_parts_refusal(spec))
    if not verdict.passed:
        logger.warning(f"Necessary conditions failed: {verdict.reasons()}")
        return verdict

    degree = spec.regularity()
    s_r = sum(fac.R)
    if fac.kind == 'R':
        if s_r != degree:
            verdict.refusals.append(Refusal(
                condition='degree_sum',
                relation='s(R) = d',
                lhs=s_r,
                rhs=degree,
                reason=f"s(R) = {s_r} differs from the design degree {degree}",
            ))
    else:
        s_q = sum(fac.Q)
        if s_q > degree:
            verdict.refusals.append(Refusal(
                condition='degree_sum_lower',
                relation='s(Q) <= d',
                lhs=s_q,
                rhs=degree,
                reason=f"s(Q) = {s_q} exceeds the design degree {degree}",
            ))
        if degree > s_r:
            verdict.refusals.append(Refusal(
                condition='degree_sum_upper',
                relation='d <= s(R)',
                lhs=degree,
                rhs=s_r,
                reason=f"the design degree {degree} exceeds s(R) = {s_r}",
            ))

    if not verdict.passed:
        logger.warning(f"Necessary conditions failed: {verdict.reasons()}")
    return verdict


def baranyai_condition(n: int, h: int, r: int) -> bool:
    """K_n^h is r-factorizable iff h | rn and r | C(n−1, h−1)"""
    return divides(h, r * n) and divides(r, comb(n - 1, h - 1))


def partite_baranyai_condition(n: int, p: int, h: int, r: int) -> bool:
    """K^h_{n×p} is r-factorizable iff h | npr and r | C(n−1, h−1)·p^{h−1}"""
    return divides(h, n * p * r) and divides(r, comb(n - 1, h - 1) * p ** (h - 1))
