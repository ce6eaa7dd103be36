"""
Distribution Matrix Solver

Finds a k×m non-negative integer matrix A with fixed column sums
s(A_j) = λ_j·C(n, h_j)·p^{h_j} and row constraints
N·q_i ≤ Σ_j a_ij·h_j ≤ N·r_i, where N = n (or n·p for partite designs).

Search is depth-first over rows, each row enumerated in lexicographic order,
with failing (row, remaining column sums) states memoized. The first matrix
found is the lexicographically smallest in row-major order.
"""

from dataclasses import dataclass
from typing import Any, Dict, Iterator, List, Optional, Set, Tuple, Union
import logging

import numpy as np
import pandas as pd

from hyperdetach.designs.base import DesignSpec, FactorSpec
from hyperdetach.exceptions import Refusal

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class MatrixProblem:
    """Column sums, edge sizes and per-row bounds on A·H"""
    H: Tuple[int, ...]
    column_sums: Tuple[int, ...]
    row_lower: Tuple[int, ...]
    row_upper: Tuple[int, ...]
    relation: str

    @classmethod
    def from_specs(cls, spec: DesignSpec, fac: FactorSpec) -> 'MatrixProblem':
        p = spec.part_size
        scale = spec.n * p
        column_sums = tuple(spec.class_edge_count(j) for j in range(spec.m))
        prefix = "np" if spec.is_partite else "n"
        relation = f"AH={prefix}R" if fac.kind == 'R' else f"{prefix}Q<=AH<={prefix}R"
        return cls(
            H=spec.H,
            column_sums=column_sums,
            row_lower=tuple(scale * q for q in fac.lower()),
            row_upper=tuple(scale * r for r in fac.R),
            relation=relation,
        )

    @property
    def k(self) -> int:
        return len(self.row_upper)

    @property
    def m(self) -> int:
        return len(self.H)


@dataclass(frozen=True)
class DistributionMatrix:
    """A solution A together with the problem it solves"""

    A: np.ndarray
    problem: MatrixProblem

    def violations(self) -> List[str]:
        """Independent recheck of every constraint; empty when A is valid"""
        problems = []
        A = np.asarray(self.A, dtype=np.int64)
        if A.shape != (self.problem.k, self.problem.m):
            return [f"shape {A.shape} != ({self.problem.k}, {self.problem.m})"]
        if (A < 0).any():
            problems.append("negative entry")
        for j, (got, want) in enumerate(zip(A.sum(axis=0), self.problem.column_sums), start=1):
            if got != want:
                problems.append(f"column {j}: s(A_{j}) = {got} != {want}")
        row_sums = A @ np.asarray(self.problem.H, dtype=np.int64)
        for i, (got, lo, hi) in enumerate(
            zip(row_sums, self.problem.row_lower, self.problem.row_upper), start=1
        ):
            if not lo <= got <= hi:
                problems.append(f"row {i}: (AH)_{i} = {got} outside [{lo}, {hi}]")
        return problems

    @property
    def valid(self) -> bool:
        return not self.violations()

    def to_list(self) -> List[List[int]]:
        return [[int(x) for x in row] for row in self.A]

    def to_frame(self) -> pd.DataFrame:
        columns = [f"h={h}" for h in self.problem.H]
        frame = pd.DataFrame(self.to_list(), columns=columns)
        frame.index = [f"factor {i}" for i in range(1, self.problem.k + 1)]
        return frame


@dataclass(frozen=True)
class Infeasible:
    """No matrix satisfies the constraints; the refusal names a witness"""

    refusal: Refusal

    @property
    def reason(self) -> str:
        return self.refusal.reason


def row_candidates(budget: Tuple[int, ...], H: Tuple[int, ...], lower: int, upper: int) -> Iterator[Tuple[int, ...]]:
    """Rows a ≤ budget with lower ≤ a·H ≤ upper, in lexicographic order"""
    m = len(H)
    reach = [0] * (m + 1)
    for j in range(m - 1, -1, -1):
        reach[j] = reach[j + 1] + budget[j] * H[j]

    row = [0] * m

    def extend(j: int, total: int) -> Iterator[Tuple[int, ...]]:
        if j == m:
            if lower <= total <= upper:
                yield tuple(row)
            return
        most = min(budget[j], (upper - total) // H[j])
        for a in range(0, most + 1):
            if total + a * H[j] + reach[j + 1] < lower:
                continue
            row[j] = a
            yield from extend(j + 1, total + a * H[j])
        row[j] = 0

    yield from extend(0, 0)


def _search(problem: MatrixProblem) -> Optional[List[Tuple[int, ...]]]:
    failed: Set[Tuple[int, Tuple[int, ...]]] = set()
    k, H = problem.k, problem.H

    def fill(i: int, remaining: Tuple[int, ...]) -> Optional[List[Tuple[int, ...]]]:
        if i == k - 1:
            total = sum(a * h for a, h in zip(remaining, H))
            if problem.row_lower[i] <= total <= problem.row_upper[i]:
                return [remaining]
            return None
        if (i, remaining) in failed:
            return None
        for row in row_candidates(remaining, H, problem.row_lower[i], problem.row_upper[i]):
            rest = tuple(c - a for c, a in zip(remaining, row))
            found = fill(i + 1, rest)
            if found is not None:
                return [row] + found
        failed.add((i, remaining))
        return None

    return fill(0, problem.column_sums)


def _witness(problem: MatrixProblem) -> Refusal:
    reason = f"{problem.relation} infeasible"
    for i in range(problem.k):
        lo, hi = problem.row_lower[i], problem.row_upper[i]
        if next(row_candidates(problem.column_sums, problem.H, lo, hi), None) is None:
            return Refusal(
                condition='matrix_row',
                relation=f"{lo} <= (AH)_{i + 1} <= {hi}",
                lhs=list(problem.H),
                rhs=[lo, hi],
                reason=reason,
                detail={'row': i + 1, 'H': list(problem.H), 'column_sums': list(problem.column_sums)},
            )
    total = sum(c * h for c, h in zip(problem.column_sums, problem.H))
    return Refusal(
        condition='matrix',
        relation="Σ lower <= Σ s(A_j) h_j <= Σ upper with integral rows",
        lhs=total,
        rhs=[sum(problem.row_lower), sum(problem.row_upper)],
        reason=reason,
        detail={'H': list(problem.H), 'column_sums': list(problem.column_sums),
                'row_lower': list(problem.row_lower), 'row_upper': list(problem.row_upper)},
    )


def solve_matrix_problem(problem: MatrixProblem) -> Union[DistributionMatrix, Infeasible]:
    """Solve a prepared problem; the result is rechecked before returning"""
    rows = _search(problem)
    if rows is None:
        witness = _witness(problem)
        logger.warning(f"Distribution matrix infeasible: {witness.relation}")
        return Infeasible(witness)

    matrix = DistributionMatrix(np.array(rows, dtype=np.int64).reshape(problem.k, problem.m), problem)
    problems = matrix.violations()
    if problems:
        raise RuntimeError(f"Distribution matrix fails its own constraints: {problems}")
    logger.info(f"Distribution matrix found: {matrix.to_list()}")
    return matrix


def solve_distribution_matrix(spec: DesignSpec, fac: FactorSpec) -> Union[DistributionMatrix, Infeasible]:
    """
    Find the distribution matrix for a design and factor specification

    Args:
        spec: Design specification
        fac: Factor specification

    Returns:
        DistributionMatrix, or Infeasible carrying an unsatisfiable-constraint witness
    """
    return solve_matrix_problem(MatrixProblem.from_specs(spec, fac))


def matrix_to_dict(result: Union[DistributionMatrix, Infeasible]) -> Dict[str, Any]:
    if isinstance(result, Infeasible):
        return {'feasible': False, 'refusal': result.refusal.to_dict()}
    return {'feasible': True, 'A': result.to_list(), 'H': list(result.problem.H)}
