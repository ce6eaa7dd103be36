"""
Complete Multi-Uniform Design ΛK_n^H
"""

from itertools import combinations
from typing import Iterator, Tuple
import logging

from hyperdetach.designs.base import BaseDesign, DesignSpec
from hyperdetach.exceptions import DomainError
from hyperdetach.hypergraph import Hypergraph

logger = logging.getLogger(__name__)


class CompleteDesign(BaseDesign):
    """λ_j edges on every h_j-subset of n vertices"""

    def __init__(self, spec: DesignSpec):
        if spec.is_partite:
            raise DomainError("CompleteDesign takes a spec without part sizes")
        super().__init__(f"K_{spec.n}^{list(spec.H)}", spec)

    def edge_sets(self) -> Iterator[Tuple[int, Tuple[int, ...]]]:
        for j, h in enumerate(self.spec.H):
            yield from ((j, chosen) for chosen in combinations(range(self.spec.n), h))


def build_design(spec: DesignSpec) -> Hypergraph:
    """Build ΛK_n^H on vertices 0..n−1"""
    return CompleteDesign(spec).build()


if __name__ == "__main__":
    K4 = build_design(DesignSpec.complete(4, [2], [1]))
    print(K4)
    print(K4.degree_table())
