"""
Complete Multipartite Design ΛK^H_{p_1,...,p_n}
Only transversal edges: at most one vertex from each part.
"""

from itertools import combinations, product
from typing import Iterator, Tuple
import logging

from hyperdetach.designs.base import BaseDesign, DesignSpec
from hyperdetach.exceptions import DomainError
from hyperdetach.hypergraph import Hypergraph

logger = logging.getLogger(__name__)


class PartiteDesign(BaseDesign):
    """λ_j edges on every transversal h_j-subset"""

    def __init__(self, spec: DesignSpec):
        if not spec.is_partite:
            raise DomainError("PartiteDesign takes a spec with part sizes")
        super().__init__(f"K_{list(spec.parts)}^{list(spec.H)}", spec)

    def edge_sets(self) -> Iterator[Tuple[int, Tuple[int, ...]]]:
        parts = self.spec.canonical_parts()
        for j, h in enumerate(self.spec.H):
            for chosen_parts in combinations(range(self.spec.n), h):
                for chosen in product(*(parts[a] for a in chosen_parts)):
                    yield j, chosen


def build_partite_design(spec: DesignSpec) -> Hypergraph:
    """Build ΛK^H on the canonical partite vertex ids"""
    return PartiteDesign(spec).build()


if __name__ == "__main__":
    K22 = build_partite_design(DesignSpec.partite(2, [2], [1], 2))
    print(K22)
    print(K22.signature_counts())
