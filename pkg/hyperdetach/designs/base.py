"""
Base Design Classes
Design and factor specifications plus the abstract design interface
"""

from abc import ABC, abstractmethod
from dataclasses import dataclass
from itertools import combinations
from math import comb, prod
from typing import Any, Dict, Iterator, List, Optional, Tuple
import logging

from hyperdetach.exceptions import DomainError
from hyperdetach.hypergraph import Hypergraph

logger = logging.getLogger(__name__)


def _positive_ints(name: str, values, allow_zero: bool = False) -> Tuple[int, ...]:
    values = tuple(values)
    floor = 0 if allow_zero else 1
    for value in values:
        if isinstance(value, bool) or not isinstance(value, int) or value < floor:
            kind = "non-negative" if allow_zero else "positive"
            raise DomainError(f"{name} entries must be {kind} integers, got {value!r}")
    return values


@dataclass(frozen=True)
class DesignSpec:
    """
    ΛK_n^H, or its partite form when part sizes are given

    Attributes:
        n: Number of vertices (or parts)
        H: Distinct edge sizes h_1..h_m
        Lambda: Multiplicities λ_1..λ_m
        parts: Optional part sizes p_1..p_n
    """

    n: int
    H: Tuple[int, ...]
    Lambda: Tuple[int, ...]
    parts: Optional[Tuple[int, ...]] = None

    def __post_init__(self):
        object.__setattr__(self, 'H', _positive_ints('H', self.H))
        object.__setattr__(self, 'Lambda', _positive_ints('Lambda', self.Lambda))
        if self.parts is not None:
            object.__setattr__(self, 'parts', _positive_ints('parts', self.parts))

        if isinstance(self.n, bool) or not isinstance(self.n, int) or self.n < 1:
            raise DomainError(f"n must be a positive integer, got {self.n!r}")
        if not self.H:
            raise DomainError("H must name at least one edge size")
        if len(self.H) != len(self.Lambda):
            raise DomainError(f"H has {len(self.H)} entries but Lambda has {len(self.Lambda)}")
        if len(set(self.H)) != len(self.H):
            raise DomainError(f"Edge sizes must be distinct, got {list(self.H)}")
        for h in self.H:
            if h > self.n:
                raise DomainError(f"Edge size {h} exceeds n = {self.n}")
        if self.parts is not None:
            if len(self.parts) != self.n:
                raise DomainError(f"Expected {self.n} part sizes, got {len(self.parts)}")
            for h in self.H:
                if h < 2:
                    raise DomainError(f"Partite designs need edge sizes >= 2, got {h}")

    @classmethod
    def complete(cls, n: int, H, Lambda) -> 'DesignSpec':
        return cls(n, tuple(H), tuple(Lambda))

    @classmethod
    def partite(cls, n: int, H, Lambda, p: int) -> 'DesignSpec':
        """ΛK^H_{n×p}"""
        return cls(n, tuple(H), tuple(Lambda), (p,) * n)

    @property
    def m(self) -> int:
        return len(self.H)

    @property
    def is_partite(self) -> bool:
        return self.parts is not None

    @property
    def is_uniform(self) -> bool:
        return self.parts is None or len(set(self.parts)) == 1

    @property
    def part_size(self) -> int:
        """p for uniform parts, 1 for the non-partite design"""
        if self.parts is None:
            return 1
        if not self.is_uniform:
            raise DomainError(f"Part sizes {list(self.parts)} are not uniform")
        return self.parts[0]

    def size_classes(self) -> List[Tuple[int, int]]:
        """(h_j, λ_j) pairs"""
        return list(zip(self.H, self.Lambda))

    def regularity(self) -> int:
        """Σ λ_i C(n−1, h_i−1) p^{h_i−1}, the common vertex degree"""
        p = self.part_size
        return sum(lam * comb(self.n - 1, h - 1) * p ** (h - 1) for h, lam in self.size_classes())

    def class_edge_count(self, index: int) -> int:
        """Edges of size h_j: λ_j times the number of (transversal) h_j-subsets"""
        h, lam = self.H[index], self.Lambda[index]
        if self.parts is None:
            return lam * comb(self.n, h)
        return lam * sum(prod(chosen) for chosen in combinations(self.parts, h))

    def edge_count(self) -> int:
        return sum(self.class_edge_count(j) for j in range(self.m))

    def vertex_count(self) -> int:
        return self.n if self.parts is None else sum(self.parts)

    def canonical_parts(self) -> List[List[int]]:
        """
        Canonical vertex ids per part

        Part a holds the consecutive ids starting at p_1 + ... + p_{a}; for
        uniform parts vertex b of part a is a·p + b. The non-partite design
        has n singleton parts.
        """
        sizes = self.parts or (1,) * self.n
        parts, start = [], 0
        for size in sizes:
            parts.append(list(range(start, start + size)))
            start += size
        return parts

    def to_dict(self) -> Dict[str, Any]:
        document = {'n': self.n, 'H': list(self.H), 'lambda': list(self.Lambda)}
        if self.parts is not None:
            document['parts'] = list(self.parts)
        return document


@dataclass(frozen=True)
class FactorSpec:
    """
    Factor degree bounds: R, optional Q ≤ R, or almost-R (Q = R − J_k)
    """

    R: Tuple[int, ...]
    Q: Optional[Tuple[int, ...]] = None
    almost: bool = False

    def __post_init__(self):
        object.__setattr__(self, 'R', _positive_ints('R', self.R))
        if not self.R:
            raise DomainError("R must have at least one entry")
        if self.almost:
            if self.Q is not None:
                raise DomainError("An almost factorization derives Q from R; do not pass Q")
            object.__setattr__(self, 'Q', tuple(r - 1 for r in self.R))
        elif self.Q is not None:
            object.__setattr__(self, 'Q', _positive_ints('Q', self.Q, allow_zero=True))
            if len(self.Q) != len(self.R):
                raise DomainError(f"Q has {len(self.Q)} entries but R has {len(self.R)}")
            for i, (q, r) in enumerate(zip(self.Q, self.R), start=1):
                if q > r:
                    raise DomainError(f"Q must not exceed R: q_{i} = {q} > r_{i} = {r}")

    @classmethod
    def almost_of(cls, R) -> 'FactorSpec':
        return cls(tuple(R), almost=True)

    @property
    def k(self) -> int:
        return len(self.R)

    @property
    def kind(self) -> str:
        if self.almost:
            return 'almost'
        return 'R' if self.Q is None else 'QR'

    def lower(self) -> Tuple[int, ...]:
        """Per-factor lower degree bound"""
        return self.R if self.Q is None else self.Q

    def bounds(self) -> List[Tuple[int, int]]:
        return list(zip(self.lower(), self.R))

    def to_dict(self) -> Dict[str, Any]:
        document: Dict[str, Any] = {'kind': self.kind, 'R': list(self.R)}
        if self.Q is not None:
            document['Q'] = list(self.Q)
        return document


class BaseDesign(ABC):
    """Abstract base class for complete designs"""

    def __init__(self, name: str, spec: DesignSpec):
        """
        Initialize base design

        Args:
            name: Design name
            spec: DesignSpec this design realizes
        """
        self.name = name
        self.spec = spec
        self.metadata: Dict[str, Any] = {}

    @abstractmethod
    def edge_sets(self) -> Iterator[Tuple[int, Tuple[int, ...]]]:
        """
        Yield (size class index, vertex tuple) for every edge position

        Each position carries λ_j parallel edges.
        """

    def build(self) -> Hypergraph:
        """
        Realize the design with integer edge ids in size-class order

        Returns:
            Uncolored hypergraph on the canonical vertex ids
        """
        edges: Dict[int, List[int]] = {}
        for j, chosen in self.edge_sets():
            for _ in range(self.spec.Lambda[j]):
                edges[len(edges)] = list(chosen)
        vertices = [v for part in self.spec.canonical_parts() for v in part]
        hypergraph = Hypergraph.from_edges(vertices, edges)
        logger.info(f"Built {self.name}: {len(vertices)} vertices, {len(edges)} edges")
        return hypergraph

    def get_metadata(self) -> Dict[str, Any]:
        return {
            'name': self.name,
            'spec': self.spec.to_dict(),
            'edges': self.spec.edge_count(),
            **self.metadata,
        }
