"""Good-labeler detection for pools with no perfect labeler.

Labelers are fixed classification functions; good ones sit within eps of
the hidden target, bad ones at least 4 eps away, and nothing lives in
between. Pairwise empirical disagreement separates the two kinds: two good
labelers disagree on at most a 2 eps mass, a good/bad pair on at least
3 eps, so a 2.5 eps edge rule over estimates accurate to eps/2 never joins
the communities. Good labelers form the giant component of the resulting
agreement graph.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .crowd import QueryLedger, UniformBuffer, UniformUnit, exact_disagreement_mass
from .errors import ParameterError
from .hypotheses import Hypothesis


class DisjointSet:
    """Union-find with path compression and union by size."""

    def __init__(self, n: int):
        self.parent = list(range(n))
        self.size = [1] * n

    def find(self, a: int) -> int:
        root = a
        while self.parent[root] != root:
            root = self.parent[root]
        while self.parent[a] != root:
            self.parent[a], a = root, self.parent[a]
        return root

    def union(self, a: int, b: int) -> None:
        ra, rb = self.find(a), self.find(b)
        if ra == rb:
            return
        if self.size[ra] < self.size[rb]:
            ra, rb = rb, ra
        self.parent[rb] = ra
        self.size[ra] += self.size[rb]


@dataclass
class AgreementGraph:
    """Undirected graph over labeler indices; edges only ever get added,
    so components only ever merge."""

    n: int
    edges: set = field(default_factory=set)

    def __post_init__(self):
        self._dsu = DisjointSet(self.n)

    def add_edge(self, i: int, j: int) -> None:
        self.edges.add((min(i, j), max(i, j)))
        self._dsu.union(i, j)

    def components(self) -> list[set]:
        by_root: dict[int, set] = {}
        for v in range(self.n):
            by_root.setdefault(self._dsu.find(v), set()).add(v)
        return sorted(by_root.values(), key=min)


def connected_components(graph: AgreementGraph) -> list[set]:
    """Partition of the vertices by edge connectivity, ordered by smallest
    member for determinism."""
    return graph.components()


class DetectionWorld:
    """A finite roster of labeler functions with a known target, validated
    against the good/bad error bands at construction."""

    def __init__(self, labelers, target: Hypothesis, eps: float, delta: float,
                 seed: int, distribution=UniformUnit()):
        if not 0.0 < eps < 0.25:
            raise ParameterError(f"eps must be in (0, 0.25), got {eps}")
        if not 0.0 < delta < 1.0:
            raise ParameterError(f"delta must be in (0, 1), got {delta}")
        self.labelers = tuple(labelers)
        self.target = target
        self.eps = eps
        self.delta = delta
        self.distribution = distribution
        self.rng = np.random.default_rng(seed)
        self.buffer = UniformBuffer(self.rng)
        self.ledger = QueryLedger()
        good = set()
        tol = 1e-9  # breakpoint geometry is exact up to float roundoff
        for idx, labeler in enumerate(self.labelers):
            err = exact_disagreement_mass(labeler, target, distribution)
            if err <= eps + tol:
                good.add(idx)
            elif err < 4.0 * eps - tol:
                raise ParameterError(
                    f"labeler {idx} has error {err:.4f} inside the forbidden "
                    f"band ({eps}, {4 * eps})")
        if len(good) < self.n // 2 + 1:
            raise ParameterError(
                f"need at least {self.n // 2 + 1} good labelers, got {len(good)}")
        self.good_indices = frozenset(good)

    @property
    def n(self) -> int:
        return len(self.labelers)

    @property
    def disagreement_sample_size(self) -> int:
        """Per-test sample size: ceil((48/eps) ln(8 n^2 / delta)).

        The 1/eps (not 1/eps^2) scaling is enough because every
        decision-relevant true disagreement is at most 5 eps, so a
        multiplicative Chernoff bound at scale eps gives eps/2 additive
        accuracy after a union bound over at most n^2 tested pairs.
        """
        return math.ceil((48.0 / self.eps)
                         * math.log(8.0 * self.n**2 / self.delta))


def disagree(world: DetectionWorld, i: int, j: int) -> float:
    """Empirical disagreement of two labelers on a fresh sample.

    Draws its own sample every call (shared samples would correlate the
    union-bounded tests); charges the full sample to both participants.
    """
    if i == j:
        raise ParameterError("disagreement test needs two distinct labelers")
    for idx in (i, j):
        if not 0 <= idx < world.n:
            raise ParameterError(f"labeler index {idx} out of range [0, {world.n})")
    m = world.disagreement_sample_size
    if isinstance(world.distribution, UniformUnit):
        xs = world.buffer.take(m)
        answers_i = world.labelers[i].evaluate_batch(xs)
        answers_j = world.labelers[j].evaluate_batch(xs)
        mismatches = int(np.count_nonzero(answers_i != answers_j))
    else:
        cum = world.distribution.cumulative()
        u = world.buffer.take(m)
        idxs = np.minimum(np.searchsorted(cum, u, side="right"),
                          len(world.distribution.values) - 1)
        mismatches = 0
        for value_idx in idxs:
            x = world.distribution.values[int(value_idx)]
            if world.labelers[i].evaluate(x) != world.labelers[j].evaluate(x):
                mismatches += 1
    world.ledger.charge(i, m)
    world.ledger.charge(j, m)
    return mismatches / m


def _random_pair(world: DetectionWorld) -> tuple[int, int]:
    i = min(int(world.buffer.take1() * world.n), world.n - 1)
    j = min(int(world.buffer.take1() * (world.n - 1)), world.n - 2)
    if j >= i:
        j += 1
    return i, j


def detect_good_labelers(world: DetectionWorld) -> set:
    """Identify the good labelers via the agreement graph.

    Step 1 tests ceil(16 ln(2) n) random pairs and adds an edge whenever the
    empirical disagreement is below 2.5 eps. Step 2 collects connected
    components with at least n/4 vertices. Step 3 tests every remaining
    vertex against the smallest-index representative of each large
    component. The largest component is returned (lexicographically first
    on a tie, which purity makes impossible outside statistical failures).
    """
    n = world.n
    graph = AgreementGraph(n)
    threshold = 2.5 * world.eps
    n_pairs = math.ceil(16.0 * math.log(2.0) * n)
    for _ in range(n_pairs):
        i, j = _random_pair(world)
        if disagree(world, i, j) < threshold:
            graph.add_edge(i, j)
    large = [c for c in graph.components() if len(c) >= n / 4.0]
    covered = set().union(*large) if large else set()
    representatives = [min(c) for c in large]
    for v in range(n):
        if v in covered:
            continue
        for rep in representatives:
            if disagree(world, v, rep) < threshold:
                graph.add_edge(v, rep)
    components = graph.components()
    best_size = max(len(c) for c in components)
    for component in components:  # ordered by smallest member
        if len(component) == best_size:
            return set(component)
    raise AssertionError("unreachable: at least one component exists")
