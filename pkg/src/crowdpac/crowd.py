"""The simulated crowd: instance distribution, hidden target, labeler pool,
golden-query oracle, and exact accounting of every label query.

The pool supports two shapes. An infinite pool mints a fresh labeler
identity on every draw (perfect with the configured probability, otherwise
a behavior sampled from the bad mix), which makes load-1 claims testable.
A finite pool holds a fixed roster of behaviors addressed by index.

Accounting: every query is charged to a labeler in the ledger. Labelers
addressed individually (scalar draws, finite rosters, accepted conditioned
candidates) are tracked in an exact per-labeler map. One-shot committee
members minted in bulk are anonymous and tracked as a histogram of charge
sizes; totals, maximum load, distinct-labeler counts and the conservation
invariant are exact either way. Per-instance response tallies (consumed by
the adaptive adversary) are maintained by the scalar query path.
"""

from __future__ import annotations

import math
import struct
from collections import Counter
from dataclasses import dataclass, field

import numpy as np

from .errors import (
    InstanceSpaceError,
    ParameterError,
    RejectionBudgetError,
    TieError,
    UnknownLabelerError,
)
from .hypotheses import Complement, Hypothesis, HypothesisClass, Label

LabelerId = int

_MASK = (1 << 64) - 1


def mix64(z: int) -> int:
    """SplitMix64 finalizer; the package's one integer mixing function."""
    z = (z + 0x9E3779B97F4A7C15) & _MASK
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & _MASK
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & _MASK
    return (z ^ (z >> 31)) & _MASK


def instance_key(x) -> int:
    """Stable 64-bit key of an instance's identity (cross-run stable)."""
    if isinstance(x, tuple):
        k = len(x)
        for b in x:
            k = mix64(k * 2 + b)
        return k
    return struct.unpack("<Q", struct.pack("<d", float(x)))[0]


class UniformBuffer:
    """Block-buffered uniforms from one numpy Generator.

    All stochastic choices inside a World consume this single stream in
    call order, so identical (config, seed) gives bit-identical runs.
    """

    def __init__(self, rng: np.random.Generator, block: int = 8192):
        self._rng = rng
        self._block = block
        self._buf = rng.random(block)
        self._pos = 0

    def take1(self) -> float:
        if self._pos >= self._buf.shape[0]:
            self._buf = self._rng.random(self._block)
            self._pos = 0
        u = self._buf[self._pos]
        self._pos += 1
        return u

    def take(self, n: int) -> np.ndarray:
        out = np.empty(n)
        got = 0
        while got < n:
            avail = self._buf.shape[0] - self._pos
            if avail == 0:
                self._buf = self._rng.random(max(self._block, n - got))
                self._pos = 0
                avail = self._buf.shape[0]
            step = min(avail, n - got)
            out[got:got + step] = self._buf[self._pos:self._pos + step]
            self._pos += step
            got += step
        return out


# ---------------------------------------------------------------------------
# Instance distributions


@dataclass(frozen=True)
class UniformUnit:
    """Uniform distribution on [0, 1]."""


@dataclass(frozen=True)
class FiniteSupport:
    """Weighted finite multiset of instances (discretization device)."""

    values: tuple
    weights: tuple

    def __post_init__(self):
        if not self.values:
            raise ParameterError("finite support must be nonempty")
        if len(self.values) != len(self.weights):
            raise ParameterError("values and weights differ in length")
        if any(w <= 0 for w in self.weights):
            raise ParameterError("weights must be positive")

    def cumulative(self) -> np.ndarray:
        w = np.asarray(self.weights, dtype=float)
        return np.cumsum(w) / w.sum()


Distribution = UniformUnit | FiniteSupport


# ---------------------------------------------------------------------------
# Labeler behaviors


@dataclass(frozen=True)
class Perfect:
    """Always answers the hidden target."""


@dataclass(frozen=True)
class FixedHypothesis:
    """Always answers a fixed classifier."""

    hypothesis: Hypothesis


@dataclass(frozen=True)
class Colluder:
    """A block of labelers sharing one wrong classifier.

    hypothesis None means "negation of the target", wired at pool
    construction; group_id only distinguishes blocks in reports.
    """

    group_id: int = 0
    hypothesis: Hypothesis | None = None


@dataclass(frozen=True)
class HashNoise:
    """Flips the target's answer on a pseudorandom region of given mass.

    The region is a deterministic function of (salt, labeler id, instance
    identity), so each labeler is a fixed classification function.
    """

    flip_mass: float
    salt: int = 0

    def __post_init__(self):
        if not 0.0 <= self.flip_mass <= 1.0:
            raise ParameterError("flip mass must be in [0, 1]")


@dataclass(frozen=True)
class AdaptiveAdversary:
    """Answers the negation of the instance's majority-so-far (ledger
    tally); negation of the target on an empty or tied tally.

    Beyond the formal model, where bad labelers are fixed functions; kept
    for stress testing only.
    """


Behavior = Perfect | FixedHypothesis | Colluder | HashNoise | AdaptiveAdversary

_PERFECT = Perfect()


@dataclass(frozen=True)
class InfinitePoolSpec:
    """Fresh labeler per draw: Perfect with probability alpha, else a
    behavior from the weighted bad mix."""

    alpha: float
    bad_mix: tuple = ()

    def __post_init__(self):
        if not 0.0 <= self.alpha <= 1.0:
            raise ParameterError(f"alpha must be in [0, 1], got {self.alpha}")
        if self.alpha < 1.0 and not self.bad_mix:
            raise ParameterError("alpha < 1 requires a nonempty bad mix")
        if any(w <= 0 for _, w in self.bad_mix):
            raise ParameterError("bad mix weights must be positive")


@dataclass(frozen=True)
class FinitePoolSpec:
    """Fixed roster of behaviors, drawn uniformly by index."""

    behaviors: tuple

    def __post_init__(self):
        if not self.behaviors:
            raise ParameterError("finite pool must be nonempty")


# ---------------------------------------------------------------------------
# Query ledger


class QueryLedger:
    """Exact accounting of label and golden queries.

    total_queries always equals the sum of per-labeler counts (explicit map
    plus the anonymous bulk histogram); counters never decrease.
    """

    def __init__(self):
        self.total_queries = 0
        self.golden_queries = 0
        self.per_labeler: Counter = Counter()
        self.bulk_histogram: Counter = Counter()  # charge size -> labeler count
        self._bulk_distinct = 0
        self._max_load = 0
        self.response_tally: dict = {}  # instance -> [n_pos, n_neg]

    def charge(self, labeler: LabelerId, n: int = 1) -> None:
        self.per_labeler[labeler] += n
        self.total_queries += n
        if self.per_labeler[labeler] > self._max_load:
            self._max_load = self.per_labeler[labeler]

    def charge_bulk(self, histogram: dict[int, int]) -> None:
        """Charge anonymous fresh labelers: histogram[c] labelers, c queries each."""
        for per_each, count in histogram.items():
            if per_each <= 0 or count <= 0:
                continue
            self.bulk_histogram[per_each] += count
            self.total_queries += per_each * count
            self._bulk_distinct += count
            if per_each > self._max_load:
                self._max_load = per_each

    def record_response(self, x, label: Label) -> None:
        tally = self.response_tally.get(x)
        if tally is None:
            tally = [0, 0]
            self.response_tally[x] = tally
        if label == 1:
            tally[0] += 1
        else:
            tally[1] += 1

    def charge_golden(self) -> None:
        self.golden_queries += 1

    @property
    def max_load(self) -> int:
        return self._max_load

    @property
    def distinct_labelers(self) -> int:
        return len(self.per_labeler) + self._bulk_distinct

    def conserved(self) -> bool:
        explicit = sum(self.per_labeler.values())
        anonymous = sum(c * n for c, n in self.bulk_histogram.items())
        return self.total_queries == explicit + anonymous


@dataclass(frozen=True)
class MetricsRecord:
    """Ledger summary: total queries, cost per labeled example, max load,
    golden queries, distinct labelers used."""

    total_queries: int
    cost_per_label: float
    max_load: int
    golden_queries: int
    distinct_labelers: int


# ---------------------------------------------------------------------------
# Labeler pool


class LabelerPool:
    """Labeler roster plus ledger plus the current conditioning list."""

    def __init__(self, spec, buffer: UniformBuffer, target: Hypothesis,
                 conditioning_budget: int | None = None,
                 rejection_cap: int = 10_000):
        self.spec = spec
        self._buf = buffer
        self.target = target
        self.ledger = QueryLedger()
        self.conditioning: list[tuple] = []
        self.rejection_cap = rejection_cap
        self._behaviors: dict[LabelerId, object] = {}
        self._next_id = 0
        if isinstance(spec, InfinitePoolSpec):
            mix = tuple(
                (self._wire(b), w) for b, w in spec.bad_mix)
            self._bad_behaviors = tuple(b for b, _ in mix)
            total = sum(w for _, w in mix)
            self._bad_cum = np.cumsum([w / total for _, w in mix]) if mix else np.empty(0)
        else:
            self._finite = tuple(self._wire(b) for b in spec.behaviors)
        if conditioning_budget is None:
            conditioning_budget = self._default_budget()
        self.conditioning_budget = conditioning_budget

    def _wire(self, behavior):
        if isinstance(behavior, Colluder) and behavior.hypothesis is None:
            return Colluder(behavior.group_id, Complement(self.target))
        return behavior

    def _default_budget(self) -> int | None:
        if isinstance(self.spec, InfinitePoolSpec):
            a = self.spec.alpha
            if 0.0 < a < 1.0:
                return math.ceil((16.0 / a) * math.log(1.0 / a))
            if a >= 1.0:
                return 0  # all-perfect pool: pruning never triggers
            return None
        return len(self._finite)

    @property
    def is_infinite(self) -> bool:
        return isinstance(self.spec, InfinitePoolSpec)

    def target_label(self, x) -> Label:
        return self.target.evaluate(x)

    # -- draws ------------------------------------------------------------

    def _sample_behavior(self):
        u = self._buf.take1()
        if u < self.spec.alpha:
            return _PERFECT
        if len(self._bad_behaviors) == 1:
            return self._bad_behaviors[0]
        v = self._buf.take1()
        idx = int(np.searchsorted(self._bad_cum, v, side="right"))
        return self._bad_behaviors[min(idx, len(self._bad_behaviors) - 1)]

    def _mint(self, behavior) -> LabelerId:
        labeler = self._next_id
        self._next_id += 1
        self._behaviors[labeler] = behavior
        return labeler

    def _reserve_ids(self, n: int) -> int:
        """Allocate n anonymous fresh ids; returns the first id."""
        first = self._next_id
        self._next_id += n
        return first

    def draw_labeler(self) -> LabelerId:
        """Draw one labeler; minting and drawing are free, queries are charged."""
        if self.is_infinite:
            return self._mint(self._sample_behavior())
        u = self._buf.take1()
        return min(int(u * len(self._finite)), len(self._finite) - 1)

    def behavior_of(self, labeler: LabelerId):
        if not self.is_infinite:
            if not 0 <= labeler < len(self._finite):
                raise UnknownLabelerError(labeler)
            return self._finite[labeler]
        try:
            return self._behaviors[labeler]
        except KeyError:
            raise UnknownLabelerError(labeler) from None

    def answer_of(self, labeler: LabelerId, x) -> Label:
        """The labeler's answer without any ledger charge (audit helper)."""
        return self._answer(self.behavior_of(labeler), labeler, x)

    def _answer(self, behavior, labeler: LabelerId, x) -> Label:
        if isinstance(behavior, Perfect):
            return self.target_label(x)
        if isinstance(behavior, (FixedHypothesis, Colluder)):
            return behavior.hypothesis.evaluate(x)
        if isinstance(behavior, HashNoise):
            u = mix64(mix64(behavior.salt ^ instance_key(x)) ^ labeler) / 2.0**64
            truth = self.target_label(x)
            return -truth if u < behavior.flip_mass else truth
        # adaptive adversary: negate the majority-so-far
        tally = self.ledger.response_tally.get(x)
        if tally is None or tally[0] == tally[1]:
            return -self.target_label(x)
        return -1 if tally[0] > tally[1] else 1

    def query_labeler(self, labeler: LabelerId, x) -> Label:
        """Charge one query against the labeler and return its answer."""
        answer = self._answer(self.behavior_of(labeler), labeler, x)
        self.ledger.charge(labeler)
        self.ledger.record_response(x, answer)
        return answer

    def draw_conditioned_labeler(self, conditioning) -> LabelerId:
        """Rejection-sample a labeler agreeing with every conditioning pair.

        Each candidate is probed on the conditioning pairs in order (every
        probe is a charged query against that candidate) and accepted iff
        all answers match.
        """
        if not conditioning:
            return self.draw_labeler()
        for _ in range(self.rejection_cap):
            candidate = self.draw_labeler()
            accepted = True
            for cx, cy in conditioning:
                if self.query_labeler(candidate, cx) != cy:
                    accepted = False
                    break
            if accepted:
                return candidate
        raise RejectionBudgetError(
            f"no labeler agreed with {len(conditioning)} conditioning pairs "
            f"within {self.rejection_cap} candidates")

    def add_conditioning(self, x, y: Label) -> None:
        if (self.conditioning_budget is not None
                and len(self.conditioning) >= self.conditioning_budget):
            raise RejectionBudgetError(
                f"conditioning list would exceed its budget of {self.conditioning_budget}")
        self.conditioning.append((x, y))

    # -- bulk committees ---------------------------------------------------

    def _has_adaptive(self) -> bool:
        if self.is_infinite:
            return any(isinstance(b, AdaptiveAdversary) for b in self._bad_behaviors)
        return any(isinstance(b, AdaptiveAdversary) for b in self._finite)

    def query_committee(self, x, k: int) -> tuple[int, int]:
        """Query k freshly drawn labelers on x; returns (n_pos, n_neg).

        Semantically equivalent to k draw_labeler + query_labeler calls;
        infinite pools without an adaptive adversary use an aggregate
        fast path (fresh one-shot members stay anonymous in the ledger).
        """
        if k <= 0:
            raise ParameterError("committee size must be positive")
        if not self.is_infinite or self._has_adaptive():
            n_pos = 0
            for _ in range(k):
                labeler = self.draw_labeler()
                if self.query_labeler(labeler, x) == 1:
                    n_pos += 1
            return n_pos, k - n_pos
        u = self._buf.take(k)
        n_perfect = int(np.count_nonzero(u < self.spec.alpha))
        counts = self._split_bad(k - n_perfect)
        truth = self.target_label(x)
        n_pos = n_perfect if truth == 1 else 0
        for behavior, count in counts:
            if count == 0:
                continue
            n_pos += self._bulk_positive(behavior, x, count, truth)
        self.ledger.charge_bulk({1: k})
        return n_pos, k - n_pos

    def _split_bad(self, n_bad: int) -> list[tuple]:
        if n_bad == 0 or not self._bad_behaviors:
            return []
        if len(self._bad_behaviors) == 1:
            return [(self._bad_behaviors[0], n_bad)]
        v = self._buf.take(n_bad)
        idx = np.searchsorted(self._bad_cum, v, side="right")
        idx = np.minimum(idx, len(self._bad_behaviors) - 1)
        binned = np.bincount(idx, minlength=len(self._bad_behaviors))
        return list(zip(self._bad_behaviors, binned.tolist()))

    def _bulk_positive(self, behavior, x, count: int, truth: Label) -> int:
        """Positive answers among `count` fresh labelers of one behavior."""
        if isinstance(behavior, (FixedHypothesis, Colluder)):
            return count if behavior.hypothesis.evaluate(x) == 1 else 0
        if isinstance(behavior, HashNoise):
            first = self._reserve_ids(count)
            ids = np.arange(first, first + count, dtype=np.uint64)
            flips = self._hash_flips(behavior, x, ids)
            n_flipped = int(np.count_nonzero(flips))
            return count - n_flipped if truth == 1 else n_flipped
        raise ParameterError(f"behavior {behavior!r} has no bulk path")

    def _hash_flips(self, behavior: HashNoise, x, ids: np.ndarray) -> np.ndarray:
        """Vectorized flip decisions; matches the scalar path's mixer."""
        base = np.uint64(mix64(behavior.salt ^ instance_key(x)))
        with np.errstate(over="ignore"):
            z = (ids ^ base) + np.uint64(0x9E3779B97F4A7C15)
            z = (z ^ (z >> np.uint64(30))) * np.uint64(0xBF58476D1CE4E5B9)
            z = (z ^ (z >> np.uint64(27))) * np.uint64(0x94D049BB133111EB)
            z = z ^ (z >> np.uint64(31))
        return (z / 2.0**64) < behavior.flip_mass

    def query_conditioned_committee(self, x, k: int) -> tuple[int, int]:
        """Query k fresh labelers drawn from the pool conditioned on the
        current conditioning list; returns (n_pos, n_neg).

        Equivalent to k draw_conditioned_labeler + query_labeler calls.
        Rejected candidates are charged for the probes they answered before
        their first mismatch; accepted candidates are charged the full
        conditioning length plus the query on x.
        """
        if not self.conditioning:
            return self.query_committee(x, k)
        if not self.is_infinite or self._has_adaptive():
            n_pos = 0
            for _ in range(k):
                labeler = self.draw_conditioned_labeler(self.conditioning)
                if self.query_labeler(labeler, x) == 1:
                    n_pos += 1
            return n_pos, k - n_pos
        return self._bulk_conditioned(x, k)

    def _bulk_conditioned(self, x, k: int) -> tuple[int, int]:
        """Vectorized conditioned committee. Candidates are generated and
        cut off in sequential order, so the accounting matches a candidate-
        by-candidate rejection loop exactly."""
        cond = self.conditioning
        s = len(cond)
        truth = self.target_label(x)
        cond_truth = [self.target_label(cx) for cx, _ in cond]
        # Deterministic shared behaviors either always pass the conditioning
        # or always fail at the same probe index.
        perfect_fail = _first_fail(cond_truth, cond)
        fixed_fail = {}
        fixed_pos = {}
        for behavior in self._bad_behaviors:
            if isinstance(behavior, (FixedHypothesis, Colluder)):
                fixed_fail[behavior] = _first_fail(
                    [behavior.hypothesis.evaluate(cx) for cx, _ in cond], cond)
                fixed_pos[behavior] = behavior.hypothesis.evaluate(x) == 1
        n_pos = 0
        accepted = 0
        hist: Counter = Counter()
        since_accept = 0
        while accepted < k:
            block = min(4096, max(128, 3 * (k - accepted)))
            u = self._buf.take(block)
            perfect_mask = u < self.spec.alpha
            codes = np.zeros(block, dtype=np.int64)  # 0 = perfect, 1 + j = bad j
            n_bad = int(np.count_nonzero(~perfect_mask))
            if n_bad:
                if len(self._bad_behaviors) == 1:
                    codes[~perfect_mask] = 1
                else:
                    v = self._buf.take(n_bad)
                    j = np.searchsorted(self._bad_cum, v, side="right")
                    codes[~perfect_mask] = 1 + np.minimum(j, len(self._bad_behaviors) - 1)
            first_id = self._reserve_ids(block)
            pass_mask = np.zeros(block, dtype=bool)
            fail_idx = np.zeros(block, dtype=np.int64)
            pos_on_x = np.zeros(block, dtype=bool)
            if perfect_fail is None:
                pass_mask[perfect_mask] = True
                pos_on_x[perfect_mask] = truth == 1
            else:
                fail_idx[perfect_mask] = perfect_fail
            for code, behavior in enumerate(self._bad_behaviors, start=1):
                sel = np.flatnonzero(codes == code)
                if sel.size == 0:
                    continue
                if isinstance(behavior, (FixedHypothesis, Colluder)):
                    if fixed_fail[behavior] is None:
                        pass_mask[sel] = True
                        pos_on_x[sel] = fixed_pos[behavior]
                    else:
                        fail_idx[sel] = fixed_fail[behavior]
                else:  # HashNoise: per-candidate probe outcomes
                    ids = (first_id + sel).astype(np.uint64)
                    agree = np.ones(sel.size, dtype=bool)
                    fidx = np.zeros(sel.size, dtype=np.int64)
                    for jc, (cx, cy) in enumerate(cond):
                        flips = self._hash_flips(behavior, cx, ids)
                        answers = np.where(flips, -cond_truth[jc], cond_truth[jc])
                        mismatch = agree & (answers != cy)
                        fidx[mismatch] = jc
                        agree &= ~mismatch
                    pass_mask[sel] = agree
                    fail_idx[sel[~agree]] = fidx[~agree]
                    flips_x = self._hash_flips(behavior, x, ids)
                    pos_on_x[sel] = np.where(flips_x, -truth, truth) == 1
            # Cut the block at the candidate that completes the committee;
            # later candidates are never drawn.
            cum = np.cumsum(pass_mask)
            need = k - accepted
            used = int(np.searchsorted(cum, need)) + 1 if cum[-1] >= need else block
            use_pass = pass_mask[:used]
            n_acc = int(np.count_nonzero(use_pass))
            accepted += n_acc
            n_pos += int(np.count_nonzero(pos_on_x[:used] & use_pass))
            rejected = fail_idx[:used][~use_pass]
            if rejected.size:
                for value, count in zip(*np.unique(rejected, return_counts=True)):
                    hist[int(value) + 1] += int(count)
            if n_acc:
                hist[s + 1] += n_acc
                since_accept = 0
            else:
                since_accept += used
                if since_accept >= self.rejection_cap:
                    raise RejectionBudgetError(
                        f"no labeler agreed with {s} conditioning pairs within "
                        f"{since_accept} candidates")
        self.ledger.charge_bulk(dict(hist))
        return n_pos, k - n_pos


# ---------------------------------------------------------------------------
# World


class World:
    """One trial's universe: distribution, hidden target, labeler pool,
    and a deterministic random stream. Confined to a single trial."""

    def __init__(self, distribution, hypothesis_class: HypothesisClass,
                 target: Hypothesis, pool_spec, seed: int,
                 conditioning_budget: int | None = None,
                 rejection_cap: int = 10_000):
        if not hypothesis_class.contains(target):
            raise ParameterError(
                f"target {target!r} is not a member of the {hypothesis_class.kind} class")
        if isinstance(distribution, FiniteSupport):
            probe = hypothesis_class.canonical_default()
            for v in distribution.values:
                probe.check_instance(v)
        self.distribution = distribution
        self.hypothesis_class = hypothesis_class
        self.target = target
        self.seed = seed
        self.rng = np.random.default_rng(seed)
        self.buffer = UniformBuffer(self.rng)
        self.pool = LabelerPool(pool_spec, self.buffer, target,
                                conditioning_budget=conditioning_budget,
                                rejection_cap=rejection_cap)
        if isinstance(distribution, FiniteSupport):
            self._cum = distribution.cumulative()

    @property
    def ledger(self) -> QueryLedger:
        return self.pool.ledger

    def draw_instance(self):
        """One i.i.d. draw from the instance distribution; never charged."""
        u = self.buffer.take1()
        if isinstance(self.distribution, UniformUnit):
            return float(u)
        idx = int(np.searchsorted(self._cum, u, side="right"))
        return self.distribution.values[min(idx, len(self.distribution.values) - 1)]

    def draw_instances(self, n: int) -> list:
        u = self.buffer.take(n)
        if isinstance(self.distribution, UniformUnit):
            return [float(v) for v in u]
        idx = np.searchsorted(self._cum, u, side="right")
        idx = np.minimum(idx, len(self.distribution.values) - 1)
        return [self.distribution.values[int(i)] for i in idx]

    def draw_instance_array(self, n: int) -> np.ndarray:
        """Scalar-distribution batch draw as a float array."""
        if not isinstance(self.distribution, UniformUnit):
            raise InstanceSpaceError("array draws require the uniform distribution")
        return self.buffer.take(n)

    def target_label(self, x) -> Label:
        return self.target.evaluate(x)

    def golden_query(self, x) -> Label:
        """Directly query the hidden target; counts only against the
        golden-query budget."""
        self.ledger.charge_golden()
        return self.target_label(x)


# ---------------------------------------------------------------------------
# Majority votes and reports


def majority_label(labels) -> Label:
    """Strict majority of an odd-length list of labels."""
    if not labels:
        raise ParameterError("majority of an empty list")
    if len(labels) % 2 == 0:
        raise TieError(f"even committee of {len(labels)} labels may tie")
    return 1 if sum(labels) > 0 else -1


def majority_size(labels) -> float:
    """Fraction of the list agreeing with its majority value."""
    if not labels:
        raise ParameterError("majority size of an empty list")
    n_pos = sum(1 for y in labels if y == 1)
    return max(n_pos, len(labels) - n_pos) / len(labels)


def majority_from_counts(n_pos: int, n_neg: int) -> Label:
    if (n_pos + n_neg) % 2 == 0:
        raise TieError(f"even committee of {n_pos + n_neg} labels may tie")
    return 1 if n_pos > n_neg else -1


def majority_size_from_counts(n_pos: int, n_neg: int) -> float:
    if n_pos + n_neg == 0:
        raise ParameterError("majority size of an empty committee")
    return max(n_pos, n_neg) / (n_pos + n_neg)


def ledger_report(pool: LabelerPool, m_realizable: int) -> MetricsRecord:
    """Summarize the ledger relative to the realizable-PAC sample size."""
    if m_realizable <= 0:
        raise ParameterError("m_realizable must be positive")
    ledger = pool.ledger
    return MetricsRecord(
        total_queries=ledger.total_queries,
        cost_per_label=ledger.total_queries / m_realizable,
        max_load=ledger.max_load,
        golden_queries=ledger.golden_queries,
        distinct_labelers=ledger.distinct_labelers,
    )


def _first_fail(answers, cond) -> int | None:
    """Index of the first conditioning pair a deterministic labeler gets
    wrong, or None if it passes all of them."""
    for j, ((_, cy), ans) in enumerate(zip(cond, answers)):
        if ans != cy:
            return j
    return None


def exact_disagreement_mass(h1: Hypothesis, h2: Hypothesis, distribution) -> float:
    """Exact probability mass where two hypotheses disagree.

    Piecewise-constant scalar hypotheses under the uniform distribution are
    resolved by breakpoint geometry; finite supports by direct enumeration.
    """
    if isinstance(distribution, FiniteSupport):
        w = np.asarray(distribution.weights, dtype=float)
        disagree = np.fromiter(
            (h1.evaluate(v) != h2.evaluate(v) for v in distribution.values),
            dtype=bool, count=len(distribution.values))
        return float(w[disagree].sum() / w.sum())
    points = sorted({0.0, 1.0}
                    | {p for p in h1.breakpoints() if 0.0 < p < 1.0}
                    | {p for p in h2.breakpoints() if 0.0 < p < 1.0})
    mass = 0.0
    for a, b in zip(points, points[1:]):
        mid = 0.5 * (a + b)
        if h1.evaluate(mid) != h2.evaluate(mid):
            mass += b - a
    return mass
