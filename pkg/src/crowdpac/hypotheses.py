"""Hypothesis classes with exact evaluation and exact consistency oracles.

Three concrete classes are shipped, each with a polynomial-time exact
consistency oracle: thresholds on [0,1], intervals on [0,1], and boolean
conjunctions over fixed-width bit vectors. Hypotheses are immutable and
safe to share across concurrent trials.

Instances are either floats in [0,1] (threshold / interval classes) or
fixed-width tuples of 0/1 ints (conjunction class). The values themselves
are the instance identity used for multiset bookkeeping.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import InstanceSpaceError, ParameterError

# +1 / -1 labels; negation is plain arithmetic negation.
Label = int
Instance = float | tuple[int, ...]
LabeledSample = list[tuple[Instance, Label]]

SCALAR = "scalar"


def _bits_space(width: int) -> tuple[str, int]:
    return ("bits", width)


class Hypothesis:
    """Base class; concrete hypotheses implement evaluate / instance_space."""

    def evaluate(self, x) -> Label:
        raise NotImplementedError

    def evaluate_batch(self, xs: np.ndarray) -> np.ndarray:
        """Vectorized evaluation over an array of scalar instances."""
        raise NotImplementedError

    @property
    def instance_space(self):
        raise NotImplementedError

    def check_instance(self, x) -> None:
        space = self.instance_space
        if space == SCALAR:
            if not isinstance(x, (float, int)) or isinstance(x, bool):
                raise InstanceSpaceError(f"expected scalar instance, got {x!r}")
            if not 0.0 <= float(x) <= 1.0:
                raise InstanceSpaceError(f"scalar instance {x!r} outside [0, 1]")
        else:
            _, width = space
            if not isinstance(x, tuple) or len(x) != width:
                raise InstanceSpaceError(
                    f"expected {width}-bit instance, got {x!r}")
            if any(b not in (0, 1) for b in x):
                raise InstanceSpaceError(f"bit vector {x!r} has non-binary entries")

    def breakpoints(self) -> list[float]:
        """Sorted points where a scalar hypothesis may change sign."""
        raise InstanceSpaceError(f"{type(self).__name__} is not piecewise on [0,1]")


@dataclass(frozen=True)
class Threshold(Hypothesis):
    """Predicts +1 iff x >= theta (boundary counts as positive)."""

    theta: float

    def evaluate(self, x) -> Label:
        self.check_instance(x)
        return 1 if x >= self.theta else -1

    def evaluate_batch(self, xs):
        return np.where(np.asarray(xs) >= self.theta, 1, -1)

    @property
    def instance_space(self):
        return SCALAR

    def breakpoints(self):
        return [self.theta]


@dataclass(frozen=True)
class Interval(Hypothesis):
    """Predicts +1 iff low <= x <= high; low > high denotes the empty
    (always negative) interval."""

    low: float
    high: float

    @classmethod
    def empty(cls) -> "Interval":
        return cls(1.0, 0.0)

    @property
    def is_empty(self) -> bool:
        return self.low > self.high

    def evaluate(self, x) -> Label:
        self.check_instance(x)
        return 1 if self.low <= x <= self.high else -1

    def evaluate_batch(self, xs):
        xs = np.asarray(xs)
        return np.where((xs >= self.low) & (xs <= self.high), 1, -1)

    @property
    def instance_space(self):
        return SCALAR

    def breakpoints(self):
        if self.is_empty:
            return []
        return sorted((self.low, self.high))


@dataclass(frozen=True)
class Conjunction(Hypothesis):
    """AND of literals over a fixed-width bit vector.

    positive_bits lists indices that must be 1, negative_bits indices that
    must be 0. Overlapping sets make the conjunction unsatisfiable (always
    predicts -1), which keeps the class closed under the oracle's
    no-positive-examples case.
    """

    width: int
    positive_bits: frozenset[int] = field(default_factory=frozenset)
    negative_bits: frozenset[int] = field(default_factory=frozenset)

    def __post_init__(self):
        for i in self.positive_bits | self.negative_bits:
            if not 0 <= i < self.width:
                raise ParameterError(f"literal index {i} outside width {self.width}")

    def evaluate(self, x) -> Label:
        self.check_instance(x)
        for i in self.positive_bits:
            if x[i] != 1:
                return -1
        for i in self.negative_bits:
            if x[i] != 0:
                return -1
        return 1

    @property
    def instance_space(self):
        return _bits_space(self.width)


@dataclass(frozen=True)
class Complement(Hypothesis):
    """Pointwise negation of another hypothesis."""

    inner: Hypothesis

    def evaluate(self, x) -> Label:
        return -self.inner.evaluate(x)

    def evaluate_batch(self, xs):
        return -self.inner.evaluate_batch(xs)

    @property
    def instance_space(self):
        return self.inner.instance_space

    def breakpoints(self):
        return self.inner.breakpoints()


@dataclass(frozen=True)
class Majority3(Hypothesis):
    """Majority vote of exactly three child hypotheses."""

    children: tuple[Hypothesis, Hypothesis, Hypothesis]

    def __post_init__(self):
        if len(self.children) != 3:
            raise ParameterError("majority composite takes exactly 3 children")
        spaces = {c.instance_space for c in self.children}
        if len(spaces) != 1:
            raise InstanceSpaceError(f"children live in different instance spaces: {spaces}")

    def evaluate(self, x) -> Label:
        votes = sum(c.evaluate(x) for c in self.children)
        return 1 if votes > 0 else -1

    def evaluate_batch(self, xs):
        votes = sum(c.evaluate_batch(xs) for c in self.children)
        return np.where(votes > 0, 1, -1)

    @property
    def instance_space(self):
        return self.children[0].instance_space

    def breakpoints(self):
        pts: list[float] = []
        for c in self.children:
            pts.extend(c.breakpoints())
        return sorted(set(pts))


@dataclass(frozen=True)
class HypothesisClass:
    """One of the three shipped classes, with its analytic VC dimension."""

    kind: str  # "threshold" | "interval" | "conjunction"
    width: int = 0  # bit width, conjunction class only

    def __post_init__(self):
        if self.kind not in ("threshold", "interval", "conjunction"):
            raise ParameterError(f"unknown hypothesis class kind {self.kind!r}")
        if self.kind == "conjunction" and self.width < 1:
            raise ParameterError("conjunction class needs a positive bit width")

    @property
    def vc_dimension(self) -> int:
        if self.kind == "threshold":
            return 1
        if self.kind == "interval":
            return 2
        return self.width

    @property
    def instance_space(self):
        return SCALAR if self.kind in ("threshold", "interval") else _bits_space(self.width)

    def contains(self, h: Hypothesis) -> bool:
        return {
            "threshold": isinstance(h, Threshold),
            "interval": isinstance(h, Interval),
            "conjunction": isinstance(h, Conjunction) and h.width == self.width,
        }[self.kind]

    def canonical_default(self) -> Hypothesis:
        """Returned by the oracle on an empty sample (total-function choice)."""
        if self.kind == "threshold":
            return Threshold(0.5)
        if self.kind == "interval":
            return Interval.empty()
        return Conjunction(self.width, positive_bits=frozenset(range(self.width)))


def evaluate(h: Hypothesis, x) -> Label:
    """Evaluate hypothesis h on instance x; composite forms return the
    majority of their three children."""
    return h.evaluate(x)


def _check_sample_space(cls: HypothesisClass, sample) -> None:
    probe = cls.canonical_default()
    for x, y in sample:
        probe.check_instance(x)
        if y not in (1, -1):
            raise ParameterError(f"label must be +1 or -1, got {y!r}")


def consistent_hypothesis(cls: HypothesisClass, sample) -> Hypothesis | None:
    """Exact consistency oracle: a hypothesis of the class with zero error
    on the sample, or None if none exists.

    Output is canonicalized for reproducibility: thresholds return the
    midpoint of the separating gap, intervals the tightest interval around
    the positives, conjunctions the maximal conjunction consistent with the
    positives (then verified on the negatives).
    """
    _check_sample_space(cls, sample)
    if not sample:
        return cls.canonical_default()
    if cls.kind == "threshold":
        return _consistent_threshold(sample)
    if cls.kind == "interval":
        return _consistent_interval(sample)
    return _consistent_conjunction(cls.width, sample)


def _consistent_threshold(sample) -> Threshold | None:
    positives = [float(x) for x, y in sample if y == 1]
    negatives = [float(x) for x, y in sample if y == -1]
    if positives and negatives:
        max_neg, min_pos = max(negatives), min(positives)
        if max_neg >= min_pos:
            return None
        return Threshold(0.5 * (max_neg + min_pos))
    if positives:
        # No negatives: treat the lower space boundary as a virtual negative.
        return Threshold(0.5 * min(positives))
    max_neg = max(negatives)
    if max_neg >= 1.0:
        return Threshold(2.0)  # all-negative hypothesis
    return Threshold(0.5 * (max_neg + 1.0))


def _consistent_interval(sample) -> Interval | None:
    positives = [float(x) for x, y in sample if y == 1]
    negatives = [float(x) for x, y in sample if y == -1]
    if not positives:
        return Interval.empty()
    lo, hi = min(positives), max(positives)
    if any(lo <= x <= hi for x in negatives):
        return None
    return Interval(lo, hi)


def _consistent_conjunction(width: int, sample) -> Conjunction | None:
    positives = [x for x, y in sample if y == 1]
    negatives = [x for x, y in sample if y == -1]
    if positives:
        pos_bits = frozenset(
            i for i in range(width) if all(x[i] == 1 for x in positives))
        neg_bits = frozenset(
            i for i in range(width) if all(x[i] == 0 for x in positives))
    else:
        # Maximal (unsatisfiable) conjunction; consistent with any negatives.
        pos_bits = frozenset(range(width))
        neg_bits = frozenset(range(width))
    candidate = Conjunction(width, pos_bits, neg_bits)
    for x in negatives:
        if candidate.evaluate(x) == 1:
            return None
    return candidate


def sample_complexity(cls: HypothesisClass, eps: float, delta: float,
                      c: float = 1.0) -> int:
    """Labeled-sample count sufficient for realizable PAC learning of the
    class to error eps with confidence 1 - delta.

    ceil((c/eps) * (d * ln(e/eps) + ln(1/delta))); the e/eps argument keeps
    the dimension term strictly positive for every eps < 1. The constant c
    trades runtime for test headroom and defaults to 1.
    """
    if not 0.0 < eps < 1.0:
        raise ParameterError(f"eps must be in (0, 1), got {eps}")
    if not 0.0 < delta < 1.0:
        raise ParameterError(f"delta must be in (0, 1), got {delta}")
    if c <= 0.0:
        raise ParameterError(f"constant must be positive, got {c}")
    d = cls.vc_dimension
    return math.ceil((c / eps) * (d * math.log(math.e / eps) + math.log(1.0 / delta)))
