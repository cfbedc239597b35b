"""Learning algorithms over the simulated crowd.

Five routes from noisy labelers to a low-error classifier:

* ``baseline``       — majority-vote every instance with a large committee,
                       then run the consistency oracle once.
* ``filter_instances`` — probabilistic filtering: stream one fresh labeler
                       at a time per instance and drop the instance as soon
                       as the running majority agrees with a reference
                       hypothesis at an odd round.
* ``interleave_learn`` — three-stage boosting that interleaves querying and
                       learning; needs a strong perfect majority.
* ``prune_and_label`` / ``robust_learn`` — committee labeling that spends a
                       golden query to prune bad labelers whenever the
                       majority is weak; works for any positive perfect
                       fraction.
* ``detect``-style routines live in the detection module.

``ruin_probability`` is the analytic oracle used by tests to pin down the
filter's retention probabilities: the stopping rule is a biased random walk
and early agreement is the classic gambler's-ruin event.

All Theta-constants are explicit keyword parameters with defaults chosen so
the underlying concentration arguments hold with slack; they are tunable
from experiment configs.
"""

from __future__ import annotations

import math
import time
from dataclasses import dataclass, replace

from .crowd import (
    World,
    ledger_report,
    majority_from_counts,
    majority_size_from_counts,
)
from .errors import (
    InconsistentLabelsError,
    InstanceSpaceError,
    OracleFailure,
    ParameterError,
    RestartBudgetError,
)
from .hypotheses import (
    Hypothesis,
    HypothesisClass,
    LabeledSample,
    Majority3,
    consistent_hypothesis,
    sample_complexity,
)


def next_odd(n: int) -> int:
    """Round a committee size up to the next odd integer (no ties)."""
    return n if n % 2 == 1 else n + 1


def majority_committee_size(alpha: float, n_items: int, delta: float) -> int:
    """Committee size for near-certain correct majorities on n_items
    instances when a fraction alpha > 1/2 of labelers is perfect.

    Hoeffding design: next_odd(ceil(ln(2 n / delta) / (2 (alpha - 1/2)^2))).
    """
    if alpha <= 0.5:
        raise ParameterError(f"majority committees need alpha > 1/2, got {alpha}")
    if n_items <= 0:
        raise ParameterError("committee sizing needs a positive instance count")
    if not 0.0 < delta < 1.0:
        raise ParameterError(f"delta must be in (0, 1), got {delta}")
    return next_odd(math.ceil(
        math.log(2.0 * n_items / delta) / (2.0 * (alpha - 0.5) ** 2)))


def prune_committee_size(alpha: float, n_items: int, delta: float) -> int:
    """Committee size that estimates every majority size within alpha/8.

    next_odd(ceil((32 / alpha^2) * ln(2 n / delta))).
    """
    if not 0.0 < alpha <= 1.0:
        raise ParameterError(f"alpha must be in (0, 1], got {alpha}")
    if n_items <= 0:
        raise ParameterError("committee sizing needs a positive instance count")
    if not 0.0 < delta < 1.0:
        raise ParameterError(f"delta must be in (0, 1), got {delta}")
    return next_odd(math.ceil(
        (32.0 / alpha**2) * math.log(2.0 * n_items / delta)))


@dataclass(frozen=True)
class FilterParams:
    """Filtering knobs: round budget N = ceil(round_constant * ln(1/eps))
    and the perfect fraction the committees are sized for."""

    round_constant: float = 7.0
    alpha_assumed: float = 0.7

    def __post_init__(self):
        if self.round_constant <= 0:
            raise ParameterError("round constant must be positive")
        if not 0.5 < self.alpha_assumed <= 1.0:
            raise ParameterError("assumed alpha must be in (1/2, 1]")

    def rounds(self, eps: float) -> int:
        if not 0.0 < eps < 1.0:
            raise ParameterError(f"eps must be in (0, 1), got {eps}")
        return max(1, math.ceil(self.round_constant * math.log(1.0 / eps)))


@dataclass(frozen=True)
class Labeled:
    """Prune-free outcome: the whole set got committee labels."""

    sample: LabeledSample


@dataclass(frozen=True)
class Pruned:
    """A weak majority triggered a golden query; the pool was conditioned
    on the test pair and the guaranteed perfect fraction increased."""

    test_pair: tuple
    new_alpha: float


PruneOutcome = Labeled | Pruned


@dataclass
class RunReport:
    """What a learning run produced and what it cost."""

    hypothesis: Hypothesis
    metrics: object
    restarts: int
    phase_seconds: dict


def ruin_probability(p: float, adversary_capital: int, player_capital: int = 1) -> float:
    """Probability that a gambler with player_capital dollars, winning each
    one-dollar bet independently with probability p, goes broke before
    taking all of an adversary's adversary_capital dollars.

    (1 - r^N) / (1 - r^(N+i)) with r = p/(1-p). Degenerate at p = 1/2,
    where callers should use the limit N/(N+i) explicitly.
    """
    if not 0.0 < p < 1.0:
        raise ParameterError(f"p must be in (0, 1), got {p}")
    if p == 0.5:
        raise ParameterError("formula degenerates at p = 1/2; use N/(N+i)")
    if adversary_capital < 1 or player_capital < 1:
        raise ParameterError("both capitals must be at least 1")
    r = p / (1.0 - p)
    n, i = adversary_capital, player_capital
    return (1.0 - r**n) / (1.0 - r ** (n + i))


def correct_label(world: World, instances, delta: float,
                  alpha_assumed: float = 0.7) -> LabeledSample:
    """Label every instance with the majority of a fresh committee sized so
    that, with probability at least 1 - delta, every label is the target's."""
    if alpha_assumed < 0.7:
        raise ParameterError(
            f"interleaving regime assumes alpha >= 0.7, got {alpha_assumed}")
    if not instances:
        return []
    k = majority_committee_size(alpha_assumed, len(instances), delta)
    labeled = []
    for x in instances:
        n_pos, n_neg = world.pool.query_conditioned_committee(x, k)
        labeled.append((x, majority_from_counts(n_pos, n_neg)))
    return labeled


def baseline(world: World, cls: HypothesisClass, eps: float, delta: float,
             alpha_assumed: float | None = None,
             complexity_c: float = 1.0) -> RunReport:
    """Majority-vote every instance of a fresh PAC-sized sample, then learn.

    Committee size grows with ln(m/delta), so the cost per labeled example
    scales with the sample size; this is the inefficiency the interleaving
    algorithm removes.
    """
    t0 = time.perf_counter()
    if alpha_assumed is None:
        alpha_assumed = getattr(world.pool.spec, "alpha", None)
        if alpha_assumed is None:
            raise ParameterError("finite pools need an explicit alpha_assumed")
    m = sample_complexity(cls, eps, delta, complexity_c)
    k = majority_committee_size(alpha_assumed, m, delta)
    sample = world.draw_instances(m)
    labeled = []
    for x in sample:
        n_pos, n_neg = world.pool.query_conditioned_committee(x, k)
        labeled.append((x, majority_from_counts(n_pos, n_neg)))
    hypothesis = consistent_hypothesis(cls, labeled)
    if hypothesis is None:
        raise InconsistentLabelsError(
            "some majority label contradicts every hypothesis in the class",
            sample=labeled)
    return RunReport(
        hypothesis=hypothesis,
        metrics=ledger_report(world.pool, m),
        restarts=0,
        phase_seconds={"label_and_learn": time.perf_counter() - t0},
    )


def filter_instances(world: World, instances, h: Hypothesis, eps: float,
                     params: FilterParams = FilterParams()) -> tuple[list, int]:
    """Probabilistic filter: per instance, query one fresh labeler at a time
    for up to N = ceil(a ln(1/eps)) rounds; at each odd round, drop the
    instance if the running majority agrees with h. Instances surviving all
    rounds are returned, along with the exact number of label queries the
    round loop made on them.
    """
    rounds = params.rounds(eps)
    pool = world.pool
    kept = []
    queries = 0
    for x in instances:
        hx = h.evaluate(x)
        agree = 0
        dropped = False
        for t in range(1, rounds + 1):
            labeler = pool.draw_conditioned_labeler(pool.conditioning)
            queries += 1
            if pool.query_labeler(labeler, x) == hx:
                agree += 1
            if t % 2 == 1 and 2 * agree > t:
                dropped = True
                break
        if not dropped:
            kept.append(x)
    return kept, queries


def sample_balanced_mix(world: World, mislabeled: LabeledSample,
                        correct: LabeledSample, m: int) -> LabeledSample | None:
    """Draw m labeled points from the distribution weighting the mislabeled
    and correctly-labeled pools equally: fair coin to pick a pool, then
    uniform with replacement inside it.

    Returns None when the mislabeled pool is empty (the reference
    hypothesis made no detected mistakes and the caller should keep it).
    """
    if not correct:
        raise ParameterError("correctly labeled pool is empty")
    if m <= 0:
        raise ParameterError("sample size must be positive")
    if not mislabeled:
        return None
    coins = world.buffer.take(m)
    picks = world.buffer.take(m)
    out = []
    for coin, u in zip(coins, picks):
        pool = mislabeled if coin < 0.5 else correct
        out.append(pool[min(int(u * len(pool)), len(pool) - 1)])
    return out


@dataclass(frozen=True)
class RegionSample:
    """Instances kept by rejection sampling, with a truncation flag set
    when the attempt budget ran out before m instances were found."""

    instances: list
    truncated: bool


def sample_disagreement_region(world: World, h1: Hypothesis, h2: Hypothesis,
                               m: int, attempt_cap: int) -> RegionSample | None:
    """Rejection-sample m instances on which h1 and h2 disagree.

    Returns None if the attempt budget is exhausted with nothing kept
    (the two hypotheses agree on everything the sampler saw).
    """
    if attempt_cap < m:
        raise ParameterError("attempt cap must be at least the target count")
    kept: list = []
    attempts = 0
    from .crowd import UniformUnit  # local import to avoid cycle noise

    vectorized = isinstance(world.distribution, UniformUnit)
    while attempts < attempt_cap and len(kept) < m:
        batch = min(4096, attempt_cap - attempts)
        if vectorized:
            xs = world.draw_instance_array(batch)
            mask = h1.evaluate_batch(xs) != h2.evaluate_batch(xs)
            hits = xs[mask]
            need = m - len(kept)
            if len(hits) >= need:
                # count attempts up to the draw that completed the set
                idx = int(mask.cumsum().searchsorted(need)) + 1
                attempts += idx
                kept.extend(float(v) for v in hits[:need])
            else:
                attempts += batch
                kept.extend(float(v) for v in hits)
        else:
            for x in world.draw_instances(batch):
                attempts += 1
                if h1.evaluate(x) != h2.evaluate(x):
                    kept.append(x)
                    if len(kept) == m:
                        break
    if not kept:
        return None
    return RegionSample(kept, truncated=len(kept) < m)


def combine_majority3(h1: Hypothesis, h2: Hypothesis, h3: Hypothesis) -> Majority3:
    """Compose three hypotheses into their pointwise majority vote."""
    if not (h1.instance_space == h2.instance_space == h3.instance_space):
        raise InstanceSpaceError("the three hypotheses live in different spaces")
    return Majority3((h1, h2, h3))


def interleave_learn(world: World, cls: HypothesisClass, eps: float, delta: float,
                     params: FilterParams = FilterParams(), *,
                     complexity_c: float = 1.0,
                     s2_mult: float = 4.0,
                     sc_mult: float = 4.0,
                     w_mult: float = 4.0,
                     disagreement_cap_mult: float = 100.0) -> RunReport:
    """Interleaved boosting for a strong perfect majority (alpha >= 0.7).

    Stage 1 learns a rough hypothesis from a small committee-labeled sample.
    Stage 2 filters a large cheap sample against it, committee-labels the
    survivors plus a fresh control sample, and learns a second hypothesis on
    an equal mix of the points the first got wrong and right. Stage 3 learns
    a third hypothesis on the region where the two disagree. The majority
    vote of the three is returned. Every query goes to a fresh labeler, so
    the load is 1 whenever the pool is unconditioned.
    """
    timings: dict[str, float] = {}
    root_eps = math.sqrt(eps)
    m_eps = sample_complexity(cls, eps, delta, complexity_c)
    m_root = sample_complexity(cls, root_eps, delta, complexity_c)
    m_root6 = sample_complexity(cls, root_eps, delta / 6.0, complexity_c)

    t0 = time.perf_counter()
    stage1 = correct_label(world, world.draw_instances(2 * m_root6),
                           delta / 6.0, params.alpha_assumed)
    h1 = consistent_hypothesis(cls, stage1)
    if h1 is None:
        raise OracleFailure("phase 1", stage1)
    timings["phase1"] = time.perf_counter() - t0

    t0 = time.perf_counter()
    survivors, _ = filter_instances(
        world, world.draw_instances(math.ceil(s2_mult * m_eps)), h1, eps, params)
    control = world.draw_instances(math.ceil(sc_mult * m_root))
    relabeled = correct_label(world, survivors + control,
                              delta / 6.0, params.alpha_assumed)
    wrong = [(x, y) for x, y in relabeled if y != h1.evaluate(x)]
    right = [(x, y) for x, y in relabeled if y == h1.evaluate(x)]
    mix = sample_balanced_mix(world, wrong, right, math.ceil(w_mult * m_root))
    timings["phase2"] = time.perf_counter() - t0

    if mix is None:
        # Filtering found no mistakes; the error-balanced mix is undefined
        # and the stage-1 hypothesis is already consistent with everything.
        timings["phase3"] = 0.0
        return RunReport(h1, ledger_report(world.pool, m_eps), 0, timings)
    h2 = consistent_hypothesis(cls, mix)
    if h2 is None:
        raise OracleFailure("phase 2", mix)

    t0 = time.perf_counter()
    want = 2 * m_root6
    region = sample_disagreement_region(
        world, h1, h2, want,
        attempt_cap=math.ceil(disagreement_cap_mult * want / eps))
    if region is None:
        h3 = h1  # h1 and h2 agree everywhere sampled; any tiebreaker works
    else:
        stage3 = correct_label(world, region.instances,
                               delta / 6.0, params.alpha_assumed)
        h3 = consistent_hypothesis(cls, stage3)
        if h3 is None:
            raise OracleFailure("phase 3", stage3)
    timings["phase3"] = time.perf_counter() - t0

    final = combine_majority3(h1, h2, h3)
    return RunReport(final, ledger_report(world.pool, m_eps), 0, timings)


def prune_and_label(world: World, instances, delta: float,
                    alpha: float) -> PruneOutcome:
    """Committee-label a set, but stop and prune on the first weak majority.

    Each instance gets a fresh conditioned committee of
    next_odd(ceil((32/alpha^2) ln(2|S|/delta))) labelers. If the committee's
    majority share is at most 1 - alpha/4, the instance is a good test
    case: one golden query fetches its true label, the pool is conditioned
    on the pair, and Pruned is returned with alpha / (1 - alpha/8). With no
    trigger, all labels are returned and with probability 1 - delta they
    all equal the target's.
    """
    if not 0.0 < alpha <= 1.0:
        raise ParameterError(f"alpha must be in (0, 1], got {alpha}")
    if not instances:
        return Labeled([])
    k = prune_committee_size(alpha, len(instances), delta)
    labeled = []
    for x in instances:
        n_pos, n_neg = world.pool.query_conditioned_committee(x, k)
        if majority_size_from_counts(n_pos, n_neg) <= 1.0 - alpha / 4.0:
            truth = world.golden_query(x)
            world.pool.add_conditioning(x, truth)
            new_alpha = min(1.0, alpha / (1.0 - alpha / 8.0))
            return Pruned((x, truth), new_alpha)
        labeled.append((x, majority_from_counts(n_pos, n_neg)))
    return Labeled(labeled)


def restart_budget(alpha: float) -> int:
    """Safety envelope on pruning restarts: each golden query removes at
    least an alpha/8 fraction of the labelers, so ceil((16/alpha) ln(1/alpha))
    restarts are already more than the pruning guarantee allows."""
    if not 0.0 < alpha <= 1.0:
        raise ParameterError(f"alpha must be in (0, 1], got {alpha}")
    if alpha >= 1.0:
        return 0
    return math.ceil((16.0 / alpha) * math.log(1.0 / alpha))


def robust_learn(world: World, cls: HypothesisClass, eps: float, delta: float,
                 alpha: float, params: FilterParams = FilterParams(), *,
                 complexity_c: float = 1.0,
                 s2_mult: float = 4.0,
                 sc_mult: float = 4.0,
                 w_mult: float = 4.0,
                 prune_delta_c: float = 0.1,
                 disagreement_cap_mult: float = 100.0) -> RunReport:
    """Learner for any perfect fraction alpha in (0, 1].

    Above 3/4 it is the interleaving algorithm. Otherwise it mirrors the
    three stages with prune-and-label in place of plain committee labeling,
    after a screening pass over O((1/eps) ln(1/delta')) instances that
    catches good test cases early. Any prune conditions the pool on the
    golden answer, raises the guaranteed perfect fraction to
    alpha / (1 - alpha/8), and restarts the whole procedure.
    """
    if not 0.0 < alpha <= 1.0:
        raise ParameterError(f"alpha must be in (0, 1], got {alpha}")
    envelope = restart_budget(alpha)
    timings: dict[str, float] = {"restarted_passes": 0.0}
    restarts = 0
    cur_alpha = alpha
    t_start = time.perf_counter()
    while True:
        pass_start = time.perf_counter()
        if cur_alpha > 0.75:
            inner = interleave_learn(
                world, cls, eps, delta,
                replace(params, alpha_assumed=cur_alpha),
                complexity_c=complexity_c, s2_mult=s2_mult, sc_mult=sc_mult,
                w_mult=w_mult, disagreement_cap_mult=disagreement_cap_mult)
            timings.update(inner.phase_seconds)
            final = inner.hypothesis
            break
        delta_p = prune_delta_c * cur_alpha * delta
        outcome = _guarded_pass(world, cls, eps, delta_p, cur_alpha, params,
                                complexity_c, s2_mult, sc_mult, w_mult,
                                disagreement_cap_mult, timings)
        if isinstance(outcome, Pruned):
            restarts += 1
            if restarts > envelope:
                raise RestartBudgetError(
                    f"{restarts} pruning restarts exceed the envelope {envelope} "
                    f"for alpha={alpha}")
            cur_alpha = outcome.new_alpha
            timings["restarted_passes"] += time.perf_counter() - pass_start
            continue
        final = outcome
        break
    timings["total"] = time.perf_counter() - t_start
    m_eps = sample_complexity(cls, eps, delta, complexity_c)
    return RunReport(final, ledger_report(world.pool, m_eps), restarts, timings)


def _guarded_pass(world, cls, eps, delta_p, alpha, params, complexity_c,
                  s2_mult, sc_mult, w_mult, disagreement_cap_mult, timings):
    """One full pass of the any-alpha learner; returns the final hypothesis
    or the Pruned outcome that aborted the pass."""
    root_eps = math.sqrt(eps)
    m_root = sample_complexity(cls, root_eps, delta_p, complexity_c)
    m_eps = sample_complexity(cls, eps, delta_p, complexity_c)

    # Phase 0: screening pass for good test cases.
    t0 = time.perf_counter()
    screen_size = math.ceil((1.0 / eps) * math.log(1.0 / delta_p))
    outcome = prune_and_label(world, world.draw_instances(screen_size),
                              delta_p, alpha)
    timings["phase0"] = time.perf_counter() - t0
    if isinstance(outcome, Pruned):
        return outcome

    t0 = time.perf_counter()
    outcome = prune_and_label(world, world.draw_instances(2 * m_root),
                              delta_p, alpha)
    if isinstance(outcome, Pruned):
        return outcome
    h1 = consistent_hypothesis(cls, outcome.sample)
    if h1 is None:
        raise OracleFailure("phase 1", outcome.sample)
    timings["phase1"] = time.perf_counter() - t0

    t0 = time.perf_counter()
    survivors, _ = filter_instances(
        world, world.draw_instances(math.ceil(s2_mult * m_eps)), h1, eps, params)
    control = world.draw_instances(math.ceil(sc_mult * m_root))
    outcome = prune_and_label(world, survivors + control, delta_p, alpha)
    if isinstance(outcome, Pruned):
        return outcome
    wrong = [(x, y) for x, y in outcome.sample if y != h1.evaluate(x)]
    right = [(x, y) for x, y in outcome.sample if y == h1.evaluate(x)]
    mix = sample_balanced_mix(world, wrong, right, math.ceil(w_mult * m_root))
    timings["phase2"] = time.perf_counter() - t0
    if mix is None:
        timings["phase3"] = 0.0
        return h1
    h2 = consistent_hypothesis(cls, mix)
    if h2 is None:
        raise OracleFailure("phase 2", mix)

    t0 = time.perf_counter()
    want = 2 * m_root
    region = sample_disagreement_region(
        world, h1, h2, want,
        attempt_cap=math.ceil(disagreement_cap_mult * want / eps))
    if region is None:
        h3 = h1
    else:
        outcome = prune_and_label(world, region.instances, delta_p, alpha)
        if isinstance(outcome, Pruned):
            return outcome
        h3 = consistent_hypothesis(cls, outcome.sample)
        if h3 is None:
            raise OracleFailure("phase 3", outcome.sample)
    timings["phase3"] = time.perf_counter() - t0
    return combine_majority3(h1, h2, h3)
