"""Experiment harness: declarative configs, seeded independent trials,
error estimation, metric aggregation, and diff-able output files.

Configs are flat INI-style files (one key = value per line, one section per
module area); every Theta-constant in the algorithms is overridable from
the [constants] section. A trial is a pure function of (config, trial
seed); per-trial seeds come from a documented 64-bit mixing function, so
batches are reproducible byte-for-byte and can run in parallel processes
without changing results.
"""

from __future__ import annotations

import configparser
import hashlib
import math
import os
import statistics
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from functools import partial

import numpy as np

from . import learner
from .crowd import (
    AdaptiveAdversary,
    Colluder,
    FiniteSupport,
    FixedHypothesis,
    HashNoise,
    InfinitePoolSpec,
    UniformUnit,
    World,
    exact_disagreement_mass,
    mix64,
)
from .detection import DetectionWorld, detect_good_labelers
from .errors import ConfigError, CrowdPacError, EmptyResultsError, ParameterError
from .hypotheses import (
    Complement,
    Conjunction,
    Hypothesis,
    HypothesisClass,
    Interval,
    Threshold,
    sample_complexity,
)

_GOLDEN = 0x9E3779B97F4A7C15
_U64 = (1 << 64) - 1


def trial_seed(master_seed: int, index: int) -> int:
    """Per-trial seed: mix64(master_seed XOR ((index + 1) * 0x9E3779B97F4A7C15
    mod 2^64)). mix64 is the SplitMix64 finalizer; see crowd.mix64."""
    return mix64((master_seed ^ ((index + 1) * _GOLDEN)) & _U64)


# ---------------------------------------------------------------------------
# Error measurement


def estimate_error(h: Hypothesis, world: World, test_size: int) -> float:
    """Monte Carlo disagreement of h with the hidden target over fresh
    instance draws. Never charged to the ledger: the simulator knows the
    target and no labeler is involved."""
    if test_size < 1:
        raise ParameterError("test size must be at least 1")
    if isinstance(world.distribution, UniformUnit):
        xs = world.draw_instance_array(test_size)
        return float(np.count_nonzero(
            h.evaluate_batch(xs) != world.target.evaluate_batch(xs)) / test_size)
    mismatches = 0
    for x in world.draw_instances(test_size):
        if h.evaluate(x) != world.target_label(x):
            mismatches += 1
    return mismatches / test_size


def exact_error(h: Hypothesis, world: World) -> float | None:
    """Analytic disagreement mass with the target where the geometry
    permits (piecewise scalar hypotheses under the uniform distribution,
    anything under a finite support); None otherwise."""
    try:
        return exact_disagreement_mass(h, world.target, world.distribution)
    except CrowdPacError:
        return None


def default_test_size(eps: float) -> int:
    return math.ceil(100.0 / eps)


# ---------------------------------------------------------------------------
# Spec-string parsing (hypotheses and behavior mixes)


def _split_top(text: str, sep: str = ",") -> list[str]:
    parts, depth, current = [], 0, ""
    for ch in text:
        if ch == "(":
            depth += 1
        elif ch == ")":
            depth -= 1
        if ch == sep and depth == 0:
            parts.append(current)
            current = ""
        else:
            current += ch
    parts.append(current)
    return [p.strip() for p in parts if p.strip()]


def parse_hypothesis(spec: str) -> Hypothesis:
    """Parse 'threshold(0.5)', 'interval(0.2,0.6)', 'conjunction(3,+0,-2)'
    or 'complement(<spec>)'."""
    spec = spec.strip()
    if "(" not in spec or not spec.endswith(")"):
        raise ConfigError(f"malformed hypothesis spec {spec!r}")
    name, _, body = spec.partition("(")
    body = body[:-1]
    name = name.strip().lower()
    if name == "threshold":
        return Threshold(float(body))
    if name == "interval":
        lo, hi = _split_top(body)
        return Interval(float(lo), float(hi))
    if name == "complement":
        return Complement(parse_hypothesis(body))
    if name == "conjunction":
        parts = _split_top(body)
        width = int(parts[0])
        pos, neg = set(), set()
        for literal in parts[1:]:
            sign, idx = literal[0], int(literal[1:])
            if sign == "+":
                pos.add(idx)
            elif sign == "-":
                neg.add(idx)
            else:
                raise ConfigError(f"conjunction literal {literal!r} needs +/- prefix")
        return Conjunction(width, frozenset(pos), frozenset(neg))
    raise ConfigError(f"unknown hypothesis kind {name!r}")


def parse_bad_mix(spec: str) -> tuple:
    """Parse a weighted behavior list like
    'colluder*0.6, fixed(threshold(0.2))*0.2, hash_noise(0.3)*0.1, adaptive*0.1'."""
    entries = []
    for item in _split_top(spec):
        if "*" in item:
            head, _, weight_text = item.rpartition("*")
            weight = float(weight_text)
        else:
            head, weight = item, 1.0
        head = head.strip()
        name = head.split("(", 1)[0].strip().lower()
        body = head.partition("(")[2][:-1] if "(" in head else ""
        if name == "colluder":
            group = 0
            behavior = (Colluder(group, parse_hypothesis(body)) if body
                        else Colluder())
        elif name == "fixed":
            behavior = FixedHypothesis(parse_hypothesis(body))
        elif name == "hash_noise":
            args = _split_top(body)
            salt = int(args[1]) if len(args) > 1 else 0
            behavior = HashNoise(float(args[0]), salt)
        elif name == "adaptive":
            behavior = AdaptiveAdversary()
        else:
            raise ConfigError(f"unknown behavior {name!r}")
        entries.append((behavior, weight))
    if not entries:
        raise ConfigError("empty bad mix")
    return tuple(entries)


# ---------------------------------------------------------------------------
# Configuration

_DEFAULT_CONSTANTS = {
    "complexity_c": 1.0,
    "filter_round_constant": 7.0,
    "alpha_assumed": 0.7,
    "s2_mult": 4.0,
    "sc_mult": 4.0,
    "w_mult": 4.0,
    "prune_delta_c": 0.1,
    "rejection_cap": 10_000.0,
    "disagreement_cap_mult": 100.0,
    "robust_alpha": 0.0,  # 0 means "use the pool's alpha"
}

_ALGORITHMS = ("baseline", "interleave", "robust", "detect")


@dataclass(frozen=True)
class ExperimentConfig:
    """Typed view of one experiment description.

    ``raw`` preserves the canonical (section.key, value) pairs for hashing
    and for echoing into output headers.
    """

    algorithm: str
    eps: float
    delta: float
    trials: int
    seed: int
    test_size: int | None
    class_kind: str
    class_width: int
    distribution: str
    finite_values: tuple
    finite_weights: tuple
    target_spec: str
    pool_alpha: float
    bad_mix_spec: str
    constants: tuple
    detect_n: int
    detect_n_good: int
    detect_good_span: float
    detect_bad_spec: str
    raw: tuple = field(default_factory=tuple)

    def constant(self, name: str) -> float:
        for key, value in self.constants:
            if key == name:
                return value
        return _DEFAULT_CONSTANTS[name]

    @property
    def hypothesis_class(self) -> HypothesisClass:
        return HypothesisClass(self.class_kind, self.class_width)

    @property
    def config_hash(self) -> str:
        text = "\n".join(f"{k} = {v}" for k, v in sorted(self.raw))
        return hashlib.sha256(text.encode()).hexdigest()[:16]


def config_from_mapping(mapping: dict) -> ExperimentConfig:
    """Build a validated config from a flat {'section.key': 'value'} map."""
    def get(key, default=None):
        return mapping.get(key, default)

    algorithm = get("experiment.algorithm", "")
    if algorithm not in _ALGORITHMS:
        raise ConfigError(f"algorithm must be one of {_ALGORITHMS}, got {algorithm!r}")
    try:
        eps = float(get("experiment.eps", "nan"))
        delta = float(get("experiment.delta", "nan"))
        trials = int(get("experiment.trials", "1"))
        seed = int(get("experiment.seed", "0"))
    except ValueError as exc:
        raise ConfigError(f"bad experiment numbers: {exc}") from None
    if not 0.0 < eps < 1.0 or not 0.0 < delta < 1.0:
        raise ConfigError("eps and delta must be fractions in (0, 1)")
    if trials < 1:
        raise ConfigError("trials must be at least 1")
    test_size_text = get("experiment.test_size")
    test_size = int(test_size_text) if test_size_text else None

    class_kind = get("class.kind", "threshold")
    class_width = int(get("class.width", "0") or 0)

    distribution = get("world.distribution", "uniform")
    if distribution not in ("uniform", "finite"):
        raise ConfigError(f"distribution must be uniform or finite, got {distribution!r}")
    finite_values: tuple = ()
    finite_weights: tuple = ()
    if distribution == "finite":
        finite_values = tuple(float(v) for v in _split_top(get("world.values", "")))
        finite_weights = tuple(float(v) for v in _split_top(get("world.weights", "")))
        if not finite_values:
            raise ConfigError("finite distribution needs world.values")
        if len(finite_values) != len(finite_weights):
            raise ConfigError("world.values and world.weights differ in length")

    target_spec = get("world.target", "threshold(0.5)")
    pool_alpha = float(get("world.alpha", "1.0"))
    if not 0.0 <= pool_alpha <= 1.0:
        raise ConfigError("world.alpha must be in [0, 1]")
    bad_mix_spec = get("world.bad_mix", "")
    if pool_alpha < 1.0 and not bad_mix_spec and algorithm != "detect":
        raise ConfigError("alpha < 1 requires world.bad_mix")

    constants = []
    for name, default in _DEFAULT_CONSTANTS.items():
        text = get(f"constants.{name}")
        constants.append((name, float(text) if text is not None else default))

    detect_n = int(get("detect.n", "0") or 0)
    detect_n_good = int(get("detect.n_good", "0") or 0)
    detect_good_span = float(get("detect.good_span", "0") or 0.0)
    detect_bad_spec = get("detect.bad", "")
    if algorithm == "detect":
        if detect_n < 2 or detect_n_good < 1:
            raise ConfigError("detect needs detect.n and detect.n_good")
        if detect_n_good < detect_n // 2 + 1:
            raise ConfigError("detect.n_good must exceed half the pool")
        if detect_n_good < detect_n and not detect_bad_spec:
            raise ConfigError("detect needs detect.bad when bad labelers exist")
        if class_kind != "threshold":
            raise ConfigError("detect auto-builds good labelers as thresholds")
        if detect_good_span > eps:
            raise ConfigError("detect.good_span must stay within eps")

    # Sanity-parse the hypothesis and behavior specs now, not per trial.
    parse_hypothesis(target_spec)
    if bad_mix_spec:
        parse_bad_mix(bad_mix_spec)
    if detect_bad_spec:
        for part in _split_top(detect_bad_spec):
            parse_hypothesis(part)

    raw = tuple(sorted(mapping.items()))
    return ExperimentConfig(
        algorithm=algorithm, eps=eps, delta=delta, trials=trials, seed=seed,
        test_size=test_size, class_kind=class_kind, class_width=class_width,
        distribution=distribution, finite_values=finite_values,
        finite_weights=finite_weights, target_spec=target_spec,
        pool_alpha=pool_alpha, bad_mix_spec=bad_mix_spec,
        constants=tuple(constants), detect_n=detect_n,
        detect_n_good=detect_n_good, detect_good_span=detect_good_span,
        detect_bad_spec=detect_bad_spec, raw=raw)


def load_config(path: str, overrides: dict | None = None) -> ExperimentConfig:
    parser = configparser.ConfigParser(inline_comment_prefixes=("#", ";"))
    read = parser.read(path)
    if not read:
        raise ConfigError(f"config file {path!r} not found")
    mapping = {
        f"{section}.{key}": value
        for section in parser.sections()
        for key, value in parser.items(section)
    }
    if overrides:
        mapping.update(overrides)
    return config_from_mapping(mapping)


# ---------------------------------------------------------------------------
# Worlds from configs


def build_world(config: ExperimentConfig, seed: int) -> World:
    if config.distribution == "uniform":
        dist = UniformUnit()
    else:
        dist = FiniteSupport(config.finite_values, config.finite_weights)
    target = parse_hypothesis(config.target_spec)
    bad_mix = parse_bad_mix(config.bad_mix_spec) if config.bad_mix_spec else ()
    spec = InfinitePoolSpec(config.pool_alpha, bad_mix)
    return World(dist, config.hypothesis_class, target, spec, seed,
                 rejection_cap=int(config.constant("rejection_cap")))


def build_detection_world(config: ExperimentConfig, seed: int) -> DetectionWorld:
    target = parse_hypothesis(config.target_spec)
    if not isinstance(target, Threshold):
        raise ConfigError("detect expects a threshold target")
    labelers: list[Hypothesis] = []
    n_good, span = config.detect_n_good, config.detect_good_span
    for i in range(n_good):
        offset = 0.0 if n_good == 1 else span * (2.0 * i / (n_good - 1) - 1.0)
        labelers.append(Threshold(target.theta + offset))
    bads = [parse_hypothesis(p) for p in _split_top(config.detect_bad_spec)] or []
    for i in range(config.detect_n - n_good):
        labelers.append(bads[i % len(bads)])
    return DetectionWorld(labelers, target, config.eps, config.delta, seed)


# ---------------------------------------------------------------------------
# Trials


@dataclass(frozen=True)
class TrialResult:
    """One trial's measurements. Wall time stays in memory only, so output
    files are byte-identical across reruns of the same (config, seed)."""

    index: int
    seed: int
    status: str
    err: float | None
    err_estimate: float | None
    err_exact: float | None
    total_queries: int
    cost_per_label: float | None
    max_load: int
    golden_queries: int
    distinct_labelers: int
    restarts: int
    recovered: tuple | None
    exact_recovery: bool | None
    config_hash: str
    error_message: str = ""
    wall_seconds: float = 0.0


def run_trial(config: ExperimentConfig, index: int) -> TrialResult:
    """Execute one trial; algorithm errors become an error-status record."""
    seed = trial_seed(config.seed, index)
    started = time.perf_counter()
    try:
        if config.algorithm == "detect":
            return _run_detect_trial(config, index, seed, started)
        return _run_learning_trial(config, index, seed, started)
    except CrowdPacError as exc:
        return TrialResult(
            index=index, seed=seed, status="error", err=None, err_estimate=None,
            err_exact=None, total_queries=0, cost_per_label=None, max_load=0,
            golden_queries=0, distinct_labelers=0, restarts=0, recovered=None,
            exact_recovery=None, config_hash=config.config_hash,
            error_message=f"{type(exc).__name__}: {exc}",
            wall_seconds=time.perf_counter() - started)


def _run_learning_trial(config, index, seed, started) -> TrialResult:
    world = build_world(config, seed)
    cls = config.hypothesis_class
    c = config.constant("complexity_c")
    params = learner.FilterParams(
        round_constant=config.constant("filter_round_constant"),
        alpha_assumed=config.constant("alpha_assumed"))
    common = dict(complexity_c=c,
                  s2_mult=config.constant("s2_mult"),
                  sc_mult=config.constant("sc_mult"),
                  w_mult=config.constant("w_mult"),
                  disagreement_cap_mult=config.constant("disagreement_cap_mult"))
    if config.algorithm == "baseline":
        report = learner.baseline(world, cls, config.eps, config.delta,
                                  alpha_assumed=params.alpha_assumed,
                                  complexity_c=c)
    elif config.algorithm == "interleave":
        report = learner.interleave_learn(world, cls, config.eps, config.delta,
                                          params, **common)
    else:
        alpha = config.constant("robust_alpha") or config.pool_alpha
        report = learner.robust_learn(world, cls, config.eps, config.delta,
                                      alpha, params,
                                      prune_delta_c=config.constant("prune_delta_c"),
                                      **common)
    test_size = config.test_size or default_test_size(config.eps)
    err_estimate = estimate_error(report.hypothesis, world, test_size)
    err_exact = exact_error(report.hypothesis, world)
    metrics = report.metrics
    m_realizable = sample_complexity(cls, config.eps, config.delta, c)
    recomputed = metrics.total_queries / m_realizable
    if abs(recomputed - metrics.cost_per_label) > 1e-9:
        raise ConfigError("cost-per-label bookkeeping diverged from the ledger")
    return TrialResult(
        index=index, seed=seed, status="ok",
        err=err_exact if err_exact is not None else err_estimate,
        err_estimate=err_estimate, err_exact=err_exact,
        total_queries=metrics.total_queries, cost_per_label=recomputed,
        max_load=metrics.max_load, golden_queries=metrics.golden_queries,
        distinct_labelers=metrics.distinct_labelers, restarts=report.restarts,
        recovered=None, exact_recovery=None, config_hash=config.config_hash,
        wall_seconds=time.perf_counter() - started)


def _run_detect_trial(config, index, seed, started) -> TrialResult:
    world = build_detection_world(config, seed)
    recovered = detect_good_labelers(world)
    exact = recovered == set(world.good_indices)
    ledger = world.ledger
    return TrialResult(
        index=index, seed=seed, status="ok", err=None, err_estimate=None,
        err_exact=None, total_queries=ledger.total_queries, cost_per_label=None,
        max_load=ledger.max_load, golden_queries=ledger.golden_queries,
        distinct_labelers=ledger.distinct_labelers, restarts=0,
        recovered=tuple(sorted(recovered)), exact_recovery=exact,
        config_hash=config.config_hash,
        wall_seconds=time.perf_counter() - started)


def run_experiment(config: ExperimentConfig) -> list[TrialResult]:
    """Run all trials with deterministically derived per-trial seeds.

    CROWDPAC_PARALLELISM > 1 runs trials in worker processes; results are
    merged in trial order, so scheduling never changes the output.
    """
    workers = int(os.environ.get("CROWDPAC_PARALLELISM", "1"))
    indices = range(config.trials)
    if workers > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(partial(run_trial, config), indices))
    else:
        results = [run_trial(config, i) for i in indices]
    return sorted(results, key=lambda t: t.index)


# ---------------------------------------------------------------------------
# Aggregation


@dataclass(frozen=True)
class SummaryRecord:
    n_trials: int
    n_ok: int
    mean_err: float | None
    median_err: float | None
    success_rate: float
    mean_cost_per_label: float | None
    max_load: int
    total_golden: int
    total_restarts: int
    exact_recovery_rate: float | None


def aggregate_trials(results, eps: float | None = None) -> SummaryRecord:
    """Per-metric summary; trials with errors count as failures."""
    if not results:
        raise EmptyResultsError("no trials to aggregate")
    hashes = {t.config_hash for t in results}
    if len(hashes) > 1:
        raise ConfigError(f"mixed-config aggregation rejected: {sorted(hashes)}")
    ok = [t for t in results if t.status == "ok"]
    errs = [t.err for t in ok if t.err is not None]
    costs = [t.cost_per_label for t in ok if t.cost_per_label is not None]
    recoveries = [t.exact_recovery for t in ok if t.exact_recovery is not None]
    if errs and eps is not None:
        successes = sum(1 for e in errs if e <= eps)
        success_rate = successes / len(results)
    elif recoveries:
        success_rate = sum(recoveries) / len(results)
    else:
        success_rate = len(ok) / len(results)
    return SummaryRecord(
        n_trials=len(results),
        n_ok=len(ok),
        mean_err=statistics.fmean(errs) if errs else None,
        median_err=statistics.median(errs) if errs else None,
        success_rate=success_rate,
        mean_cost_per_label=statistics.fmean(costs) if costs else None,
        max_load=max((t.max_load for t in ok), default=0),
        total_golden=sum(t.golden_queries for t in ok),
        total_restarts=sum(t.restarts for t in ok),
        exact_recovery_rate=(sum(recoveries) / len(recoveries)) if recoveries else None,
    )


# ---------------------------------------------------------------------------
# Output files

_TRIAL_FIELDS = (
    "index", "seed", "status", "err", "err_estimate", "err_exact",
    "total_queries", "cost_per_label", "max_load", "golden_queries",
    "distinct_labelers", "restarts", "recovered", "exact_recovery",
    "error_message",
)


def _format_value(value) -> str:
    if value is None:
        return "-"
    if isinstance(value, bool):
        return "1" if value else "0"
    if isinstance(value, float):
        return format(value, ".12g")
    if isinstance(value, tuple):
        return ";".join(str(v) for v in value) if value else "-"
    return str(value).replace(" ", "_")


def format_trial_line(trial: TrialResult) -> str:
    return " ".join(
        f"{name}={_format_value(getattr(trial, name))}" for name in _TRIAL_FIELDS)


def write_trials(path: str, config: ExperimentConfig, results) -> None:
    """One line per trial with a stable field order; the config is echoed
    as header comments so files are self-describing and diff-able."""
    lines = [f"# config_hash = {config.config_hash}"]
    lines.extend(f"# {key} = {value}" for key, value in sorted(config.raw))
    lines.extend(format_trial_line(t) for t in results)
    with open(path, "w", encoding="utf-8") as handle:
        handle.write("\n".join(lines) + "\n")


def write_summary_csv(path: str, config: ExperimentConfig, summary: SummaryRecord) -> None:
    names = ("config_hash", "n_trials", "n_ok", "mean_err", "median_err",
             "success_rate", "mean_cost_per_label", "max_load",
             "total_golden", "total_restarts", "exact_recovery_rate")
    values = (config.config_hash, summary.n_trials, summary.n_ok,
              summary.mean_err, summary.median_err, summary.success_rate,
              summary.mean_cost_per_label, summary.max_load,
              summary.total_golden, summary.total_restarts,
              summary.exact_recovery_rate)
    with open(path, "w", encoding="utf-8") as handle:
        handle.write(",".join(names) + "\n")
        handle.write(",".join(_format_value(v) for v in values) + "\n")
