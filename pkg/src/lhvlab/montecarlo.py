"""Event-level simulation of paired detections; stochastic oracle for the algebra.

Blocks of two consecutive events share nothing except the memory rule: each
event draws its own hidden variable, both observers detect independently
given that variable, and in the second event an observer who detected in the
first may have the outcome forced by the rule.  The per-observer strength
coin is independent of everything else, so it is folded into the conditional
detection probability ((1-s)*p for inhibit, s + (1-s)*p for enhance), which
yields the identical joint law with fewer draws.

Sampling the hidden variable never evaluates a transcendental function: the
responses depend on lambda only through (cos 2*lambda, sin 2*lambda), a
uniformly distributed point on the unit circle.  A point (x, y) is drawn by
rejection from the disk (Marsaglia's polar method) and its doubled polar
angle ((x^2 - y^2) / r^2, 2xy / r^2) is taken, which is again uniform on the
circle and costs one division instead of a square root; precomputed setting
constants then rotate it into each observer's response argument.

Determinism contract
--------------------
The generator is NumPy's PCG64.  Work is split into fixed-size shards of
``shard_blocks`` blocks; shard sub-streams derive from the master seed via
``SeedSequence`` spawning, and batch/angle sub-streams via explicit
``spawn_key`` tuples.  Shard tallies are integers merged by summation, so a
run's output is bit-identical for any thread count and any completion
order.  Determinism is promised within this implementation only.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numba
import numpy as np

from .errors import AllDarkModelError, AsymmetricModelError, InsufficientSamplesError
from .model import (
    LhvModel,
    MemoryKind,
    MemoryRule,
    is_symmetric,
    require_valid_model,
)

__all__ = [
    "DEFAULT_SHARD_BLOCKS",
    "Estimate",
    "Tally",
    "RunConfig",
    "RunResult",
    "ChMcResult",
    "simulate_run",
    "estimate_ch_mc",
]

#: Blocks per shard; fixed so shard boundaries do not depend on thread count.
DEFAULT_SHARD_BLOCKS = 65536

_KIND_CODES = {MemoryKind.MEMORYLESS: 0, MemoryKind.INHIBIT: 1, MemoryKind.ENHANCE: 2}


@dataclass(frozen=True)
class Estimate:
    """Point estimate with standard error and the sample count behind it."""

    value: float
    stderr: float
    n: int


@dataclass(frozen=True)
class Tally:
    """Raw detection counts over ``events`` single events (2 per block)."""

    events: int
    singles_a: int
    singles_b: int
    coincidences: int

    def __post_init__(self) -> None:
        if not 0 <= self.coincidences <= min(self.singles_a, self.singles_b):
            raise ValueError(f"coincidences exceed singles: {self!r}")
        if max(self.singles_a, self.singles_b) > self.events:
            raise ValueError(f"singles exceed event count: {self!r}")


@dataclass(frozen=True)
class RunConfig:
    """Configuration of one simulation run.

    Settings are either explicit analyzer angles ``(alpha, beta)`` or a
    single effective angle ``phi`` (shorthand for ``alpha=phi, beta=0``).
    ``shard_blocks`` declares the stream partitioning and therefore takes
    part in the determinism contract; ``threads`` only distributes work.
    """

    n_pairs: int
    seed: int
    rule: MemoryRule
    phi: float | None = None
    alpha: float | None = None
    beta: float | None = None
    shard_blocks: int = DEFAULT_SHARD_BLOCKS
    threads: int = 1

    def __post_init__(self) -> None:
        if self.n_pairs < 1:
            raise ValueError(f"n_pairs must be >= 1, got {self.n_pairs}")
        _check_seed(self.seed)
        has_phi = self.phi is not None
        has_pair = self.alpha is not None or self.beta is not None
        if has_phi == has_pair or (has_pair and (self.alpha is None or self.beta is None)):
            raise ValueError("provide either phi or both alpha and beta")
        if self.shard_blocks < 1:
            raise ValueError("shard_blocks must be >= 1")
        if self.threads < 1:
            raise ValueError("threads must be >= 1")

    @property
    def settings(self) -> tuple[float, float]:
        if self.phi is not None:
            return float(self.phi), 0.0
        return float(self.alpha), float(self.beta)


@dataclass(frozen=True)
class RunResult:
    """Per-event proportions with binomial standard errors, plus raw counts."""

    p_a: Estimate
    p_b: Estimate
    p_ab: Estimate
    tally: Tally


@dataclass(frozen=True)
class ChMcResult:
    """Monte Carlo Clauser-Horne estimate with batch-means standard errors.

    ``b`` is the pooled ratio estimator; its stderr (and those of the rate
    estimates) comes from the scatter of per-batch values, which is the
    appropriate error for a nonlinear ratio of correlated proportions.  The
    delta-method alternative (propagating binomial covariances through the
    ratio) gives comparable values but is not emitted.
    """

    b: Estimate
    p_a: Estimate
    p_b: Estimate
    p_ab_phi: Estimate
    p_ab_3phi: Estimate
    n_pairs: int
    n_batches: int


def _check_seed(seed: int) -> None:
    if not isinstance(seed, (int, np.integer)) or not 0 <= int(seed) < 2**64:
        raise ValueError(f"seed must be a 64-bit unsigned integer, got {seed!r}")


@numba.njit(inline="always")
def _event_probs(gen, a0a, a1a, a2a, rot_ca, rot_sa, a0b, a1b, a2b, rot_cb, rot_sb):
    """Draw one hidden variable and evaluate both detection probabilities."""
    while True:
        x = 2.0 * gen.random() - 1.0
        y = 2.0 * gen.random() - 1.0
        r2 = x * x + y * y
        if 0.0 < r2 <= 1.0:
            break
    inv = 1.0 / r2
    c = (x * x - y * y) * inv
    sn = 2.0 * x * y * inv
    arg_a = c * rot_ca + sn * rot_sa
    arg_b = c * rot_cb + sn * rot_sb
    p_a = a0a + a1a * arg_a + a2a * (2.0 * arg_a * arg_a - 1.0)
    p_b = a0b + a1b * arg_b + a2b * (2.0 * arg_b * arg_b - 1.0)
    return p_a, p_b


@numba.njit(cache=True, nogil=True)
def _block_tallies(
    gen,
    n_blocks,
    a0a, a1a, a2a, rot_ca, rot_sa,
    a0b, a1b, a2b, rot_cb, rot_sb,
    strength, kind,
):  # pragma: no cover - exercised through simulate_run
    # Memory adjustments are arithmetic on the first-event booleans rather
    # than data-dependent branches, which random outcomes would mispredict.
    singles_a = 0
    singles_b = 0
    coincidences = 0
    for _ in range(n_blocks):
        p_a, p_b = _event_probs(gen, a0a, a1a, a2a, rot_ca, rot_sa,
                                a0b, a1b, a2b, rot_cb, rot_sb)
        det_a1 = gen.random() < p_a
        det_b1 = gen.random() < p_b
        p_a, p_b = _event_probs(gen, a0a, a1a, a2a, rot_ca, rot_sa,
                                a0b, a1b, a2b, rot_cb, rot_sb)
        if kind == 1:
            p_a = p_a * (1.0 - strength * det_a1)
            p_b = p_b * (1.0 - strength * det_b1)
        elif kind == 2:
            p_a = p_a + strength * (1.0 - p_a) * det_a1
            p_b = p_b + strength * (1.0 - p_b) * det_b1
        det_a2 = gen.random() < p_a
        det_b2 = gen.random() < p_b
        singles_a += det_a1 + det_a2
        singles_b += det_b1 + det_b2
        coincidences += (det_a1 and det_b1) + (det_a2 and det_b2)
    return singles_a, singles_b, coincidences


def _kernel_args(model: LhvModel, alpha: float, beta: float, rule: MemoryRule) -> tuple:
    """Flatten model, settings and rule into kernel scalars.

    Rotation constants express cos(2*lambda -+ 2*theta) as a linear
    combination of (cos 2*lambda, sin 2*lambda): MINUS contributes
    (+cos 2a, +sin 2a), PLUS (+cos 2b, -sin 2b).
    """
    a, b = model.alice, model.bob
    return (
        a.a0, a.a1, a.a2, math.cos(2.0 * alpha), math.sin(2.0 * alpha),
        b.a0, b.a1, b.a2, math.cos(2.0 * beta), -math.sin(2.0 * beta),
        float(rule.strength), _KIND_CODES[rule.effective_kind],
    )


def _shard_plan(seq: np.random.SeedSequence, n_blocks: int, shard_blocks: int):
    """Deterministic (sub-seed, size) pairs covering ``n_blocks``."""
    n_shards = -(-n_blocks // shard_blocks)
    children = seq.spawn(n_shards)
    plan = []
    remaining = n_blocks
    for child in children:
        size = min(shard_blocks, remaining)
        plan.append((child, size))
        remaining -= size
    return plan


def _run_jobs(jobs: list[tuple], threads: int) -> list[tuple]:
    """Run (key, seed_seq, blocks, args) jobs across worker threads.

    Each worker takes an interleaved slice of the job list and runs it
    sequentially, so the pool handles a handful of coarse futures instead of
    hundreds of millisecond-scale ones.  Tallies are integers keyed by job,
    so the partitioning cannot affect the merged result.
    """

    def run(job):
        key, seq, blocks, args = job
        gen = np.random.default_rng(seq)
        return key, blocks, _block_tallies(gen, blocks, *args)

    def run_slice(slice_jobs):
        return [run(job) for job in slice_jobs]

    if threads > 1 and len(jobs) > 1:
        with ThreadPoolExecutor(max_workers=threads) as executor:
            futures = [executor.submit(run_slice, jobs[i::threads]) for i in range(threads)]
            return [result for future in futures for result in future.result()]
    return run_slice(jobs)


def _proportion(count: int, events: int) -> Estimate:
    value = count / events
    v = min(max(value, 0.0), 1.0)
    return Estimate(value=value, stderr=math.sqrt(v * (1.0 - v) / events), n=events)


def simulate_run(model: LhvModel, cfg: RunConfig) -> RunResult:
    """Simulate ``cfg.n_pairs`` two-event blocks and tally per-event rates.

    Returns proportions over ``2 * n_pairs`` events with binomial standard
    errors.  Bit-identical output for identical ``cfg`` regardless of
    ``threads``.
    """
    require_valid_model(model)
    alpha, beta = cfg.settings
    args = _kernel_args(model, alpha, beta, cfg.rule)
    root = np.random.SeedSequence(cfg.seed)
    jobs = [
        (None, child, size, args)
        for child, size in _shard_plan(root, cfg.n_pairs, cfg.shard_blocks)
    ]
    singles_a = singles_b = coincidences = 0
    for _, _, (sa, sb, co) in _run_jobs(jobs, cfg.threads):
        singles_a += sa
        singles_b += sb
        coincidences += co
    events = 2 * cfg.n_pairs
    tally = Tally(events=events, singles_a=singles_a, singles_b=singles_b, coincidences=coincidences)
    return RunResult(
        p_a=_proportion(singles_a, events),
        p_b=_proportion(singles_b, events),
        p_ab=_proportion(coincidences, events),
        tally=tally,
    )


def _batch_sizes(n_pairs: int, n_batches: int) -> list[int]:
    base, extra = divmod(n_pairs, n_batches)
    return [base + (1 if i < extra else 0) for i in range(n_batches)]


def estimate_ch_mc(
    model: LhvModel,
    rule: MemoryRule,
    phi: float,
    n_pairs: int,
    seed: int,
    *,
    n_batches: int = 100,
    threads: int = 1,
    shard_blocks: int = DEFAULT_SHARD_BLOCKS,
) -> ChMcResult:
    """Monte Carlo estimate of the Clauser-Horne parameter at angle ``phi``.

    Runs ``n_pairs`` blocks at effective angle ``phi`` and another
    ``n_pairs`` at ``3*phi``, each split into ``n_batches`` near-equal
    batches with sub-streams keyed by (angle index, batch index).  Singles
    pool both runs; the ratio combines the pooled rates, and every standard
    error is the batch scatter divided by sqrt(n_batches).
    """
    require_valid_model(model)
    if not is_symmetric(model):
        raise AsymmetricModelError("Monte Carlo CH estimation requires a symmetric model")
    _check_seed(seed)
    if n_batches < 2:
        raise ValueError(f"n_batches must be >= 2, got {n_batches}")
    if n_pairs < n_batches:
        raise InsufficientSamplesError(
            f"cannot form {n_batches} batches from {n_pairs} event pairs"
        )

    sizes = _batch_sizes(n_pairs, n_batches)
    angles = (float(phi), 3.0 * float(phi))
    jobs = []
    for angle_idx, angle in enumerate(angles):
        args = _kernel_args(model, angle, 0.0, rule)
        for batch_idx, batch_blocks in enumerate(sizes):
            seq = np.random.SeedSequence(seed, spawn_key=(angle_idx, batch_idx))
            for child, size in _shard_plan(seq, batch_blocks, shard_blocks):
                jobs.append(((angle_idx, batch_idx), child, size, args))

    singles_a = np.zeros((2, n_batches), dtype=np.int64)
    singles_b = np.zeros_like(singles_a)
    coincidences = np.zeros_like(singles_a)
    events = np.zeros_like(singles_a)
    for (angle_idx, batch_idx), blocks, (sa, sb, co) in _run_jobs(jobs, threads):
        singles_a[angle_idx, batch_idx] += sa
        singles_b[angle_idx, batch_idx] += sb
        coincidences[angle_idx, batch_idx] += co
        events[angle_idx, batch_idx] += 2 * blocks

    # Per-batch values: singles pooled over both angle runs, coincidences per run.
    events_both = events.sum(axis=0)
    pa_batch = (singles_a[0] + singles_a[1]) / events_both
    pb_batch = (singles_b[0] + singles_b[1]) / events_both
    pab_phi_batch = coincidences[0] / events[0]
    pab_3phi_batch = coincidences[1] / events[1]
    denom_batch = pa_batch + pb_batch
    if np.any(denom_batch == 0.0):
        raise AllDarkModelError("batch with zero singles: Bell ratio undefined")
    b_batch = (3.0 * pab_phi_batch - pab_3phi_batch) / denom_batch

    def pooled(num: np.ndarray, den: np.ndarray) -> float:
        return float(num.sum() / den.sum())

    p_a = pooled(singles_a, events)
    p_b = pooled(singles_b, events)
    pab_phi = pooled(coincidences[0], events[0])
    pab_3phi = pooled(coincidences[1], events[1])
    if p_a + p_b == 0.0:
        raise AllDarkModelError("p_a + p_b = 0: Bell ratio undefined for all-dark model")
    b_value = (3.0 * pab_phi - pab_3phi) / (p_a + p_b)

    def batch_estimate(value: float, batch_values: np.ndarray, n: int) -> Estimate:
        scatter = float(np.std(batch_values, ddof=1)) / math.sqrt(n_batches)
        return Estimate(value=value, stderr=scatter, n=n)

    total_events = int(events.sum())
    return ChMcResult(
        b=batch_estimate(b_value, b_batch, n_batches),
        p_a=batch_estimate(p_a, pa_batch, total_events),
        p_b=batch_estimate(p_b, pb_batch, total_events),
        p_ab_phi=batch_estimate(pab_phi, pab_phi_batch, int(events[0].sum())),
        p_ab_3phi=batch_estimate(pab_3phi, pab_3phi_batch, int(events[1].sum())),
        n_pairs=n_pairs,
        n_batches=n_batches,
    )
