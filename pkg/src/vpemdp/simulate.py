"""Seeded Monte Carlo runs of a weight-based scheduler.

Samples are split into fixed-size chunks. Chunk ``i`` draws from a PCG64
generator seeded with ``SeedSequence(seed, spawn_key=(i,))``, so results do
not depend on how many worker processes share the chunks.
"""

from __future__ import annotations

import bisect
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from fractions import Fraction
from typing import Mapping

import numpy as np

from .errors import StepLimitExceeded
from .mdp import Mdp
from .schedulers import WeightBasedScheduler

GENERATOR = "numpy.PCG64/SeedSequence(seed,spawn_key=(chunk,))"
CHUNK = 4096
STEP_CAP = 10 ** 6


@dataclass(frozen=True)
class SimulationSummary:
    samples: int
    seed: int
    mean: Fraction
    variance: Fraction
    minimum: int
    maximum: int
    histogram: Mapping[int, int]
    generator: str = GENERATOR

    def histogram_csv(self) -> str:
        rows = ["weight,count"] + [f"{w},{c}" for w, c in sorted(self.histogram.items())]
        return "\n".join(rows) + "\n"


def _cumulative(pairs):
    keys, acc, total = [], [], Fraction(0)
    for k, p in pairs:
        total += p
        keys.append(k)
        acc.append(float(total))
    acc[-1] = 1.0
    return keys, acc


def _pick(rng, table):
    keys, acc = table
    if len(keys) == 1:
        return keys[0]
    return keys[bisect.bisect_right(acc, rng.random())]


def _run_chunk(args):
    m, sched, seed, chunk, count, step_cap = args
    rng = np.random.Generator(np.random.PCG64(np.random.SeedSequence(seed, spawn_key=(chunk,))))
    succ = {(s, a.name): (_cumulative(a.successors), a.weight) for s in m.nongoal for a in m.actions[s]}
    choice_cache: dict = {}
    hist: dict[int, int] = {}
    for _ in range(count):
        s, w, steps = m.init, 0, 0
        while s != m.goal:
            steps += 1
            if steps > step_cap:
                raise StepLimitExceeded(f"a run exceeded {step_cap} steps")
            key = (s, w) if w < sched.bound else (s, None)
            table = choice_cache.get(key)
            if table is None:
                table = choice_cache[key] = _cumulative(sched.dist(s, w).items())
            a = _pick(rng, table)
            dist, weight = succ[s, a]
            w += weight
            s = _pick(rng, dist)
        hist[w] = hist.get(w, 0) + 1
    return hist


def simulate(m: Mdp, sched: WeightBasedScheduler, samples: int, seed: int,
             jobs: int = 1, step_cap: int = STEP_CAP) -> SimulationSummary:
    """Empirical distribution of the accumulated weight over ``samples`` runs.

    Mean and variance are exact fractions of the integer outcomes; the
    variance uses the ``samples - 1`` denominator.
    """
    if samples < 1:
        raise ValueError("samples must be at least 1")
    if not 0 <= seed < 2 ** 64:
        raise ValueError("seed must be an unsigned 64-bit integer")
    sched.validate(m)
    sizes = [min(CHUNK, samples - i) for i in range(0, samples, CHUNK)]
    tasks = [(m, sched, seed, i, k, step_cap) for i, k in enumerate(sizes)]
    if jobs > 1 and len(tasks) > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            parts = list(pool.map(_run_chunk, tasks))
    else:
        parts = [_run_chunk(t) for t in tasks]
    hist: dict[int, int] = {}
    for part in parts:
        for w, c in part.items():
            hist[w] = hist.get(w, 0) + c
    total = sum(w * c for w, c in hist.items())
    squares = sum(w * w * c for w, c in hist.items())
    mean = Fraction(total, samples)
    if samples > 1:
        variance = Fraction(squares * samples - total * total, samples * (samples - 1))
    else:
        variance = Fraction(0)
    return SimulationSummary(samples, seed, mean, variance, min(hist), max(hist), dict(sorted(hist.items())))
