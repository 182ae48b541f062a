"""Selecting one trace from K samples, plus selective prediction.

Majority voting picks the modal final answer then a random sample with that
answer. RM-weighted decoding picks the final answer with the largest summed
score, then the highest-scored sample with that answer. Samples without a
final answer never vote but still count toward K. All ties break in
first-seen sample order so runs are reproducible.
"""

from dataclasses import dataclass, field
import math
import random

from .errors import AllSamplesAnswerless, EmptySamples
from .traces import Problem, Trace, normalize_answer


@dataclass(frozen=True)
class DecodeResult:
    selected: Trace | None
    selected_final: str | None
    per_sample_scores: tuple
    strategy: str
    abstained: bool = False
    max_steps_exceeded: bool = False


def _finals(samples):
    return [normalize_answer(t.final_answer) if t.final_answer is not None else None
            for t in samples]


def majority_vote(samples, seed: int = 0) -> DecodeResult:
    """Modal final answer; selected uniformly (seeded) among its samples."""
    if not samples:
        raise EmptySamples("no samples to vote over")
    finals = _finals(samples)
    counts = {}
    for f in finals:
        if f is not None:
            counts[f] = counts.get(f, 0) + 1
    if not counts:
        raise AllSamplesAnswerless("no sample has a final answer")
    best_count = max(counts.values())
    # tie-break: first-seen answer among those at the max count
    f_star = next(f for f in finals if f is not None and counts[f] == best_count)
    pool = [i for i, f in enumerate(finals) if f == f_star]
    pick = random.Random(seed).choice(pool)
    return DecodeResult(samples[pick], f_star, (), "majority")


def rm_weighted(samples, scores) -> DecodeResult:
    """f* = argmax_f sum of solution probs; y* = argmax prob with final f*."""
    if len(samples) != len(scores):
        raise ValueError("need one score per sample")
    if not samples:
        raise EmptySamples("no samples to rerank")
    finals = _finals(samples)
    probs = [s.solution_prob for s in scores]
    weights = {}
    for f, p in zip(finals, probs):
        if f is not None:
            weights[f] = weights.get(f, 0.0) + p
    if not weights:
        raise AllSamplesAnswerless("no sample has a final answer")
    best_weight = max(weights.values())
    f_star = next(f for f in finals if f is not None and weights[f] == best_weight)
    pool = [i for i, f in enumerate(finals) if f == f_star]
    pick = max(pool, key=lambda i: (probs[i], -i))
    return DecodeResult(samples[pick], f_star, tuple(probs), "rm_weighted")


def best_of(samples, scores) -> DecodeResult:
    """Global argmax of solution prob; first-seen on ties."""
    if not samples:
        raise EmptySamples("no samples to rank")
    if len(samples) != len(scores):
        raise ValueError("need one score per sample")
    probs = [s.solution_prob for s in scores]
    pick = max(range(len(samples)), key=lambda i: (probs[i], -i))
    selected = samples[pick]
    final = (normalize_answer(selected.final_answer)
             if selected.final_answer is not None else None)
    return DecodeResult(selected, final, tuple(probs), "best_of")


def step_level_rerank(policy, scorer, problem: Problem, k: int = 96,
                      max_steps: int = 15, temperature: float = 1.0,
                      seed: int = 0) -> DecodeResult:
    """Grow a trace one step at a time, keeping the highest-scored candidate."""
    from .policy import SampleRequest

    steps = []
    exceeded = False
    for depth in range(max_steps):
        candidates = policy.sample_step(
            SampleRequest(problem, prefix=tuple(steps), num_samples=k,
                          temperature=temperature, max_steps=max_steps),
            seed=seed + depth)
        scored = [
            scorer.score(problem, Trace(tuple(steps) + (cand,))).solution_prob
            for cand in candidates
        ]
        best_idx = max(range(len(candidates)), key=lambda i: (scored[i], -i))
        steps.append(candidates[best_idx])
        if "Final answer:" in steps[-1].text:
            break
    else:
        exceeded = True
    from .traces import parse_trace, render_trace

    trace = parse_trace(render_trace(Trace(tuple(steps))))
    final = (normalize_answer(trace.final_answer)
             if trace.final_answer is not None else None)
    return DecodeResult(trace, final, (), "step_rerank",
                        max_steps_exceeded=exceeded)


def selective_threshold(calibration_scores, r: float):
    """The r-quantile of calibration scores; abstain on the lower tail.

    r = 0 answers everything (threshold -inf); r = 1 abstains on all.
    """
    if not 0.0 <= r <= 1.0:
        raise ValueError("r must be in [0, 1]")
    if r == 0.0 or not calibration_scores:
        return -math.inf
    ordered = sorted(calibration_scores)
    k = math.ceil(r * len(ordered))
    return ordered[k - 1]


def selective_predict(results, threshold):
    """Partition scored decode results into (answered, abstained).

    A result abstains iff its score is <= threshold. Results must carry a
    score attribute (see ScoredOutcome / decode reports).
    """
    answered, abstained = [], []
    for res in results:
        (abstained if res.score <= threshold else answered).append(res)
    return answered, abstained


@dataclass(frozen=True)
class ScoredOutcome:
    """One decoded problem with the selected sample's score and correctness."""
    problem_id: str
    score: float
    correct: bool
    strategy: str = ""
    final: str | None = None
