"""Pluggable trace samplers standing in for the language-model policy.

SyntheticPolicy is a parametric sampler over the arithmetic-chain task: it
makes an independent step error with probability eps (scaled by temperature
and a per-problem difficulty multiplier), and an erroneous chain still lands
on the correct final answer with probability rho (a "lucky recovery").
RemotePolicy speaks a small HTTP protocol so a real LM server can be swapped
in without code changes.
"""

from dataclasses import dataclass, field, replace
import hashlib
import random

from .errors import EmptyDataset, InvalidRequest, PolicyUnavailable
from .synthetic import (
    SynthProblem,
    apply_op,
    declared_step_value,
    final_step_text,
    oracle_first_mistake,
    step_text,
)
from .traces import (
    FINAL_ANSWER_MARKER,
    Problem,
    Step,
    Trace,
    extract_final_answer,
    final_answer_match,
    parse_trace,
)

DEFAULT_MAX_STEPS = 15


@dataclass(frozen=True)
class SampleRequest:
    problem: Problem
    prefix: tuple = ()
    num_samples: int = 1
    temperature: float = 1.0
    max_steps: int = DEFAULT_MAX_STEPS


@dataclass(frozen=True)
class SynthPolicyParams:
    step_error_rate: float = 0.3
    recovery_rate: float = 0.05
    # Per-problem difficulty multipliers on the step error rate. (1, 1) makes
    # every problem equally hard; a spread creates a hard tail where even
    # K-sample aggregation fails, which mirrors real benchmark behavior.
    difficulty_range: tuple = (1.0, 1.0)
    # Greedy decoding commits to the locally most plausible step, which on
    # hard steps is still wrong; it errs at this fraction of the sampling
    # error rate instead of being error-free.
    greedy_error_scale: float = 0.5

    def __post_init__(self):
        if not 0.0 <= self.step_error_rate <= 1.0:
            raise ValueError("step_error_rate must be in [0, 1]")
        if not 0.0 <= self.recovery_rate <= 1.0:
            raise ValueError("recovery_rate must be in [0, 1]")

    def temperature_scaled(self, temperature: float) -> float:
        """Error rate at a given temperature: eps * T clamped to [0, 0.95]."""
        return min(max(self.step_error_rate * temperature, 0.0), 0.95)


def _stable_unit(*parts) -> float:
    digest = hashlib.sha256("|".join(str(p) for p in parts).encode()).digest()
    return int.from_bytes(digest[:8], "big") / 2**64


def _stable_int(*parts) -> int:
    digest = hashlib.sha256("|".join(str(p) for p in parts).encode()).digest()
    return int.from_bytes(digest[8:16], "big")


class SyntheticPolicy:
    """Trainable synthetic policy over a table of SynthProblems."""

    def __init__(self, params: SynthPolicyParams, problems):
        self.params = params
        self.table = {sp.problem.id: sp for sp in problems}

    # -- lookups -----------------------------------------------------------

    def _lookup(self, problem: Problem) -> SynthProblem:
        sp = self.table.get(problem.id)
        if sp is None:
            raise InvalidRequest(f"unknown problem {problem.id!r}")
        return sp

    def _difficulty(self, sp: SynthProblem) -> float:
        lo, hi = self.params.difficulty_range
        return lo + (hi - lo) * _stable_unit("difficulty", sp.problem.id)

    def _step_error(self, sp: SynthProblem, temperature: float) -> float:
        base = self.params.temperature_scaled(temperature)
        return min(base * self._difficulty(sp), 0.95)

    # -- sampling ----------------------------------------------------------

    def sample_full(self, req: SampleRequest, seed: int = 0):
        if req.prefix:
            raise InvalidRequest("sample_full requires an empty prefix")
        if req.num_samples < 1:
            raise InvalidRequest("num_samples must be >= 1")
        sp = self._lookup(req.problem)
        q = self._step_error(sp, req.temperature)
        rng = random.Random(f"full|{seed}|{sp.problem.id}")
        return [self._sample_trace(sp, rng, q, req.max_steps)
                for _ in range(req.num_samples)]

    def _sample_trace(self, sp, rng, q, max_steps) -> Trace:
        texts = []
        cur = sp.start
        diverged = False
        for i, (op, operand) in enumerate(sp.ops):
            if len(texts) >= max_steps - 1:
                break
            nxt = apply_op(cur, op, operand)
            if q > 0 and rng.random() < q:
                nxt = _corrupt(nxt, rng)
            texts.append(step_text(cur, op, operand, nxt))
            if nxt != sp.truth[i]:
                diverged = True
            cur = nxt
        final = self._final_value(sp, cur, diverged, rng)
        texts.append(final_step_text(final))
        return parse_trace("\n".join(texts))

    def _final_value(self, sp, cur, diverged, rng):
        if not diverged:
            return cur
        if rng.random() < self.params.recovery_rate:
            return sp.final_value  # lucky recovery
        if cur == sp.final_value:
            return cur + 1  # canceled errors never count as silent recoveries
        return cur

    def sample_step(self, req: SampleRequest, seed: int = 0):
        """K candidate next steps conditioned on the prefix."""
        if req.num_samples < 1:
            raise InvalidRequest("num_samples must be >= 1")
        sp = self._lookup(req.problem)
        q = self._step_error(sp, req.temperature)
        n, cur, diverged = self._read_prefix(sp, req.prefix)
        rng = random.Random(f"step|{seed}|{sp.problem.id}|{n}|{cur}")
        candidates = []
        for _ in range(req.num_samples):
            if n >= len(sp.ops) or n >= req.max_steps - 1:
                final = self._final_value(sp, cur, diverged, rng)
                candidates.append(Step.from_text(final_step_text(final)))
            else:
                op, operand = sp.ops[n]
                nxt = apply_op(cur, op, operand)
                if q > 0 and rng.random() < q:
                    nxt = _corrupt(nxt, rng)
                candidates.append(Step.from_text(step_text(cur, op, operand, nxt)))
        return candidates

    def _read_prefix(self, sp, prefix):
        cur = sp.start
        diverged = False
        n = 0
        for step in prefix:
            if FINAL_ANSWER_MARKER in step.text:
                break
            declared = declared_step_value(step)
            if declared is None or n >= len(sp.ops) or declared != sp.truth[n]:
                diverged = True
            if declared is not None:
                cur = declared
            n += 1
        return n, cur, diverged

    def greedy(self, problem: Problem) -> Trace:
        """Deterministic modal-commitment decode; errs on hard steps."""
        sp = self._lookup(problem)
        qg = min(self.params.step_error_rate * self.params.greedy_error_scale
                 * self._difficulty(sp), 0.95)
        key = f"{self.params.step_error_rate:.12f}|{self.params.greedy_error_scale}"
        texts = []
        cur = sp.start
        diverged = False
        for i, (op, operand) in enumerate(sp.ops):
            nxt = apply_op(cur, op, operand)
            if _stable_unit("greedy", key, sp.problem.id, i) < qg:
                h = _stable_int("greedy-delta", key, sp.problem.id, i)
                nxt += (1 + h % 3) * (-1 if (h >> 4) & 1 else 1)
            texts.append(step_text(cur, op, operand, nxt))
            if nxt != sp.truth[i]:
                diverged = True
            cur = nxt
        if diverged:
            if _stable_unit("greedy-final", key, sp.problem.id) < self.params.recovery_rate:
                cur = sp.final_value
            elif cur == sp.final_value:
                cur += 1
        texts.append(final_step_text(cur))
        return parse_trace("\n".join(texts))

    # -- learning ----------------------------------------------------------

    def distill(self, expert_samples) -> "SyntheticPolicy":
        new_params = distill(self.params, expert_samples, self.table)
        return SyntheticPolicy(new_params, self.table.values())


def _corrupt(value: int, rng) -> int:
    return value + rng.choice((1, 2, 3)) * rng.choice((-1, 1))


def expert_log_likelihood(params: SynthPolicyParams, expert_samples, table) -> float:
    """Mean per-trace log-likelihood of the censored step-error process."""
    import math

    eps = min(max(params.step_error_rate, 1e-6), 1 - 1e-6)
    rho = min(max(params.recovery_rate, 1e-6), 1 - 1e-6)
    total = 0.0
    for problem, trace in expert_samples:
        stats = _trace_stats(problem, trace, table)
        clean_steps, mistake, recovered = stats
        total += clean_steps * math.log(1 - eps)
        if mistake:
            total += math.log(eps)
            total += math.log(rho if recovered else 1 - rho)
    return total / max(len(expert_samples), 1)


def _trace_stats(problem, trace, table):
    """(clean exposed steps, had step mistake, recovered) under the oracle."""
    sp = table[problem.id]
    m = oracle_first_mistake(sp, trace)
    n_reason = sum(1 for s in trace.steps if FINAL_ANSWER_MARKER not in s.text)
    if m is not None and m < n_reason:
        recovered = final_answer_match(extract_final_answer(trace),
                                       str(sp.final_value))
        return m, True, recovered
    return n_reason, False, False


def distill(params: SynthPolicyParams, expert_samples, table) -> SynthPolicyParams:
    """Maximum-likelihood refit of (eps, rho) from expert samples.

    eps is the per-step error frequency with geometric censoring at the first
    mistake; rho is the recovered fraction among erroneous traces. Strata with
    no observations fall back to the old parameter value.
    """
    if not expert_samples:
        raise EmptyDataset("distill requires expert samples")
    mistakes = 0
    exposures = 0
    recovered_count = 0
    for problem, trace in expert_samples:
        clean_steps, mistake, recovered = _trace_stats(problem, trace, table)
        exposures += clean_steps + (1 if mistake else 0)
        if mistake:
            mistakes += 1
            if recovered:
                recovered_count += 1
    eps = mistakes / exposures if exposures else params.step_error_rate
    rho = recovered_count / mistakes if mistakes else params.recovery_rate
    return replace(params, step_error_rate=eps, recovery_rate=rho)


class RemotePolicy:
    """Client for the remote policy wire protocol.

    POST {base}/v1/sample   {problem_id, statement, prefix_steps, num_samples,
                             temperature, max_steps} -> {samples: [[step, ...]]}
    POST {base}/v1/greedy   same body minus num_samples -> {samples: [[step, ...]]}
    POST {base}/v1/distill  {samples: [{problem_id, steps}]} -> {model: tag}

    Any transport failure or non-2xx response raises PolicyUnavailable.
    """

    def __init__(self, base_url: str, session=None, timeout: float = 30.0,
                 retries: int = 2):
        if session is None:
            import requests

            session = requests.Session()
        self.base_url = base_url.rstrip("/")
        self.session = session
        self.timeout = timeout
        self.retries = retries

    def _post(self, path: str, body: dict) -> dict:
        last_exc = None
        for _ in range(self.retries + 1):
            try:
                resp = self.session.post(self.base_url + path, json=body,
                                         timeout=self.timeout)
            except Exception as exc:  # requests transport errors
                last_exc = exc
                continue
            if 200 <= resp.status_code < 300:
                return resp.json()
            last_exc = PolicyUnavailable(
                f"{path} returned HTTP {resp.status_code}")
        raise PolicyUnavailable(f"{path} failed after retries: {last_exc}")

    @staticmethod
    def _request_body(req: SampleRequest) -> dict:
        return {
            "problem_id": req.problem.id,
            "statement": req.problem.statement,
            "prefix_steps": [s.text for s in req.prefix],
            "temperature": req.temperature,
            "max_steps": req.max_steps,
        }

    def sample_full(self, req: SampleRequest, seed: int = 0):
        if req.prefix:
            raise InvalidRequest("sample_full requires an empty prefix")
        body = self._request_body(req)
        body["num_samples"] = req.num_samples
        body["seed"] = seed
        payload = self._post("/v1/sample", body)
        return [parse_trace("\n".join(steps)) for steps in payload["samples"]]

    def sample_step(self, req: SampleRequest, seed: int = 0):
        body = self._request_body(req)
        body["num_samples"] = req.num_samples
        body["seed"] = seed
        payload = self._post("/v1/sample", body)
        return [Step.from_text(steps[0]) for steps in payload["samples"] if steps]

    def greedy(self, problem: Problem) -> Trace:
        body = {"problem_id": problem.id, "statement": problem.statement,
                "prefix_steps": [], "temperature": 0.0,
                "max_steps": DEFAULT_MAX_STEPS}
        payload = self._post("/v1/greedy", body)
        return parse_trace("\n".join(payload["samples"][0]))

    def distill(self, expert_samples) -> str:
        body = {"samples": [{"problem_id": p.id,
                             "steps": [s.text for s in t.steps]}
                            for p, t in expert_samples]}
        return self._post("/v1/distill", body).get("model", "")
