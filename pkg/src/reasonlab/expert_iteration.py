"""Expert iteration: alternate policy improvement and distillation.

Three improvement operators produce expert samples (filter by final-answer
correctness, pick the highest-scored full sample, or grow a trace stepwise
under the scorer), then the policy is refit to the expert samples. SFT-like
runs accumulate expert samples across epochs and keep a fixed RM; few-shot-
like runs restart from base samples each epoch and retrain the RM.
"""

from dataclasses import dataclass, field, replace
import json
import random

from .decoding import majority_vote, rm_weighted, step_level_rerank
from .errors import AllSamplesAnswerless, ReasonLabError
from .labeling import build_orm_dataset
from .policy import SampleRequest, SyntheticPolicy, expert_log_likelihood
from .synthetic import oracle_first_mistake
from .traces import final_answer_match

IMPROVEMENT_MODES = ("final_answer", "orm", "prm")
BASE_MODES = ("sft_like", "few_shot_like")
SELECTION_METRICS = ("rm_weighted_val_error", "majority_val_error")


@dataclass(frozen=True)
class ExpertConfig:
    improvement: str = "final_answer"
    base_mode: str = "sft_like"
    epochs: int = 5
    k: int = 96
    max_steps: int = 15
    temperature: float = 1.0
    accumulate_samples: bool | None = None  # default: base_mode == sft_like
    retrain_rm: bool | None = None  # default: base_mode == few_shot_like
    selection_metric: str | None = None  # default by improvement mode
    seed: int = 0

    def resolved(self) -> "ExpertConfig":
        updates = {}
        if self.accumulate_samples is None:
            updates["accumulate_samples"] = self.base_mode == "sft_like"
        if self.retrain_rm is None:
            updates["retrain_rm"] = self.base_mode == "few_shot_like"
        if self.selection_metric is None:
            updates["selection_metric"] = ("majority_val_error"
                                           if self.improvement == "final_answer"
                                           else "rm_weighted_val_error")
        cfg = replace(self, **updates) if updates else self
        if cfg.improvement not in IMPROVEMENT_MODES:
            raise ValueError(f"unknown improvement {cfg.improvement!r}")
        if cfg.base_mode not in BASE_MODES:
            raise ValueError(f"unknown base_mode {cfg.base_mode!r}")
        if cfg.selection_metric not in SELECTION_METRICS:
            raise ValueError(f"unknown selection_metric {cfg.selection_metric!r}")
        return cfg


_CONFIG_KEYS = {
    "improvement": str, "base_mode": str, "epochs": int, "k": int,
    "max_steps": int, "temperature": float, "accumulate_samples": bool,
    "retrain_rm": bool, "selection_metric": str, "seed": int,
}


def load_expert_config(path) -> ExpertConfig:
    """Flat key = value config file; keys match ExpertConfig field names."""
    values = {}
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            line = line.strip()
            if not line or line.startswith("#"):
                continue
            if "=" not in line:
                raise ValueError(f"line {lineno}: expected key = value")
            key, _, raw = line.partition("=")
            key, raw = key.strip(), raw.strip()
            if key not in _CONFIG_KEYS:
                raise ValueError(f"line {lineno}: unknown key {key!r}")
            caster = _CONFIG_KEYS[key]
            if caster is bool:
                values[key] = raw.lower() in ("1", "true", "yes")
            else:
                values[key] = caster(raw)
    return ExpertConfig(**values)


def improve_final_answer(policy, problems, k: int, keep_rule: str,
                         temperature: float = 1.0, max_steps: int = 15,
                         seed: int = 0):
    """Filter K full traces per problem by final-answer correctness."""
    if keep_rule not in ("all_correct", "one_random_correct"):
        raise ValueError(f"unknown keep_rule {keep_rule!r}")
    rng = random.Random(seed)
    expert = []
    for problem in problems:
        traces = policy.sample_full(
            SampleRequest(problem, num_samples=k, temperature=temperature,
                          max_steps=max_steps), seed=seed)
        correct = [t for t in traces
                   if final_answer_match(t.final_answer, problem.reference_final)]
        if not correct:
            continue
        if keep_rule == "one_random_correct":
            expert.append((problem, rng.choice(correct)))
        else:
            expert.extend((problem, t) for t in correct)
    return expert


def improve_orm(policy, scorer, problems, k: int, temperature: float = 1.0,
                max_steps: int = 15, seed: int = 0):
    """One trace per problem: argmax solution score over K samples."""
    expert = []
    for problem in problems:
        traces = policy.sample_full(
            SampleRequest(problem, num_samples=k, temperature=temperature,
                          max_steps=max_steps), seed=seed)
        probs = [scorer.score(problem, t).solution_prob for t in traces]
        pick = max(range(len(traces)), key=lambda i: (probs[i], -i))
        expert.append((problem, traces[pick]))
    return expert


def improve_prm(policy, scorer, problems, k: int, max_steps: int = 15,
                temperature: float = 1.0, seed: int = 0):
    """One trace per problem grown stepwise under the scorer."""
    expert = []
    for problem in problems:
        result = step_level_rerank(policy, scorer, problem, k=k,
                                   max_steps=max_steps,
                                   temperature=temperature, seed=seed)
        expert.append((problem, result.selected))
    return expert


@dataclass
class EpochRecord:
    epoch: int
    policy_params: dict
    expert_sample_count: int
    cumulative_sample_count: int
    val_final_answer_error: float
    val_oracle_trace_error: float | None


@dataclass
class IterationReport:
    config: ExpertConfig
    epochs: list
    chosen_epoch: int
    aborted: bool = False
    abort_reason: str = ""

    def to_json(self):
        return {
            "config": self.config.__dict__,
            "epochs": [e.__dict__ for e in self.epochs],
            "chosen_epoch": self.chosen_epoch,
            "aborted": self.aborted,
            "abort_reason": self.abort_reason,
        }


def evaluate_policy(policy, problems, scorer=None, k: int = 96,
                    temperature: float = 1.0, max_steps: int = 15,
                    seed: int = 0, strategy: str = "majority"):
    """(final-answer error, oracle trace error among correct finals) on a corpus.

    Oracle trace error is available only for SyntheticPolicy corpora.
    """
    table = getattr(policy, "table", None)
    wrong_final = 0
    correct_final = 0
    trace_mistakes = 0
    for problem in problems:
        traces = policy.sample_full(
            SampleRequest(problem, num_samples=k, temperature=temperature,
                          max_steps=max_steps), seed=seed)
        try:
            if strategy == "rm_weighted" and scorer is not None:
                scores = [scorer.score(problem, t) for t in traces]
                result = rm_weighted(traces, scores)
            else:
                result = majority_vote(traces, seed=seed)
        except AllSamplesAnswerless:
            wrong_final += 1
            continue
        if final_answer_match(result.selected_final, problem.reference_final):
            correct_final += 1
            if table is not None:
                sp = table[problem.id]
                if oracle_first_mistake(sp, result.selected) is not None:
                    trace_mistakes += 1
        else:
            wrong_final += 1
    n = len(problems)
    final_err = wrong_final / n if n else 0.0
    trace_err = (trace_mistakes / correct_final if table is not None
                 and correct_final else None)
    return final_err, trace_err


def run_expert_iteration(config: ExpertConfig, problems, val_problems,
                         base_policy: SyntheticPolicy, scorer=None,
                         rm_factory=None) -> IterationReport:
    """The meta-algorithm: per epoch, improve then distill; pick the best epoch.

    scorer is the (fixed) reward model for orm/prm improvement and rm-weighted
    selection. When config.retrain_rm is set, rm_factory(policy, epoch) must
    rebuild a scorer from current-policy samples each epoch.
    """
    cfg = config.resolved()
    if cfg.improvement in ("orm", "prm") and scorer is None and rm_factory is None:
        raise ValueError(f"{cfg.improvement} improvement needs a scorer")

    initial_policy = base_policy
    policy = base_policy
    accumulated = []
    epochs = []
    policies = []
    aborted = False
    abort_reason = ""

    for epoch in range(1, cfg.epochs + 1):
        epoch_seed = cfg.seed * 10007 + epoch
        try:
            active_scorer = scorer
            if cfg.retrain_rm and rm_factory is not None:
                active_scorer = rm_factory(policy, epoch)

            if cfg.improvement == "final_answer":
                keep = ("one_random_correct" if cfg.base_mode == "sft_like"
                        else "all_correct")
                expert = improve_final_answer(
                    policy, problems, cfg.k, keep, cfg.temperature,
                    cfg.max_steps, seed=epoch_seed)
            elif cfg.improvement == "orm":
                expert = improve_orm(policy, active_scorer, problems, cfg.k,
                                     cfg.temperature, cfg.max_steps,
                                     seed=epoch_seed)
            else:
                expert = improve_prm(policy, active_scorer, problems, cfg.k,
                                     cfg.max_steps, cfg.temperature,
                                     seed=epoch_seed)

            if cfg.accumulate_samples:
                accumulated.extend(expert)
                train_samples = list(accumulated)
            else:
                train_samples = expert

            if train_samples:
                # distill from the initial parameters; the refit is an MLE on
                # the expert set, with initial params as empty-strata fallback
                candidate = SyntheticPolicy(initial_policy.params,
                                            policy.table.values()
                                            ).distill(train_samples)
                # early-stopping guard: reject refits that worsen held-out
                # log-likelihood of expert samples on validation problems
                val_expert = _validation_expert_samples(
                    cfg, policy, active_scorer, val_problems, epoch_seed)
                if val_expert:
                    old_ll = expert_log_likelihood(policy.params, val_expert,
                                                   policy.table)
                    new_ll = expert_log_likelihood(candidate.params, val_expert,
                                                   policy.table)
                    if new_ll >= old_ll:
                        policy = candidate
                else:
                    policy = candidate

            strategy = ("majority" if cfg.selection_metric == "majority_val_error"
                        else "rm_weighted")
            final_err, trace_err = evaluate_policy(
                policy, val_problems, active_scorer, cfg.k, cfg.temperature,
                cfg.max_steps, seed=epoch_seed, strategy=strategy)
        except ReasonLabError as exc:
            aborted = True
            abort_reason = f"epoch {epoch}: {exc}"
            break

        epochs.append(EpochRecord(
            epoch=epoch,
            policy_params={"step_error_rate": policy.params.step_error_rate,
                           "recovery_rate": policy.params.recovery_rate},
            expert_sample_count=len(expert),
            cumulative_sample_count=len(accumulated) if cfg.accumulate_samples
            else len(expert),
            val_final_answer_error=final_err,
            val_oracle_trace_error=trace_err,
        ))
        policies.append(policy)

    if not epochs:
        return IterationReport(cfg, [], 0, aborted, abort_reason)
    chosen = min(range(len(epochs)),
                 key=lambda i: (epochs[i].val_final_answer_error, i))
    report = IterationReport(cfg, epochs, epochs[chosen].epoch, aborted,
                             abort_reason)
    report.chosen_policy = policies[chosen]
    return report


def _validation_expert_samples(cfg, policy, scorer, val_problems, seed):
    subset = list(val_problems)[:32]
    if not subset:
        return []
    if cfg.improvement == "final_answer":
        keep = ("one_random_correct" if cfg.base_mode == "sft_like"
                else "all_correct")
        return improve_final_answer(policy, subset, min(cfg.k, 16), keep,
                                    cfg.temperature, cfg.max_steps, seed=seed + 1)
    if cfg.improvement == "orm":
        return improve_orm(policy, scorer, subset, min(cfg.k, 16),
                           cfg.temperature, cfg.max_steps, seed=seed + 1)
    return improve_prm(policy, scorer, subset, min(cfg.k, 16), cfg.max_steps,
                       cfg.temperature, seed=seed + 1)


def write_iteration_report(path, report: IterationReport):
    """Line-delimited epoch log followed by a summary record."""
    with open(path, "w", encoding="utf-8") as fh:
        for rec in report.epochs:
            fh.write(json.dumps({"type": "epoch", **rec.__dict__}) + "\n")
        summary = report.to_json()
        summary.pop("epochs")
        fh.write(json.dumps({"type": "summary", **summary}) + "\n")
