"""Step-scoring reward models.

The trainable model is logistic regression over hashed text features plus
structural trace features, trained with per-step log-loss and early-stopped
on validation loss (best checkpoint before max_steps). An oracle-backed
scorer over the synthetic task provides exact prefix-correctness scores for
property tests and calibrated-decoding experiments.
"""

from dataclasses import dataclass, field, replace
import json
import re
import zlib

import numpy as np

from .errors import EmptyDataset
from .labeling import LabeledExample, oracle_step_labels
from .traces import Problem, Trace, verify_calc_annotations

DEFAULT_DIM = 4096

_TOKEN = re.compile(r"[a-z]+|\d+|[^\sa-z0-9]")


@dataclass(frozen=True)
class RmScore:
    per_step_prob: tuple

    @property
    def solution_prob(self) -> float:
        """Probability read off the last step; 0.5 for an empty trace."""
        return self.per_step_prob[-1] if self.per_step_prob else 0.5


@dataclass
class RmParams:
    weights: np.ndarray
    bias: float
    dim: int
    metadata: dict = field(default_factory=dict)

    def copy(self) -> "RmParams":
        return RmParams(self.weights.copy(), self.bias, self.dim,
                        dict(self.metadata))


@dataclass(frozen=True)
class RmTrainConfig:
    learning_rate: float = 0.5
    batch_size: int = 64
    max_steps: int = 2000
    eval_every: int = 25
    seed: int = 0
    init: str = "zero"  # zero | from_params
    l2: float = 1e-5
    validation_fraction: float = 0.2
    dim: int = DEFAULT_DIM


def _tokens(text: str):
    return _TOKEN.findall(text.lower())


def _hash_index(namespace: str, token: str, dim: int) -> int:
    return zlib.crc32(f"{namespace}:{token}".encode()) % dim


N_STRUCTURAL = 6

# Hashed text counts are damped and the verified-calculator block amplified
# so that gradient descent reaches the (perfectly separating) calculator
# signal quickly; without the rescale the noisy text block dominates early
# updates and convergence stalls.
_TEXT_SCALE = 0.1
_STRUCT_SCALE = 4.0


def feature_extract(problem: Problem, prefix_steps, dim: int = DEFAULT_DIM) -> np.ndarray:
    """Deterministic hashed n-gram + structural features for a trace prefix."""
    x = np.zeros(dim + N_STRUCTURAL)
    for tok in _tokens(problem.statement):
        x[_hash_index("q", tok, dim)] += _TEXT_SCALE
    prev = None
    for step in prefix_steps:
        toks = _tokens(step.text)
        for tok in toks:
            x[_hash_index("s", tok, dim)] += _TEXT_SCALE
        for a, b in zip(toks, toks[1:]):
            x[_hash_index("b", f"{a}_{b}", dim)] += _TEXT_SCALE
        prev = step
    # structural block: verified-calculator flags carry most of the signal
    prefix_trace = Trace(tuple(prefix_steps))
    mismatches = verify_calc_annotations(prefix_trace)
    last_index = len(prefix_steps) - 1
    x[dim + 0] = len(prefix_steps) / 10.0
    x[dim + 1] = _STRUCT_SCALE * float(len(mismatches))
    x[dim + 2] = _STRUCT_SCALE * float(any(m.step_index == last_index
                                           for m in mismatches))
    x[dim + 3] = float(prev is not None and "Final answer:" in prev.text)
    x[dim + 4] = sum(len(s.calc_annotations) for s in prefix_steps) / 10.0
    x[dim + 5] = _STRUCT_SCALE * float(any(m.parse_failed for m in mismatches))
    return x


def _sigmoid(z):
    return 1.0 / (1.0 + np.exp(-np.clip(z, -30.0, 30.0)))


def score(params: RmParams, problem: Problem, trace: Trace) -> RmScore:
    """Per-step sigmoid of the linear score on each prefix."""
    probs = []
    for i in range(len(trace.steps)):
        x = feature_extract(problem, trace.steps[: i + 1], params.dim)
        probs.append(float(_sigmoid(x @ params.weights + params.bias)))
    return RmScore(tuple(probs))


def _dataset_rows(examples, dim):
    xs, ys = [], []
    for ex in examples:
        for i, label in enumerate(ex.labels.labels):
            xs.append(feature_extract(ex.problem, ex.trace.steps[: i + 1], dim))
            ys.append(1.0 if label else 0.0)
    if not xs:
        raise EmptyDataset("no labeled steps")
    return np.asarray(xs), np.asarray(ys)


def _log_loss(weights, bias, xs, ys):
    p = _sigmoid(xs @ weights + bias)
    eps = 1e-12
    return float(-np.mean(ys * np.log(p + eps) + (1 - ys) * np.log(1 - p + eps)))


def train(dataset, config: RmTrainConfig, validation=None,
          init_params: RmParams | None = None) -> RmParams:
    """SGD on per-step log-loss; returns the best-validation-loss snapshot.

    If no validation examples are passed, a seeded fraction of the dataset is
    held out. Deterministic given config.seed.
    """
    if not dataset:
        raise EmptyDataset("empty training dataset")
    rng = np.random.default_rng(config.seed)
    if validation is None:
        order = rng.permutation(len(dataset))
        n_val = max(1, int(len(dataset) * config.validation_fraction))
        val_idx = set(order[:n_val].tolist())
        validation = [dataset[i] for i in sorted(val_idx)]
        train_set = [dataset[i] for i in range(len(dataset)) if i not in val_idx]
        if not train_set:
            train_set = validation
    else:
        train_set = dataset

    xs, ys = _dataset_rows(train_set, config.dim)
    val_xs, val_ys = _dataset_rows(validation, config.dim)

    if config.init == "from_params":
        if init_params is None:
            raise ValueError("init='from_params' requires init_params")
        weights = init_params.weights.copy()
        bias = init_params.bias
    else:
        weights = np.zeros(xs.shape[1])
        bias = 0.0

    losses = []
    best_loss = _log_loss(weights, bias, val_xs, val_ys)
    best = (weights.copy(), bias, 0)
    losses.append((0, best_loss))

    for step in range(1, config.max_steps + 1):
        batch = rng.integers(0, len(xs), size=min(config.batch_size, len(xs)))
        xb, yb = xs[batch], ys[batch]
        p = _sigmoid(xb @ weights + bias)
        grad_w = xb.T @ (p - yb) / len(yb) + config.l2 * weights
        grad_b = float(np.mean(p - yb))
        weights -= config.learning_rate * grad_w
        bias -= config.learning_rate * grad_b
        if step % config.eval_every == 0 or step == config.max_steps:
            loss = _log_loss(weights, bias, val_xs, val_ys)
            losses.append((step, loss))
            if loss < best_loss:
                best_loss = loss
                best = (weights.copy(), bias, step)

    weights, bias, best_step = best
    return RmParams(weights, bias, config.dim, {
        "steps_run": config.max_steps,
        "best_step": best_step,
        "best_validation_loss": best_loss,
        "validation_losses": losses,
    })


def retrain_for_iteration(old_params: RmParams, new_samples, config: RmTrainConfig,
                          retrain: bool, validation=None) -> RmParams:
    """Retrain on current-policy samples, or return the fixed RM unchanged."""
    if not retrain:
        return old_params
    return train(new_samples, config, validation=validation)


def save_params(path, params: RmParams):
    meta = {k: v for k, v in params.metadata.items()}
    with open(path, "w", encoding="utf-8") as fh:
        json.dump({
            "version": 1,
            "dim": params.dim,
            "weights": params.weights.tolist(),
            "bias": params.bias,
            "metadata": meta,
        }, fh)


def load_params(path) -> RmParams:
    with open(path, encoding="utf-8") as fh:
        obj = json.load(fh)
    if obj.get("version") != 1:
        raise ValueError(f"unsupported params version {obj.get('version')!r}")
    return RmParams(np.asarray(obj["weights"], dtype=float), float(obj["bias"]),
                    int(obj["dim"]), obj.get("metadata", {}))


class TrainedRewardModel:
    """Uniform scorer interface around RmParams."""

    def __init__(self, params: RmParams):
        self.params = params

    def score(self, problem: Problem, trace: Trace) -> RmScore:
        return score(self.params, problem, trace)


class OracleRewardModel:
    """Exact prefix-correctness scorer over the synthetic task.

    Per-step probability is (1 - smoothing) while the steps so far are
    correct and smoothing afterwards, i.e. a smoothed indicator that is
    perfectly calibrated to realized step correctness.
    """

    def __init__(self, problems, smoothing: float = 1e-6):
        self.table = {sp.problem.id: sp for sp in problems}
        self.smoothing = smoothing

    def score(self, problem: Problem, trace: Trace) -> RmScore:
        sp = self.table[problem.id]
        labels = oracle_step_labels(sp, trace).labels
        lo, hi = self.smoothing, 1.0 - self.smoothing
        return RmScore(tuple(hi if ok else lo for ok in labels))
