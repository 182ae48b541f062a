"""Evaluation quantities: error rates, agreement matrices, kappa, curves.

Trace error is only defined on problems with correct final answers; dual
raters yield a min-max range depending on whether an error needs both raters
(min) or just one (max).
"""

from dataclasses import dataclass, field
import csv
import math

from .decoding import selective_predict, selective_threshold
from .errors import EmptyEval, KeyMismatch, LengthMismatch, NoEligibleOutcomes

INF_REDUCTION = float("inf")  # sentinel: selective error hit exactly zero


@dataclass(frozen=True)
class EvalOutcome:
    problem_id: str
    final_correct: bool
    rater_trace_correct: tuple = ()  # up to two rater verdicts, or one oracle
    score: float | None = None


def final_answer_error_rate(outcomes) -> float:
    if not outcomes:
        raise EmptyEval("no outcomes")
    return sum(1 for o in outcomes if not o.final_correct) / len(outcomes)


def trace_error_rate(outcomes):
    """(mean, min, max) trace error over final-correct, rated outcomes."""
    eligible = [o for o in outcomes if o.final_correct and o.rater_trace_correct]
    if not eligible:
        raise NoEligibleOutcomes("trace error needs rated, final-correct outcomes")
    mean_total = min_total = max_total = 0.0
    for o in eligible:
        errors = [not ok for ok in o.rater_trace_correct]
        mean_total += sum(errors) / len(errors)
        min_total += 1.0 if all(errors) else 0.0
        max_total += 1.0 if any(errors) else 0.0
    n = len(eligible)
    return mean_total / n, min_total / n, max_total / n


@dataclass(frozen=True)
class AgreementMatrix:
    sources: tuple
    values: tuple  # row-major pairwise agreement fractions
    scope: str  # all_steps | last_step

    def agreement(self, a: str, b: str) -> float:
        i, j = self.sources.index(a), self.sources.index(b)
        return self.values[i][j]


def agreement_matrix(step_sources, scope: str = "all_steps",
                     prob_threshold: float = 0.5) -> AgreementMatrix:
    """Pairwise fraction of (sample, step) keys on which two sources agree.

    step_sources: name -> {sample_id: sequence of per-step values}. Values
    may be booleans/ints or probabilities; probabilities binarize at
    prob_threshold. scope='last_step' keeps only each sample's last step.
    """
    names = tuple(step_sources.keys())
    binarized = {}
    key_sets = []
    for name in names:
        per_sample = step_sources[name]
        flat = {}
        for sample_id, values in per_sample.items():
            indices = range(len(values))
            if scope == "last_step":
                indices = [len(values) - 1] if len(values) else []
            for i in indices:
                v = values[i]
                flat[(sample_id, i)] = (v > prob_threshold if isinstance(v, float)
                                        else bool(v))
        binarized[name] = flat
        key_sets.append(set(flat))
    if key_sets and any(ks != key_sets[0] for ks in key_sets):
        raise KeyMismatch("sources must cover identical (sample, step) keys")
    keys = sorted(key_sets[0]) if key_sets else []
    rows = []
    for a in names:
        row = []
        for b in names:
            if not keys:
                row.append(1.0)
                continue
            same = sum(1 for k in keys if binarized[a][k] == binarized[b][k])
            row.append(same / len(keys))
        rows.append(tuple(row))
    return AgreementMatrix(names, tuple(rows), scope)


def cohens_kappa(a, b) -> float:
    """kappa = (p_o - p_e) / (1 - p_e), with marginal-product chance agreement."""
    if len(a) != len(b):
        raise LengthMismatch("verdict sequences differ in length")
    if not a:
        raise LengthMismatch("need at least one paired verdict")
    n = len(a)
    p_o = sum(1 for x, y in zip(a, b) if x == y) / n
    categories = set(a) | set(b)
    p_e = sum((list(a).count(c) / n) * (list(b).count(c) / n) for c in categories)
    if p_e == 1.0:
        return 1.0 if p_o == 1.0 else 0.0
    return (p_o - p_e) / (1 - p_e)


@dataclass(frozen=True)
class SelectivePoint:
    r: float
    selective_error: float
    reduction_factor: float  # INF_REDUCTION when selective error is zero


def selective_error_curve(outcomes, r_grid):
    """Selective error and reduction factor at each abstention rate r.

    Thresholds are the r-quantiles of the outcomes' own scores; selective
    error is measured on the answered set (0 when everything is abstained).
    """
    scored = [o for o in outcomes if o.score is not None]
    if len(scored) != len(outcomes):
        raise EmptyEval("every outcome needs a score")
    if not scored:
        raise EmptyEval("no outcomes")
    scores = [o.score for o in scored]
    base_error = sum(1 for o in scored if not o.final_correct) / len(scored)
    points = []
    for r in r_grid:
        threshold = selective_threshold(scores, r)
        answered = [o for o in scored if o.score > threshold]
        if answered:
            err = sum(1 for o in answered if not o.final_correct) / len(answered)
        else:
            err = 0.0
        if err == 0.0:
            factor = 1.0 if base_error == 0.0 else INF_REDUCTION
        else:
            factor = base_error / err
        points.append(SelectivePoint(r, err, factor))
    return points


def write_curve_csv(path, points):
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(["r", "selective_error", "reduction_factor"])
        for p in points:
            factor = "inf" if math.isinf(p.reduction_factor) else p.reduction_factor
            writer.writerow([p.r, p.selective_error, factor])


def write_matrix_csv(path, matrix: AgreementMatrix):
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(["scope", matrix.scope])
        writer.writerow(["source", *matrix.sources])
        for name, row in zip(matrix.sources, matrix.values):
            writer.writerow([name, *row])


@dataclass(frozen=True)
class SummaryRow:
    """Shape of one overview-table row."""
    approach: str
    trace_err_mean: float | None
    trace_err_min: float | None
    trace_err_max: float | None
    final_err: float

    def to_json(self):
        return {
            "approach": self.approach,
            "trace_err_mean": self.trace_err_mean,
            "trace_err_min": self.trace_err_min,
            "trace_err_max": self.trace_err_max,
            "final_err": self.final_err,
        }
