"""Command-line entry point tying the library into reproducible experiments.

Every subcommand takes --seed and produces byte-identical outputs for
identical invocations. Exit codes: 0 success, 2 configuration error,
3 runtime error; failures print one machine-readable JSON record to stderr.
"""

import argparse
import json
import sys

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_RUNTIME = 3


def _load_synth_problems(path):
    from .datasets import load_problem_file
    from .synthetic import synth_problem_from_record

    return [synth_problem_from_record(rec)
            for rec in load_problem_file(path, source="synthetic")]


def _make_policy(spec: str, problems, step_error_rate, recovery_rate):
    from .policy import RemotePolicy, SynthPolicyParams, SyntheticPolicy

    if spec == "synthetic":
        params = SynthPolicyParams(step_error_rate=step_error_rate,
                                   recovery_rate=recovery_rate)
        return SyntheticPolicy(params, problems)
    if spec.startswith("remote:"):
        return RemotePolicy(spec[len("remote:"):])
    raise ValueError(f"unknown policy {spec!r}")


def _load_scorer(path, problems):
    from .reward_model import OracleRewardModel, TrainedRewardModel, load_params

    if path == "oracle":
        return OracleRewardModel(problems)
    return TrainedRewardModel(load_params(path))


# -- subcommand bodies -------------------------------------------------------


def cmd_gen_synth(args):
    from .datasets import save_problem_file
    from .synthetic import SynthSpec, generate_problems

    spec_kwargs = {"seed": args.seed}
    if args.spec:
        with open(args.spec, encoding="utf-8") as fh:
            obj = json.load(fh)
        spec_kwargs.update({
            k: tuple(v) if isinstance(v, list) else v for k, v in obj.items()})
    problems = generate_problems(SynthSpec(**spec_kwargs))
    save_problem_file(args.out, [sp.record for sp in problems])
    print(f"wrote {len(problems)} problems to {args.out}")
    return EXIT_OK


def cmd_sample(args):
    from .policy import SampleRequest

    problems = _load_synth_problems(args.problems)
    policy = _make_policy(args.policy, problems, args.step_error_rate,
                          args.recovery_rate)
    with open(args.out, "w", encoding="utf-8") as fh:
        for sp in problems:
            traces = policy.sample_full(
                SampleRequest(sp.problem, num_samples=args.k,
                              temperature=args.temperature,
                              max_steps=args.max_steps), seed=args.seed)
            for j, trace in enumerate(traces):
                fh.write(json.dumps({
                    "problem_id": sp.problem.id,
                    "sample_id": f"{sp.problem.id}#{j}",
                    "steps": [s.text for s in trace.steps],
                }) + "\n")
    print(f"wrote {len(problems) * args.k} samples to {args.out}")
    return EXIT_OK


def cmd_build_orm_data(args):
    from .labeling import build_orm_dataset, dump_labeled_examples

    problems = _load_synth_problems(args.problems)
    policy = _make_policy(args.policy, problems, args.step_error_rate,
                          args.recovery_rate)
    examples = build_orm_dataset([sp.problem for sp in problems], policy,
                                 k=args.k, temperature=args.temperature,
                                 seed=args.seed, max_steps=args.max_steps)
    dump_labeled_examples(args.out, examples)
    print(f"wrote {len(examples)} labeled samples to {args.out}")
    return EXIT_OK


def cmd_build_prm_targets(args):
    from .labeling import select_prm_annotation_targets

    problems = _load_synth_problems(args.problems)
    policy = _make_policy(args.policy, problems, args.step_error_rate,
                          args.recovery_rate)
    targets = select_prm_annotation_targets(
        [sp.problem for sp in problems], policy, k=args.k,
        samples_per_problem=args.samples_per_problem, seed=args.seed,
        temperature=args.temperature, max_steps=args.max_steps)
    with open(args.out, "w", encoding="utf-8") as fh:
        for problem, trace in targets:
            fh.write(json.dumps({
                "problem_id": problem.id,
                "statement": problem.statement,
                "steps": [s.text for s in trace.steps],
            }) + "\n")
    print(f"wrote {len(targets)} annotation targets to {args.out}")
    return EXIT_OK


def cmd_train_rm(args):
    from .labeling import load_labeled_examples
    from .reward_model import RmTrainConfig, load_params, save_params, train

    examples = load_labeled_examples(args.labels)
    init_params = None
    init_mode = "zero"
    if args.init != "zero":
        if not args.init.startswith("params:"):
            raise ValueError("--init must be 'zero' or 'params:<file>'")
        init_params = load_params(args.init[len("params:"):])
        init_mode = "from_params"
    config = RmTrainConfig(max_steps=args.max_steps, seed=args.seed,
                           init=init_mode)
    params = train(examples, config, init_params=init_params)
    save_params(args.out, params)
    meta = params.metadata
    print(f"trained on {len(examples)} examples; best step "
          f"{meta['best_step']} val loss {meta['best_validation_loss']:.4f}")
    return EXIT_OK


def cmd_decode(args):
    from .decoding import best_of, majority_vote, rm_weighted, step_level_rerank
    from .policy import SampleRequest
    from .traces import final_answer_match, render_trace

    problems = _load_synth_problems(args.problems)
    policy = _make_policy(args.policy, problems, args.step_error_rate,
                          args.recovery_rate)
    scorer = (_load_scorer(args.rm, problems)
              if args.strategy in ("rm-weighted", "best-of", "step-rerank")
              else None)
    wrong = 0
    with open(args.out, "w", encoding="utf-8") as fh:
        for sp in problems:
            if args.strategy == "greedy":
                trace = policy.greedy(sp.problem)
                final = trace.final_answer
            elif args.strategy == "step-rerank":
                result = step_level_rerank(policy, scorer, sp.problem,
                                           k=args.k, max_steps=args.max_steps,
                                           temperature=args.temperature,
                                           seed=args.seed)
                trace, final = result.selected, result.selected_final
            else:
                samples = policy.sample_full(
                    SampleRequest(sp.problem, num_samples=args.k,
                                  temperature=args.temperature,
                                  max_steps=args.max_steps), seed=args.seed)
                if args.strategy == "majority":
                    result = majority_vote(samples, seed=args.seed)
                else:
                    scores = [scorer.score(sp.problem, t) for t in samples]
                    result = (rm_weighted(samples, scores)
                              if args.strategy == "rm-weighted"
                              else best_of(samples, scores))
                trace, final = result.selected, result.selected_final
            correct = final_answer_match(final, sp.problem.reference_final)
            wrong += 0 if correct else 1
            fh.write(json.dumps({
                "problem_id": sp.problem.id,
                "strategy": args.strategy,
                "final": final,
                "correct": correct,
                "trace": render_trace(trace),
            }) + "\n")
    err = wrong / len(problems) if problems else 0.0
    print(f"{args.strategy}: final-answer error {err:.4f} "
          f"({wrong}/{len(problems)}) -> {args.out}")
    return EXIT_OK


def cmd_expert_iter(args):
    from .datasets import split_validation
    from .expert_iteration import (load_expert_config, run_expert_iteration,
                                   write_iteration_report)
    from .policy import SynthPolicyParams, SyntheticPolicy
    from .reward_model import OracleRewardModel

    config = load_expert_config(args.config)
    problems = _load_synth_problems(args.problems)
    train_recs, val_recs = split_validation(problems, args.validation_size,
                                            args.seed)
    params = SynthPolicyParams(step_error_rate=args.step_error_rate,
                               recovery_rate=args.recovery_rate)
    policy = SyntheticPolicy(params, problems)
    scorer = OracleRewardModel(problems)
    report = run_expert_iteration(
        config, [sp.problem for sp in train_recs],
        [sp.problem for sp in val_recs], policy, scorer=scorer)
    write_iteration_report(args.out, report)
    if report.aborted:
        print(f"aborted: {report.abort_reason}", file=sys.stderr)
        return EXIT_RUNTIME
    best = report.epochs[report.chosen_epoch - 1]
    print(f"chose epoch {report.chosen_epoch}: val final error "
          f"{best.val_final_answer_error:.4f} -> {args.out}")
    return EXIT_OK


def cmd_eval(args):
    if args.report == "table1":
        return _eval_table1(args)
    if args.report == "selective":
        return _eval_selective(args)
    if args.report == "agreement":
        return _eval_agreement(args)
    raise ValueError(f"unknown report {args.report!r}")


def _bench_outcomes(args, strategy):
    """Per-problem decode outcomes on the standard benchmark."""
    from .bench import standard_benchmark
    from .decoding import majority_vote, rm_weighted
    from .errors import AllSamplesAnswerless
    from .metrics import EvalOutcome
    from .policy import SampleRequest
    from .synthetic import oracle_first_mistake
    from .traces import final_answer_match

    bench = standard_benchmark(seed=args.seed)
    outcomes = []
    for sp in bench.problems:
        if strategy == "greedy":
            trace = bench.policy.greedy(sp.problem)
            final = trace.final_answer
            score = None
        else:
            samples = bench.policy.sample_full(
                SampleRequest(sp.problem, num_samples=args.k,
                              temperature=args.temperature), seed=args.seed)
            try:
                if strategy == "majority":
                    result = majority_vote(samples, seed=args.seed)
                    score = None
                else:
                    scores = [bench.oracle_rm.score(sp.problem, t)
                              for t in samples]
                    result = rm_weighted(samples, scores)
                    score = result.per_sample_scores[
                        samples.index(result.selected)]
            except AllSamplesAnswerless:
                outcomes.append(EvalOutcome(sp.problem.id, False, (), 0.0))
                continue
            trace, final = result.selected, result.selected_final
        correct = final_answer_match(final, sp.problem.reference_final)
        trace_ok = oracle_first_mistake(sp, trace) is None
        outcomes.append(EvalOutcome(sp.problem.id, correct, (trace_ok,),
                                    score if score is not None else 0.0))
    return outcomes


def _eval_table1(args):
    from .errors import NoEligibleOutcomes
    from .metrics import SummaryRow, final_answer_error_rate, trace_error_rate

    rows = []
    for strategy in ("greedy", "majority", "rm_weighted"):
        outcomes = _bench_outcomes(args, strategy)
        final_err = final_answer_error_rate(outcomes)
        try:
            mean, lo, hi = trace_error_rate(outcomes)
        except NoEligibleOutcomes:
            mean = lo = hi = None
        rows.append(SummaryRow(strategy, mean, lo, hi, final_err))
    with open(args.out, "w", encoding="utf-8") as fh:
        for row in rows:
            fh.write(json.dumps(row.to_json()) + "\n")
    for row in rows:
        trace = "n/a" if row.trace_err_mean is None else f"{row.trace_err_mean:.4f}"
        print(f"{row.approach:12s} final_err={row.final_err:.4f} "
              f"trace_err={trace}")
    return EXIT_OK


def _parse_r_grid(spec: str):
    start_s, stop_s, step_s = spec.split(":")
    start, stop, step = float(start_s), float(stop_s), float(step_s)
    grid = []
    r = start
    while r <= stop + 1e-9:
        grid.append(round(r, 10))
        r += step
    return grid


def _eval_selective(args):
    from .metrics import selective_error_curve, write_curve_csv

    outcomes = _bench_outcomes(args, "rm_weighted")
    points = selective_error_curve(outcomes, _parse_r_grid(args.r_grid))
    write_curve_csv(args.out, points)
    for p in points[:5]:
        print(f"r={p.r:.2f} selective_error={p.selective_error:.4f}")
    print(f"wrote {len(points)} curve points to {args.out}")
    return EXIT_OK


def _eval_agreement(args):
    from .bench import standard_benchmark
    from .labeling import oracle_step_labels, orm_labels
    from .metrics import agreement_matrix, write_matrix_csv
    from .policy import SampleRequest

    bench = standard_benchmark(seed=args.seed)
    sources = {"rm_binarized": {}, "prm_oracle": {}, "orm": {}}
    for sp in bench.problems[:100]:
        samples = bench.policy.sample_full(
            SampleRequest(sp.problem, num_samples=4,
                          temperature=args.temperature), seed=args.seed)
        for j, trace in enumerate(samples):
            sid = f"{sp.problem.id}#{j}"
            sources["rm_binarized"][sid] = bench.oracle_rm.score(
                sp.problem, trace).per_step_prob
            sources["prm_oracle"][sid] = oracle_step_labels(sp, trace).labels
            sources["orm"][sid] = orm_labels(
                trace, sp.problem.reference_final).labels
    base, ext = args.out.rsplit(".", 1) if "." in args.out else (args.out, "csv")
    for scope in ("all_steps", "last_step"):
        matrix = agreement_matrix(sources, scope=scope)
        path = f"{base}.{scope}.{ext}"
        write_matrix_csv(path, matrix)
        print(f"{scope}: rm~prm {matrix.agreement('rm_binarized', 'prm_oracle'):.4f} "
              f"rm~orm {matrix.agreement('rm_binarized', 'orm'):.4f} -> {path}")
    return EXIT_OK


def cmd_clean_math(args):
    from .datasets import clean_math_records, load_problem_file, save_problem_file

    records = load_problem_file(getattr(args, "in"), source="math_prealgebra")
    cleaned = clean_math_records(records)
    save_problem_file(args.out, cleaned)
    print(f"kept {len(cleaned)}/{len(records)} records -> {args.out}")
    return EXIT_OK


def cmd_serve_annotation(args):
    from .annotation_api import serve

    host, _, port = args.listen.rpartition(":")
    serve(args.store, host or "127.0.0.1", int(port))
    return EXIT_OK


# -- parser ------------------------------------------------------------------


def _add_policy_args(p):
    p.add_argument("--policy", default="synthetic",
                   help="'synthetic' or 'remote:<base-url>'")
    p.add_argument("--problems", required=True,
                   help="problem file produced by gen-synth")
    p.add_argument("--step-error-rate", type=float, default=0.3)
    p.add_argument("--recovery-rate", type=float, default=0.05)
    p.add_argument("--k", type=int, default=96)
    p.add_argument("--temperature", type=float, default=1.0)
    p.add_argument("--max-steps", type=int, default=15)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="reasonlab",
        description="step-wise reasoning feedback experiments")
    parser.add_argument("--seed", type=int, default=0)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("gen-synth", help="generate a synthetic problem corpus")
    p.add_argument("--spec", help="JSON file of corpus parameters")
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_gen_synth)

    p = sub.add_parser("sample", help="dump K samples per problem")
    _add_policy_args(p)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_sample)

    p = sub.add_parser("build-orm-data",
                       help="final-answer-labeled training samples")
    _add_policy_args(p)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_build_orm_data)

    p = sub.add_parser("build-prm-targets",
                       help="annotation targets from majority-wrong problems")
    _add_policy_args(p)
    p.add_argument("--samples-per-problem", type=int, default=3)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_build_prm_targets)

    p = sub.add_parser("train-rm", help="train a step-scoring reward model")
    p.add_argument("--labels", required=True)
    p.add_argument("--init", default="zero",
                   help="'zero' or 'params:<file>'")
    p.add_argument("--max-steps", type=int, default=2000)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_train_rm)

    p = sub.add_parser("decode", help="decode each problem with one strategy")
    _add_policy_args(p)
    p.add_argument("--strategy", required=True,
                   choices=["greedy", "majority", "rm-weighted", "best-of",
                            "step-rerank"])
    p.add_argument("--rm", default="oracle",
                   help="'oracle' or a trained-params file")
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_decode)

    p = sub.add_parser("expert-iter", help="run expert iteration")
    p.add_argument("--config", required=True, help="flat key = value file")
    p.add_argument("--problems", required=True)
    p.add_argument("--validation-size", type=int, default=100)
    p.add_argument("--step-error-rate", type=float, default=0.3)
    p.add_argument("--recovery-rate", type=float, default=0.05)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_expert_iter)

    p = sub.add_parser("eval", help="benchmark reports")
    p.add_argument("--report", required=True,
                   choices=["table1", "selective", "agreement"])
    p.add_argument("--r-grid", default="0:0.9:0.05")
    p.add_argument("--k", type=int, default=96)
    p.add_argument("--temperature", type=float, default=1.0)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_eval)

    p = sub.add_parser("clean-math", help="LaTeX cleaning pipeline")
    p.add_argument("--in", dest="in", required=True)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_clean_math)

    p = sub.add_parser("serve-annotation", help="run the annotation HTTP API")
    p.add_argument("--store", required=True)
    p.add_argument("--listen", default="127.0.0.1:8321")
    p.set_defaults(func=cmd_serve_annotation)

    return parser


def main(argv=None) -> int:
    from .errors import ReasonLabError

    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_CONFIG if exc.code not in (0, None) else 0
    try:
        return args.func(args)
    except (ValueError, KeyError, OSError, json.JSONDecodeError) as exc:
        print(json.dumps({"error": type(exc).__name__, "message": str(exc)}),
              file=sys.stderr)
        return EXIT_CONFIG
    except ReasonLabError as exc:
        print(json.dumps({"error": type(exc).__name__, "message": str(exc)}),
              file=sys.stderr)
        return EXIT_RUNTIME


if __name__ == "__main__":
    sys.exit(main())
