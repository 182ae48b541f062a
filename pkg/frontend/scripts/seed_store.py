"""Seed an annotation store for the UI integration tests.

Creates four gold tasks whose authoritative verdict is no-mistake (the
reference trace itself is shown), plus three single-rater real tasks: a
plain three-step solution, one with a blank middle step, and one the test
flags as ambiguous.

Usage: python3 seed_store.py <store-dir>
"""

import json
import sys

from reasonlab.annotation import AnnotationService
from reasonlab.labeling import Verdict
from reasonlab.traces import Problem, parse_trace


def main(store_dir: str) -> None:
    service = AnnotationService(store_dir)

    gold = []
    for i in range(4):
        ref = parse_trace(f"Start from {i}.\nAdd one: {i + 1}.\n"
                          f"Final answer: {i + 1}")
        problem = Problem(f"gold-problem-{i}", f"Gold problem {i}.",
                          str(i + 1), ref)
        gold.append((problem, ref, Verdict.no_mistake()))
    service.enqueue_gold(gold)

    ref = parse_trace("Compute <<2+3=5>>5.\nDouble it: <<5*2=10>>10.\n"
                      "Final answer: 10")
    plain = Problem("p-plain", "Start with 2, add 3, then double.", "10", ref)
    plain_trace = parse_trace("Compute <<2+3=5>>5.\nDouble it: <<5*2=11>>11.\n"
                              "Final answer: 11")

    blank = Problem("p-blank", "Take 1 and add 2.", "3",
                    parse_trace("1 plus 2 is 3.\nFinal answer: 3"))
    blank_trace = parse_trace("We start with 1.\n\nFinal answer: 4")

    ambig = Problem("p-ambig", "Unclear problem.", "7",
                    parse_trace("Seven.\nFinal answer: 7"))
    ambig_trace = parse_trace("Could be anything.\nFinal answer: 8")

    ids = service.enqueue_batch(
        [(plain, plain_trace), (blank, blank_trace), (ambig, ambig_trace)],
        duplicate_fraction=0.0, seed=0)
    print(json.dumps({"store": store_dir, "task_ids": ids}))


if __name__ == "__main__":
    main(sys.argv[1])
