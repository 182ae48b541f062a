"""Parse a reasoning trace, check its calculator spans, and grade the answer.

Traces are newline-separated steps. A step may embed <<expr=result>>
calculator annotations, and the last line may carry a "Final answer:" marker.
"""

from reasonlab import (
    eval_calculator,
    final_answer_match,
    parse_trace,
    render_trace,
    verify_calc_annotations,
)

TEXT = """\
Natalia sold 48 clips in April.
In May she sold half as many: <<48/2=24>>24 clips.
Altogether that is <<48+24=72>>72 clips.
Final answer: 72"""

trace = parse_trace(TEXT)
print(f"steps: {len(trace.steps)}")
print(f"final answer: {trace.final_answer!r}")
print(f"round-trips exactly: {render_trace(trace) == TEXT}")
print(f"grader accepts '72.0': {final_answer_match('72.0', trace.final_answer)}")

print(f"\ncalculator says 48/2 = {eval_calculator('48/2')}")
print(f"clean trace has {len(verify_calc_annotations(trace))} bad spans")

corrupted = parse_trace(TEXT.replace("=72>>72", "=73>>73"))
for m in verify_calc_annotations(corrupted):
    print(f"corrupt span at step {m.step_index}: "
          f"{m.expression} declared {m.declared} computed {m.computed}")
