"""Clean LaTeX math problems into plain calculator-friendly text.

The cleaner is an ordered rule table (relations, dots, operators, text
macros, whitespace, math-mode delimiters, fractions); answers are pulled
from \\boxed{...} spans with balanced-brace matching.
"""

from reasonlab.latex_clean import RULES, clean_latex, extract_boxed_answer

problem = (
    "We are given that $$54+(98\\div14)+(23\\cdot 17)-200-(312\\div 6)=200$$\n"
    "Now, let's remove the parentheses: "
    "$$54+98\\div14+23\\cdot 17-200-312\\div 6.$$\n"
    "What does this expression equal?"
)

print("before:")
print(problem)
print("\nafter:")
print(clean_latex(problem))

solution = r"The expression equals $\boxed{4}$ after simplification."
print(f"\nboxed answer: {extract_boxed_answer(solution)!r}")

print(f"\nrule table: {len(RULES)} rows in "
      f"{len(dict.fromkeys(r.phase for r in RULES))} ordered phases")
for rule in RULES[:5]:
    print(f"  {rule.phase:12s} {rule.pattern!r} -> {rule.replacement!r}")
print("  ...")
