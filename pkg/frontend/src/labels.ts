/** Local recomputation of step labels from a first-mistake verdict.
 *
 * Mirrors the server's labeling rule so integration tests can check that
 * exported labels equal what the clicked verdict implies: steps strictly
 * before the first mistaken step are correct, that step and everything after
 * it incorrect; a no-mistake verdict marks every step correct; an ambiguous
 * verdict yields no labels at all.
 */

import type { Verdict } from "./types.js";

export function stepLabelsFromVerdict(
  stepCount: number,
  verdict: Verdict,
): boolean[] {
  if (verdict.kind === "ambiguous") {
    throw new Error("ambiguous verdicts yield no labels");
  }
  if (verdict.kind === "no_mistake") {
    return Array.from({ length: stepCount }, () => true);
  }
  const index = verdict.index;
  if (index === undefined || index < 1) {
    throw new Error("first_mistake verdicts need a 1-based index");
  }
  return Array.from({ length: stepCount }, (_, i) => i < index - 1);
}
