"""The standard synthetic benchmark used throughout the evaluation suite.

A fixed-shape corpus (500 chain problems, 3-6 operations) with a policy that
errs on 30% of steps at temperature 1 and luckily recovers 5% of erroneous
chains. Problems carry a difficulty spread so a hard tail survives K-sample
aggregation, which keeps selective-prediction curves informative.
"""

from dataclasses import dataclass

from .policy import SynthPolicyParams, SyntheticPolicy
from .reward_model import OracleRewardModel
from .synthetic import SynthSpec, generate_problems

BENCH_NUM_PROBLEMS = 500
BENCH_CHAIN_LENGTH = (3, 6)
BENCH_STEP_ERROR = 0.3
BENCH_RECOVERY = 0.05
BENCH_DIFFICULTY = (0.5, 2.2)
BENCH_K = 96
BENCH_MAX_STEPS = 15


@dataclass(frozen=True)
class Benchmark:
    problems: tuple
    policy: SyntheticPolicy
    oracle_rm: OracleRewardModel
    seed: int

    @property
    def plain_problems(self):
        return [sp.problem for sp in self.problems]


def standard_benchmark(seed: int = 0, num_problems: int = BENCH_NUM_PROBLEMS,
                       step_error_rate: float = BENCH_STEP_ERROR,
                       recovery_rate: float = BENCH_RECOVERY,
                       difficulty_range: tuple = BENCH_DIFFICULTY) -> Benchmark:
    problems = generate_problems(SynthSpec(
        num_problems=num_problems, chain_length_range=BENCH_CHAIN_LENGTH,
        seed=seed))
    params = SynthPolicyParams(step_error_rate=step_error_rate,
                               recovery_rate=recovery_rate,
                               difficulty_range=difficulty_range)
    policy = SyntheticPolicy(params, problems)
    return Benchmark(tuple(problems), policy, OracleRewardModel(problems), seed)
