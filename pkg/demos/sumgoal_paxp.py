"""Abductive explanations on the SumGoal fixture.

With n features and one step left, the agent reaches the goal iff at least
(n-1)/2 of the first n-1 features are 1. Any such half is a minimal
explanation, so there are binomial(n-1, (n-1)/2) of them.
"""

from math import comb

from hxplain import BhxpClassifier, PaxpConfig, enumerate_paxp, find_lm_paxp, proportion
from hxplain.envs.sumgoal import SumGoalModel, near_goal_state, sumgoal_policy, sumgoal_predicate
from hxplain.paxp import subset_names

for n in (3, 5, 7):
    model = SumGoalModel(n)
    v = near_goal_state(n)
    kappa = BhxpClassifier(v, model, sumgoal_policy(n), sumgoal_predicate(n), 1)
    exact = PaxpConfig()
    sets = enumerate_paxp(kappa, v, exact)
    lm = find_lm_paxp(kappa, v, exact)
    print(f"n={n}: {len(sets)} minimal sets (expected {comb(n - 1, (n - 1) // 2)}), "
          f"greedy pick {{{', '.join(subset_names(model.schema, lm))}}}")

model = SumGoalModel(5)
v = near_goal_state(5)
kappa = BhxpClassifier(v, model, sumgoal_policy(5), sumgoal_predicate(5), 1)
for X in ([], [2], [2, 3]):
    p = proportion(kappa, v, X, PaxpConfig())
    print(f"fixing {subset_names(model.schema, X) or 'nothing'}: {p} of completions reach the goal")
