"""Forward scores against the backward explanation on one Frozen Lake history.

The forward pass scores every action for the final predicate at the
remaining horizon. The backward pass only looks ``l`` steps ahead, but
replaces the predicate as it goes, so early actions are judged against a
nearby sub-goal instead of the distant one.
"""

from hxplain import BhxpConfig, ScoringBudget, explain_backward, explain_forward, rollout
from hxplain.envs import frozenlake as fl

fl_map = fl.bundled_map("4x4")
model = fl.FrozenLakeModel(fl_map)
policy = fl.fl_train_q(fl_map, 20_000, seed=1)
win = fl.fl_predicate(model, "win")

H = next(h for i in range(100)
         if (h := rollout(model, policy, 100, seed=0, stream=(i,))).states[-1][0] == fl_map.goal)

F = explain_forward(model, policy, H, win, ScoringBudget.max_scenarios(2000, seed=0))
E = explain_backward(model, policy, H, win, BhxpConfig(l=3))
picked = set(E.indices)

print("index  action  forward  backward")
for i, a, s in zip(F.indices, F.actions, F.scores):
    mark = "  *" if i in picked else ""
    print(f"{i:5d}  {model.action_name(a):6s}  {float(s):7.3f}{mark}")
print("forward top 3:", F.top_k[:3])
print("backward picks:", E.indices, "sub-goals:",
      [p.describe() if p else None for p in E.predicates])
