"""Frozen Lake: train a Q-table, record a winning episode, explain it backwards.

Run with ``python3 demos/fl_backward.py``. Training takes a few seconds.
"""

from fractions import Fraction

from hxplain import BhxpConfig, PaxpConfig, explain_backward, rollout
from hxplain.envs import frozenlake as fl
from hxplain.io import explanation_to_json
from hxplain.render import render_ascii

fl_map = fl.bundled_map("8x8")
model = fl.FrozenLakeModel(fl_map)
policy = fl.fl_train_q(fl_map, 200_000, seed=1)
print(f"success rate over 1000 rollouts: {fl.success_rate(model, policy, 1000):.3f}")

# first winning episode among the seeded rollouts
for i in range(100):
    H = rollout(model, policy, 100, seed=1, stream=(i,))
    if H.states[-1][0] == fl_map.goal:
        break
print(f"history of {H.k} actions")

win = fl.fl_predicate(model, "win")
cfg = BhxpConfig(l=4, delta=Fraction(7, 10),
                 paxp=PaxpConfig(proportion_mode="sampled", sample=10, seed=0))
E = explain_backward(model, policy, H, win, cfg)

for n, st in enumerate(E.steps, 1):
    nxt = st.predicate_next.describe() if st.predicate_next else "-"
    print(f"step {n}: action {st.index} ({model.action_name(st.action)}), "
          f"score {st.score} ~ {float(st.score):.3f}, next sub-goal {nxt}")
print("stopped:", E.termination_reason)

doc = explanation_to_json(E, model, cfg.to_json())
print(render_ascii(model, H, doc))
