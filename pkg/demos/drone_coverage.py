"""Drone Coverage: explain why the ego drone ends with a perfect cover.

Wind acts on the ego drone only; the other drones follow the greedy policy
deterministically. The three other drones' positions are hidden features,
so sub-goals only mention the 5x5 view and the ego coordinates.
"""

from hxplain import BhxpConfig, PaxpConfig, explain_backward, rollout
from hxplain.envs import drones as dc
from hxplain.render import state_lines

world = dc.bundled_world()
model = dc.DroneCoverageModel(world, "ego")
policy = dc.dc_greedy_policy(world)
H = rollout(model, policy, 12, seed=2)

perfect = dc.dc_predicate(model, "perfect_cover")
print("perfect cover at the end:", perfect(H.states[-1]))
print("\n".join(state_lines(model, H.states[-1])))

cfg = BhxpConfig(l=3, paxp=PaxpConfig(proportion_mode="sampled", sample=10))
E = explain_backward(model, policy, H, perfect, cfg)
for st in E.steps:
    print(f"\naction {st.index}: {model.action_name(st.action)}, score {float(st.score):.3f}")
    if st.predicate_next is not None:
        print("  next sub-goal:", st.predicate_next.describe())
print("stopped:", E.termination_reason)

# the global variant looks at all four drones
print("all drones perfectly placed:", dc.dc_predicate(model, "perfect_cover", "global")(H.states[-1]))
