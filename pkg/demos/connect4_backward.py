"""Connect4 against a uniformly random opponent.

The agent plays the win/block/centre heuristic. A 12-move winning game is
explained with the ``win`` predicate; since the board has 42 features the
abductive step samples completions instead of enumerating them.
"""

from fractions import Fraction

from hxplain import BhxpConfig, PaxpConfig, explain_backward, rollout
from hxplain.envs import connect4 as c4

model = c4.Connect4Model(c4.OpponentModel("uniform"))
policy = c4.c4_heuristic_policy()
H = rollout(model, policy, 12, seed=10)
print("final board:")
print("\n".join(c4.board_rows(H.states[-1])))
print("moves:", " ".join(model.action_name(a) for a in H.actions))

cfg = BhxpConfig(l=3, delta=Fraction(4, 5),
                 paxp=PaxpConfig(proportion_mode="sampled", sample=10))
E = explain_backward(model, policy, H, c4.c4_predicate("win"), cfg)
for st in E.steps:
    print(f"\nmove {st.index} in column {st.action}, score {float(st.score):.3f}")
    print("\n".join(c4.board_rows(H.states[st.index])))
    if st.predicate_next is not None:
        print("next sub-goal:", st.predicate_next.describe())
print("\nstopped:", E.termination_reason)

# comparative predicates take the first board of the history as reference
three = c4.c4_predicate("three_row", H.states[0])
print("three_row holds at the end:", three(H.states[-1]))
