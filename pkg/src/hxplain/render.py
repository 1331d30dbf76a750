"""Text and SVG renderings of a history, with explained actions framed."""

from __future__ import annotations

from xml.sax.saxutils import escape

from .core import History, State, TransitionModel
from .envs import connect4, drones, frozenlake, sumgoal


def state_lines(model: TransitionModel, s: State) -> list[str]:
    """A small text picture of ``s``."""
    env = model.env_id
    if env == frozenlake.ENV_ID:
        m = model.map
        rows = []
        for r in range(m.height):
            row = ""
            for c in range(m.width):
                cell = (r, c)
                if cell == s[0]:
                    row += "A"
                elif cell in m.holes:
                    row += "H"
                elif cell == m.goal:
                    row += "G"
                elif cell == m.start:
                    row += "S"
                else:
                    row += "."
            rows.append(row)
        return rows
    if env == connect4.ENV_ID:
        return connect4.board_rows(s)
    if env == drones.ENV_ID:
        joint = model.positions(s)
        marks = {}
        for j, p in enumerate(joint):
            if p is not None:
                marks[p] = "E" if j == model.ego else str(j)
        rows = []
        for y in range(drones.SIZE):
            row = ""
            for x in range(drones.SIZE):
                c = (x, y)
                if c in marks:
                    row += "X" if marks[c] == "E" and s[drones.CRASHED_IDX] else marks[c]
                elif c in model.trees:
                    row += "T"
                else:
                    row += "."
            rows.append(row)
        return rows
    if env == sumgoal.ENV_ID:
        vals = " ".join(str(v) for v in s[:model.n])
        return [f"[{vals}] assigned={s[-1]}"]
    return [repr(s)]


def _framed(lines: list[str], on: bool) -> list[str]:
    w = max(len(x) for x in lines)
    if not on:
        return ["  " + x.ljust(w) + "  " for x in lines]
    edge = "+" + "=" * (w + 2) + "+"
    return [edge] + ["| " + x.ljust(w) + " |" for x in lines] + [edge]


def render_ascii(model: TransitionModel, H: History, explanation: dict | None = None) -> str:
    """``explanation`` is a parsed explanation document (backward or forward)."""
    marked, panels = _marks(explanation)
    out = []
    for i, s in enumerate(H.states):
        head = f"s{i}"
        if i < H.k:
            head += f"  --{model.action_name(H.actions[i])}-->"
            if i in marked:
                head += f"  [{marked[i]}]"
        elif H.terminal:
            head += "  (terminal)"
        out.append(head)
        out.extend(_framed(state_lines(model, s), i in marked))
        out.append("")
    if panels:
        out.append("predicates")
        out.extend(panels)
    return "\n".join(out).rstrip() + "\n"


def _marks(explanation: dict | None):
    marked: dict[int, str] = {}
    panels: list[str] = []
    if not explanation:
        return marked, panels
    if explanation.get("mode") == "backward":
        for n, st in enumerate(explanation["steps"], 1):
            marked[st["index"]] = f"step {n}, score {st['score']['exact']}"
            nxt = st.get("predicate_next_text") or "-"
            panels.append(f"  step {n} (action {st['index']}): next predicate {nxt}")
    else:
        top = explanation.get("top_k", [])[:1]
        for row in explanation.get("scores", []):
            if row["index"] in top:
                marked[row["index"]] = f"most important, score {row['score']['exact']}"
    return marked, panels


def render_svg(model: TransitionModel, H: History, explanation: dict | None = None) -> str:
    marked, panels = _marks(explanation)
    cw, lh, pad = 9, 16, 12
    blocks = [(i, state_lines(model, s)) for i, s in enumerate(H.states)]
    parts = []
    longest = 0
    y = pad
    for i, lines in blocks:
        label = f"s{i}"
        if i < H.k:
            label += f" --{model.action_name(H.actions[i])}-->"
            if i in marked:
                label += f" [{marked[i]}]"
        parts.append(f'<text x="{pad}" y="{y + lh - 4}">{escape(label)}</text>')
        longest = max(longest, len(label), *(len(x) for x in lines))
        y += lh
        top = y
        for line in lines:
            parts.append(f'<text x="{pad + 6}" y="{y + lh - 4}">{escape(line)}</text>')
            y += lh
        if i in marked:
            w = max(len(x) for x in lines) * cw + 12
            parts.append(f'<rect x="{pad}" y="{top - 2}" width="{w}" height="{y - top + 4}" '
                         f'fill="none" stroke="green" stroke-width="3"/>')
        y += lh // 2
    for line in (["predicates"] + panels) if panels else []:
        parts.append(f'<text x="{pad}" y="{y + lh - 4}">{escape(line)}</text>')
        longest = max(longest, len(line))
        y += lh
    width = longest * cw + 2 * pad + 12
    height = y + pad
    body = "\n".join(parts)
    return (f'<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{height}" '
            f'font-family="monospace" font-size="14">\n{body}\n</svg>\n')
