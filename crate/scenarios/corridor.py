"""Writes corridor.json: two corridors of width L_B + 0.4 m joined by an S-curve.

The reference path is straight inside both corridors and follows a quintic
smoothstep (continuous curvature) between them. The straight run before each
entrance is long enough for the front corner to leave the curve before it
reaches the walls.
"""
import json
import math
from pathlib import Path

WIDTH = 1.86          # vehicle body width
SLACK = 0.2           # per side
WALL = 0.25           # wall half-thickness
OFFSET = 6.0          # lateral offset of the second corridor
CURVE = 12.0          # longitudinal length of the S-curve
RUN_IN = 9.0          # straight run between a corridor end and the curve
LEN_A, LEN_B = 16.0, 18.0
STEP = 0.5


def main():
    hw = WIDTH / 2 + SLACK
    a_end = LEN_A - 4.0
    c0, c1 = a_end + RUN_IN, a_end + RUN_IN + CURVE
    b0, b1 = c1 + RUN_IN, c1 + RUN_IN + LEN_B
    goal = b1 - 6.0

    def wall(xa, xb, yc):
        return {"cx": (xa + xb) / 2, "cy": yc, "hx": (xb - xa) / 2, "hy": WALL, "theta": 0.0}

    obstacles = [
        wall(-4.0, a_end, hw + WALL),
        wall(-4.0, a_end, -hw - WALL),
        wall(b0, b1, OFFSET + hw + WALL),
        wall(b0, b1, OFFSET - hw - WALL),
    ]
    path = []
    for k in range(int(goal / STEP) + 1):
        x = k * STEP
        if x <= c0:
            y, dy = 0.0, 0.0
        elif x >= c1:
            y, dy = OFFSET, 0.0
        else:
            u = (x - c0) / CURVE
            y = OFFSET * (10 * u**3 - 15 * u**4 + 6 * u**5)
            dy = OFFSET * (30 * u**2 - 60 * u**3 + 30 * u**4) / CURVE
        path.append({"x": round(x, 6), "y": round(y, 6), "theta": round(math.atan(dy), 6)})
    scenario = {
        "start": {"x": 0.0, "y": 0.0, "theta": 0.0, "v": 0.0, "a": 1.0},
        "goal": {"x": goal, "y": OFFSET, "theta": 0.0, "v": 0.0, "a": -1.0},
        "obstacles": obstacles,
        "path": path,
    }
    out = Path(__file__).with_name("corridor.json")
    out.write_text(json.dumps(scenario, indent=1) + "\n")


if __name__ == "__main__":
    main()
