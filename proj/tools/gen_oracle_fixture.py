#!/usr/bin/env python3
"""Regenerate tests/fixtures/sbend_oracle.json.

Independent of the C++ oracle: every three-letter word over {L, R, S}
with one curvature magnitude K is solved for (K, piece lengths) by
scipy.optimize.fsolve from many starts; zero-length pieces cover shorter
chains. The smallest K among solutions with non-negative lengths is frozen.
"""

import itertools
import json
import sys
from pathlib import Path

import numpy as np
from scipy.optimize import fsolve

X1 = np.array([0.0, 0.0])
X2 = np.array([2.0, 1.0])
HEADING1 = 0.0
HEADING2 = 0.0
LENGTH = 2.6


def endpoint(word, K, lengths):
    x = X1.copy()
    theta = HEADING1
    for c, l in zip(word, lengths):
        k = {"L": K, "R": -K, "S": 0.0}[c]
        if abs(k) < 1e-14:
            x = x + l * np.array([np.cos(theta), np.sin(theta)])
        else:
            x = x + np.array([np.sin(theta + k * l) - np.sin(theta), np.cos(theta) - np.cos(theta + k * l)]) / k
        theta += k * l
    return x, theta


def residual(word, u):
    K, lengths = u[0], u[1:]
    x, theta = endpoint(word, K, lengths)
    dtheta = np.angle(np.exp(1j * (theta - HEADING2)))
    return [x[0] - X2[0], x[1] - X2[1], dtheta, lengths.sum() - LENGTH]


def solve_word(word, rng, starts=400):
    found = []
    for _ in range(starts):
        lengths = rng.dirichlet(np.ones(len(word))) * LENGTH
        u0 = np.concatenate([[rng.uniform(0.05, 6.0)], lengths])
        sol, _, ier, _ = fsolve(lambda u: residual(word, u), u0, full_output=True, xtol=1e-14)
        if ier != 1 or sol[0] <= 0 or (sol[1:] < -1e-12).any():
            continue
        if max(abs(r) for r in residual(word, sol)) > 1e-10:
            continue
        found.append(sol)
    return found


def main():
    rng = np.random.default_rng(12345)
    best = None
    for word in ("".join(w) for w in itertools.product("LRS", repeat=3)):
        if word.count("S") == 3:
            continue
        for sol in solve_word(word, rng):
            if best is None or sol[0] < best[1][0] - 1e-12:
                best = (word, sol)
    if best is None:
        sys.exit("no chain found")
    word, sol = best
    pieces = [(c, float(l)) for c, l in zip(word, sol[1:]) if l > 1e-9]
    out = {
        "bc": {"x1": X1.tolist(), "v1": [1.0, 0.0], "x2": X2.tolist(), "v2": [1.0, 0.0], "L": LENGTH},
        "word": "".join(c for c, _ in pieces),
        "K_max": float(sol[0]),
        "pieces": [{"type": c, "length": l} for c, l in pieces],
        "generator": "tools/gen_oracle_fixture.py",
    }
    target = Path(__file__).resolve().parent.parent / "tests" / "fixtures" / "sbend_oracle.json"
    target.write_text(json.dumps(out, indent=2) + "\n")
    print(json.dumps(out, indent=2))


if __name__ == "__main__":
    main()
