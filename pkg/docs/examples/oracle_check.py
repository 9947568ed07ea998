"""Compare each closed-form score with brute-force numerical integration.

The oracle evaluates the pointwise metric on a logit-uniform grid, refined at
every decision jump, and integrates with the trapezoid rule.
"""

from schervish import GeneratorSpec, PrevalenceInterval, generate
from schervish.scores import SCORE_NAMES, oracle_value, score_value

d = generate(GeneratorSpec(n=400, pi0=0.4, calib_slope=0.7, seed=3))
iv, c = PrevalenceInterval(0.05, 0.5), 1 / 3
for name in SCORE_NAMES:
    closed = score_value(d, name, iv, c)
    numeric = oracle_value(d, name, iv, c, nodes=2049)
    print(f"{name:14s} closed {closed:.12f}  oracle {numeric:.12f}  diff {abs(closed - numeric):.1e}")
