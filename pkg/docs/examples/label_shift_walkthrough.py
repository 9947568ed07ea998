"""How a fixed classifier's accuracy moves when only the class balance changes.

The scores are calibrated for the evaluation prevalence.  For each deployment
prevalence we report plain accuracy at the 0.5 threshold next to
prior-adjusted accuracy, which re-weights the classes and moves the decision
threshold to match the new prevalence.
"""

from schervish import GeneratorSpec, generate, metrics

d = generate(GeneratorSpec(n=5000, pi0=0.3, mu1=1.5, seed=7))
print(f"evaluation prevalence {d.pi0:.3f}, accuracy {metrics.accuracy(d):.4f}")
print(f"{'pi':>6} {'pama':>8} {'pamnb (c=0.2)':>14}")
for pi in (0.05, 0.1, 0.3, 0.5, 0.7):
    print(f"{pi:6.2f} {metrics.pama(d, pi):8.4f} {metrics.pamnb(d, pi, 0.2):14.4f}")
