"""Split the net-benefit gap between two subgroups into its sources.

Group A and group B share their class-conditional score distributions and
differ only in prevalence.  The mechanism part should then be close to zero,
with the label-shift part carrying the whole gap.  The second decomposition
separates a deliberately miscalibrated group's deficit into sharpness and
calibration.
"""

import json

from schervish import (
    BootstrapSpec,
    GeneratorSpec,
    PrevalenceInterval,
    decompose_mechanism_labelshift,
    decompose_sharpness_calibration,
    generate,
)

boot = BootstrapSpec(replicates=500, seed=1)

a = generate(GeneratorSpec(n=20000, pi0=0.1, mu1=1.5, seed=1))
b = generate(GeneratorSpec(n=20000, pi0=0.3, mu1=1.5, seed=2))
shift = decompose_mechanism_labelshift(a, b, 0.3, bootstrap=boot)
print(json.dumps(shift.as_dict(), indent=2, default=str))

good = generate(GeneratorSpec(n=20000, pi0=0.3, mu1=1.5, seed=1))
bent = generate(GeneratorSpec(n=20000, pi0=0.3, mu1=1.5, calib_slope=0.5, seed=2))
split = decompose_sharpness_calibration(good, bent, PrevalenceInterval(0.1, 0.6), 0.3, bootstrap=boot)
print(json.dumps(split.as_dict(), indent=2, default=str))
