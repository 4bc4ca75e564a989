"""How the smoothed rank surrogate counts singular values.

The true rank of a matrix is a step function of its singular values and
useless for gradient methods. The surrogate replaces the step with a
Gaussian bump f_delta(x) = exp(-x^2 / (2 delta^2)): wide bumps give a
smooth, almost-concave landscape; narrow bumps approach the exact count.
This script prints that convergence on a matrix of known rank and shows
the gradient that the solvers climb.
"""

import numpy as np

from smoothrank import QraProfile, approx_rank, qra_check, smoothed_rank_gradient

rng = np.random.default_rng(7)

# A 12 x 15 matrix of exact rank 3.
z = rng.normal(size=(12, 3)) @ rng.normal(size=(3, 15))
sigma = np.linalg.svd(z, compute_uv=False)
print("singular values:", np.round(sigma[:5], 3), "... (rest are 0)")
print("true rank: 3\n")

print(f"{'delta / sigma_1':>16}  {'rank estimate':>14}")
for frac in (10.0, 1.0, 0.3, 0.1, 0.03, 1e-2, 1e-4):
    profile = QraProfile(frac * sigma[0])
    print(f"{frac:>16g}  {approx_rank(profile, z):>14.4f}")

# At delta = sigma_1 / 100 the estimate is already within 0.01 of the rank.
# The shrinking-delta schedule in `anneal` walks exactly this ladder, warm
# starting each stage from the last so the iterate never has to cross the
# rugged small-delta landscape from scratch.

print("\ngradient at delta = sigma_1:")
profile = QraProfile(sigma[0])
g = smoothed_rank_gradient(profile, z)
print("  shape", g.shape, " largest entry magnitude", f"{np.abs(g).max():.4f}")
print("  ascent along +g raises the surrogate, i.e. lowers the rank estimate")

# The properties the whole construction rests on can be audited numerically.
report = qra_check(profile, np.linspace(-5 * profile.delta, 5 * profile.delta, 201))
print("\nsurrogate audit:", report)
print("all checks pass:", report.all_pass)
