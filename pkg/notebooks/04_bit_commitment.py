# %% [markdown]
# # Bit-commitment security
#
# Bob's knowledge gain is K = D(rho0, rho1)/2 and Alice's control is
# C = sqrt(F)(rho0, rho1)/2, both taken over the token states. Two-level
# tokens can reach no further than the arc K^2 + C^2 = 1/4 (curve X). Ideal
# qutrit tokens run along the line K + C = 1/2 (curve W), which lies inside
# that arc.

# %%
import numpy as np

from spatialqudit import bitcommit as bc
from spatialqudit.core import depolarize_to_linear_entropy
from spatialqudit.entanglement import nonmax_state

# %%
for lam in (0.0, 0.27, 0.5, 1.0):
    pt = bc.curve_ideal_qutrit([lam])[0]
    print(f"lambda={lam:.2f}  K={pt.K:.4f}  C={pt.C:.4f}  K^2+C^2={pt.radius_sq:.4f}")

# %% [markdown]
# Depolarising both tokens as (p/3) I + (1-p) rho_ideal pulls the point
# toward (0, 1/2). The marked p values are the ones shown on curves Y and Z.

# %%
for lam in (0.5, 0.27):
    for p, pt in zip(bc.MARKED_P, bc.curve_depolarized(lam, bc.MARKED_P)):
        print(f"lambda={lam}  p={p}  K={pt.K:.4f}  C={pt.C:.4f}  K^2+C^2-1/4={pt.radius_sq - .25:+.4f}")

# %% [markdown]
# Preparing both logical bits from the pure eps = 1.79 resource lands
# exactly on W with lambda = 1/(1+eps^2). The white-noise version leaves
# roughly 2.6% in each token's empty mode but still stays short of the qubit
# arc.

# %%
pure = nonmax_state("qutrit", 1.79).density()
noisy = depolarize_to_linear_entropy(nonmax_state("qutrit", 1.79 * np.exp(-0.07j * np.pi)).density(), 0.18)
for name, rho in (("pure", pure), ("noisy", noisy)):
    rep = bc.security_point_from_source(rho)
    print(name, f"K={rep.point.K:.4f} C={rep.point.C:.4f} K^2+C^2={rep.point.radius_sq:.4f}",
          f"lambda_fit={rep.fitted_lambda:.4f} residuals={np.round(rep.residuals, 4)}")

# %% [markdown]
# Under the residual-population model, the lambda = 0.27 tokens only reach
# the arc once the whole token weight has moved into the empty modes (r = 1).

# %%
print(bc.RESIDUAL_MODEL)
for r in (0.0, 0.01, 0.1, 0.5, 0.9, 1.0):
    pt = bc.security_point(*bc.residual_tokens(0.27, r))
    print(f"r={r:.2f}  K^2+C^2-1/4={pt.radius_sq - 0.25:+.4f}")
