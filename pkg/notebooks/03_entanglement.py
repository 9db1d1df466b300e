# %% [markdown]
# # Entanglement of the reconstructed states

# %%
import numpy as np

from spatialqudit.core import bell_phi_plus, depolarize_to_linear_entropy
from spatialqudit.entanglement import (analyze, concurrence, eof_pure, eof_upper_bound,
                                       fit_nonmax_entangled, nonmax_state)
from spatialqudit.core import DensityMatrix

# %% [markdown]
# Werner states p Phi+ + (1-p) I/4 lose their concurrence linearly once p drops
# to 1/3.

# %%
phi = bell_phi_plus().density().matrix
for p in (0.2, 1 / 3, 0.5, 0.8, 1.0):
    rho = DensityMatrix(p * phi + (1 - p) * np.eye(4) / 4, (2, 2))
    print(f"p={p:.3f}  C={concurrence(rho):.4f}  EOF bound={eof_upper_bound(rho):.4f}")

# %% [markdown]
# For two qutrits no closed form exists. The eigen-ensemble average of the
# reduced-state entropy is a certified upper bound on the entanglement of
# formation, and it is exact for pure states.

# %%
eps = 1.79 * np.exp(-0.07j * np.pi)
pure = nonmax_state("qutrit", eps)
noisy = depolarize_to_linear_entropy(pure.density(), 0.18)
print("pure:", eof_pure(pure), eof_upper_bound(pure.density()))
print("noisy bound:", eof_upper_bound(noisy))

# %% [markdown]
# The best-fitting family member is found on a polar grid in eps and then
# refined. White noise leaves the fitted eps in place and only lowers the
# fidelity.

# %%
fit = fit_nonmax_entangled(noisy, "qutrit")
print(f"|eps|={fit.modulus:.4f}  arg/pi={fit.phase_over_pi:+.4f}  F={fit.fidelity:.4f}")

# %%
report = analyze(noisy).to_dict()
print({k: report[k] for k in ("linear_entropy", "eof_upper_bound")}, report["fidelities"])
