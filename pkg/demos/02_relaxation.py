"""Closed-form quadrupolar relaxation of the 23Na deviation matrix.

Run with ``python demos/02_relaxation.py``.
"""
# %%
import numpy as np

from devcorr import NA23_PARAMS, bell_pseudopure, evolve, r_coefficients, time_constants
from devcorr.relaxation import longitudinal_magnetization, transverse_magnetization

# %% [markdown]
# Time constants for C = 12e9 s^-2, J1 = 3.0e-9 s and J2 = 3.4e-9 s.

# %%
tc = time_constants(NA23_PARAMS)
print(f"tau_L1 = {tc.tau_L1 * 1e3:.1f} ms, tau_L2 = {tc.tau_L2 * 1e3:.1f} ms, tau_T = {tc.tau_T * 1e3:.1f} ms")

# %% [markdown]
# Start from the Psi+ pseudopure state. Its coherence d03 decays at
# C(J1 + J2), and the populations return to diag(3, 1, -1, -3).

# %%
d0 = bell_pseudopure("psi+")
print("R coefficients:", r_coefficients(d0))
for t in [0.0, 5e-3, 15e-3, 60e-3, 1.0]:
    d = np.asarray(evolve(d0, NA23_PARAMS, t))
    mt = transverse_magnetization(d)
    print(
        f"t={t * 1e3:6.1f} ms  |d03|={abs(d[0, 3]):.4f}  pops={np.round(d.diagonal().real, 3)}  "
        f"<Iz>={longitudinal_magnetization(d):.3f}  2*d21={mt.central:.3f}"
    )
