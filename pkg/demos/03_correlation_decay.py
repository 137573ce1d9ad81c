"""Decay of I, K and Q under relaxation (the 60 ms experimental window).

This is the library form of ``devcorr reproduce``. Run with
``python demos/03_correlation_decay.py``; it takes about a minute.
"""
# %%
import numpy as np

from devcorr import NA23_PARAMS, bell_pseudopure, quantum_correlation_Q, random_x, time_series

# %%
states = {"X seed 0": random_x(0), "psi+": bell_pseudopure("psi+")}
for name, d0 in states.items():
    series = [(0.0, d0)] + time_series(d0, NA23_PARAMS, 6e-3, 10)
    print(name)
    for t, d in series:
        rep = quantum_correlation_Q(d)
        print(f"  t={t * 1e3:5.1f} ms  I={rep.total_I:.4f}  K={rep.classical_K:.4f}  Q={rep.quantum_Q:.4f}")

# %% [markdown]
# For the Bell states Q(t) = (exp(-2 gamma t) + exp(-4 gamma t)) / 2 with
# gamma = C (J1 + J2), so after 60 ms Q has fallen by four orders of magnitude.

# %%
gamma = NA23_PARAMS.C * (NA23_PARAMS.J1 + NA23_PARAMS.J2)
print("predicted Q(60 ms) / Q(0) =", 0.5 * (np.exp(-2 * gamma * 0.06) + np.exp(-4 * gamma * 0.06)))
