"""Classical and quantum correlations of two-qubit pseudopure states.

Run with ``python demos/01_correlations.py``.
"""
# %%
import numpy as np

from devcorr import ThermalState, bell_pseudopure, one_sided_exact, quantum_correlation_Q, random_x
from devcorr.states import computational

# %% [markdown]
# In units of eps^2/ln2 the expansion values do not depend on epsilon.
# A Bell pseudopure state carries more quantum than classical correlation.

# %%
for name in ["psi+", "phi-"]:
    rep = quantum_correlation_Q(bell_pseudopure(name))
    print(f"{name:>6}: I={rep.total_I:.4f}  K={rep.classical_K:.4f}  Q={rep.quantum_Q:.4f}  basis={rep.optimal_basis.as_tuple()}")

# %% [markdown]
# A computational-basis state is purely classical, while the committed
# random X state (seed 0) has K > Q.

# %%
for label, d in [("|00>", computational("00")), ("X seed 0", random_x(0))]:
    rep = quantum_correlation_Q(d)
    print(f"{label:>8}: I={rep.total_I:.4f}  K={rep.classical_K:.4f}  Q={rep.quantum_Q:.4f}")

# %% [markdown]
# The exact path works with the full density matrix 1/4 + eps*d. For a Bell
# state the one-sided discord D approaches Q * eps^2/ln2 as eps -> 0.

# %%
for eps in [1e-2, 1e-3, 1e-5]:
    rep = one_sided_exact(ThermalState(eps, bell_pseudopure("psi+")))
    scale = np.log(2) / eps**2
    print(f"eps={eps:.0e}: I*ln2/eps^2={rep.total_I * scale:.6f}  D*ln2/eps^2={rep.discord_D * scale:.6f}")
