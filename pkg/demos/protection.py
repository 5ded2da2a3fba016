# ---
# jupyter:
#   jupytext:
#     formats: py:percent
#   kernelspec:
#     display_name: Python 3
#     language: python
#     name: python3
# ---

# %% [markdown]
# # Protecting a qubit with parity projections
#
# `alpha|0> + beta|1>` is stored as `alpha|++> + beta|-->`. A phase flip on
# either qubit takes the state to odd parity, where a parity projection
# removes it. With error probability `eps = (Gamma T/N)^2` per step the
# surviving weight after `N` steps is `(1 - eps)^N`.

# %%
import matplotlib.pyplot as plt
import numpy as np

from zenosim import qmat
from zenosim.protect import (
    ProtectParams,
    ancilla_parity_circuit,
    decode,
    encode,
    parity_dephase,
    protect_run,
    survival_closed_form,
)

# %%
ns = np.unique(np.logspace(0.5, 3, 25).astype(int))
surv = [protect_run(ProtectParams(0.6, 0.8j, gamma=1.0, total_t=1.0, n_meas=int(n)))[1] for n in ns]
closed = [survival_closed_form(1.0, 1.0, int(n)) for n in ns]
print(f"max |simulated - closed form| = {np.max(np.abs(np.subtract(surv, closed))):.1e}")

fig, ax = plt.subplots(figsize=(6, 3.5))
ax.semilogx(ns, surv, "o", label="simulated")
ax.semilogx(ns, closed, "-", label="(1 - (T/N)^2)^N")
ax.set_xlabel("N")
ax.set_ylabel("survival")
ax.legend()
plt.show()

# %% [markdown]
# The projection can be carried out by a third qubit: prepare it in `|+>`,
# let it control an X on each data qubit, then dephase it.

# %%
rng = np.random.default_rng(0)
rho = qmat.random_density(2, rng)
print(np.max(np.abs(ancilla_parity_circuit(rho) - parity_dephase(rho))))

# %% [markdown]
# Decoding the protected state returns the original qubit.

# %%
print(qmat.fidelity(qmat.projector(np.array([0.6, 0.8j])), decode(encode(0.6, 0.8j))))
