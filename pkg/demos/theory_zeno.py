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
# # Zeno suppression with ideal measurements
#
# Time is counted in coupling periods. E starts in `|0>` and flips with
# probability `p_e` per unit time. Ideal x-basis measurements of S every
# `tau_xy` interrupt the coupling.

# %%
import matplotlib.pyplot as plt

from zenosim.channels import MeasurementSpec
from zenosim.experiments import ExperimentConfig, fitted_t2, run_fid, run_zeno
from zenosim.theory import NoiseModel, zeno_survival

# %%
fid = run_fid(ExperimentConfig.theory(p_e=0.05, tau_xy=1 / 160, total=10))
clean = run_fid(ExperimentConfig.theory(p_e=0.0, tau_xy=1 / 160, total=10))
trains = {
    tau: run_zeno(ExperimentConfig.theory(p_e=0.05, tau_xy=tau, total=10), MeasurementSpec())
    for tau in (1 / 160, 1 / 40, 1 / 10)
}

# %%
fig, ax = plt.subplots(figsize=(7, 3.5))
ax.plot(clean.t_ms, clean.s_x, color="0.7", lw=1, label="p_e = 0")
ax.plot(fid.t_ms, fid.s_x, lw=1, label="free decay")
for tau, tr in trains.items():
    ax.plot(tr.t_ms, tr.s_x, label=f"tau_xy = 1/{round(1 / tau)}")
ax.set_xlabel("t (coupling periods)")
ax.set_ylabel("s_x")
ax.legend(fontsize=8)
plt.show()

# %%
env = fitted_t2(fid).envelope(10.0)
for tau, tr in trains.items():
    print(f"tau_xy = 1/{round(1 / tau):<4d} F(10) = {tr.fidelity[-1]:.4f}")
print(f"free-decay envelope at t = 10: {env:.4f}")

# %% [markdown]
# Frequent measurement slows the loss; at `tau_xy = 1/10` each interval
# already loses a finite fraction to the coupling, and the train decays faster
# than the free envelope.
#
# The closed-form survival law shows the same scaling: with quadratic
# short-time loss, `N` measurements over time `T` leave `(1 - (lambda T/N)^2)^N`.

# %%
model = NoiseModel(1.0)
for n in (1, 4, 16, 64, 256):
    exact, approx = zeno_survival(model, 1.0, n)
    print(f"N = {n:<4d} exact {exact:.5f}  exp(-1/N) {approx:.5f}")
