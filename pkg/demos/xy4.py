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
# # XY-4 decoupling of the environment spin
#
# Pi pulses on E about alternating x and y axes refocus the coupling phase.
# When the pulses come faster than E flips, the noise is averaged out.

# %%
import matplotlib.pyplot as plt
import numpy as np

from zenosim.experiments import ExperimentConfig, fitted_t2, run_fid, run_xy4, sweep

# %%
config = ExperimentConfig.nmr()
base = fitted_t2(run_fid(config)).t2_ms
intervals = (0.2, 0.4, 0.8, 1.6, 3.2, 8.0)
reps = [max(12, int(400 / (4 * (iv + 0.058)))) for iv in intervals]
traces = sweep(run_xy4, [(config.with_(n_reps=n), "E", iv) for iv, n in zip(intervals, reps)])
t2 = [fitted_t2(tr).t2_ms for tr in traces]
for iv, t in zip(intervals, t2):
    print(f"interval {iv:4.1f} ms  T2 = {t:7.1f} ms  ({t / base:4.1f} x free decay)")

# %%
fig, ax = plt.subplots(figsize=(6, 3.5))
ax.semilogx(intervals, t2, "o-", label="XY-4 on E")
ax.axhline(base, color="k", ls="--", lw=1, label="free decay")
ax.set_xlabel("pulse interval (ms)")
ax.set_ylabel("fitted T2 (ms)")
ax.legend()
plt.show()

# %% [markdown]
# Pulsing S instead, with all noise switched off, leaves the signal intact.

# %%
quiet = ExperimentConfig.nmr(t_d_ms=np.inf, t1s_ms=np.inf, n_reps=40)
print(fitted_t2(run_xy4(quiet, "S", 0.2)))
