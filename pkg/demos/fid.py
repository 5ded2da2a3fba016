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
# # Free induction decay of a coupled spin pair
#
# The system spin S starts along x and precesses under the `Z Z` coupling to
# an environment spin E. Random flips of E (rate `1/(2 T_d)`) and slow
# relaxation of S (`1/T1s`) make the oscillation decay.

# %%
import matplotlib.pyplot as plt
import numpy as np

from zenosim.experiments import ExperimentConfig, fitted_t2, run_fid
from zenosim.fitting import first_zero

# %%
config = ExperimentConfig.nmr(t_d_ms=6.5, t1s_ms=300.0, j_hz=215.0, n_reps=600)
trace = run_fid(config)
fit = fitted_t2(trace)
print(f"first zero at {first_zero(trace.t_ms, trace.s_x):.3f} ms")
print(f"fitted T2 = {fit.t2_ms:.2f} ms from {fit.n_points} peaks")

# %% [markdown]
# The envelope rate of a telegraph-flipped coupling is `p_e + p_s`, so the
# fitted T2 sits near `1 / (p_e + p_s)`.

# %%
p = config.params
print(f"1 / (p_e + p_s) = {1 / (p.p_e + p.p_s):.2f} ms")

# %%
fig, ax = plt.subplots(figsize=(7, 3))
ax.plot(trace.t_ms, trace.s_x, lw=1, label="s_x")
ax.plot(trace.t_ms, fit.envelope(trace.t_ms), "k--", lw=1, label=f"T2 = {fit.t2_ms:.1f} ms")
ax.plot(trace.t_ms, -fit.envelope(trace.t_ms), "k--", lw=1)
ax.set_xlabel("t (ms)")
ax.set_ylabel("signal")
ax.legend()
plt.show()

# %% [markdown]
# Without noise the first zero sits at half a coupling period.

# %%
quiet = run_fid(ExperimentConfig.nmr(t_d_ms=np.inf, t1s_ms=np.inf, n_reps=60))
print(f"noiseless first zero: {first_zero(quiet.t_ms, quiet.s_x):.3f} ms, 1/(2J) = {1 / 0.43:.3f} ms")
