"""Field-free revivals: orientation and alignment after the pulse train.

After the last subpulse the wave packet evolves freely and the degree of
orientation revives once per rotational period, always at the same delay
because every design locks the same phase ladder.  A single pulse leaves the
alignment frozen at 7/15 = 0.467; deeper ladders push it toward 1.
"""

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt
import numpy as np

from rotorwave import LIH, RotationalBasis, design_sequence, orientation_target, series
from rotorwave.observables import peak_statistics
from rotorwave.tdse import PropagationSchedule, run_experiment

t_rot = LIH.t_rot_au
fig, axes = plt.subplots(2, 1, figsize=(7, 5), sharex=False)

for j_max in (1, 2, 4):
    target = orientation_target(j_max)
    seq = design_sequence(target, LIH)
    schedule = PropagationSchedule.from_sequence(seq, sample_step_trot=0.02)
    traj = run_experiment(seq, schedule, basis=RotationalBasis(j_max, 8))
    orient = series(traj, "orientation")
    align = series(traj, "alignment")

    post = traj.times >= seq.t_off
    rel_t = (traj.times[post] - seq.t_off) / t_rot
    axes[0].plot(rel_t, orient.values[post], lw=1.0,
                 label=f"N={j_max} (limit {target.lam:.4f})")
    axes[1].plot(rel_t, align.values[post], lw=1.0, label=f"N={j_max}")

    stats = peak_statistics(orient, window=(seq.t_off, traj.times[-1]))
    spacing = np.mean(stats.spacings) / t_rot if stats.spacings else float("nan")
    print(f"N={j_max}: post-pulse peak {stats.max_value:.4f}, "
          f"revival spacing {spacing:.4f} T_rot")

axes[0].set_ylabel(r"$\langle\cos\theta\rangle$")
axes[0].legend(fontsize=8)
axes[1].set_ylabel(r"$\langle\cos^2\theta\rangle$")
axes[1].axhline(1 / 3, color="gray", lw=0.8, ls="--")
axes[1].set_xlabel(r"time after the last pulse ($T_{rot}$)")
axes[1].legend(fontsize=8)
fig.tight_layout()
fig.savefig("demo04_revivals.png", dpi=150)
print("wrote demo04_revivals.png")
