"""Where does the molecular axis point?  Angular densities along the ladder.

Evaluates the closed-form wave function right after each subpulse of the
15-pulse design and plots the polar-angle density at the moment of maximum
orientation: the distribution sharpens and swings toward theta = 0 as more
rotational states join the superposition.
"""

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt
import numpy as np

from rotorwave import LIH, angular_distribution, design_sequence, orientation_target
from rotorwave.magnus import magnus_state, to_schrodinger_picture

target = orientation_target(15)
seq = design_sequence(target, LIH)
t_rot = LIH.t_rot_au

fig, ax = plt.subplots(figsize=(6, 3.6))
for n_done in (1, 3, 7, 15):
    pulse = seq.subpulses[n_done - 1]
    t_after = pulse.center_time + 5 * pulse.duration
    state = magnus_state(seq, t_after)
    # rotate to the nearest full revival, where the packet points forward
    t_revival = np.ceil(t_after / t_rot) * t_rot
    coeffs = to_schrodinger_picture(state.__class__(state.coefficients, t_revival), LIH)
    dist = angular_distribution(coeffs, n_grid=721)
    ax.plot(np.degrees(dist.theta), dist.density, lw=1.1,
            label=f"after subpulse {n_done}")
    print(f"after subpulse {n_done:2d}: forward fraction "
          f"{dist.forward_fraction():.4f}")

iso = angular_distribution(np.array([1.0, 0.0]), n_grid=721)
ax.plot(np.degrees(iso.theta), iso.density, "k--", lw=0.8, label="ground state")
ax.set_xlabel(r"$\theta$ (degrees)")
ax.set_ylabel(r"$\rho(\theta)$")
ax.set_title("Angular density at the revival, along the 15-pulse ladder")
ax.legend(fontsize=8)
fig.tight_layout()
fig.savefig("demo05_angular.png", dpi=150)
print("wrote demo05_angular.png")
