"""How oriented can a truncated rotational ladder get?

Scans the maximum achievable |<cos(theta)>| against the number of controlled
states and prints the optimal superposition for a few ladder depths.  The
16-state optimum reaches 0.9894, close to the perfect-orientation limit 1.
"""

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt
import numpy as np

from rotorwave import eigen_oracle, max_orientation, orientation_target

j_values = np.arange(1, 21)
lams = np.array([max_orientation(j) for j in j_values])

print(" j_max   lambda      eigensolver check")
for j, lam in zip(j_values, lams):
    lam_check, _ = eigen_oracle(int(j))
    print(f"{j:6d}   {lam:.8f}  {abs(lam - lam_check):.1e}")

for j_max in (1, 2, 15):
    target = orientation_target(j_max)
    c = ", ".join(f"{x:.4f}" for x in target.amplitudes)
    print(f"\noptimal amplitudes for j_max={j_max}: [{c}]")

fig, ax = plt.subplots(figsize=(5, 3.2))
ax.plot(j_values, lams, "o-", ms=4)
ax.axhline(1.0, color="gray", lw=0.8, ls="--")
ax.set_xlabel("highest controlled state $J_{max}$")
ax.set_ylabel(r"$|\langle\cos\theta\rangle|_{max}$")
ax.set_title("Orientation limit of a truncated ladder")
fig.tight_layout()
fig.savefig("demo01_orientation_limits.png", dpi=150)
print("\nwrote demo01_orientation_limits.png")
