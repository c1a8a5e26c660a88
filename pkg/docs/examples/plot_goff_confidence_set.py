"""
=======================
Goff confidence set
=======================

Inverting the test over a grid of values for the average of ``Y(1)`` in the
Goff design, whose identified set is ``[0.58, 0.67]``. The p-value of each
grid point is plotted; the confidence set is where it exceeds 0.05.
"""

import numpy as np
import matplotlib.pyplot as plt

from linsys import invert_ci
from linsys.designs import gen_goff
from linsys.designs import identified_set

data, model = gen_goff(tau0=0.62, n=5000, seed=3)
cs = invert_ci(model, data, grid=np.round(np.arange(0.40, 0.851, 0.01), 10), seed=1)
print("hull of the accepted grid values:", cs.interval_hull)

lo, hi = identified_set("goff")
plt.axvspan(lo, hi, color="0.85", label="identified set")
plt.plot(cs.grid, cs.p_values, "k.-", label="p-value")
plt.axhline(0.05, color="0.4", linestyle=":")
plt.xlabel("tau0")
plt.ylabel("p-value")
plt.legend(loc="upper right")
plt.show()
