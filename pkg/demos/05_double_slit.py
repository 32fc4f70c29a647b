"""Double slit behind an absorbing medium, and why far-apart paths do not
talk to each other.

The fringe ratio falls with Im k' L as the coherent weight drains into a
featureless background. Then two packets far apart in a row of local
targets: the jumps that could feed their crossed term die off with the
separation.
"""
import numpy as np

from medium_decoherence import young as Y

base = Y.YoungConfig(slit_separation=1.0, screen_distance=100.0, wavenumber=10.0, medium_wavenumber=10.0)
print(" Im k'L   measured   formula")
for row in Y.visibility_sweep(base, [0.1, 0.35, 1.0, 2.0]):
    print(f"{row['x']:6.2f}  {row['measured']:9.4f}  {row['formula']:8.4f}")

x = Y.position_grid(12.0, 121)
print("\n separation  crossed-term feedback")
for s, fb in Y.feedback_sweep(x, [1.0, 2.0, 4.0, 6.0, 8.0], packet_width=0.5, target_range=0.5):
    print(f"{s:8.1f}     {fb.total:.3e}")
