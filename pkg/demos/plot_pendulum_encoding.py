"""
Encoding a damped pendulum
==========================

Approximate the pendulum by a sequence of local Taylor models and look at
how the description length trades model order against trajectory error.
"""

import math

import numpy as np

from mieds import decode, encode, pendulum
from mieds.encoder import EncoderConfig

# The builder returns the vector field and the default search settings.
field, config = pendulum()
print(config)

# Run the search over m = 1..m_max segments.
enc = encode(field, config)
for m, cost in enc.cost_curve:
    print(f"m={m}  L_total={cost:.4f}")
print("chosen m:", enc.m_star, "orders:", enc.degrees)

# Every segment pays at least lam * 1, so with lam = 2 extra segments only pay
# off if they cut the deviation by more than 2.  A smaller lam lets the
# partition grow.
cheap = encode(field, EncoderConfig(0.05, 3, 4, 2.0, 0.01, (math.pi / 4, 0.0)))
print("lam=0.05 -> m:", cheap.m_star, "orders:", cheap.degrees)

# The decoder only needs the centers and coefficients.
xhat = decode(cheap)
err = np.linalg.norm(xhat.states - cheap.reference.states, axis=1)
print(f"max reconstruction error {err.max():.3e}")
