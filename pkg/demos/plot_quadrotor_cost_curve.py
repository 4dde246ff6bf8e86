"""
Quadrotor cost curve
====================

The 8-state attitude and body-velocity model.  Inertias are placeholders,
so look at the shape of the curve rather than its values.
"""

from mieds import encode, quadrotor
from mieds.systems import QuadrotorParams

field, config = quadrotor(QuadrotorParams())
enc = encode(field, config)
for m, cost in enc.cost_curve:
    marker = "  <- optimum" if m == enc.m_star else ""
    print(f"m={m}  L_total={cost:8.3f}{marker}")
print("orders:", enc.degrees)

# Unequal inertias switch on the gyroscopic coupling.
enc2 = encode(*quadrotor(QuadrotorParams(I_x=0.8, I_y=1.0, I_z=1.5)))
print("unequal inertias -> m:", enc2.m_star, "orders:", enc2.degrees)
