"""Independent reference implementations used by the tests.

Apart from the finite-difference checker at the bottom (which probes the
jets it is checking), nothing here goes through the expression graph, the
jet algebra or the package integrators.
"""

import math

import numpy as np

from mieds.taylor import basis


def pendulum_rhs(x):
    return np.array([x[1], -x[1] - 9.81 * math.sin(x[0])])


def tanh_rhs(x):
    return np.array([-math.tanh(x[0])])


def quadrotor_rhs(x, Ix=1.0, Iy=1.0, Iz=1.0, m=1.0, g=9.81, fw=(1.0, 1.0, 1.0), ft=0.0,
                  tw=(1.0, 1.0, 1.0), tc=(1.0, 1.0, 1.0)):
    phi, th, p, q, r, u, v, w = x
    return np.array([
        p + r * math.cos(phi) * math.tan(th) + q * math.sin(phi) * math.tan(th),
        q * math.cos(th) - r * math.sin(phi),
        (Iy - Iz) / Ix * r * q + (tc[0] + tw[0]) / Ix,
        (Iz - Ix) / Iy * p * r + (tc[1] + tw[1]) / Iy,
        (Ix - Iy) / Iz * p * q + (tc[2] + tw[2]) / Iz,
        r * v - q * w - g * math.sin(th) + fw[0] / m,
        p * w - r * u + g * math.sin(phi) * math.cos(th) + fw[1] / m,
        q * u - p * v + g * math.cos(th) * math.cos(phi) + (fw[2] - ft) / m,
    ])


def central_diff(fn, x, i, h=1e-5):
    e = np.zeros(len(x))
    e[i] = h
    return (np.asarray(fn(x + e)) - np.asarray(fn(x - e))) / (2 * h)


def rk4(rhs, x0, n_steps, dt):
    xs = [np.array(x0, dtype=float)]
    x = xs[0]
    for _ in range(n_steps):
        a = rhs(x)
        b = rhs(x + dt / 2 * a)
        c = rhs(x + dt / 2 * b)
        d = rhs(x + dt * c)
        x = x + dt / 6 * (a + 2 * b + 2 * c + d)
        xs.append(x)
    return np.array(xs)


def trapezoid_deviation(a, b, dt):
    e = np.linalg.norm(np.asarray(a) - np.asarray(b), axis=1)
    return float(dt * (e.sum() - 0.5 * (e[0] + e[-1])))


def left_riemann_deviation(a, b, dt):
    e = np.linalg.norm(np.asarray(a)[:-1] - np.asarray(b)[:-1], axis=1)
    return float(dt * e.sum())


# -tanh(x) derivatives in closed form, for the brute-force encoder oracle
def neg_tanh_taylor(c, k):
    t = math.tanh(c)
    s2 = 1 / math.cosh(c) ** 2
    derivs = [
        -t,
        -s2,
        2 * t * s2,
        2 * s2 * s2 - 4 * t * t * s2,
    ]
    return [derivs[j] / math.factorial(j) for j in range(k + 1)]


def fd_jet_mismatches(field, closed_form, c, max_degree=4, h=1e-5, rtol=1e-4):
    """Check jet coefficients against central differences.

    Degree-1 coefficients are compared with differences of the closed-form
    field; degree-(j+1) coefficients with differences of the degree-j
    coefficients at ``c +- h e_i`` (so every difference is first order).
    """
    n = field.dim
    bad = []
    jet = field.jet(c, max_degree)
    E = basis(n, max_degree)
    # degree 0 and 1
    np.testing.assert_allclose(jet.coefficient_matrix[:, 0], closed_form(c), rtol=1e-13, atol=1e-13)
    for i in range(n):
        fd = central_diff(closed_form, c, i, h)
        got = jet.coefficient_matrix[:, 1 + i]
        scale = np.maximum(np.maximum(np.abs(fd), np.abs(got)), 1.0)
        if np.any(np.abs(fd - got) > rtol * scale):
            bad.append((1, i))
    for j in range(1, max_degree):
        lower = [k for k, e in enumerate(E) if sum(e) == j]

        def coeffs_at(x, lower=lower, j=j):
            return field.jet(x, j).coefficient_matrix[:, lower]

        for i in range(n):
            fd = central_diff(coeffs_at, c, i, h)
            for col, k in enumerate(lower):
                up = list(E[k])
                up[i] += 1
                idx = E.index(tuple(up))
                got = jet.coefficient_matrix[:, idx] * up[i]
                scale = np.maximum(np.maximum(np.abs(fd[:, col]), np.abs(got)), 1.0)
                if np.any(np.abs(fd[:, col] - got) > rtol * scale):
                    bad.append((j + 1, E[idx]))
    return bad
