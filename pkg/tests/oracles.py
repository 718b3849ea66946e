"""Independent reference values computed in exact rational arithmetic.

Each oracle restates a closed form from scratch with ``fractions.Fraction``
so that it shares no code with the package.  The ``FROZEN`` table holds the
values these oracles produced when the suite was written; tests compare the
package against ``FROZEN`` and a guard test re-derives ``FROZEN`` from the
oracles.
"""

from fractions import Fraction as F


def stark_shift(Omega, Delta):
    return F(Omega) ** 2 / (4 * F(Delta))


def photon_shift(g, delta):
    return F(g) ** 2 / F(delta)


def raman_amplitude(g, Omega, delta):
    return F(g) * F(Omega) / (2 * F(delta))


def J_s1(t, Omega_a1, Omega_b2, g_a, g_b):
    return F(t) / 4 * ((F(Omega_a1) / F(g_b)) ** 2 + (F(Omega_b2) / F(g_a)) ** 2)


def J_s2(t, Omega_a1, Omega_b2, g_a, g_b):
    return F(t) / 2 * F(Omega_a1) * F(Omega_b2) / (F(g_a) * F(g_b))


def J_z_bond(t, Omega_a2, Omega_b2, g_a, g_b):
    """``(J_z1 + J_z2 - 2 J_z3) / 4``."""
    j1 = F(t) / 2 * (F(Omega_a2) / F(g_a)) ** 2
    j2 = F(t) / 2 * (F(Omega_b2) / F(g_b)) ** 2
    j3 = F(t) / 2 * F(Omega_a2) * F(Omega_b2) / (F(g_a) * F(g_b))
    return (j1 + j2 - 2 * j3) / 4


def kitaev_J(t, Omega_b2, g):
    return F(t) / 2 * (F(Omega_b2) / F(g)) ** 2


def photon_number(g, Omega, delta, Delta):
    return (F(g) * F(Omega) / (F(delta) * F(Delta) + F(g) ** 2 + F(Omega) ** 2 / 4)) ** 2


def bond_J_at_ratio(bond, r, omega_ba=100, detuning=250, g=1):
    """Closed-form bond coupling for the scale-ratio parameter family used in bond validation.

    With ``|A| = t = lambda / r`` the z-bond gives ``t (Omega_b2/g)^2 / 2`` with
    ``Omega_b2 = 2 Delta_b2 lambda / (r g)``; the x-bond gives
    ``t (Omega_b2/g_a)^2 / 2`` with ``Omega_b2 = sqrt(gamma) Omega_a1`` and
    ``g_a = sqrt(gamma) g``, i.e. ``t (Omega_a1/g)^2 / 2``.
    """
    r, g = F(r), F(g)
    Delta_b2 = F(detuning) - omega_ba
    Delta_a1 = F(detuning) - 2 * omega_ba
    if bond == "z":
        lam = g * g / Delta_b2
        Omega = 2 * Delta_b2 * lam / (r * g)
    else:
        lam = g * g / Delta_a1
        Omega = 2 * Delta_a1 * lam / (r * g)
    t = lam / r
    return t / 2 * (Omega / g) ** 2


def compute_all():
    return {
        "eta_0.2_10": stark_shift(F(1, 5), 10),
        "lambda_1_100": photon_shift(1, 100),
        "A_x1": raman_amplitude(1, F(1, 10), 50),
        "J_x1": J_s1(1, F(1, 10), F(1, 10), 1, 1),
        "J_x2": J_s2(1, F(1, 10), F(1, 10), 1, 1),
        "J_y1": J_s1(1, F(1, 10), F(1, 10), 1, -1),
        "J_y2": J_s2(1, F(1, 10), F(1, 10), 1, -1),
        "J_z_example": J_z_bond(1, F(1, 10), F(1, 10), 1, -1),
        "kitaev_J_x": kitaev_J(1, F(1, 10), 1),
        "n_ph": photon_number(F(1, 5), F(1, 5), 2, 2),
        "bond_z_r20": bond_J_at_ratio("z", 20),
        "bond_z_r40": bond_J_at_ratio("z", 40),
        "bond_x_r20": bond_J_at_ratio("x", 20),
        "bond_x_r40": bond_J_at_ratio("x", 40),
    }


# produced by compute_all(); stored as exact fractions
FROZEN = {
    "eta_0.2_10": F(1, 1000),
    "lambda_1_100": F(1, 100),
    "A_x1": F(1, 1000),
    "J_x1": F(1, 200),
    "J_x2": F(1, 200),
    "J_y1": F(1, 200),
    "J_y2": F(-1, 200),
    "J_z_example": F(1, 200),
    "kitaev_J_x": F(1, 200),
    "n_ph": F(16, 164025),
    "bond_z_r20": F(1, 600000),
    "bond_z_r40": F(1, 4800000),
    "bond_x_r20": F(1, 200000),
    "bond_x_r40": F(1, 1600000),
}
