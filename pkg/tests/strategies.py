"""Random parameter generators shared by the property and acceptance tests."""

from hypothesis import strategies as st

from cavitykitaev.effective import table_parameters
from cavitykitaev.params import BONDS, make_params


def _signs(rng):
    return {k: float(rng.choice([-1.0, 1.0])) for k in BONDS}


def random_geometry(rng):
    """Level scheme with the red-shift pattern 2 omega_ba < Delta_a2 < 3 omega_ba."""
    omega_ba = rng.uniform(50.0, 200.0)
    omega_ea = omega_ba * rng.uniform(5.0, 20.0)
    detuning = omega_ba * rng.uniform(2.1, 2.9)
    return omega_ea, omega_ba, omega_ea - detuning


def random_table1(rng, Omega_scale=0.2):
    omega_ea, omega_ba, nu2 = random_geometry(rng)
    s = _signs(rng)
    g_b = {k: s[k] * rng.uniform(0.5, 2.0) for k in BONDS}
    t = {k: rng.uniform(1e-4, 1e-2) for k in BONDS}
    return table_parameters(omega_ea, omega_ba, nu2, g_b, rng.uniform(0.01, 1.0) * Omega_scale, t)


def random_raw(rng, delta=None):
    """Matched-frequency parameters with unconstrained drives and couplings."""
    omega_ea, omega_ba, nu2 = random_geometry(rng)
    ga, gb = _signs(rng), _signs(rng)
    return make_params(
        omega_ea, omega_ba, nu2,
        {k: rng.uniform(0.01, 0.3) for k in ("a1", "a2", "b1", "b2")},
        {k: ga[k] * rng.uniform(0.5, 2.0) for k in BONDS},
        {k: gb[k] * rng.uniform(0.5, 2.0) for k in BONDS},
        {k: rng.uniform(1e-4, 1e-2) for k in BONDS},
        delta=delta,
    )


seeds = st.integers(min_value=0, max_value=2**32 - 1)
