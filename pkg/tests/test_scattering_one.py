import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from giantwg.errors import SingularGreenFunction
from giantwg.model import Direction, SystemParams, eta, with_chiral_phase, with_locked_theta
from giantwg.scattering_one import green, scatter_single, self_energy, transmission

params_st = st.builds(
    SystemParams,
    gamma=st.floats(0.1, 5),
    phi=st.floats(-math.pi, math.pi),
    d=st.floats(0, 30),
    phase_k0d=st.floats(-math.pi, math.pi),
)
momenta = st.floats(-20, 20)


def test_self_energy_examples():
    p = with_locked_theta(SystemParams(phi=0.015 * math.pi, d=1.0), 0.09)
    s = complex(self_energy(p, 0.09))
    assert abs(s.real - 0.094) < 5e-4 and abs(s.imag + 0.0044) < 5e-4
    assert complex(self_energy(SystemParams(phi=math.pi / 2, d=2.0, phase_k0d=1.3), 0.7)) == pytest.approx(-2j)
    assert complex(self_energy(SystemParams(phi=0.0), 0.0)) == pytest.approx(-4j)


def test_green_examples():
    assert green(SystemParams(phi=math.pi / 2), 0.0) == pytest.approx(-0.5j)
    with pytest.raises(SingularGreenFunction):
        green(SystemParams(phi=0.0, d=1.0, phase_k0d=math.pi), 0.0)
    p = with_locked_theta(SystemParams(phi=0.015 * math.pi, d=1.0), 0.09)
    s = complex(self_energy(p, 0.09))
    assert green(p, 0.09) == pytest.approx(1 / (0.09 - s), rel=1e-14)


def test_green_vectorized():
    p = SystemParams(phi=0.4, d=1.5)
    k = np.linspace(-3, 3, 7)
    assert np.allclose(green(p, k), [green(p, x) for x in k])


def test_chirality_gives_perfect_transmission():
    p = with_chiral_phase(SystemParams(d=0.7, phase_k0d=0.2), 0.3)
    a = scatter_single(p, 0.3, "R")
    assert abs(a.r) < 1e-12
    assert abs(abs(a.t) - 1) < 1e-12


def test_decoupled_point():
    # theta_{Rk} = 0 at k = 0.5; k = 0 itself would sit on the dark-mode pole
    p = SystemParams(phi=math.pi, d=1.0, phase_k0d=-0.5)
    a = scatter_single(p, 0.5, "R")
    assert abs(a.t - 1) < 1e-15 and abs(a.r) < 1e-15


@given(params_st, momenta)
def test_unitarity_both_directions(p, k):
    try:
        amps = [scatter_single(p, k, lam) for lam in "RL"]
    except SingularGreenFunction:
        return
    for a in amps:
        assert abs(abs(a.r) ** 2 + abs(a.t) ** 2 - 1) < 1e-10
    assert abs(abs(amps[0].r) - abs(amps[1].r)) < 1e-12
    assert abs(abs(amps[0].t) - abs(amps[1].t)) < 1e-10


@given(params_st, momenta)
def test_decay_rate_range(p, k):
    s = complex(self_energy(p, k))
    theta = p.phase_k0d + k * p.d
    assert s.imag <= 0
    assert -s.imag == pytest.approx(2 * p.gamma * (1 + math.cos(p.phi) * math.cos(theta)), abs=1e-12)
    assert -s.imag <= 4 * p.gamma + 1e-12


@given(params_st, momenta)
def test_direction_flip_equals_phase_flip(p, k):
    """L input at phi behaves like R input at -phi; r only up to a known phase."""
    try:
        left = scatter_single(p, k, "L")
        right = scatter_single(p.with_(phi=-p.phi), k, "R")
    except SingularGreenFunction:
        return
    assert abs(left.t - right.t) < 1e-12
    assert abs(abs(left.r) - abs(right.r)) < 1e-12
    theta = p.phase_k0d + k * p.d
    assert abs(left.r - np.exp(-2j * theta) * right.r) < 1e-12


@given(params_st, momenta)
def test_reflection_amplitude_phase_relation(p, k):
    """r_{L->R} / r_{R->L} = exp(-2 i theta_{Rk}): amplitudes are not equal in general."""
    try:
        rr, rl = scatter_single(p, k, "R").r, scatter_single(p, k, "L").r
    except SingularGreenFunction:
        return
    theta = p.phase_k0d + k * p.d
    assert abs(rl - np.exp(-2j * theta) * rr) < 1e-12


def test_transmission_matches_scatter_single():
    p = SystemParams(phi=0.3, d=2.0, phase_k0d=0.1)
    k = np.linspace(-2, 2, 5)
    assert np.allclose(transmission(p, k), [scatter_single(p, x).t for x in k], atol=1e-15)


def test_amplitudes_record_direction_and_green():
    p = SystemParams(phi=0.3, d=2.0)
    a = scatter_single(p, 0.5, "L")
    assert a.direction is Direction.L
    assert a.green == green(p, 0.5)
    assert a.sigma == complex(self_energy(p, 0.5))
    assert abs(eta(p, "L", -0.5)) > 0
