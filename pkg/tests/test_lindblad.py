import math
from itertools import product

import numpy as np
import pytest
import scipy.linalg as la
import scipy.sparse as sp
from scipy.sparse.linalg import expm_multiply
from hypothesis import HealthCheck, given, settings
from hypothesis import strategies as st

from giantwg.errors import (CutoffTooSmall, DegenerateSteadyState, OrderingAssemblyError,
                            UndefinedG2, ValidationError)
from giantwg.lindblad import (LiouvillianMatrix, build_hamiltonian, build_liouvillian,
                              cavity_observables, default_cutoff, destroy, is_physical,
                              liouvillian_spectrum, output_density, prepare, rabi_frequency,
                              reflected_density, semiclassical_branches, steady_state,
                              steady_state_ode, trace_distance, trace_functional,
                              transmitted_amplitude, transmitted_g2_output, two_time_correlation,
                              vec)
from giantwg.lindblad.correlations import _Correlator
from giantwg.model import DriveConfig, SystemParams, with_chiral_phase
from giantwg.scattering_one import transmission


def chiral(U=1.0, n=0, k_i=10.0, gamma=1.0):
    """phi = pi/2 point with k0 d = pi/2 and k_i d = 2 pi n."""
    d = 2 * math.pi * n / k_i if k_i else 0.0
    return with_chiral_phase(SystemParams(gamma=gamma, U=U, d=d, phase_k0d=math.pi / 2), k_i)


def drive(omega0, k_i=10.0, direction="R"):
    return DriveConfig(direction, k_i, omega0)


def test_destroy():
    b = destroy(4)
    for n in range(1, 5):
        assert b[n - 1, n] == math.sqrt(n)
    assert np.count_nonzero(b) == 4


def test_hamiltonian_examples():
    p = chiral(U=0.0)
    H = build_hamiltonian(p, drive(0.0, 1.5), cutoff=5).matrix
    assert np.allclose(H, np.diag(-1.5 * np.arange(6)))
    q = chiral()
    assert rabi_frequency(q, drive(0.7)) == pytest.approx(1.4j, abs=1e-12)
    assert rabi_frequency(q, drive(0.7, direction="L")) == 0
    H = build_hamiltonian(q, drive(0.7), cutoff=6).matrix
    assert np.allclose(H, H.conj().T)


def test_master_equation_needs_phi_half_pi():
    with pytest.raises(ValidationError) as e:
        build_liouvillian(SystemParams(phi=0.3), drive(1.0))
    assert e.value.field == "phi"


def test_liouvillian_structure():
    L = build_liouvillian(chiral(), drive(0.8), cutoff=3)
    assert L.shape == (16, 16)
    assert np.max(np.abs(trace_functional(4) @ L.dense)) < 1e-12
    rng = np.random.default_rng(1)
    A = rng.normal(size=(4, 4)) + 1j * rng.normal(size=(4, 4))
    rho = A + A.conj().T
    out = L.apply(rho)
    assert np.allclose(out, out.conj().T, atol=1e-12)


def test_undriven_gap_is_two_gamma():
    for g in (1.0, 0.5):
        spec = liouvillian_spectrum(build_liouvillian(chiral(gamma=g), drive(0.0), cutoff=6))
        assert spec.gap == pytest.approx(2 * g, abs=1e-12)
        assert spec.zero_count == 1


def test_vacuum_and_coherent_steady_states():
    ss = steady_state(build_liouvillian(chiral(), drive(0.0), cutoff=5))
    assert ss.rho[0, 0] == 1 and np.count_nonzero(ss.rho) == 1
    p, dr = chiral(U=0.0), drive(0.6, 1.3)
    ob = cavity_observables(steady_state(build_liouvillian(p, dr, cutoff=25)))
    om = rabi_frequency(p, dr)
    assert ob.n == pytest.approx(abs(om) ** 2 / (1.3 ** 2 + 4), rel=1e-10)
    assert ob.b_mean == pytest.approx(om / (1.3 + 2j), rel=1e-10)
    assert ob.g2 == pytest.approx(1.0, abs=1e-10)


def test_cavity_observables_fock_and_vacuum():
    rho = np.zeros((4, 4), complex)
    rho[1, 1] = 1
    ob = cavity_observables(rho)
    assert ob.n == 1 and ob.g2 == 0 and ob.b_mean == 0
    vac = np.zeros((4, 4), complex)
    vac[0, 0] = 1
    with pytest.raises(UndefinedG2):
        cavity_observables(vac)


def test_degenerate_steady_state():
    p = chiral()
    L = build_liouvillian(p, drive(0.0), cutoff=3)
    zero = LiouvillianMatrix(sp.csr_matrix(L.shape, dtype=complex), 3, L.hamiltonian, 1.0)
    for method in ("dense", "sparse"):
        with pytest.raises(DegenerateSteadyState):
            steady_state(zero, method=method)


def test_cutoff_too_small():
    with pytest.raises(CutoffTooSmall):
        steady_state(build_liouvillian(chiral(U=0.0), drive(3.0, 0.0), cutoff=5))


def test_dense_and_sparse_solves_agree():
    L = build_liouvillian(chiral(), drive(3.0), cutoff=20)
    a, b = steady_state(L, method="dense"), steady_state(L, method="sparse")
    assert trace_distance(a.rho, b.rho) < 1e-12


@settings(max_examples=10, deadline=None, suppress_health_check=[HealthCheck.too_slow])
@given(omega0=st.floats(0, 3), k_i=st.floats(-4, 4), U=st.floats(0, 2))
def test_steady_state_is_physical(omega0, k_i, U):
    L = build_liouvillian(chiral(U=U, k_i=k_i), drive(omega0, k_i), cutoff=30)
    ss = steady_state(L)
    assert is_physical(ss.rho)
    assert ss.residual < 1e-10
    spec = liouvillian_spectrum(L)
    assert np.all(spec.eigenvalues.real <= 1e-10)
    assert spec.zero_count == 1
    assert spec.gap > 0


def test_ode_route():
    L = build_liouvillian(chiral(), drive(0.0), cutoff=6)
    assert steady_state_ode(L).rho[0, 0] == pytest.approx(1.0)
    L = build_liouvillian(chiral(U=0.0), drive(0.6, 1.3), cutoff=25)
    assert trace_distance(steady_state_ode(L).rho, steady_state(L).rho) < 1e-8
    L = build_liouvillian(chiral(), drive(3.0), cutoff=20)
    assert trace_distance(steady_state_ode(L).rho, steady_state(L).rho) < 1e-8


def test_semiclassical_branches():
    assert semiclassical_branches(chiral(U=0.0), drive(1.0, 2.0)) == pytest.approx((4 / 8,))
    assert len(semiclassical_branches(chiral(), drive(5.0))) == 3
    for om in (0.5, 3.0, 10.0):
        assert len(semiclassical_branches(chiral(k_i=0.0), drive(om, 0.0))) == 1
    assert 20 <= default_cutoff(chiral(), drive(0.0)) <= 60
    assert default_cutoff(chiral(), drive(8.0)) == 3 * 14 + 10
    assert default_cutoff(chiral(), drive(20.0)) == 60


def test_two_time_correlation_basics():
    p, dr = chiral(), drive(3.0)
    sys = prepare(p, dr, 20)
    n = cavity_observables(sys.state).n
    assert two_time_correlation(p, dr, 0.0, 20) == pytest.approx(n, rel=1e-12)
    p0 = chiral(U=0.0)
    b0 = cavity_observables(prepare(p0, dr, 20).state).b_mean
    C = two_time_correlation(p0, dr, np.array([0.5, 3.0]), 20)
    # coherent state: only the lab-frame rotation remains
    assert np.allclose(C, abs(b0) ** 2 * np.exp(10j * np.array([0.5, 3.0])), rtol=1e-9, atol=0)


def test_correlation_decays_at_gap_rate():
    p, dr = chiral(), drive(3.0)
    sys = prepare(p, dr, 20)
    bm = cavity_observables(sys.state).b_mean
    gap = liouvillian_spectrum(sys.L).gap
    taus = np.array([8.0, 16.0, 300.0]) / gap
    dev = np.abs(two_time_correlation(p, dr, taus, 20) * np.exp(-1j * dr.k_i * taus) - abs(bm) ** 2)
    assert dev[1] <= dev[0] * math.exp(-gap * (taus[1] - taus[0])) * 1.5
    assert dev[2] < 1e-6 * abs(bm) ** 2


def test_propagator_routes_agree():
    sys = prepare(chiral(), drive(3.0), 20)
    v = vec(sys.b @ sys.rho)
    for tau in (4.0, 150.0):
        exact = la.expm(sys.L.dense * tau) @ v
        assert np.allclose(sys.propagator._long(v, tau), exact, atol=1e-11, rtol=0)
    assert np.allclose(sys.propagator.apply(v, 4.0), expm_multiply(sys.L.sparse * 4.0, v), atol=1e-12)


def test_long_time_propagator_keeps_coherent_state():
    p, dr = chiral(U=0.0, n=1000), drive(8.0)
    sys = prepare(p, dr, 30)
    v = vec(sys.b @ sys.rho)
    beta = complex(np.trace(sys.b @ sys.rho))
    assert np.allclose(sys.propagator.apply(v, p.d), beta * vec(sys.rho), atol=1e-13)


def test_ordered_correlators_factorize_for_linear_cavity():
    p, dr = chiral(U=0.0, n=1), drive(1.0)
    sys = prepare(p, dr, 20)
    beta = complex(np.trace(sys.b @ sys.rho))
    corr = _Correlator(sys, p.d)
    for pc, qc, qa, pa in product(range(3), repeat=4):
        expected = np.conj(beta) ** (pc + qc) * beta ** (qa + pa)
        assert corr(pc, qc, qa, pa) == pytest.approx(expected, rel=1e-8, abs=1e-12)
    with pytest.raises(OrderingAssemblyError):
        corr(-1, 0, 0, 0)


def test_transmitted_output_linear_and_weak_drive():
    p, dr = chiral(U=0.0, n=1), drive(1.0)
    assert transmitted_g2_output(p, dr, cutoff=20) == pytest.approx(1.0, abs=1e-10)
    weak = drive(0.01, 0.5)
    q = chiral(k_i=0.5, n=0)
    assert transmitted_amplitude(q, weak, cutoff=6) == pytest.approx(complex(transmission(q, 0.5)), abs=1e-4)


def test_reflected_density_vanishes():
    dr = drive(4.0)
    assert reflected_density(chiral(U=0.0, n=1), dr, 40) == pytest.approx(0, abs=1e-10)
    assert reflected_density(chiral(n=0), dr, 40) == pytest.approx(0, abs=1e-10)
    assert reflected_density(chiral(n=1), drive(4.0, direction="L"), 40) == 0


def test_reflected_density_equals_left_output_flux():
    p, dr = chiral(n=1), drive(4.5)
    assert output_density(p, dr, "L", 40) == pytest.approx(reflected_density(p, dr, 40), rel=1e-9)


def test_left_drive_is_decoupled():
    p = chiral(n=1)
    dr = drive(5.0, direction="L")
    L = build_liouvillian(p, dr, cutoff=20)
    ss = steady_state(L)
    assert ss.rho[0, 0] == 1 and np.count_nonzero(ss.rho) == 1
    with pytest.raises(UndefinedG2):
        cavity_observables(ss)


def test_cutoff_robustness_off_criticality():
    p, dr = chiral(), drive(3.0)
    a = cavity_observables(steady_state(build_liouvillian(p, dr, 30)))
    b = cavity_observables(steady_state(build_liouvillian(p, dr, 40)))
    assert abs(a.n / b.n - 1) < 1e-6 and abs(a.g2 / b.g2 - 1) < 1e-6
