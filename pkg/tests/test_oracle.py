import numpy as np
import pytest

from quenchgap.errors import GridMismatchError, InvalidParamsError, StepSizeError
from quenchgap.lrk import LrkParams
from quenchgap.modes import TwoLevelMode
from quenchgap.oracle import (
    ModeTrajectory,
    assemble_observable,
    evolve_mode,
    evolve_modes,
    exact_mx_response,
    exact_nf_response,
)
from quenchgap.response import QuenchProtocol, mx_response, nf_response, time_grid
from quenchgap.tfim import TfimParams, tfim_modes

# exact <M_x> at t = 10 for g0 = 0.5, dg = 0.02, N = 20, frozen from an
# independent 2x2 matrix-exponential evolution per mode (scipy.linalg.expm)
_MODE = TwoLevelMode.from_fields(0.4, 0.7, 1.1)


def _expm_oracle(p, dg, t):
    from scipy.linalg import expm

    sx = np.array([[0, 1], [1, 0]], complex)
    sz = np.array([[1, 0], [0, -1]], complex)
    total = 0.0
    for m in tfim_modes(p):
        h0 = m.h_z * sz + m.h_x * sx
        w, v = np.linalg.eigh(h0)
        psi = v[:, 0]
        h1 = h0 + 2 * p.J * dg * sz
        psi_t = expm(-1j * h1 * t) @ psi
        total += np.real(psi_t.conj() @ (-(2 / p.N) * sz) @ psi_t)
    return total


def test_zero_amplitude_is_stationary():
    t = time_grid(50.0, 200)
    for kind, w in (("sudden", 0.0), ("cosine", 0.4)):
        tr = evolve_mode(_MODE, QuenchProtocol(kind, 0.0, w), -1.0, t, coupling=2.0)
        np.testing.assert_allclose(tr.bloch, np.broadcast_to([0, 0, -1.0], tr.bloch.shape), atol=1e-12)


def test_sudden_is_rotation_about_new_field():
    t = time_grid(30.0, 300)
    tr = evolve_mode(_MODE, QuenchProtocol("sudden", 0.05), 1.0, t, coupling=2.0)
    dh = 2.0 * 0.05
    b = np.array([-dh * _MODE.sin_field, 0.0, _MODE.epsilon + dh * _MODE.cos_field])
    proj = tr.bloch @ (b / np.linalg.norm(b))
    np.testing.assert_allclose(proj, proj[0], atol=1e-13)
    np.testing.assert_allclose(np.linalg.norm(tr.bloch, axis=1), 1.0, atol=1e-12)


def test_matches_independent_matrix_exponential():
    p = TfimParams(g=0.5, N=20)
    t = time_grid(12.0, 12)
    exact = exact_mx_response(p, QuenchProtocol("sudden", 0.02), t)
    for i in (3, 7, 11):
        assert exact.values[i] == pytest.approx(_expm_oracle(p, 0.02, t[i]), abs=1e-12)


def test_norm_conserved_long_cosine_drive():
    p = TfimParams(g=0.5, N=10)
    modes = tfim_modes(p)
    eps = np.array([m.epsilon for m in modes])
    cp = np.array([m.cos_field for m in modes])
    sp = np.array([m.sin_field for m in modes])
    t = time_grid(500.0, 1000)
    bloch = evolve_modes(eps, cp, sp, QuenchProtocol("cosine", 0.05, 0.28), -1.0, t, coupling=2.0)
    assert np.max(np.abs(np.linalg.norm(bloch, axis=-1) - 1.0)) < 1e-10


def test_energy_conserved_after_sudden_quench():
    t = time_grid(500.0, 1000)
    dh = 2.0 * 0.03
    tr = evolve_mode(_MODE, QuenchProtocol("sudden", 0.03), -0.4, t, coupling=2.0)
    b = np.array([-dh * _MODE.sin_field, 0.0, _MODE.epsilon + dh * _MODE.cos_field])
    energy = tr.bloch @ b
    assert np.ptp(energy) < 1e-10


def test_cosine_drive_converges_to_tolerance():
    # halving the internal step of a converged run changes nothing above the tolerance
    t = time_grid(20.0, 200)
    proto = QuenchProtocol("cosine", 0.05, 0.28)
    a = evolve_modes([_MODE.epsilon], [_MODE.cos_field], [_MODE.sin_field], proto, -1.0, t, coupling=2.0)
    b = evolve_modes([_MODE.epsilon], [_MODE.cos_field], [_MODE.sin_field], proto, -1.0, t, coupling=2.0, tol=1e-12)
    assert np.max(np.abs(a - b)) < 1e-9


def test_step_refinement_failure_is_reported():
    t = time_grid(20.0, 50)
    with pytest.raises(StepSizeError):
        evolve_modes([1.0], [0.6], [0.8], QuenchProtocol("cosine", 0.05, 0.3), -1.0, t, coupling=2.0, tol=1e-20, max_refinements=1)


def test_negative_times_rejected():
    with pytest.raises(InvalidParamsError):
        evolve_mode(_MODE, QuenchProtocol("sudden", 0.01), -1.0, np.linspace(-1, 1, 5), coupling=2.0)


def test_error_is_second_order_in_amplitude():
    p = TfimParams(g=0.5, N=20)
    t = time_grid(10.0, 200)
    errs = []
    amps = (0.04, 0.02, 0.01, 0.005)
    for a in amps:
        pr = QuenchProtocol("sudden", a)
        errs.append(np.max(np.abs(exact_mx_response(p, pr, t).values - mx_response(p, pr, t).values)))
    slope = np.polyfit(np.log(amps), np.log(errs), 1)[0]
    assert slope == pytest.approx(2.0, abs=0.2)


def test_lrk_oracle_agrees_to_second_order():
    p = LrkParams(mu=2.0, N=100, beta=1.25)
    t = time_grid(10.0, 100)
    errs = []
    for a in (0.02, 0.01):
        pr = QuenchProtocol("sudden", a)
        errs.append(np.max(np.abs(exact_nf_response(p, pr, t).values - nf_response(p, pr, t).values)))
    assert errs[0] / errs[1] == pytest.approx(4.0, rel=0.15)


def test_assemble_single_mode():
    t = time_grid(4.0, 8)
    tr = ModeTrajectory(t, np.tile([0.0, 0.0, -1.0], (8, 1)))
    s = assemble_observable([tr], [(0.0, 0.0, 1.0)], 10)
    np.testing.assert_allclose(s.values, -2 / 10)
    assert tr[3].norm == pytest.approx(1.0)


def test_assemble_grid_mismatch():
    a = ModeTrajectory(time_grid(4.0, 8), np.zeros((8, 3)))
    b = ModeTrajectory(time_grid(5.0, 8), np.zeros((8, 3)))
    with pytest.raises(GridMismatchError):
        assemble_observable([a, b], np.zeros((2, 3)), 4)
    with pytest.raises(GridMismatchError):
        assemble_observable([a], np.zeros((2, 3)), 4)


def test_assemble_is_order_deterministic():
    p = TfimParams(g=1.0, N=40)
    t = time_grid(100.0, 200)
    a = exact_mx_response(p, QuenchProtocol("sudden", 0.01), t).values
    b = exact_mx_response(p, QuenchProtocol("sudden", 0.01), t).values
    assert a.tobytes() == b.tobytes()


def test_critical_quench_short_time_deviation():
    # at g0 = 1, N = 100 the lowest splitting (~0.063) is only three times the
    # field shift, so agreement is tight only at short times
    p = TfimParams(g=1.0, N=100)
    t = time_grid(5.0, 200)
    pr = QuenchProtocol("sudden", 0.01)
    dev = np.max(np.abs(exact_mx_response(p, pr, t).values - mx_response(p, pr, t).values))
    assert dev < 2e-4
    assert dev == pytest.approx(1.408e-4, rel=1e-3)
