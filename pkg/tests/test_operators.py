"""Structural identities of the phase-coupling operators.

The difference map T, the auxiliary map S, the pseudoinverse T+, and the
assembled coupling matrices must satisfy exact linear-algebra identities
for every supported network size.
"""

import math

import numpy as np
import pytest

from modbot.errors import DimensionError, ParameterError
from modbot.oscillators import (
    OscillatorNetworkParams,
    NetworkState,
    build_coupling,
    build_difference_matrix,
    build_psi_map,
    compute_psi,
    coupling_operators,
    gap_residual,
    initial_state,
    phase_rates,
    potential,
)

SIZES = list(range(2, 17))


def _uniform_params(n: int, omega: float = 2.0) -> OscillatorNetworkParams:
    return OscillatorNetworkParams.uniform_gains(
        omega=omega,
        R=(0.5,) * n,
        C=(0.0,) * n,
        theta_des=(0.3,) * (n - 1),
    )


def test_difference_matrix_shape_and_rows():
    T = build_difference_matrix(4)
    expected = np.array(
        [
            [1.0, -1.0, 0.0, 0.0],
            [0.0, 1.0, -1.0, 0.0],
            [0.0, 0.0, 1.0, -1.0],
        ]
    )
    assert np.array_equal(T, expected)


def test_difference_matrix_kills_constants():
    for n in SIZES:
        T = build_difference_matrix(n)
        assert np.max(np.abs(T @ np.ones(n))) == 0.0


def test_pseudoinverse_is_right_inverse():
    for n in SIZES:
        T = build_difference_matrix(n)
        ops = coupling_operators(_uniform_params(n))
        assert np.max(np.abs(T @ ops.T_pinv - np.eye(n - 1))) < 1e-12


def test_psi_map_invertible_and_unit_determinant_structure():
    for n in SIZES:
        S = build_psi_map(n)
        assert S.shape == (n - 1, n - 1)
        # invertible: solve must succeed and reproduce the identity
        inv = np.linalg.solve(S, np.eye(n - 1))
        assert np.max(np.abs(S @ inv - np.eye(n - 1))) < 1e-12


def test_psi_map_small_sizes_are_identity():
    assert np.array_equal(build_psi_map(2), np.eye(1))
    assert np.array_equal(build_psi_map(3), np.eye(2))


def test_compute_psi_worked_examples():
    half = math.pi / 2
    theta = np.array([half, half, half, half])
    assert np.allclose(compute_psi(theta), [half, 0.0, 0.0, half], atol=1e-15)
    theta = np.array([half, -half, half, -half])
    assert np.allclose(
        compute_psi(theta), [half, math.pi, -math.pi, -half], atol=1e-15
    )


def test_compute_psi_matches_matrix():
    rng = np.random.default_rng(5)
    for n in SIZES:
        theta = rng.uniform(-3, 3, size=n - 1)
        assert np.allclose(
            compute_psi(theta), build_psi_map(n) @ theta, atol=1e-13
        )


def test_coupling_matrices_identities():
    rng = np.random.default_rng(6)
    for n in SIZES:
        mu = rng.uniform(1.0, 8.0, size=n - 1)
        A, B = build_coupling(n, mu)
        T = build_difference_matrix(n)
        # constant phase shifts are invisible to the coupling
        assert np.max(np.abs(A @ np.ones(n))) < 1e-12
        # A acts through differences only
        assert np.max(np.abs(A + B @ T)) < 1e-12


def test_rate_law_equals_gradient_assembly():
    # phi_dot must equal omega + A phi + B theta_des with the matrices
    # rebuilt here from first principles.
    rng = np.random.default_rng(7)
    for n in (2, 3, 5, 9):
        mu = rng.uniform(1.0, 8.0, size=n - 1)
        params = OscillatorNetworkParams(
            n=n,
            omega=1.7,
            mu=tuple(mu),
            a=(20.0,) * n,
            R=(0.2,) * n,
            C=(0.0,) * n,
            theta_des=tuple(rng.uniform(-1, 1, size=n - 1)),
        )
        T = build_difference_matrix(n)
        S = build_psi_map(n)
        M = np.diag(mu)
        T_pinv = T.T @ np.linalg.inv(T @ T.T)
        B = 2.0 * T_pinv @ np.linalg.inv(S) @ M @ S
        A = -B @ T
        phi = rng.uniform(-3, 3, size=n)
        want = params.omega + A @ phi + B @ np.asarray(params.theta_des)
        got = phase_rates(phi, params)
        assert np.max(np.abs(got - want)) < 1e-12


def test_equilibrium_iff_differences_match():
    rng = np.random.default_rng(8)
    for n in (2, 4, 7):
        params = _uniform_params(n)
        theta_des = np.asarray(params.theta_des)
        T = build_difference_matrix(n)
        # build phi with T phi == theta_des: cumulative sums plus any offset
        phi = np.concatenate(([1.3], 1.3 - np.cumsum(theta_des)))
        rates = phase_rates(phi, params)
        assert np.max(np.abs(rates - params.omega)) < 1e-12
        # any phi violating the differences is not an equilibrium
        phi_bad = phi + rng.uniform(0.1, 0.5, size=n)
        phi_bad[0] -= 0.7
        if np.max(np.abs(T @ phi_bad - theta_des)) > 1e-6:
            rates_bad = phase_rates(phi_bad, params)
            assert np.max(np.abs(rates_bad - params.omega)) > 1e-8


def test_potential_zero_at_target_positive_elsewhere():
    mu = np.array([2.0, 3.0, 4.0])
    psi_des = np.array([0.1, -0.2, 0.3])
    assert potential(psi_des, psi_des, mu) == 0.0
    rng = np.random.default_rng(9)
    for _ in range(50):
        psi = psi_des + rng.uniform(-1, 1, size=3)
        v = potential(psi, psi_des, mu)
        want = float(np.sum(mu * (psi - psi_des) ** 2))
        assert v == pytest.approx(want, rel=1e-15)
        if np.max(np.abs(psi - psi_des)) > 1e-9:
            assert v > 0.0


def test_gap_residual_wraps():
    params = _uniform_params(3)
    state = NetworkState(
        phi=(0.0, -0.3 + 2 * math.pi, -0.6), r=(0.0,) * 3, r_dot=(0.0,) * 3
    )
    res = gap_residual(state, params)
    # raw differences are 0.3 +/- a full turn; wrapped residuals vanish
    assert np.allclose(res, [0.0, 0.0], atol=1e-12)


def test_params_validation():
    with pytest.raises(DimensionError):
        OscillatorNetworkParams(
            n=3, omega=1.0, mu=(5.0,), a=(20.0,) * 3, R=(0.1,) * 3,
            C=(0.0,) * 3, theta_des=(0.0, 0.0),
        )
    with pytest.raises(ParameterError):
        OscillatorNetworkParams(
            n=2, omega=1.0, mu=(-1.0,), a=(20.0,) * 2, R=(0.1,) * 2,
            C=(0.0,) * 2, theta_des=(0.0,),
        )
    with pytest.raises(ParameterError):
        OscillatorNetworkParams.uniform_gains(
            omega=1.0, R=(0.1, 0.1), C=(0.0, 0.0), theta_des=(0.0,), a=0.0
        )


def test_joint_limit_budget_enforced_by_default():
    with pytest.raises(ParameterError):
        OscillatorNetworkParams.uniform_gains(
            omega=1.0, R=(2.0, 0.0), C=(0.5, 0.0), theta_des=(0.0,)
        )
    params = OscillatorNetworkParams.uniform_gains(
        omega=1.0, R=(2.0, 0.0), C=(0.5, 0.0), theta_des=(0.0,),
        enforce_joint_limits=False,
    )
    assert params.R[0] == 2.0


def test_initial_state_shapes():
    params = _uniform_params(5)
    state = initial_state(params)
    assert state.phi == (0.0,) * 5
    assert state.r == (0.0,) * 5
    assert state.r_dot == (0.0,) * 5
    assert state.t == 0.0
