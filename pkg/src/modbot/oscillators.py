"""Single-module oscillator network.

A module is a chain of n phase oscillators sharing a natural frequency.
Consecutive phase gaps are driven toward a desired pattern by the negative
gradient of a quadratic potential over an auxiliary second-difference
coordinate; per-joint amplitudes follow an independent critically damped
channel. Joint commands are q_i = r_i * sin(phi_i) + C_i.
"""

import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .angles import JOINT_LIMIT, clamp_joints, wrap_angle, wrap_array
from .errors import DimensionError, NumericDivergenceError, ParameterError

DEFAULT_MU = 5.0
DEFAULT_A = 20.0


@dataclass(frozen=True)
class OscillatorNetworkParams:
    """Constants of one module's oscillator network.

    Attributes:
        n: oscillator count (>= 2).
        omega: shared natural frequency, rad/s.
        mu: phase convergence gains, length n-1, each > 0.
        a: amplitude convergence rates, length n, each > 0, 1/s.
        R: desired amplitudes, length n, rad.
        C: constant joint offsets, length n, rad.
        theta_des: desired consecutive phase gaps, length n-1, rad;
            normalized into (-pi, pi] on construction.
        enforce_joint_limits: when True, require |R_i| + |C_i| <= 3/4 pi.
    """

    n: int
    omega: float
    mu: tuple[float, ...]
    a: tuple[float, ...]
    R: tuple[float, ...]
    C: tuple[float, ...]
    theta_des: tuple[float, ...]
    enforce_joint_limits: bool = True

    def __post_init__(self):
        if self.n < 2:
            raise DimensionError(f"need at least 2 oscillators, got n={self.n}")
        object.__setattr__(self, "mu", tuple(float(x) for x in self.mu))
        object.__setattr__(self, "a", tuple(float(x) for x in self.a))
        object.__setattr__(self, "R", tuple(float(x) for x in self.R))
        object.__setattr__(self, "C", tuple(float(x) for x in self.C))
        object.__setattr__(
            self, "theta_des", tuple(wrap_angle(float(x)) for x in self.theta_des)
        )
        for name, vec, length in (
            ("mu", self.mu, self.n - 1),
            ("a", self.a, self.n),
            ("R", self.R, self.n),
            ("C", self.C, self.n),
            ("theta_des", self.theta_des, self.n - 1),
        ):
            if len(vec) != length:
                raise DimensionError(
                    f"{name} must have length {length} for n={self.n}, got {len(vec)}"
                )
        if any(m <= 0 for m in self.mu):
            raise ParameterError("all mu entries must be > 0")
        if any(x <= 0 for x in self.a):
            raise ParameterError("all a entries must be > 0")
        if self.enforce_joint_limits:
            for i, (ri, ci) in enumerate(zip(self.R, self.C)):
                if abs(ri) + abs(ci) > JOINT_LIMIT + 1e-12:
                    raise ParameterError(
                        f"joint {i + 1} infeasible: |R|+|C| = {abs(ri) + abs(ci):.4f} "
                        f"exceeds limit {JOINT_LIMIT:.4f} rad"
                    )

    @classmethod
    def uniform_gains(
        cls,
        omega: float,
        R: tuple[float, ...],
        C: tuple[float, ...],
        theta_des: tuple[float, ...],
        mu: float = DEFAULT_MU,
        a: float = DEFAULT_A,
        enforce_joint_limits: bool = True,
    ) -> "OscillatorNetworkParams":
        """Build params with one shared mu and one shared a."""
        n = len(R)
        return cls(
            n=n,
            omega=float(omega),
            mu=(float(mu),) * (n - 1),
            a=(float(a),) * n,
            R=tuple(R),
            C=tuple(C),
            theta_des=tuple(theta_des),
            enforce_joint_limits=enforce_joint_limits,
        )


@dataclass(frozen=True)
class NetworkState:
    """Instantaneous state of one module: phases (unwrapped), amplitudes,
    amplitude rates, and simulation time."""

    phi: tuple[float, ...]
    r: tuple[float, ...]
    r_dot: tuple[float, ...]
    t: float = 0.0

    def __post_init__(self):
        object.__setattr__(self, "phi", tuple(float(x) for x in self.phi))
        object.__setattr__(self, "r", tuple(float(x) for x in self.r))
        object.__setattr__(self, "r_dot", tuple(float(x) for x in self.r_dot))
        if not (len(self.phi) == len(self.r) == len(self.r_dot)):
            raise DimensionError("phi, r, r_dot must share one length")


@dataclass(frozen=True)
class PhasePull:
    """External phase attraction applied while stepping a module.

    mode "first" adds gain * wrap(reference - phi_1) to the first
    oscillator's rate; mode "mean" adds gain * wrap(reference - mean(phi))
    to every oscillator's rate. The pull is re-evaluated at each
    integrator stage against the stage phases.
    """

    gain: float
    reference: float
    mode: str = "first"

    def __post_init__(self):
        if self.mode not in ("first", "mean"):
            raise ParameterError(f"unknown phase pull mode {self.mode!r}")
        if self.gain < 0:
            raise ParameterError(f"phase pull gain must be >= 0, got {self.gain}")


@dataclass(frozen=True, eq=False)
class CouplingOperators:
    """Precomputed linear operators for one (n, mu) pair.

    T maps phases to consecutive gaps, S maps gaps to the auxiliary
    coordinate, T_pinv lifts gap rates back to phase rates, and
    (A_eff, B_eff) give the closed-form phase update
    rate = omega + A_eff @ phi + B_eff @ theta_des.
    """

    T: np.ndarray
    S: np.ndarray
    T_pinv: np.ndarray
    A_eff: np.ndarray
    B_eff: np.ndarray


def build_difference_matrix(n: int) -> np.ndarray:
    """(n-1) x n matrix T with (T phi)_i = phi_i - phi_{i+1}."""
    if n < 2:
        raise DimensionError(f"difference matrix needs n >= 2, got {n}")
    T = np.zeros((n - 1, n))
    idx = np.arange(n - 1)
    T[idx, idx] = 1.0
    T[idx, idx + 1] = -1.0
    return T


def build_psi_map(n: int) -> np.ndarray:
    """(n-1) x (n-1) matrix S taking gaps theta to the auxiliary coordinate.

    psi_1 = theta_1, psi_{n-1} = theta_{n-1}, and interior entries are
    theta_{i-1} - theta_i (a second difference of the phases). For n <= 3
    the boundary cases coincide and S is the identity.
    """
    if n < 2:
        raise DimensionError(f"psi map needs n >= 2, got {n}")
    k = n - 1
    S = np.zeros((k, k))
    S[0, 0] = 1.0
    S[k - 1, k - 1] = 1.0
    for i in range(1, k - 1):
        S[i, i - 1] = 1.0
        S[i, i] = -1.0
    return S


def compute_psi(theta: np.ndarray) -> np.ndarray:
    """Map a gap vector theta (length n-1) to the auxiliary coordinate."""
    theta = np.asarray(theta, dtype=float)
    if theta.ndim != 1 or theta.size < 1:
        raise DimensionError("theta must be a vector of length >= 1")
    return build_psi_map(theta.size + 1) @ theta


def potential(psi: np.ndarray, psi_des: np.ndarray, mu: np.ndarray) -> float:
    """Quadratic potential sum(mu_i * (psi_i - psi_des_i)^2); zero exactly
    at psi == psi_des."""
    psi = np.asarray(psi, dtype=float)
    psi_des = np.asarray(psi_des, dtype=float)
    mu = np.asarray(mu, dtype=float)
    if not (psi.shape == psi_des.shape == mu.shape):
        raise DimensionError("psi, psi_des, mu must share one shape")
    if np.any(mu <= 0):
        raise ParameterError("all mu entries must be > 0")
    d = psi - psi_des
    return float(np.dot(mu, d * d))


def build_coupling(n: int, mu: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Closed-form coupling matrices of the gradient phase law.

    A_eff = -2 T^+ S^-1 M S T and B_eff = 2 T^+ S^-1 M S with M = diag(mu),
    so A_eff @ phi + B_eff @ theta_des = -2 T^+ S^-1 M S (T phi - theta_des),
    which vanishes exactly when the gaps match theta_des.
    """
    mu = np.asarray(mu, dtype=float)
    if mu.shape != (n - 1,):
        raise DimensionError(f"mu must have length {n - 1} for n={n}")
    if np.any(mu <= 0):
        raise ParameterError("all mu entries must be > 0")
    T = build_difference_matrix(n)
    S = build_psi_map(n)
    # T^+ = T^T (T T^T)^{-1}; T T^T is symmetric positive definite.
    T_pinv = np.linalg.solve(T @ T.T, T).T
    G = np.linalg.solve(S, mu[:, None] * S)  # S^-1 M S
    B_eff = 2.0 * (T_pinv @ G)
    A_eff = -B_eff @ T
    return A_eff, B_eff


@lru_cache(maxsize=256)
def _cached_operators(n: int, mu: tuple[float, ...]) -> CouplingOperators:
    T = build_difference_matrix(n)
    S = build_psi_map(n)
    T_pinv = np.linalg.solve(T @ T.T, T).T
    A_eff, B_eff = build_coupling(n, np.array(mu))
    ops = CouplingOperators(T=T, S=S, T_pinv=T_pinv, A_eff=A_eff, B_eff=B_eff)
    for m in (ops.T, ops.S, ops.T_pinv, ops.A_eff, ops.B_eff):
        m.flags.writeable = False
    return ops


def coupling_operators(params: OscillatorNetworkParams) -> CouplingOperators:
    """Shared, read-only operator set for params (cached per (n, mu))."""
    return _cached_operators(params.n, params.mu)


@lru_cache(maxsize=256)
def _param_arrays(params: OscillatorNetworkParams):
    arrays = tuple(
        np.array(v, dtype=float)
        for v in (params.theta_des, params.R, params.C, params.a)
    )
    for arr in arrays:
        arr.flags.writeable = False
    return arrays


def initial_state(params: OscillatorNetworkParams, t: float = 0.0) -> NetworkState:
    """All-zero start: flat phases, zero amplitude, zero amplitude rate."""
    zeros = (0.0,) * params.n
    return NetworkState(phi=zeros, r=zeros, r_dot=zeros, t=t)


def random_state(
    params: OscillatorNetworkParams, rng: np.random.Generator, t: float = 0.0
) -> NetworkState:
    """Random phases in [-pi, pi] with zero amplitude channel, for
    convergence studies."""
    phi = rng.uniform(-math.pi, math.pi, size=params.n)
    zeros = (0.0,) * params.n
    return NetworkState(phi=tuple(phi), r=zeros, r_dot=zeros, t=t)


def phase_rates(
    phi: np.ndarray,
    params: OscillatorNetworkParams,
    operators: CouplingOperators | None = None,
    phase_pull: PhasePull | None = None,
) -> np.ndarray:
    """Instantaneous phase velocities for the given phases, including the
    optional external pull used by the inter-module coordination layer."""
    ops = operators if operators is not None else coupling_operators(params)
    theta_des, _, _, _ = _param_arrays(params)
    phi = np.asarray(phi, dtype=float)
    rate = params.omega + ops.A_eff @ phi + ops.B_eff @ theta_des
    if phase_pull is not None:
        if phase_pull.mode == "first":
            rate[0] += phase_pull.gain * wrap_angle(phase_pull.reference - float(phi[0]))
        else:
            rate += phase_pull.gain * wrap_angle(phase_pull.reference - float(np.mean(phi)))
    return rate


def step(
    state: NetworkState,
    params: OscillatorNetworkParams,
    dt: float,
    operators: CouplingOperators | None = None,
    phase_pull: PhasePull | None = None,
) -> NetworkState:
    """Advance phases and amplitudes by one fixed RK4 step of size dt.

    The phase channel integrates rate = omega + A_eff phi + B_eff theta_des
    (plus the optional pull on oscillator 1); the amplitude channel
    integrates the critically damped pair r_dot' = a [ (a/4)(R - r) - r_dot ].
    """
    if dt <= 0:
        raise ParameterError(f"dt must be > 0, got {dt}")
    if len(state.phi) != params.n:
        raise DimensionError(f"state has {len(state.phi)} oscillators, params n={params.n}")
    ops = operators if operators is not None else coupling_operators(params)
    _, R, _, a = _param_arrays(params)

    phi = np.array(state.phi)
    r = np.array(state.r)
    v = np.array(state.r_dot)

    def f_phi(p):
        return phase_rates(p, params, ops, phase_pull)

    def f_amp(rr, vv):
        return a * (0.25 * a * (R - rr) - vv)

    half = 0.5 * dt
    # overflow here is handled below by the finiteness check
    with np.errstate(over="ignore", invalid="ignore"):
        k1p = f_phi(phi)
        k1v = f_amp(r, v)
        k2p = f_phi(phi + half * k1p)
        k2r = v + half * k1v
        k2v = f_amp(r + half * v, k2r)
        k3p = f_phi(phi + half * k2p)
        k3r = v + half * k2v
        k3v = f_amp(r + half * k2r, k3r)
        k4p = f_phi(phi + dt * k3p)
        k4r = v + dt * k3v
        k4v = f_amp(r + dt * k3r, k4r)

        sixth = dt / 6.0
        phi_new = phi + sixth * (k1p + 2.0 * (k2p + k3p) + k4p)
        r_new = r + sixth * (v + 2.0 * (k2r + k3r) + k4r)
        v_new = v + sixth * (k1v + 2.0 * (k2v + k3v) + k4v)

    t_new = state.t + dt
    if not (
        np.isfinite(phi_new).all()
        and np.isfinite(r_new).all()
        and np.isfinite(v_new).all()
    ):
        raise NumericDivergenceError(
            f"non-finite network state at t={t_new:.6f} s", t=t_new
        )
    return NetworkState(
        phi=tuple(phi_new), r=tuple(r_new), r_dot=tuple(v_new), t=t_new
    )


def output(state: NetworkState, params: OscillatorNetworkParams) -> np.ndarray:
    """Joint angles q_i = r_i * sin(phi_i) + C_i, unclamped."""
    _, _, C, _ = _param_arrays(params)
    return np.array(state.r) * np.sin(np.array(state.phi)) + C


def output_clamped(
    state: NetworkState, params: OscillatorNetworkParams
) -> tuple[np.ndarray, np.ndarray]:
    """Joint angles clipped to the actuator range, plus out-of-range flags."""
    return clamp_joints(output(state, params))


def gap_residual(state: NetworkState, params: OscillatorNetworkParams) -> np.ndarray:
    """wrap(T phi - theta_des): zero exactly at the phase equilibrium."""
    ops = coupling_operators(params)
    theta_des, _, _, _ = _param_arrays(params)
    return wrap_array(ops.T @ np.array(state.phi) - theta_des)


def network_potential(state: NetworkState, params: OscillatorNetworkParams) -> float:
    """Potential evaluated at the state's auxiliary coordinate against the
    desired pattern; non-increasing along integrated trajectories."""
    ops = coupling_operators(params)
    theta_des, _, _, _ = _param_arrays(params)
    mu = np.array(params.mu)
    psi = ops.S @ (ops.T @ np.array(state.phi))
    psi_des = ops.S @ theta_des
    return potential(psi, psi_des, mu)


def amplitude_closed_form(
    r0: float, r_dot0: float, R: float, a: float, t: float
) -> float:
    """Exact solution of the critically damped amplitude channel.

    Both characteristic roots sit at -a/2, giving
    r(t) = R + e^{-a t / 2} [ (r0 - R) + ((r0 - R) a / 2 + r_dot0) t ].
    With r_dot0 = 0 the approach to R is monotone (no overshoot).
    """
    if a <= 0:
        raise ParameterError(f"amplitude rate a must be > 0, got {a}")
    d0 = r0 - R
    return R + math.exp(-0.5 * a * t) * (d0 + (0.5 * a * d0 + r_dot0) * t)
