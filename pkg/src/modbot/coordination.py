"""Inter-module phase coordination.

A robot is a set of m modules, each an oscillator network. A high-level
network of m phase variables (one per module, same gradient law as within
a module) converges to the desired inter-module offsets; each module's
first oscillator is pulled toward its high-level phase, so the whole
phase matrix settles into the gait's intra- and inter-module pattern.
"""

from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .angles import wrap_angle, wrap_array
from .errors import DimensionError, ParameterError
from .oscillators import (
    DEFAULT_A,
    DEFAULT_MU,
    NetworkState,
    OscillatorNetworkParams,
    PhasePull,
    initial_state,
    random_state,
    step,
)

DEFAULT_GAMMA = 2.0


@dataclass(frozen=True)
class SystemConfig:
    """A coordinated multi-module system.

    Attributes:
        modules: per-module network parameters; all modules must share the
            same oscillator count and natural frequency.
        Theta_des: desired high-level phase offsets between consecutive
            modules, length m-1, normalized into (-pi, pi].
        gamma: pull gain coupling each module to its high-level phase
            (0 decouples the layers).
        mu_high: convergence gains of the high-level network, length m-1.
        injection: how the pull enters a module, "first" or "mean".
    """

    modules: tuple[OscillatorNetworkParams, ...]
    Theta_des: tuple[float, ...]
    gamma: float = DEFAULT_GAMMA
    mu_high: tuple[float, ...] | None = None
    injection: str = "first"

    def __post_init__(self):
        m = len(self.modules)
        if m < 1:
            raise DimensionError("a system needs at least one module")
        object.__setattr__(self, "modules", tuple(self.modules))
        object.__setattr__(
            self, "Theta_des", tuple(wrap_angle(float(x)) for x in self.Theta_des)
        )
        if self.mu_high is None:
            object.__setattr__(self, "mu_high", (DEFAULT_MU,) * (m - 1))
        else:
            object.__setattr__(
                self, "mu_high", tuple(float(x) for x in self.mu_high)
            )
        if len(self.Theta_des) != m - 1:
            raise DimensionError(
                f"Theta_des must have length {m - 1} for {m} modules, "
                f"got {len(self.Theta_des)}"
            )
        if len(self.mu_high) != m - 1:
            raise DimensionError(
                f"mu_high must have length {m - 1} for {m} modules, "
                f"got {len(self.mu_high)}"
            )
        if any(x <= 0 for x in self.mu_high):
            raise ParameterError("all mu_high entries must be > 0")
        if self.gamma < 0:
            raise ParameterError(f"gamma must be >= 0, got {self.gamma}")
        if self.injection not in ("first", "mean"):
            raise ParameterError(f"unknown injection mode {self.injection!r}")
        n0 = self.modules[0].n
        omega0 = self.modules[0].omega
        for j, mod in enumerate(self.modules[1:], start=2):
            if mod.n != n0:
                raise DimensionError(
                    f"module {j} has n={mod.n}, expected {n0} (modules must match)"
                )
            if mod.omega != omega0:
                raise ParameterError(
                    f"module {j} has omega={mod.omega}, expected {omega0} "
                    "(modules must share one frequency)"
                )

    @property
    def m(self) -> int:
        return len(self.modules)

    @property
    def n(self) -> int:
        return self.modules[0].n

    @property
    def omega(self) -> float:
        return self.modules[0].omega


@dataclass(frozen=True)
class SystemState:
    """High-level network state plus one state per module."""

    high: NetworkState
    modules: tuple[NetworkState, ...]
    t: float = 0.0

    def __post_init__(self):
        object.__setattr__(self, "modules", tuple(self.modules))
        if len(self.high.phi) != len(self.modules):
            raise DimensionError(
                f"high-level state has {len(self.high.phi)} phases for "
                f"{len(self.modules)} modules"
            )


@dataclass(frozen=True, eq=False)
class PhaseMatrix:
    """Snapshot P of all phases: P[j, k] is oscillator k+1 of module j+1."""

    values: np.ndarray
    t: float = 0.0

    def __post_init__(self):
        values = np.asarray(self.values, dtype=float)
        if values.ndim != 2:
            raise DimensionError("phase matrix must be 2-D (modules x oscillators)")
        object.__setattr__(self, "values", values)


@lru_cache(maxsize=64)
def _high_level_params(
    m: int, omega: float, mu_high: tuple[float, ...], Theta_des: tuple[float, ...]
) -> OscillatorNetworkParams:
    # The high-level network is an ordinary oscillator network with a
    # dormant amplitude channel (R = 0 from r = 0 stays exactly 0).
    return OscillatorNetworkParams(
        n=m,
        omega=omega,
        mu=mu_high,
        a=(DEFAULT_A,) * m,
        R=(0.0,) * m,
        C=(0.0,) * m,
        theta_des=Theta_des,
    )


def high_level_params(config: SystemConfig) -> OscillatorNetworkParams:
    """Network parameters driving the m high-level phases (m >= 2)."""
    if config.m < 2:
        raise DimensionError("high-level network needs at least 2 modules")
    return _high_level_params(config.m, config.omega, config.mu_high, config.Theta_des)


def initial_system_state(config: SystemConfig) -> SystemState:
    """All phases and amplitudes at zero."""
    zeros_m = (0.0,) * config.m
    high = NetworkState(phi=zeros_m, r=zeros_m, r_dot=zeros_m, t=0.0)
    return SystemState(
        high=high,
        modules=tuple(initial_state(p) for p in config.modules),
        t=0.0,
    )


def random_system_state(config: SystemConfig, rng: np.random.Generator) -> SystemState:
    """Random phases everywhere, zero amplitude channels."""
    phi_high = rng.uniform(-np.pi, np.pi, size=config.m)
    zeros_m = (0.0,) * config.m
    high = NetworkState(phi=tuple(phi_high), r=zeros_m, r_dot=zeros_m, t=0.0)
    return SystemState(
        high=high,
        modules=tuple(random_state(p, rng) for p in config.modules),
        t=0.0,
    )


def step_high_level(high: NetworkState, config: SystemConfig, dt: float) -> NetworkState:
    """Advance the high-level phases one step; for a single module the
    phase simply advances at the shared frequency."""
    if config.m == 1:
        return NetworkState(
            phi=(high.phi[0] + config.omega * dt,),
            r=high.r,
            r_dot=high.r_dot,
            t=high.t + dt,
        )
    return step(high, high_level_params(config), dt)


def step_system(state: SystemState, config: SystemConfig, dt: float) -> SystemState:
    """Advance the whole system one step of size dt.

    Both layers advance from the same instant: each module is pulled
    toward its high-level phase as sampled at the start of the step. With
    a single module there are no inter-module offsets to enforce, so the
    pull is skipped and the module runs free.
    """
    if len(state.modules) != config.m:
        raise DimensionError(
            f"state has {len(state.modules)} modules, config has {config.m}"
        )
    high_new = step_high_level(state.high, config, dt)
    couple = config.gamma > 0 and config.m > 1
    new_modules = []
    for j, (mod_state, mod_params) in enumerate(zip(state.modules, config.modules)):
        pull = None
        if couple:
            pull = PhasePull(config.gamma, state.high.phi[j], config.injection)
        new_modules.append(step(mod_state, mod_params, dt, phase_pull=pull))
    return SystemState(high=high_new, modules=tuple(new_modules), t=state.t + dt)


def assemble_phase_matrix(state: SystemState) -> PhaseMatrix:
    """Stack module phases into the m x n phase matrix."""
    return PhaseMatrix(
        values=np.array([s.phi for s in state.modules], dtype=float), t=state.t
    )


@dataclass(frozen=True, eq=False)
class ResidualReport:
    """Wrapped deviations of a phase matrix from the gait pattern.

    intra[j, k] = wrap(P[j,k] - P[j,k+1] - theta_des[j][k]), shape
    (m, n-1). inter[j, k] = wrap(P[j,k] - P[j+1,k] - Theta_des[j]); when
    every module shares one theta_des this spans all n columns, otherwise
    a column-wise delay is unsatisfiable and only column 1 is reported
    (partial=True).
    """

    intra: np.ndarray
    inter: np.ndarray
    partial: bool = False

    def __iter__(self):
        return iter((self.intra, self.inter))

    @property
    def max_intra(self) -> float:
        return float(np.max(np.abs(self.intra))) if self.intra.size else 0.0

    @property
    def max_inter(self) -> float:
        return float(np.max(np.abs(self.inter))) if self.inter.size else 0.0


def constraint_residuals(matrix: PhaseMatrix, config: SystemConfig) -> ResidualReport:
    """Evaluate the intra- and inter-module phase constraints on P."""
    P = matrix.values
    m, n = P.shape
    if m != config.m or n != config.n:
        raise DimensionError(
            f"phase matrix is {m}x{n}, config expects {config.m}x{config.n}"
        )
    theta_des = np.array([p.theta_des for p in config.modules])
    intra = wrap_array(P[:, :-1] - P[:, 1:] - theta_des)
    uniform = all(p.theta_des == config.modules[0].theta_des for p in config.modules)
    cols = P if uniform else P[:, :1]
    Theta = np.array(config.Theta_des)
    inter = wrap_array(cols[:-1, :] - cols[1:, :] - Theta[:, None])
    return ResidualReport(intra=intra, inter=inter, partial=not uniform)


def residual_maxima(matrix: PhaseMatrix, config: SystemConfig) -> tuple[float, float]:
    """Largest absolute intra- and inter-module residuals (0.0 when the
    corresponding residual set is empty)."""
    report = constraint_residuals(matrix, config)
    return report.max_intra, report.max_inter
