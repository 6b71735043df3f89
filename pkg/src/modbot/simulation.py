"""Simulation runners and artifact generation.

Two modes share one integration core. Direct mode integrates the
coordinated oscillator system and writes per-module CSV traces plus a
summary. Networked mode additionally streams the same trajectories
through the simulated master/channel/slave pipeline and reports tracking
fidelity against the dense offline reference and channel statistics.

All artifacts are deterministic: CSV floats use 9 significant digits,
the summary is computed from the very values written to CSV (so
recomputing metrics from a trace file reproduces the summary exactly),
and JSON is pretty-printed with sorted keys.
"""

import json
import math
from dataclasses import dataclass

import numpy as np

from .angles import wrap_array
from .coordination import (
    DEFAULT_GAMMA,
    PhaseMatrix,
    SystemConfig,
    constraint_residuals,
    initial_system_state,
    step_system,
)
from .errors import ParameterError
from .gaits import GaitPreset, system_config
from .network import (
    MASTER_PERIOD_MS,
    SAMPLE_PERIOD_MS,
    Channel,
    ChannelConfig,
    EventKind,
    Master,
    MessageLog,
    Scheduler,
)
from .oscillators import coupling_operators, output_clamped
from .runtime import SLAVE_TICK_MS, Slave, format_csv_float, render_trace_csv
from .wire import decode_status, encode, encode_status, status_topic, traj_topic

CONVERGENCE_THRESHOLD_RAD = 1e-3


@dataclass(frozen=True)
class RunConfig:
    """Everything a simulation run depends on (besides the catalog)."""

    preset: GaitPreset
    duration_s: float = 10.0
    dt_s: float = 0.002
    seed: int = 0
    mode: str = "direct"
    loss: float = 0.0
    latency_ms: float = 0.0
    jitter_ms: float = 0.0
    gamma: float = DEFAULT_GAMMA
    injection: str = "first"

    def __post_init__(self):
        if self.mode not in ("direct", "networked"):
            raise ParameterError(f"mode must be 'direct' or 'networked', got {self.mode!r}")
        if not self.duration_s > 0:
            raise ParameterError(f"duration must be > 0 s, got {self.duration_s}")
        if not self.dt_s > 0:
            raise ParameterError(f"dt must be > 0 s, got {self.dt_s}")
        if self.mode == "networked":
            duration_ms = round(self.duration_s * 1000)
            if (
                abs(duration_ms - self.duration_s * 1000) > 1e-6
                or duration_ms % MASTER_PERIOD_MS != 0
            ):
                raise ParameterError(
                    "networked duration must be a whole multiple of the "
                    f"{MASTER_PERIOD_MS} ms master period, got {self.duration_s} s"
                )

    @property
    def duration_ms(self) -> int:
        return int(round(self.duration_s * 1000))

    def channel_config(self) -> ChannelConfig:
        return ChannelConfig(
            loss_probability=self.loss,
            latency_ms=self.latency_ms,
            jitter_ms=self.jitter_ms,
            seed=self.seed,
        )

    def system(self) -> SystemConfig:
        return system_config(self.preset, gamma=self.gamma, injection=self.injection)


@dataclass(frozen=True, eq=False)
class RunResult:
    """Summary metrics plus named text artifacts ready to write to disk."""

    summary: dict
    artifacts: dict[str, str]


@dataclass(frozen=True, eq=False)
class DirectTrace:
    """Raw integration history: per-step joint output (clamped), phases,
    amplitudes, and clamp bookkeeping."""

    dt_s: float
    q: np.ndarray  # (steps+1, m, n)
    phi: np.ndarray
    r: np.ndarray
    clamp_total: int
    clamp_after_transient: int
    transient_s: float

    @property
    def steps(self) -> int:
        return self.q.shape[0] - 1


def _integrate_direct(sys_cfg: SystemConfig, duration_s: float, dt_s: float) -> DirectTrace:
    steps = int(round(duration_s / dt_s))
    if steps < 1:
        raise ParameterError(
            f"duration {duration_s} s is shorter than one step of {dt_s} s"
        )
    m, n = sys_cfg.m, sys_cfg.n
    q_hist = np.empty((steps + 1, m, n))
    phi_hist = np.empty((steps + 1, m, n))
    r_hist = np.empty((steps + 1, m, n))
    transient_s = 3.0 / min(min(p.a) for p in sys_cfg.modules)
    clamp_total = 0
    clamp_after = 0
    state = initial_system_state(sys_cfg)
    for k in range(steps + 1):
        for j, (mod_state, mod_params) in enumerate(
            zip(state.modules, sys_cfg.modules)
        ):
            q, flags = output_clamped(mod_state, mod_params)
            q_hist[k, j] = q
            phi_hist[k, j] = mod_state.phi
            r_hist[k, j] = mod_state.r
            hits = int(flags.sum())
            clamp_total += hits
            if hits and k * dt_s > transient_s:
                clamp_after += hits
        if k < steps:
            state = step_system(state, sys_cfg, dt_s)
    return DirectTrace(
        dt_s=dt_s,
        q=q_hist,
        phi=phi_hist,
        r=r_hist,
        clamp_total=clamp_total,
        clamp_after_transient=clamp_after,
        transient_s=transient_s,
    )


def _module_csv(trace: DirectTrace, j: int) -> str:
    n = trace.q.shape[2]
    header = (
        "t,"
        + ",".join(f"q{i + 1}" for i in range(n))
        + ","
        + ",".join(f"phi{i + 1}" for i in range(n))
        + ","
        + ",".join(f"r{i + 1}" for i in range(n))
    )
    lines = [header]
    for k in range(trace.q.shape[0]):
        row = [format_csv_float(k * trace.dt_s)]
        row += [format_csv_float(x) for x in trace.q[k, j]]
        row += [format_csv_float(x) for x in trace.phi[k, j]]
        row += [format_csv_float(x) for x in trace.r[k, j]]
        lines.append(",".join(row))
    return "\n".join(lines) + "\n"


def _csv_values(trace: DirectTrace) -> np.ndarray:
    """Phases exactly as a reader of the CSV would see them."""
    rounded = np.empty_like(trace.phi)
    flat_in = trace.phi.reshape(-1)
    flat_out = rounded.reshape(-1)
    for i, x in enumerate(flat_in):
        flat_out[i] = float(format_csv_float(x))
    return rounded


def _direct_summary(config: RunConfig, sys_cfg: SystemConfig, trace: DirectTrace) -> dict:
    phi_csv = _csv_values(trace)
    final = PhaseMatrix(values=phi_csv[-1], t=trace.steps * trace.dt_s)
    report = constraint_residuals(final, sys_cfg)

    theta_des = np.array([p.theta_des for p in sys_cfg.modules])  # (m, n-1)
    gaps = phi_csv[:, :, :-1] - phi_csv[:, :, 1:] - theta_des[None, :, :]
    residual_by_step = np.max(np.abs(wrap_array(gaps)), axis=2)  # (steps+1, m)

    convergence = []
    for j in range(sys_cfg.m):
        hit = np.nonzero(residual_by_step[:, j] < CONVERGENCE_THRESHOLD_RAD)[0]
        convergence.append(float(hit[0] * trace.dt_s) if hit.size else None)

    terminal_potential = []
    for j, params in enumerate(sys_cfg.modules):
        ops = coupling_operators(params)
        psi = ops.S @ (ops.T @ phi_csv[-1, j])
        psi_des = ops.S @ np.array(params.theta_des)
        d = psi - psi_des
        terminal_potential.append(float(np.dot(np.array(params.mu), d * d)))

    return {
        "clamp_events_after_transient": trace.clamp_after_transient,
        "clamp_events_total": trace.clamp_total,
        "convergence_threshold_rad": CONVERGENCE_THRESHOLD_RAD,
        "convergence_time_per_module_s": convergence,
        "convergence_time_s": (
            None if any(c is None for c in convergence) else max(convergence)
        ),
        "dt_s": config.dt_s,
        "duration_s": config.duration_s,
        "gamma": config.gamma,
        "injection": config.injection,
        "joint_count": sys_cfg.n,
        "mode": config.mode,
        "module_count": sys_cfg.m,
        "preset": config.preset.name,
        "residual_inter_max_rad": report.max_inter,
        "residual_inter_partial": report.partial,
        "residual_intra_max_rad": report.max_intra,
        "seed": config.seed,
        "terminal_potential_per_module": terminal_potential,
        "transient_s": trace.transient_s,
    }


def render_summary_json(summary: dict) -> str:
    return json.dumps(summary, indent=2, sort_keys=True) + "\n"


def run_direct(config: RunConfig) -> RunResult:
    """Integrate the preset and produce per-module CSV traces + summary."""
    sys_cfg = config.system()
    trace = _integrate_direct(sys_cfg, config.duration_s, config.dt_s)
    summary = _direct_summary(config, sys_cfg, trace)
    artifacts = {
        f"module_{j}.csv": _module_csv(trace, j) for j in range(sys_cfg.m)
    }
    artifacts["summary.json"] = render_summary_json(summary)
    return RunResult(summary=summary, artifacts=artifacts)


class NetworkedSimulation:
    """Event-driven master/channel/slave run over the virtual clock.

    The master re-integrates the exact trajectory of the direct mode (same
    initial state, same step sequence), so the direct trace doubles as the
    dense reference for fidelity metrics: a slave's interpolated pose at
    clock t is compared against the reference at t minus the one-horizon
    pipeline delay. The channel's loss probability may be changed between
    run_until() calls to model outages.
    """

    def __init__(self, config: RunConfig, poll_fidelity: bool = True, bridge=None):
        if config.mode != "networked":
            raise ParameterError("NetworkedSimulation requires mode='networked'")
        self.config = config
        self.sys_cfg = config.system()
        self.duration_ms = config.duration_ms
        self.scheduler = Scheduler()
        self.log = MessageLog()
        tap = bridge.publish if bridge is not None else None
        self.channel = Channel(config.channel_config(), self.scheduler, self.log, tap=tap)
        self.master = Master(self.sys_cfg, config.dt_s)
        self.slaves = [Slave(j) for j in range(self.sys_cfg.m)]
        self.last_status = {}
        self.reference = _integrate_direct(self.sys_cfg, config.duration_s, config.dt_s)

        # Fidelity polls run on the integration grid when it lines up with
        # whole milliseconds, otherwise on the 10 ms tick grid; either way
        # each poll instant maps onto an exact dense-reference row.
        dt_ms = config.dt_s * 1000.0
        if abs(dt_ms - round(dt_ms)) < 1e-9 and SLAVE_TICK_MS % round(dt_ms) == 0:
            self._poll_ms = int(round(dt_ms))
        else:
            self._poll_ms = SLAVE_TICK_MS
        self._rows_per_poll = round(self._poll_ms / 1000.0 / config.dt_s)
        self.max_tracking_error = 0.0

        for t in range(0, self.duration_ms, MASTER_PERIOD_MS):
            self.scheduler.schedule(t, EventKind.MASTER_TICK, self._on_master_tick)
        for j in range(self.sys_cfg.m):
            for t in range(0, self.duration_ms + 1, SLAVE_TICK_MS):
                self.scheduler.schedule(
                    t, EventKind.SLAVE_TICK, self._slave_ticker(j), module_id=j
                )
        if poll_fidelity:
            for t in range(
                MASTER_PERIOD_MS, self.duration_ms + 1, self._poll_ms
            ):
                self.scheduler.schedule(t, EventKind.ANALYSIS, self._on_poll)

    def _on_master_tick(self, t_ms: int):
        for msg in self.master.master_tick(t_ms):
            slave = self.slaves[msg.module_id]
            self.channel.send(
                traj_topic(msg.module_id),
                encode(msg),
                slave.on_message,
                module_id=msg.module_id,
                seq=msg.seq,
            )

    def _slave_ticker(self, j: int):
        slave = self.slaves[j]

        def _tick(t_ms: int):
            status = slave.tick(t_ms)
            self.channel.send(
                status_topic(j),
                encode_status(status),
                self._on_status,
                module_id=j,
            )

        return _tick

    def _on_status(self, payload: bytes, _time_ms: int):
        status = decode_status(payload)
        self.last_status[status.module_id] = status

    def _on_poll(self, t_ms: int):
        # A slave at clock t plays the trajectory computed for sim time
        # t - 50 ms; map that onto the dense reference row.
        idx = ((t_ms - MASTER_PERIOD_MS) // self._poll_ms) * self._rows_per_poll
        for j, slave in enumerate(self.slaves):
            q, _, _ = slave.buffer.sample(t_ms, slave.last_applied)
            err = float(np.max(np.abs(np.array(q) - self.reference.q[idx, j])))
            if err > self.max_tracking_error:
                self.max_tracking_error = err

    def run_until(self, end_ms: int):
        self.scheduler.run_until(end_ms)

    def run(self):
        self.run_until(self.duration_ms)

    def interpolation_bound(self) -> float:
        """(dt_wire^2 / 8) * max |d2q/dt2|, second derivative estimated
        from the dense reference by central differences."""
        q = self.reference.q
        h = self.reference.dt_s
        qdd = (q[:-2] - 2.0 * q[1:-1] + q[2:]) / (h * h)
        max_qdd = float(np.max(np.abs(qdd))) if qdd.size else 0.0
        dt_wire = SAMPLE_PERIOD_MS / 1000.0
        return dt_wire * dt_wire / 8.0 * max_qdd

    def finish(self) -> RunResult:
        summary = _direct_summary(self.config, self.sys_cfg, self.reference)
        summary.update(
            {
                "applied_seq_gap_free": all(
                    all(b - a == 1 for a, b in zip(seqs, seqs[1:]))
                    for seqs in (s.applied_seq_sequence() for s in self.slaves)
                ),
                "holds_per_module": [s.holds for s in self.slaves],
                "interpolation_bound_rad": self.interpolation_bound(),
                "jitter_ms": self.config.jitter_ms,
                "latency_ms": self.config.latency_ms,
                "loss_probability": self.config.loss,
                "master_clamp_events": self.master.clamp_events,
                "max_tracking_error_rad": self.max_tracking_error,
                "messages_delivered": self.channel.delivered,
                "messages_dropped": self.channel.dropped,
                "messages_sent": self.channel.sent,
                "overflow_drops_per_module": [
                    s.buffer.overflow_drops for s in self.slaves
                ],
                "stale_discards_per_module": [
                    s.buffer.stale_discards for s in self.slaves
                ],
            }
        )
        artifacts = {
            f"module_{j}.csv": _module_csv(self.reference, j)
            for j in range(self.sys_cfg.m)
        }
        for j, slave in enumerate(self.slaves):
            artifacts[f"module_{j}_runtime.csv"] = render_trace_csv(slave.trace)
        artifacts["messages.log"] = self.log.render()
        artifacts["summary.json"] = render_summary_json(summary)
        return RunResult(summary=summary, artifacts=artifacts)


def run_networked(config: RunConfig, bridge=None) -> RunResult:
    owned = None
    if bridge is None:
        from .bridge import bridge_from_env

        bridge = owned = bridge_from_env()
    try:
        sim = NetworkedSimulation(config, bridge=bridge)
        sim.run()
        return sim.finish()
    finally:
        if owned is not None:
            owned.close()


def run(config: RunConfig) -> RunResult:
    """Run a simulation in the configured mode."""
    if config.mode == "direct":
        return run_direct(config)
    return run_networked(config)
