"""Live-control service: one swarm per client session, steered over a stream.

Transport is a duplex stream of newline-delimited JSON messages (see
docs/protocol.md for the exact schema). Commands flow in; command
acknowledgements and sampled snapshots flow out. The engine advances the
swarm on its own thread and publishes the latest snapshot into a single
cell; a per-session sampler task ships that cell to the client every
sample interval. Multiple iterations may elapse between samples, which is
what keeps the engine from ever blocking on a slow client, and gives the
stream its smoothed look.

Parameter changes land in a mailbox the engine drains between iterations,
so every iteration executes under exactly one parameter set.
"""
from __future__ import annotations

import asyncio
import json
import math
import queue
import threading
from typing import Optional

from .adaptive import AdaptiveConfig, initial_metric_trace, step_adaptive
from .analysis import DEFAULT_BIN_SIZE, DEFAULT_RANGE, msd_to_centroid
from .core import (
    PsoParams,
    SwarmConfig,
    Variant,
    init_swarm,
    make_rng,
    omega_at,
    step_standard,
)
from .eigencritical import step_eigencritical
from .errors import ConfigurationError, EvaluationError, ProtocolError
from .objectives import get_objective
from .runner import IterationRecord, RunTrace, dump_csv

DEFAULT_SAMPLE_INTERVAL = 0.002  # seconds

PARAM_NAMES = ("alpha1", "alpha2", "omega")


def _params_from_payload(payload: dict) -> PsoParams:
    allowed = {
        "alpha1", "alpha2", "omega", "omega_top", "omega_bottom", "inertia_schedule",
    }
    unknown = set(payload) - allowed
    if unknown:
        raise ProtocolError(f"unknown params fields: {sorted(unknown)}")
    return PsoParams(**payload).validate_ui_bounds()


def _config_from_payload(payload: dict) -> SwarmConfig:
    allowed = {
        "n_particles", "dims", "iterations", "boundary_radius", "objective",
        "variant", "seed", "velocity_clamp",
    }
    unknown = set(payload) - allowed
    if unknown:
        raise ProtocolError(f"unknown config fields: {sorted(unknown)}")
    return SwarmConfig(**payload)


class EngineSession:
    """Lifecycle and engine state for one connected client.

    States: idle -> (configure) -> ready -> (start) -> running
    <-> paused via pause/resume; finished when the iteration budget is
    spent; reset returns to ready with a freshly seeded swarm.
    """

    def __init__(self):
        self.state = "idle"
        self.config: Optional[SwarmConfig] = None
        self.params: Optional[PsoParams] = None
        self.adaptive_cfg: Optional[AdaptiveConfig] = None
        self.hist_bin_size = DEFAULT_BIN_SIZE
        self.hist_range = DEFAULT_RANGE
        self.hist_log_scale = False
        self._swarm = None
        self._rng = None
        self._metric_trace = None
        self._records: list = []
        self._increments: list = []
        self._hist_counts: Optional[list] = None
        self._prev_msd: Optional[float] = None
        self._mailbox: queue.Queue = queue.Queue()
        self._thread: Optional[threading.Thread] = None
        self._run_event = threading.Event()
        self._stop_event = threading.Event()
        self._records_lock = threading.Lock()
        self.snapshot: Optional[dict] = None

    # ------------------------------------------------------------------
    # command handlers (called from the transport side)
    # ------------------------------------------------------------------

    def configure(self, payload: dict) -> None:
        if self.state in ("running", "paused"):
            raise ProtocolError(f"cannot configure while {self.state}")
        config = _config_from_payload(payload.get("config") or {})
        params = _params_from_payload(payload.get("params") or {})
        adaptive_payload = payload.get("adaptive")
        adaptive_cfg = None
        if config.variant == Variant.ADAPTIVE:
            adaptive_cfg = AdaptiveConfig(**(adaptive_payload or {}))
        elif adaptive_payload:
            raise ProtocolError("adaptive settings only apply to the adaptive variant")
        self.config, self.params, self.adaptive_cfg = config, params, adaptive_cfg
        self._initialize_swarm()
        self.state = "ready"

    def start(self) -> None:
        if self.state != "ready":
            raise ProtocolError(f"start requires a configured idle swarm, state is {self.state}")
        self._stop_event.clear()
        self._run_event.set()
        self._thread = threading.Thread(target=self._engine_loop, daemon=True)
        self.state = "running"
        self._publish_snapshot()
        self._thread.start()

    def pause(self) -> None:
        if self.state != "running":
            raise ProtocolError(f"pause requires a running swarm, state is {self.state}")
        self._run_event.clear()
        self.state = "paused"
        self._publish_snapshot()

    def resume(self) -> None:
        if self.state != "paused":
            raise ProtocolError(f"resume requires a paused swarm, state is {self.state}")
        self.state = "running"
        self._publish_snapshot()
        self._run_event.set()

    def reset(self) -> None:
        if self.config is None:
            raise ProtocolError("reset requires a configured session")
        self._shutdown_engine()
        self._initialize_swarm()
        self.state = "ready"

    def set_param(self, name: str, value) -> None:
        if self.state not in ("ready", "running", "paused"):
            raise ProtocolError(f"set_param requires a configured session, state is {self.state}")
        if self.config.variant == Variant.ADAPTIVE:
            raise ProtocolError(
                "parameters are locked while the adaptive variant runs"
            )
        if name not in PARAM_NAMES:
            raise ProtocolError(f"unknown parameter {name!r}")
        value = float(value)
        probe = {"alpha1": self.params.alpha1, "alpha2": self.params.alpha2,
                 "omega": self.params.omega}
        probe[name] = value
        _params_from_payload(probe)  # bounds check before accepting
        self._mailbox.put(("set_param", name, value))
        if self.state != "running":
            self._drain_mailbox()
            self._publish_snapshot()

    def set_histogram(self, bin_size: float, log_scale: bool) -> None:
        if not bin_size > 0:
            raise ProtocolError(f"bin_size must be > 0, got {bin_size}")
        self._mailbox.put(("set_histogram", float(bin_size), bool(log_scale)))
        if self.state != "running":
            self._drain_mailbox()
            self._publish_snapshot()

    def dump_stats(self, path: str) -> int:
        if self.config is None:
            raise ProtocolError("dump_stats requires a configured session")
        with self._records_lock:
            records = list(self._records)
        trace = RunTrace(
            config=self.config, params_initial=self.params,
            records=records, seed=self.config.seed,
        )
        dump_csv(trace, path)
        return len(records)

    def close(self) -> None:
        self._shutdown_engine()

    # ------------------------------------------------------------------
    # engine internals
    # ------------------------------------------------------------------

    def _initialize_swarm(self) -> None:
        self._rng = make_rng(self.config)
        self._swarm = init_swarm(self.config, self.params, self._rng)
        self._metric_trace = (
            initial_metric_trace(self._swarm, self.config, self.adaptive_cfg)
            if self.config.variant == Variant.ADAPTIVE
            else None
        )
        with self._records_lock:
            self._records = []
        self._increments = []
        self._prev_msd = msd_to_centroid(self._swarm)
        self._rebuild_histogram()
        self._publish_snapshot()

    def _shutdown_engine(self) -> None:
        if self._thread is not None and self._thread.is_alive():
            self._stop_event.set()
            self._run_event.set()  # unblock a paused engine so it can exit
            self._thread.join(timeout=5.0)
        self._thread = None
        self._run_event.clear()
        self._stop_event.clear()
        while not self._mailbox.empty():
            self._mailbox.get_nowait()

    def _drain_mailbox(self) -> None:
        while True:
            try:
                kind, *args = self._mailbox.get_nowait()
            except queue.Empty:
                return
            if kind == "set_param":
                name, value = args
                self.params = self.params.with_values(
                    **{
                        "alpha1": self.params.alpha1,
                        "alpha2": self.params.alpha2,
                        "omega": self.params.omega,
                        name: value,
                    }
                )
            elif kind == "set_histogram":
                self.hist_bin_size, self.hist_log_scale = args
                self._rebuild_histogram()

    def _rebuild_histogram(self) -> None:
        lo, hi = self.hist_range
        n_bins = math.ceil((hi - lo) / self.hist_bin_size)
        counts = [0] * n_bins
        for inc in self._increments:
            if lo <= inc < hi:
                idx = min(int((inc - lo) / self.hist_bin_size), n_bins - 1)
                counts[idx] += 1
        self._hist_counts = counts

    def _record_iteration(self, effective_omega: float) -> None:
        msd = msd_to_centroid(self._swarm)
        record = IterationRecord(
            iteration=self._swarm.iteration,
            best_fitness=self._swarm.global_best_fitness,
            msd=msd,
            alpha1=self.params.alpha1,
            alpha2=self.params.alpha2,
            omega=effective_omega,
        )
        with self._records_lock:
            self._records.append(record)
        if self._prev_msd is not None:
            inc = msd - self._prev_msd
            if inc > 0 and math.isfinite(inc):
                self._increments.append(inc)
                lo, hi = self.hist_range
                if lo <= inc < hi:
                    idx = min(
                        int((inc - lo) / self.hist_bin_size),
                        len(self._hist_counts) - 1,
                    )
                    self._hist_counts[idx] += 1
        self._prev_msd = msd

    def _publish_snapshot(self) -> None:
        if self._swarm is None:
            return
        histogram = None
        if self._hist_counts is not None:
            histogram = {
                "bin_size": self.hist_bin_size,
                "range_min": self.hist_range[0],
                "range_max": self.hist_range[1],
                "log_scale": self.hist_log_scale,
                "counts": list(self._hist_counts),
            }
        msd = self._prev_msd
        if msd is not None and not math.isfinite(msd):
            msd = None  # JSON has no Infinity; clients treat null as "no sample"
        self.snapshot = {
            "type": "snapshot",
            "iteration": self._swarm.iteration,
            "best_fitness": self._swarm.global_best_fitness,
            "msd": msd,
            "params": {
                "alpha1": self.params.alpha1,
                "alpha2": self.params.alpha2,
                "omega": self.params.omega,
            },
            "running": self.state == "running",
            "state": self.state,
            "histogram": histogram,
        }

    def _engine_loop(self) -> None:
        objective = get_objective(self.config.objective)
        while not self._stop_event.is_set():
            if not self._run_event.wait(timeout=0.05):
                continue
            if self._stop_event.is_set():
                return
            self._drain_mailbox()
            if self._swarm.iteration >= self.config.iterations:
                self.state = "finished"
                self._run_event.clear()
                self._publish_snapshot()
                return
            params = self.params
            effective_omega = omega_at(self._swarm.iteration, self.config, params)
            try:
                if self.config.variant == Variant.STANDARD:
                    self._swarm = step_standard(
                        self._swarm, params, self.config, objective, self._rng
                    )
                elif self.config.variant == Variant.EIGENCRITICAL:
                    self._swarm = step_eigencritical(
                        self._swarm, params, self.config, objective, self._rng
                    )
                else:
                    self._swarm, self.params, self._metric_trace = step_adaptive(
                        self._swarm, params, self.config, self.adaptive_cfg,
                        objective, self._rng, self._metric_trace,
                    )
            except EvaluationError as exc:
                self.state = "finished"
                self._run_event.clear()
                self._swarm.warnings.append(f"run aborted: {exc}")
                self._publish_snapshot()
                continue
            self._record_iteration(effective_omega)
            self._publish_snapshot()


async def handle_session(reader: asyncio.StreamReader, writer: asyncio.StreamWriter,
                         sample_interval: float = DEFAULT_SAMPLE_INTERVAL) -> None:
    """One client: command reader plus snapshot sampler over a byte stream."""
    session = EngineSession()

    async def sample_loop():
        # the stream keeps flowing while paused or finished: a frozen
        # iteration with running=false is part of the contract
        while True:
            await asyncio.sleep(sample_interval)
            snap = session.snapshot
            if snap is None:
                continue
            writer.write(json.dumps(snap).encode() + b"\n")
            try:
                await writer.drain()
            except ConnectionError:
                return

    sampler = asyncio.create_task(sample_loop())
    try:
        while True:
            line = await reader.readline()
            if not line:
                break
            reply = process_command(session, line)
            writer.write(json.dumps(reply).encode() + b"\n")
            try:
                await writer.drain()
            except ConnectionError:
                break
    finally:
        sampler.cancel()
        session.close()
        writer.close()


def process_command(session: EngineSession, raw: bytes | str) -> dict:
    """Decode and apply one command line; always returns a reply message."""
    try:
        msg = json.loads(raw)
        if not isinstance(msg, dict) or "type" not in msg:
            raise ProtocolError("command must be an object with a 'type' field")
        cmd = msg["type"]
        if cmd == "configure":
            session.configure(msg)
        elif cmd == "start":
            session.start()
        elif cmd == "pause":
            session.pause()
        elif cmd == "resume":
            session.resume()
        elif cmd == "reset":
            session.reset()
        elif cmd == "set_param":
            session.set_param(msg.get("name"), msg.get("value"))
        elif cmd == "set_histogram":
            session.set_histogram(
                msg.get("bin_size", session.hist_bin_size),
                msg.get("log_scale", session.hist_log_scale),
            )
        elif cmd == "dump_stats":
            n = session.dump_stats(msg["path"])
            return {"type": "ok", "cmd": cmd, "state": session.state, "records": n}
        else:
            raise ProtocolError(f"unknown command type {cmd!r}")
        return {"type": "ok", "cmd": cmd, "state": session.state}
    except (ProtocolError, ConfigurationError, TypeError, ValueError, KeyError) as exc:
        cmd = None
        try:
            cmd = json.loads(raw).get("type")
        except Exception:
            pass
        return {
            "type": "error",
            "cmd": cmd,
            "message": str(exc) or exc.__class__.__name__,
            "state": session.state,
        }


async def serve_forever(host: str, port: int,
                        sample_interval: float = DEFAULT_SAMPLE_INTERVAL) -> None:
    server = await asyncio.start_server(
        lambda r, w: handle_session(r, w, sample_interval), host, port
    )
    addrs = ", ".join(str(sock.getsockname()) for sock in server.sockets)
    print(f"listening on {addrs} (newline-delimited JSON)", flush=True)
    async with server:
        await server.serve_forever()


async def serve_websocket(host: str, port: int,
                          sample_interval: float = DEFAULT_SAMPLE_INTERVAL) -> None:
    """Same protocol over WebSocket text frames, one JSON message per frame."""
    import websockets

    async def handler(ws):
        session = EngineSession()

        async def sample_loop():
            while True:
                await asyncio.sleep(sample_interval)
                snap = session.snapshot
                if snap is None:
                    continue
                await ws.send(json.dumps(snap))

        sampler = asyncio.create_task(sample_loop())
        try:
            async for raw in ws:
                await ws.send(json.dumps(process_command(session, raw)))
        finally:
            sampler.cancel()
            session.close()

    server = await websockets.serve(handler, host, port)
    print(f"listening on ws://{host}:{port}", flush=True)
    await asyncio.Future()


def serve(bind_address: str, sample_interval: float = DEFAULT_SAMPLE_INTERVAL,
          websocket: bool = False) -> None:
    """Blocking entry point; bind_address is host:port."""
    host, _, port_text = bind_address.rpartition(":")
    if not host or not port_text.isdigit():
        raise ConfigurationError(f"bind address must be host:port, got {bind_address!r}")
    runner = serve_websocket if websocket else serve_forever
    asyncio.run(runner(host, int(port_text), sample_interval))
