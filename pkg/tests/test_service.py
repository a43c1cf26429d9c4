import asyncio
import json

import pytest

from psolab.service import EngineSession, handle_session, process_command


def send(session, **msg):
    return process_command(session, json.dumps(msg))


def configure_msg(variant="standard", iterations=200, seed=5, **extra):
    msg = {
        "type": "configure",
        "config": {
            "n_particles": 6,
            "dims": 4,
            "iterations": iterations,
            "boundary_radius": 50.0,
            "objective": "sphere",
            "variant": variant,
            "seed": seed,
        },
        "params": {"alpha1": 1.494, "alpha2": 1.494, "omega": 0.729},
    }
    if variant == "adaptive":
        msg["adaptive"] = {"epsilon": 0.1, "metric": "vel_norm", "rule": "dependant"}
    msg.update(extra)
    return msg


class TestStateMachine:
    def test_start_before_configure_rejected(self):
        s = EngineSession()
        reply = send(s, type="start")
        assert reply["type"] == "error"
        assert "idle" in reply["state"]

    def test_configure_then_start(self):
        s = EngineSession()
        assert send(s, **configure_msg())["type"] == "ok"
        assert s.state == "ready"
        assert send(s, type="start")["type"] == "ok"
        assert s.state == "running"
        s.close()

    def test_configure_while_running_rejected(self):
        s = EngineSession()
        send(s, **configure_msg(iterations=10**9))
        send(s, type="start")
        reply = send(s, **configure_msg())
        assert reply["type"] == "error"
        s.close()

    def test_pause_resume_cycle(self):
        s = EngineSession()
        send(s, **configure_msg(iterations=10**9))
        send(s, type="start")
        assert send(s, type="pause")["state"] == "paused"
        assert send(s, type="resume")["state"] == "running"
        s.close()

    def test_pause_requires_running(self):
        s = EngineSession()
        send(s, **configure_msg())
        assert send(s, type="pause")["type"] == "error"
        s.close()

    def test_malformed_json_keeps_session_open(self):
        s = EngineSession()
        reply = process_command(s, b"{nonsense")
        assert reply["type"] == "error"
        assert send(s, **configure_msg())["type"] == "ok"
        s.close()

    def test_unknown_command_rejected(self):
        s = EngineSession()
        assert send(s, type="explode")["type"] == "error"

    def test_unknown_config_field_rejected(self):
        s = EngineSession()
        msg = configure_msg()
        msg["config"]["warp"] = 9
        assert send(s, **msg)["type"] == "error"


def run_until(predicate, session, timeout=5.0):
    import time

    deadline = time.time() + timeout
    while time.time() < deadline:
        if predicate(session):
            return True
        time.sleep(0.005)
    return False


class TestEngine:
    def test_runs_to_completion(self):
        s = EngineSession()
        send(s, **configure_msg(iterations=50))
        send(s, type="start")
        assert run_until(lambda s: s.state == "finished", s)
        assert s.snapshot["iteration"] == 50
        assert s.snapshot["running"] is False
        s.close()

    def test_pause_freezes_iteration(self):
        s = EngineSession()
        send(s, **configure_msg(iterations=10**9))
        send(s, type="start")
        assert run_until(lambda s: (s.snapshot or {}).get("iteration", 0) > 10, s)
        send(s, type="pause")
        import time

        time.sleep(0.05)
        frozen = s.snapshot["iteration"]
        time.sleep(0.1)
        assert s.snapshot["iteration"] == frozen
        assert s.snapshot["running"] is False
        s.close()

    def test_set_param_applied_between_iterations(self):
        s = EngineSession()
        send(s, **configure_msg(iterations=10**9))
        send(s, type="start")
        assert run_until(lambda s: (s.snapshot or {}).get("iteration", 0) > 5, s)
        assert send(s, type="set_param", name="omega", value=0.9)["type"] == "ok"
        assert run_until(lambda s: s.snapshot["params"]["omega"] == 0.9, s)
        s.close()

    def test_set_param_rejected_for_adaptive(self):
        s = EngineSession()
        send(s, **configure_msg(variant="adaptive", iterations=10**9))
        send(s, type="start")
        reply = send(s, type="set_param", name="omega", value=0.9)
        assert reply["type"] == "error"
        assert "locked" in reply["message"]
        s.close()

    def test_set_param_bounds_enforced(self):
        s = EngineSession()
        send(s, **configure_msg())
        assert send(s, type="set_param", name="omega", value=2.5)["type"] == "error"
        assert send(s, type="set_param", name="alpha1", value=4.5)["type"] == "error"
        assert send(s, type="set_param", name="alpha1", value=3.9)["type"] == "ok"
        s.close()

    def test_reset_reproduces_trace(self):
        s = EngineSession()
        send(s, **configure_msg(iterations=30, seed=77))
        send(s, type="start")
        assert run_until(lambda s: s.state == "finished", s)
        first = [(r.iteration, r.best_fitness) for r in s._records]
        assert send(s, type="reset")["state"] == "ready"
        send(s, type="start")
        assert run_until(lambda s: s.state == "finished", s)
        second = [(r.iteration, r.best_fitness) for r in s._records]
        assert first == second
        s.close()

    def test_dump_stats_mid_run(self, tmp_path):
        s = EngineSession()
        send(s, **configure_msg(iterations=10**9))
        send(s, type="start")
        assert run_until(lambda s: (s.snapshot or {}).get("iteration", 0) > 20, s)
        path = tmp_path / "mid.csv"
        reply = send(s, type="dump_stats", path=str(path))
        assert reply["type"] == "ok"
        assert reply["records"] > 0
        lines = path.read_text().splitlines()
        assert lines[0] == "iteration,best_fitness,msd,alpha1,alpha2,omega"
        assert len(lines) == reply["records"] + 1
        # run continues
        before = s.snapshot["iteration"]
        assert run_until(lambda s: s.snapshot["iteration"] > before, s)
        s.close()

    def test_histogram_rebinning(self):
        s = EngineSession()
        send(s, **configure_msg(iterations=100))
        send(s, type="start")
        assert run_until(lambda s: s.state == "finished", s)
        n_bins_default = len(s.snapshot["histogram"]["counts"])
        assert n_bins_default == 125  # 25 / 0.2
        assert send(s, type="set_histogram", bin_size=0.5, log_scale=True)["type"] == "ok"
        assert len(s.snapshot["histogram"]["counts"]) == 50
        assert s.snapshot["histogram"]["log_scale"] is True
        total = sum(s.snapshot["histogram"]["counts"])
        in_range = [x for x in s._increments if 0 <= x < 25]
        assert total == len(in_range)
        s.close()


class TestStreamTransport:
    def test_full_session_over_tcp(self):
        async def scenario():
            server = await asyncio.start_server(
                lambda r, w: handle_session(r, w, sample_interval=0.002),
                "127.0.0.1", 0,
            )
            port = server.sockets[0].getsockname()[1]
            reader, writer = await asyncio.open_connection("127.0.0.1", port)

            async def send_msg(**msg):
                writer.write(json.dumps(msg).encode() + b"\n")
                await writer.drain()

            async def read_until(predicate, timeout=5.0):
                async def inner():
                    while True:
                        line = await reader.readline()
                        msg = json.loads(line)
                        if predicate(msg):
                            return msg
                return await asyncio.wait_for(inner(), timeout)

            await send_msg(**configure_msg(iterations=10**9))
            ok = await read_until(lambda m: m["type"] in ("ok", "error"))
            assert ok["type"] == "ok"
            await send_msg(type="start")
            snap = await read_until(
                lambda m: m["type"] == "snapshot" and m["iteration"] > 5
            )
            assert snap["running"] is True
            assert snap["params"]["omega"] == 0.729

            # on-the-fly parameter change lands within two sample intervals
            await send_msg(type="set_param", name="omega", value=0.9)
            seen = 0

            def check(m):
                nonlocal seen
                if m["type"] != "snapshot":
                    return False
                seen += 1
                return m["params"]["omega"] == 0.9

            hit = await read_until(check)
            assert seen <= 2, f"took {seen} snapshots to reflect set_param"
            assert hit["iteration"] >= snap["iteration"]

            # pause: stream continues, iteration freezes
            await send_msg(type="pause")
            await read_until(lambda m: m["type"] == "ok" and m["state"] == "paused")
            s1 = await read_until(lambda m: m["type"] == "snapshot" and not m["running"])
            s2 = await read_until(lambda m: m["type"] == "snapshot")
            s3 = await read_until(lambda m: m["type"] == "snapshot")
            assert s1["iteration"] == s2["iteration"] == s3["iteration"]

            writer.close()
            server.close()
            await server.wait_closed()

        asyncio.run(scenario())

    def test_snapshot_iterations_non_decreasing(self):
        async def scenario():
            server = await asyncio.start_server(
                lambda r, w: handle_session(r, w, sample_interval=0.001),
                "127.0.0.1", 0,
            )
            port = server.sockets[0].getsockname()[1]
            reader, writer = await asyncio.open_connection("127.0.0.1", port)
            writer.write(json.dumps(configure_msg(iterations=10**9)).encode() + b"\n")
            writer.write(b'{"type": "start"}\n')
            await writer.drain()
            iterations = []
            while len(iterations) < 40:
                msg = json.loads(await asyncio.wait_for(reader.readline(), 5.0))
                if msg["type"] == "snapshot":
                    iterations.append(msg["iteration"])
            assert iterations == sorted(iterations)
            writer.close()
            server.close()
            await server.wait_closed()

        asyncio.run(scenario())
