import json
import threading

import pytest

from t2r.genloop import (
    RecordingTransport,
    ReplayTransport,
    ScriptedTransport,
    TransportError,
    make_transport,
    request_hash,
)

MESSAGES = [{"role": "user", "content": "write a reward"}]


def test_request_hash_stable_and_sensitive():
    h1 = request_hash("m", MESSAGES, 0.7)
    h2 = request_hash("m", MESSAGES, 0.7)
    assert h1 == h2
    assert request_hash("m", MESSAGES, 0.8) != h1
    assert request_hash("m2", MESSAGES, 0.7) != h1
    assert request_hash("m", [{"role": "user", "content": "other"}], 0.7) != h1


def test_scripted_transport_orders_and_exhausts():
    t = ScriptedTransport(["one", "two"])
    assert t.complete(MESSAGES, 0.7) == "one"
    assert t.complete(MESSAGES, 0.7) == "two"
    with pytest.raises(TransportError):
        t.complete(MESSAGES, 0.7)
    assert len(t.requests) == 3


def test_record_then_replay_round_trip(tmp_path):
    cassette = tmp_path / "c.jsonl"
    rec = RecordingTransport(ScriptedTransport(["alpha", "beta"]), cassette)
    a = rec.complete(MESSAGES, 0.7)
    b = rec.complete(MESSAGES + [{"role": "assistant", "content": a}], 0.7)
    assert (a, b) == ("alpha", "beta")

    rows = [json.loads(line) for line in cassette.read_text().splitlines()]
    assert len(rows) == 2
    assert set(rows[0]) == {"request_hash", "request", "response"}

    replay = ReplayTransport(cassette)
    assert replay.complete(MESSAGES, 0.7) == "alpha"
    assert replay.complete(MESSAGES + [{"role": "assistant", "content": "alpha"}], 0.7) == "beta"
    # replay is stateless: the same request replays again
    assert replay.complete(MESSAGES, 0.7) == "alpha"


def test_replay_miss_is_an_error(tmp_path):
    cassette = tmp_path / "c.jsonl"
    RecordingTransport(ScriptedTransport(["x"]), cassette).complete(MESSAGES, 0.7)
    replay = ReplayTransport(cassette)
    with pytest.raises(TransportError) as exc:
        replay.complete([{"role": "user", "content": "unrecorded"}], 0.7)
    assert "no response" in str(exc.value)


def test_replay_missing_cassette(tmp_path):
    with pytest.raises(TransportError):
        ReplayTransport(tmp_path / "missing.jsonl")


def test_make_transport_kinds(tmp_path):
    cassette = tmp_path / "c.jsonl"
    RecordingTransport(ScriptedTransport(["x"]), cassette).complete(MESSAGES, 0.7)
    assert make_transport("replay", cassette=cassette).complete(MESSAGES, 0.7) == "x"
    assert make_transport("scripted", responses=["y"]).complete(MESSAGES, 0.7) == "y"
    with pytest.raises(TransportError):
        make_transport("replay")
    with pytest.raises(TransportError):
        make_transport("unknown")


def test_scripted_transport_thread_safety():
    t = ScriptedTransport([str(i) for i in range(200)])
    seen = []
    lock = threading.Lock()

    def worker():
        for _ in range(50):
            r = t.complete(MESSAGES, 0.7)
            with lock:
                seen.append(r)

    threads = [threading.Thread(target=worker) for _ in range(4)]
    for th in threads:
        th.start()
    for th in threads:
        th.join()
    assert sorted(seen, key=int) == [str(i) for i in range(200)]
