import hashlib
import json

import pytest

import edgeshare as es


def test_sha256_matches_hashlib():
    for data in (b"", b"abc", bytes(range(200))):
        assert es.sha256(data) == hashlib.sha256(data).digest()


def test_quasigroup_operations_and_identities():
    q = es.Quasigroup.from_table([[0, 1, 2], [1, 2, 0], [2, 0, 1]])
    assert q.multiply(1, 2) == 0
    assert q.left_divide(1, 2) == 1
    assert q.verify_identities()["passed"]
    g = es.Quasigroup.generate(16, 7)
    assert es.is_latin_square(g.table)
    report = g.verify_identities(samples=64, seed=1)
    assert report["passed"] and report["pairs_checked"] == 64
    assert es.Quasigroup.generate(16, 7).table == g.table


def test_malformed_table_raises_with_code():
    with pytest.raises(es.EdgeshareError) as info:
        es.Quasigroup.from_table([[0, 1], [0, 1]])
    assert info.value.code == "malformed-table"


def test_split_combine_round_trip():
    q = es.Quasigroup.generate(256, 3)
    secret = b"edge secret material"
    first, second = es.split_secret(secret, q, seed=9)
    assert len(first) == len(second) == len(secret)
    assert es.combine_shares(first, second, q, len(secret)) == secret
    assert es.encode_secret(b"\xab\xcd", 16) == [10, 11, 12, 13]


def test_edge_node_flow():
    node = es.EdgeNode("group-py", seed=5)
    dev = node.register_device("sensor-1", seed=1)
    assert dev["h1"] == dev["h2"]
    key = node.generate_key()
    share = node.split_and_distribute(key, dev["h2"])
    assert share["index"] == 2
    ts = node.issue_timestamp(dev["h2"])
    assert node.authorize(dev["h2"], share, ts) == (True, None)
    assert node.authorize(dev["h2"], share, ts) == (False, "replay")
    forged = dict(share, binding_tag="00" * 32)
    accepted, reason = node.authorize(dev["h2"], forged)
    assert not accepted and reason == "tag-mismatch"
    assert node.verify_chain() == (True, None)
    assert es.verify_snapshot(node.snapshot()) == (True, None)
    assert len(node.audit_log()) == 6
    assert "bytes" not in json.dumps(node.public_state())


def test_snapshot_tamper_is_located():
    node = es.EdgeNode("g")
    for i in range(4):
        node.register_device(f"d{i}", seed=i)
    lines = node.snapshot().split("\n")
    entry = json.loads(lines[3])
    entry["sequence"] += 1
    lines[3] = json.dumps(entry, separators=(",", ":"))
    assert es.verify_snapshot("\n".join(lines)) == (False, 2)


def test_profiler():
    import random

    rng = random.Random(4)
    values = [rng.expovariate(2.0) for _ in range(5000)]
    report = es.fit_distribution(values, "meter")
    assert report["best_family"] == "exponential"
    assert 1.9 <= report["params"][0] <= 2.1
    assert es.detect_outliers([0, 0, 0, 0, 100]) == []
    assert es.detect_outliers([0, 0, 0, 0, 100], 1.5) == [4]


def test_bloom_filter():
    f = es.BloomFilter.create(1000, 0.01)
    assert (f.m, f.k) == (9586, 7)
    ident = hashlib.sha256(b"device").digest()
    assert not f.contains(ident)
    f.insert(ident)
    assert f.contains(ident)
    g = es.BloomFilter.deserialize(f.serialize())
    assert g.contains(ident) and g.n_inserted == 1


def test_curve_point_check():
    assert es.is_on_curve("5", ["0", "0", "0", "1", "1"], "0", "1")
    assert not es.is_on_curve("5", ["0", "0", "0", "1", "1"], "1", "1")


def test_simulator_is_deterministic():
    for scenario in es.builtin_scenarios():
        a = es.run_scenario(scenario)
        b = es.run_scenario(scenario)
        assert a["passed"]
        assert a["event_log"] == b["event_log"]
        assert a["attacks_detected"] == a["attacks"]
