import numpy as np
import pytest

import cspnn


def blobs(seed, per_class=20, classes=3, dim=2):
    rng = np.random.default_rng(seed)
    centres = rng.uniform(-0.8, 0.8, size=(classes, dim))
    y = np.tile(np.arange(classes), per_class)
    x = centres[y] + rng.normal(0, 0.1, size=(len(y), dim))
    return x, y


def test_hand_trace():
    m = cspnn.Model()
    stats = cspnn.construct(m, np.array([[-1.0], [1.0], [-0.8]]), ["A", "B", "A"])
    assert stats["centroid_updates"] == 1
    assert m.hidden_count == 2
    assert m.centroids[:, 0].tolist() == [-0.9, 1.0]
    assert m.unit_labels == ["A", "B"]


def test_construct_evaluate_predict():
    x, y = blobs(1)
    m = cspnn.Model()
    cspnn.construct(m, x, y)
    assert m.labels == ["0", "1", "2"]
    assert m.hidden_count <= len(y)
    report = cspnn.evaluate(m, x, y)
    assert 0.0 <= report["accuracy"] <= 100.0
    assert report["predictions"] == cspnn.predict(m, x)
    out = cspnn.forward(m, x[0])
    assert len(out["scores"]) == 3
    assert out["label"] == report["predictions"][0]


def test_unlearning():
    x, y = blobs(2)
    m = cspnn.Model()
    cspnn.construct(m, x, y)
    j = m.hidden_count
    cspnn.unlearn_units(m, m.unit_ids[:1])
    assert m.hidden_count == j - 1
    cspnn.unlearn_classes(m, ["1"])
    assert m.labels == ["0", "2"]
    assert "1" not in cspnn.predict(m, x)
    with pytest.raises(cspnn.NotFoundError):
        cspnn.unlearn_classes(m, ["nope"])
    with pytest.raises(cspnn.Error):
        cspnn.unlearn_units(m, [10**9])


def test_errors():
    with pytest.raises(cspnn.ModelEmptyError):
        cspnn.evaluate(cspnn.Model(), np.zeros((1, 2)), ["a"])
    m = cspnn.Model()
    cspnn.construct(m, np.zeros((1, 2)), ["a"])
    with pytest.raises(cspnn.ContractError):
        cspnn.forward(m, np.zeros(3))


def test_static_baseline():
    x, y = blobs(3)
    s = cspnn.build_static(x, y)
    assert s.hidden_count == len(y)
    assert s.sigma == pytest.approx(s.max_pair_distance / 3)
    assert cspnn.evaluate_static(s, x, y)["total"] == len(y)


def test_normalizer_and_csv(tmp_path):
    p = tmp_path / "d.csv"
    p.write_text("0,5,A\n10,5,B\n")
    x, y = cspnn.load_csv(p)
    assert y == ["A", "B"]
    n = cspnn.fit_normalizer(x)
    assert n.apply(np.array([[5.0, 5.0], [12.0, 1.0]])).tolist() == [[0.0, 0.0], [pytest.approx(1.4), 0.0]]


def test_save_load(tmp_path):
    x, y = blobs(4)
    m = cspnn.Model()
    cspnn.construct(m, x, y)
    norm = cspnn.fit_normalizer(x)
    cspnn.save_model(tmp_path / "m.cspn", m, norm, "blobs")
    back, norm2, name = cspnn.load_model(tmp_path / "m.cspn")
    assert back == m
    assert norm2 == norm
    assert name == "blobs"
    assert cspnn.forward(back, x[5])["scores"] == cspnn.forward(m, x[5])["scores"]


def test_protocols():
    x, y = blobs(5, classes=6)
    xt, yt = blobs(5, per_class=5, classes=6)
    assert cspnn.cil_group_sizes(10, 3) == [3, 3, 3, 1]
    recs = cspnn.run_protocol("cil", x, y, xt, yt, task=2, runs=2, seed=3)
    assert [r["stage"] for r in recs if r["seed"] is None] == ["1", "2", "3"]
    again = cspnn.run_protocol("cil", x, y, xt, yt, task=2, runs=2, seed=3)
    assert recs == again
    with pytest.raises(cspnn.ConfigError):
        cspnn.run_protocol("cuil", x, y, xt, yt, divisor=9)
