import math

import pytest

import hybridsort as hs


def test_cue_values():
    a = hs.Box(0, 0, 10, 10)
    assert hs.iou(a, hs.Box(5, 5, 15, 15)) == pytest.approx(25 / 175, abs=1e-12)
    assert hs.hiou(a, hs.Box(0, 5, 10, 15)) == pytest.approx(5 / 15, abs=1e-12)
    assert hs.hmiou(a, hs.Box(5, 5, 15, 15)) == pytest.approx(1 / 21, abs=1e-12)
    assert hs.wmiou(a, hs.Box(5, 0, 15, 10)) == pytest.approx(1 / 9, abs=1e-12)
    assert hs.linear_confidence_prediction(0.8, 0.9) == pytest.approx(0.7)
    assert hs.linear_confidence_prediction(0.8) == 0.8
    assert hs.angle_difference(math.pi - 0.1, -math.pi + 0.1) == pytest.approx(0.2)
    history = [(k + 1, hs.Box(10 + 2 * k, 20, 30 + 2 * k, 60)) for k in range(4)]
    reversed_det = hs.Box(14, 20, 34, 60)
    assert hs.rocm_cost(history, reversed_det) == pytest.approx(3 * math.pi)
    assert hs.cosine_appearance_cost([1.0, 0.0], [0.0, 2.0]) == pytest.approx(1.0)


def test_solve_and_gating():
    result = hs.solve([[4.0, 1.0, 3.0], [2.0, 0.0, 5.0]])
    assert [tuple(m) for m in result.matches] == [(0, 1), (1, 0)]
    assert list(result.unmatched_cols) == [2]
    gated = hs.solve([[0.0, 1.0]], [[True, True]])
    assert list(gated.matches) == []
    assert list(gated.unmatched_rows) == [0]


def test_kalman_round_trip():
    box = hs.Box(100, 100, 140, 200)
    state = hs.kalman_init(box, 0.9)
    est, conf = hs.kalman_box(hs.kalman_predict(state))
    assert est.x1 == pytest.approx(100) and est.y2 == pytest.approx(200)
    assert conf == pytest.approx(0.9)
    updated = hs.kalman_update(hs.kalman_predict(state), hs.Box(102, 100, 142, 200), 0.8)
    assert hs.kalman_box(updated)[0].x1 > 100


def test_tracker_confirms_after_min_hits():
    tracker = hs.Tracker(hs.TrackerConfig())
    outputs = []
    for frame in range(1, 6):
        box = hs.Box(100 + 3 * frame, 100, 140 + 3 * frame, 200)
        outputs.append(tracker.step(frame, [hs.Detection(box, 0.9)]))
    assert [len(o) for o in outputs] == [0, 0, 1, 1, 1]
    assert {o[0].id for o in outputs[2:]} == {1}


def test_config_defaults_and_errors():
    cfg = hs.TrackerConfig()
    assert (cfg.lambda1, cfg.lambda2_first, cfg.lambda2_byte) == (0.2, 1.5, 1.0)
    assert (cfg.gate, cfg.high_threshold, cfg.low_threshold) == (0.15, 0.6, 0.1)
    cfg.set("tcm", "off")
    cfg.low_threshold = 0.9
    with pytest.raises(hs.InputError):
        cfg.validate()


def test_simulate_track_evaluate(tmp_path):
    spec = hs.ScenarioSpec()
    spec.object_count = 4
    spec.frame_count = 80
    spec.seed = 11
    scenario = hs.generate(spec)
    rows = hs.track_scenario(scenario, hs.TrackerConfig())
    assert rows == hs.track_scenario(scenario, hs.TrackerConfig())
    report = hs.evaluate_scenario(scenario, rows)
    assert 0.0 < report.idf1 <= 1.0
    assert report.mota <= 1.0
    path = tmp_path / "res.txt"
    hs.write_results(str(path), rows)
    back = hs.read_results(str(path))
    assert len(back) == len(rows)
    assert hs.format_result_row(back[0]).count(",") == 9
