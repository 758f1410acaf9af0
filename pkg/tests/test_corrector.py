import json
import math
import time

import numpy as np
import pytest

from sepkit.corrector import (
    CorrectionAudit,
    Corrector,
    LegacyModel,
    audit_corrector,
    build_corrector,
    corrected_decision,
)
from sepkit.errors import DegenerateProbe, DimensionMismatch, InsufficientData, InvalidArgument, NotSeparable
from sepkit.geometry import SampleSet, ball_spec, cube_spec, sample_ball
from sepkit.separability import whiten


def tight_cluster(n=100, m=500, radius=1e-3, seed=0):
    rng = np.random.default_rng(seed)
    z = rng.standard_normal((m, n))
    z /= np.linalg.norm(z, axis=1)[:, None]
    pts = z * radius * rng.random(m)[:, None]
    return SampleSet(points=pts, dist=ball_spec(), seed=seed)


def count_calls(label="legacy"):
    calls = {"n": 0}

    def decide(x):
        calls["n"] += 1
        return label

    return LegacyModel(decision=decide, labels=(label, "corrected")), calls


def test_corrector_fires_on_error_not_on_cluster():
    cluster = tight_cluster()
    error = np.zeros(100)
    error[0] = 1.0
    corr = build_corrector(cluster, error, "corrected")
    assert corr.decide(error)
    assert corr.decide_batch(cluster.points).sum() == 0


def test_error_point_inside_correct_set_rejected():
    cluster = tight_cluster()
    inside = cluster.points[17].copy()
    with pytest.raises(NotSeparable) as exc:
        build_corrector(cluster, inside, "corrected")
    assert exc.value.margin <= 0.0


def test_error_point_at_mean_is_degenerate():
    cluster = tight_cluster()
    mean = cluster.points.mean(axis=0)
    with pytest.raises(DegenerateProbe):
        build_corrector(cluster, mean, "corrected", whitening_on=False)


def test_dimension_mismatch_rejected():
    cluster = tight_cluster(n=10, m=50)
    with pytest.raises(DimensionMismatch):
        build_corrector(cluster, np.ones(11), "corrected")


def test_whitening_off_reproduces_plain_geometry():
    cluster = tight_cluster(n=5, m=200, seed=3)
    error = np.full(5, 0.5)
    corr = build_corrector(cluster, error, "corrected", whitening_on=False)
    assert np.allclose(corr.whitening.factor, np.eye(5))
    # direction is the offset from the mean in raw coordinates
    mean = cluster.points.mean(axis=0)
    assert np.allclose(corr.functional.weights, error - mean)


def test_corrected_decision_routing():
    cluster = tight_cluster(n=20, m=100, seed=5)
    error = np.zeros(20)
    error[3] = 2.0
    corr = build_corrector(cluster, error, "corrected")
    model, calls = count_calls()
    assert corrected_decision(model, corr, error) == "corrected"
    assert calls["n"] == 0  # legacy never consulted on a fired point
    far = -error
    assert corrected_decision(model, corr, far) == "legacy"
    assert calls["n"] == 1


def test_build_never_calls_legacy_model():
    # one-shot: construction touches data only, not the wrapped rule
    cluster = tight_cluster(n=30, m=300, seed=7)
    model, calls = count_calls()
    error = np.zeros(30)
    error[0] = 1.5
    build_corrector(cluster, error, "corrected")
    assert calls["n"] == 0


def test_build_cost_is_one_shot_scale():
    cloud = sample_ball(100, 10_000, seed=11)
    error = np.zeros(100)
    error[0] = 0.95
    t0 = time.perf_counter()
    build_corrector(cloud, error, "corrected")
    assert time.perf_counter() - t0 < 5.0  # mean + one covariance solve + one sweep


def test_audit_on_training_data_has_zero_false_positives():
    cluster = tight_cluster(n=50, m=400, seed=9)
    error = np.zeros(50)
    error[1] = 1.0
    corr = build_corrector(cluster, error, "corrected")
    audit = audit_corrector(corr, cluster, error)
    assert audit.true_positive
    assert audit.false_positive_rate == 0.0
    assert audit.margin > 0.0


def test_audit_requires_held_out_data():
    # an empty sample set is unrepresentable, so the audit can never see one
    with pytest.raises(InvalidArgument):
        SampleSet(points=np.zeros((0, 5)), dist=ball_spec(), seed=0)


def test_non_destructive_replay():
    cloud = sample_ball(30, 2000, seed=15)
    error = np.zeros(30)
    error[2] = 1.2
    corr = build_corrector(cloud, error, "corrected")
    model, _ = count_calls()
    fresh = sample_ball(30, 100_000, seed=16).points
    fired = corr.decide_batch(fresh)
    for i in np.flatnonzero(~fired)[:500]:
        assert corrected_decision(model, corr, fresh[i]) == "legacy"
    # zero label changes off the firing set by construction of routing
    assert fired.sum() < 0.02 * len(fresh)


def test_stacked_correctors_are_independent():
    cloud = sample_ball(40, 3000, seed=17)
    e1 = np.zeros(40); e1[0] = 1.1
    e2 = np.zeros(40); e2[1] = -1.3
    c1 = build_corrector(cloud, e1, "fix-1")
    probe_points = sample_ball(40, 5000, seed=18).points
    before = c1.decide_batch(probe_points).copy()
    c2 = build_corrector(cloud, e2, "fix-2")
    after = c1.decide_batch(probe_points)
    assert np.array_equal(before, after)
    model, _ = count_calls()
    # stacking: apply c2 on top of the c1-corrected system
    def corrected_once(x):
        return corrected_decision(model, c1, x)
    stacked = LegacyModel(decision=corrected_once, labels=("legacy", "fix-1", "fix-2"))
    assert corrected_decision(stacked, c2, e2) == "fix-2"
    assert corrected_decision(stacked, c2, e1) == "fix-1"


def test_json_schema_round_trip():
    cluster = tight_cluster(n=4, m=100, seed=19)
    error = np.full(4, 0.9)
    corr = build_corrector(cluster, error, "corrected")
    doc = json.loads(corr.to_json())
    assert set(doc) == {"n", "weights", "offset", "whitening", "corrected_label"}
    assert set(doc["whitening"]) == {"mean", "factor", "lambda"}
    assert doc["n"] == 4
    restored = Corrector.from_json(corr.to_json(), source_error_point=error)
    assert restored.decide(error)
    assert np.array_equal(restored.decide_batch(cluster.points),
                          corr.decide_batch(cluster.points))


def test_shared_whitening_transform_reused():
    cloud = sample_ball(20, 1000, seed=23)
    transform = whiten(cloud)
    e = np.zeros(20); e[4] = 1.4
    a = build_corrector(cloud, e, "x", whitening=transform)
    b = build_corrector(cloud, e, "x")
    assert np.allclose(a.functional.weights, b.functional.weights)
    assert a.whitening is transform


def test_monte_carlo_success_and_false_positive_rates():
    # smaller rehearsal of the acceptance suite: one 2000-point cloud,
    # 200 random error points, fresh held-out cloud
    n, m, k = 100, 2000, 200
    cloud = sample_ball(n, m, seed=29)
    held = sample_ball(n, m, seed=30)
    transform = whiten(cloud)
    rng = np.random.default_rng(31)
    built = fired = 0
    fprs = []
    for _ in range(k):
        z = rng.standard_normal(n)
        err = z / np.linalg.norm(z) * rng.random() ** (1.0 / n)
        try:
            corr = build_corrector(cloud, err, "corrected", whitening=transform)
        except NotSeparable:
            continue
        built += 1
        audit = audit_corrector(corr, held, err)
        fired += audit.true_positive
        fprs.append(audit.false_positive_rate)
    assert built / k >= 0.99
    assert fired == built  # fires on its own error point every time
    mean_fpr = float(np.mean(fprs))
    se = math.sqrt(max(mean_fpr * (1 - mean_fpr), 1e-9) / (built * m))
    assert mean_fpr <= 0.01 + 3 * se
