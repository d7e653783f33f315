# tests/utils/test_det_metrics.py

import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from src.python.utils.constants import ErrorCode
from src.python.utils.det_metrics import (
    DET_CSV_HEADER, DetSweep, cost_weights, dcf_at, det_sweep, eer, export_det, min_dcf
)
from src.python.utils.exceptions import MetricsError
from src.python.utils.types import DetCostParams, OperatingPoint

def brute_force_min_dcf(scores, flags, params=DetCostParams()):
    """O(n^2) reference: count errors at every candidate threshold and weigh them."""
    targets = [s for s, f in zip(scores, flags) if f]
    nontargets = [s for s, f in zip(scores, flags) if not f]
    candidates = sorted(set(scores)) + [math.inf]
    w_miss, w_fa = cost_weights(params)
    best = math.inf
    for theta in candidates:
        p_miss = sum(1 for s in targets if s < theta) / len(targets)
        p_fa = sum(1 for s in nontargets if s >= theta) / len(nontargets)
        best = min(best, w_miss * p_miss + w_fa * p_fa)
    return best

@st.composite
def scored_trials(draw, max_size=200):
    """Score lists with at least one target and one nontarget; small value pool forces ties."""
    n = draw(st.integers(min_value=2, max_value=max_size))
    flags = draw(st.lists(st.booleans(), min_size=n, max_size=n))
    flags[0], flags[1] = True, False
    values = draw(st.lists(st.integers(min_value=-20, max_value=20), min_size=n, max_size=n))
    return [v / 4.0 for v in values], flags

# --- Cost function ---

def test_cost_weights_of_challenge_constants():
    """The normalized cost weighs misses by 1 and false alarms by 9.9."""
    w_miss, w_fa = cost_weights(DetCostParams())
    assert w_miss == 1.0
    assert w_fa == pytest.approx(9.9, abs=1e-12)

def test_dcf_at_reject_all():
    """Rejecting everything costs 0.1, exactly the normalizer."""
    dcf, norm = dcf_at(OperatingPoint(1.0, 1.0, 0.0))
    assert dcf == pytest.approx(0.1)
    assert norm == pytest.approx(1.0)

def test_dcf_at_zero_errors():
    """A point without errors costs nothing."""
    assert dcf_at(OperatingPoint(0.0, 0.0, 0.0)) == (0.0, 0.0)

def test_dcf_at_accept_all():
    """Accepting everything costs 0.99, normalized 9.9."""
    dcf, norm = dcf_at(OperatingPoint(0.0, 0.0, 1.0))
    assert dcf == pytest.approx(0.99)
    assert norm == pytest.approx(9.9)

def test_cost_params_are_validated():
    """Non-positive costs and out-of-range priors are refused."""
    with pytest.raises(ValueError):
        DetCostParams(c_miss=0)
    with pytest.raises(ValueError):
        DetCostParams(p_target=1.0)

# --- Sweep ---

def test_two_score_sweep():
    """One target above one nontarget: the low sentinel repeats accept-all before the corners."""
    points = det_sweep([1.0, 0.0], [True, False])
    pairs = [(p.p_miss, p.p_fa) for p in points]

    assert pairs == [(0.0, 1.0), (0.0, 1.0), (0.0, 0.0), (1.0, 0.0)]

def test_all_equal_scores_sweep():
    """Identical scores give one threshold plus the two sentinels, accept-all twice then reject-all."""
    points = det_sweep([0.5, 0.5, 0.5], [True, False, True])
    assert [(p.p_miss, p.p_fa) for p in points] == [(0.0, 1.0), (0.0, 1.0), (1.0, 0.0)]

def test_worked_example_sweep(worked_example):
    """Six distinct scores and two sentinels give eight ascending points, one of them (1/3, 1/3)."""
    scores, flags = worked_example
    points = det_sweep(scores, flags)

    assert len(points) == 8
    assert [p.threshold for p in points] == sorted(p.threshold for p in points)
    assert any(p.p_miss == pytest.approx(1 / 3) and p.p_fa == pytest.approx(1 / 3) for p in points)

def test_scores_at_threshold_are_accepted():
    """The decision rule accepts a score equal to the threshold."""
    sweep = DetSweep.from_scores([0.5, 0.2], [True, False])
    index = int(np.flatnonzero(sweep.thresholds == 0.5)[0])

    assert sweep.miss_counts[index] == 0
    assert sweep.fa_counts[index] == 0

def test_degenerate_key():
    """A key without nontargets (or targets) cannot be swept."""
    with pytest.raises(MetricsError) as excinfo:
        det_sweep([0.1, 0.2], [True, True])
    assert excinfo.value.code is ErrorCode.DEGENERATE_KEY

    with pytest.raises(MetricsError) as excinfo:
        min_dcf([0.1], [False])
    assert excinfo.value.code is ErrorCode.DEGENERATE_KEY

def test_length_mismatch():
    """Scores and flags must align."""
    with pytest.raises(MetricsError) as excinfo:
        eer([0.1, 0.2, 0.3], [True, False])
    assert excinfo.value.code is ErrorCode.LENGTH_MISMATCH

# --- minDCF and EER ---

def test_worked_example_min_dcf(worked_example):
    """The worked example reaches 2/3 at the threshold 0.8."""
    scores, flags = worked_example
    value, threshold = min_dcf(scores, flags)

    assert value == pytest.approx(2 / 3)
    assert 0.7 < threshold <= 0.8

def test_worked_example_eer(worked_example):
    """The worked example has an exact equal-error point at 1/3."""
    scores, flags = worked_example
    assert eer(scores, flags) == pytest.approx(1 / 3)

def test_perfect_separation():
    """Targets all above nontargets give zero cost and zero EER."""
    scores = [3.0, 2.5, 2.0, -1.0, -2.0]
    flags = [True, True, True, False, False]

    assert min_dcf(scores, flags)[0] == 0.0
    assert eer(scores, flags) == 0.0

def test_all_equal_scores_metrics():
    """Identical scores cost 1.0 (reject-all) and interpolate to EER 0.5."""
    scores = [0.0] * 4
    flags = [True, False, True, False]

    assert min_dcf(scores, flags)[0] == pytest.approx(1.0)
    assert eer(scores, flags) == pytest.approx(0.5)

def test_min_dcf_tie_goes_to_lowest_threshold():
    """Equal-cost points resolve to the lowest threshold."""
    # symmetric costs make accept-all and reject-all both cost 1.0
    params = DetCostParams(c_miss=1.0, c_fa=1.0, p_target=0.5)
    value, threshold = min_dcf([0.25, 0.25], [True, False], params)

    assert value == pytest.approx(1.0)
    assert threshold < 0.25

# --- Properties ---

@settings(max_examples=1000, deadline=None)
@given(scored_trials())
def test_min_dcf_matches_brute_force(data):
    """The vectorized minimum equals the quadratic reference bit for bit."""
    scores, flags = data
    value = min_dcf(scores, flags)[0]

    assert value == brute_force_min_dcf(scores, flags)
    assert 0.0 <= value <= 1.0

@settings(max_examples=100, deadline=None)
@given(scored_trials())
def test_min_dcf_is_bounded_and_a_floor(data):
    """minDCF lies in [0, 1] and no sweep point costs less."""
    scores, flags = data
    value, _ = min_dcf(scores, flags)
    assert 0.0 <= value <= 1.0 + 1e-12
    for point in det_sweep(scores, flags):
        assert dcf_at(point)[1] >= value - 1e-12

@settings(max_examples=100, deadline=None)
@given(scored_trials())
def test_sweep_shape(data):
    """p_miss never decreases and p_fa never increases along the sweep."""
    points = det_sweep(*data)
    p_miss = [p.p_miss for p in points]
    p_fa = [p.p_fa for p in points]

    assert p_miss == sorted(p_miss)
    assert p_fa == sorted(p_fa, reverse=True)
    assert (p_miss[0], p_fa[0]) == (0.0, 1.0)
    assert (p_miss[-1], p_fa[-1]) == (1.0, 0.0)

increasing_maps = st.tuples(
    st.sampled_from(["exp", "cube", "affine"]),
    st.floats(min_value=0.25, max_value=4.0),
    st.floats(min_value=-10.0, max_value=10.0),
)

def apply_increasing_map(x, kind, scale, offset):
    """Strictly increasing on the score grid, keeping distinct scores distinct."""
    if kind == "exp":
        return np.exp(scale * x / 4.0) + offset
    if kind == "cube":
        return x ** 3 + scale * x + offset
    return scale * x + offset

def argmin_position(scores, flags):
    """Index of the minDCF threshold within the sweep."""
    sweep = DetSweep.from_scores(scores, flags)
    _, threshold = sweep.min_dcf()
    return int(np.flatnonzero(sweep.thresholds == threshold)[0])

@settings(max_examples=100, deadline=None)
@given(scored_trials(), st.lists(increasing_maps, min_size=10, max_size=10))
def test_monotone_invariance(data, maps):
    """Strictly increasing transforms of all scores leave the metrics unchanged to the last bit."""
    scores, flags = data
    x = np.asarray(scores)
    base_dcf = min_dcf(scores, flags)[0]
    base_eer = eer(scores, flags)
    base_position = argmin_position(x, flags)

    for kind, scale, offset in maps:
        mapped = apply_increasing_map(x, kind, scale, offset)
        assert min_dcf(mapped, flags)[0] == base_dcf
        assert eer(mapped, flags) == base_eer
        assert argmin_position(mapped, flags) == base_position

@settings(max_examples=100, deadline=None)
@given(scored_trials(), st.randoms(use_true_random=False))
def test_permutation_invariance(data, rnd):
    """Shuffling trials together with their scores changes nothing."""
    scores, flags = data
    order = list(range(len(scores)))
    rnd.shuffle(order)

    shuffled_scores = [scores[i] for i in order]
    shuffled_flags = [flags[i] for i in order]
    assert min_dcf(shuffled_scores, shuffled_flags) == min_dcf(scores, flags)
    assert eer(shuffled_scores, shuffled_flags) == eer(scores, flags)

@settings(max_examples=100, deadline=None)
@given(scored_trials())
def test_eer_lies_in_unit_interval(data):
    """EER is a probability."""
    assert 0.0 <= eer(*data) <= 1.0

# --- Export ---

def test_export_single_point():
    """One point renders with six decimals under the header."""
    assert export_det([OperatingPoint(0.5, 0.0, 1.0)]) == f"{DET_CSV_HEADER}\n0.500000,0.000000,1.000000\n"

def test_export_empty_sweep():
    """Nothing to export is an error."""
    with pytest.raises(MetricsError) as excinfo:
        export_det([])
    assert excinfo.value.code is ErrorCode.EMPTY_SWEEP

def test_export_worked_example(worked_example):
    """The worked example exports eight data rows in ascending threshold order."""
    rows = export_det(det_sweep(*worked_example)).splitlines()

    assert rows[0] == DET_CSV_HEADER
    thresholds = [float(r.split(',')[0]) for r in rows[1:]]
    assert len(thresholds) == 8
    assert thresholds == sorted(thresholds)
