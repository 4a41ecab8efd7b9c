import pytest

from conftest import assert_snapshots_equal, random_spans
from heatmon.aggregate import aggregate_interval
from heatmon.errors import EmptyWindow, MisalignedPlan, OverlappingSnapshots
from heatmon.model import View
from heatmon.resample import ResamplePlan, resample, window_aggregate

MINUTE = 60_000


def minute_snapshots(rng, minutes, spans_per_minute=40, skip=()):
    """(all_spans, snapshots): one snapshot per non-skipped minute."""
    all_spans, snaps = [], []
    for m in range(minutes):
        if m in skip:
            continue
        spans = random_spans(rng, spans_per_minute, m * MINUTE, MINUTE)
        all_spans.extend(spans)
        snaps.append(aggregate_interval(spans, m * MINUTE, MINUTE))
    return all_spans, snaps


def test_fifteen_minutes_to_one_bin_matches_raw_aggregation(rng):
    spans, snaps = minute_snapshots(rng, 15)
    plan = ResamplePlan(MINUTE, 15 * MINUTE, 0, 15 * MINUTE)
    out = resample(snaps, plan)
    assert len(out) == 1
    # Oracle: aggregate the raw spans directly into the target bin.
    expected = aggregate_interval(spans, 0, 15 * MINUTE)
    assert_snapshots_equal(out[0], expected, rel=1e-9, abs_tol=1e-9)


def test_identity_resample_returns_equal_snapshots(rng):
    _, snaps = minute_snapshots(rng, 3)
    out = resample(snaps, ResamplePlan(MINUTE, MINUTE, 0, 3 * MINUTE))
    assert len(out) == len(snaps)
    for got, original in zip(out, snaps):
        assert_snapshots_equal(got, original)


def test_gap_minutes_produce_no_empty_bins(rng):
    # Two populated minutes 13 minutes apart within one 15-minute bin.
    spans, snaps = minute_snapshots(rng, 15, skip=set(range(1, 14)))
    assert len(snaps) == 2
    out = resample(snaps, ResamplePlan(MINUTE, 15 * MINUTE, 0, 15 * MINUTE))
    assert len(out) == 1
    expected = aggregate_interval(spans, 0, 15 * MINUTE)
    assert_snapshots_equal(out[0], expected, rel=1e-9, abs_tol=1e-9)


def test_empty_target_bins_are_omitted(rng):
    _, snaps = minute_snapshots(rng, 45, skip=set(range(15, 30)))
    out = resample(snaps, ResamplePlan(MINUTE, 15 * MINUTE, 0, 45 * MINUTE))
    assert [s.interval_start for s in out] == [0, 30 * MINUTE]


def test_resample_composes_across_step_chains(rng):
    _, snaps = minute_snapshots(rng, 30)
    window = ResamplePlan(MINUTE, 15 * MINUTE, 0, 30 * MINUTE)
    direct = resample(snaps, window)
    via_five = resample(
        resample(snaps, ResamplePlan(MINUTE, 5 * MINUTE, 0, 30 * MINUTE)),
        ResamplePlan(5 * MINUTE, 15 * MINUTE, 0, 30 * MINUTE),
    )
    assert len(direct) == len(via_five)
    for a, b in zip(via_five, direct):
        assert_snapshots_equal(a, b, rel=1e-9, abs_tol=1e-9)


def test_count_conservation_and_minmax_monotonicity(rng):
    _, snaps = minute_snapshots(rng, 20)
    out = resample(snaps, ResamplePlan(MINUTE, 10 * MINUTE, 0, 20 * MINUTE))
    for view in View:
        source_counts: dict = {}
        for snap in snaps:
            for y, x, code_map in snap.cells(view):
                for code, bundle in code_map.items():
                    key = (y, x, code)
                    source_counts[key] = source_counts.get(key, 0) + bundle.count
        resampled_counts: dict = {}
        for snap in out:
            for y, x, code_map in snap.cells(view):
                for code, bundle in code_map.items():
                    key = (y, x, code)
                    resampled_counts[key] = resampled_counts.get(key, 0) + bundle.count
                    for source in snaps:
                        try:
                            src = source.view_map(view)[y][x][code]
                        except KeyError:
                            continue
                        if snap.interval_start <= source.interval_start < snap.interval_end:
                            assert bundle.min_ms <= src.min_ms
                            assert bundle.max_ms >= src.max_ms
        assert resampled_counts == source_counts


def test_misaligned_plans_rejected():
    with pytest.raises(MisalignedPlan):
        ResamplePlan(MINUTE, 90_000, 0, 180_000).validate()  # not a multiple
    with pytest.raises(MisalignedPlan):
        ResamplePlan(MINUTE, 2 * MINUTE, MINUTE, 5 * MINUTE).validate()  # window off-grid
    with pytest.raises(MisalignedPlan):
        ResamplePlan(MINUTE, 2 * MINUTE, 4 * MINUTE, 2 * MINUTE).validate()  # inverted


def test_wrong_snapshot_length_rejected(rng):
    _, snaps = minute_snapshots(rng, 2)
    plan = ResamplePlan(2 * MINUTE, 2 * MINUTE, 0, 4 * MINUTE)
    with pytest.raises(MisalignedPlan):
        resample(snaps, plan)


def test_overlapping_snapshots_rejected(rng):
    spans = random_spans(rng, 10, 0, MINUTE)
    snap = aggregate_interval(spans, 0, MINUTE)
    dup = aggregate_interval(spans, 0, MINUTE)
    with pytest.raises(OverlappingSnapshots):
        resample([snap, dup], ResamplePlan(MINUTE, MINUTE, 0, 2 * MINUTE))


def test_window_aggregate_of_singleton(rng):
    _, snaps = minute_snapshots(rng, 1)
    out = window_aggregate(snaps)
    assert out.interval_start == snaps[0].interval_start
    assert out.interval_length_ms == snaps[0].interval_length_ms
    assert_snapshots_equal(out, snaps[0])


def test_window_aggregate_equals_single_bin_resample(rng):
    _, snaps = minute_snapshots(rng, 8)
    via_resample = resample(snaps, ResamplePlan(MINUTE, 8 * MINUTE, 0, 8 * MINUTE))
    assert len(via_resample) == 1
    assert_snapshots_equal(window_aggregate(snaps), via_resample[0])


def test_day_of_snapshots_conserves_counts(rng):
    # 24 hours of 1-minute snapshots: aggregate counts must equal the sums.
    _, snaps = minute_snapshots(rng, 24 * 60, spans_per_minute=3)
    total = window_aggregate(snaps)
    for view in View:
        expected: dict = {}
        for snap in snaps:
            for y, x, code_map in snap.cells(view):
                for code, bundle in code_map.items():
                    key = (y, x, code)
                    expected[key] = expected.get(key, 0) + bundle.count
        got = {
            (y, x, code): bundle.count
            for y, x, code_map in total.cells(view)
            for code, bundle in code_map.items()
        }
        assert got == expected


def test_window_aggregate_rejects_empty_list():
    with pytest.raises(EmptyWindow):
        window_aggregate([])


def test_resampled_pct_sums_to_100(rng):
    _, snaps = minute_snapshots(rng, 10)
    for snap in resample(snaps, ResamplePlan(MINUTE, 5 * MINUTE, 0, 10 * MINUTE)):
        for view in View:
            for _, _, code_map in snap.cells(view):
                assert sum(b.pct for b in code_map.values()) == pytest.approx(
                    100.0, abs=1e-9
                )
