import io

import pytest

from preemptsched.bench import (
    BenchResult,
    empty_cluster,
    format_kernel_table,
    format_table,
    read_csv,
    run_bench,
    run_kernel_bench,
    saturated_cluster,
    write_csv,
)

CELLS = [
    ("baseline", "empty"),
    ("preemptible_aware", "normal-empty"),
    ("preemptible_aware", "preemptible-empty"),
    ("preemptible_aware", "saturated"),
    ("retry", "normal-empty"),
    ("retry", "preemptible-empty"),
    ("retry", "saturated"),
]


def test_empty_cluster_shape():
    cluster = empty_cluster(5)
    assert cluster.host_ids() == ["bench-%03d" % i for i in range(5)]
    assert cluster.instances == {}
    assert cluster.clock == 1000


def test_saturated_cluster_shape():
    cluster = saturated_cluster(3, seed=0)
    assert len(cluster.instances) == 12
    for host_id in cluster.host_ids():
        residents = cluster.instances_on(host_id)
        assert len(residents) == 4
        for inst in residents:
            assert inst.is_preemptible
            assert inst.flavor.name == "medium"
            assert 1 <= inst.run_time(cluster.clock) < 300
    again = saturated_cluster(3, seed=0)
    assert {i.id: i.start_time for i in cluster.instances.values()} \
        == {i.id: i.start_time for i in again.instances.values()}


def test_run_bench_produces_all_cells():
    results = run_bench(hosts=3, calls=4, warmup=1)
    assert [(r.scheduler, r.scenario) for r in results] == CELLS
    for r in results:
        assert r.sample_count == 4
        assert r.mean_us > 0
        assert r.stddev_us >= 0


def test_calibration_row_is_optional_and_cheap():
    results = run_bench(hosts=24, calls=130, calibrate=True)
    assert [(r.scheduler, r.scenario) for r in results[:-1]] == CELLS
    calibration = results[-1]
    assert (calibration.scheduler, calibration.scenario) \
        == ("calibration", "empty")
    baseline = results[0]
    assert calibration.mean_us < 0.05 * baseline.mean_us


def test_parallel_cells_smoke():
    results = run_bench(hosts=2, calls=3, warmup=1, parallel=True)
    assert [(r.scheduler, r.scenario) for r in results] == CELLS


def test_csv_round_trips_exactly():
    results = run_bench(hosts=2, calls=3, warmup=1)
    buf = io.StringIO()
    write_csv(results, buf)
    buf.seek(0)
    assert read_csv(buf) == results


def test_csv_header_checked():
    with pytest.raises(ValueError):
        read_csv(io.StringIO("a,b,c\n1,2,3\n"))


def test_format_table():
    results = [BenchResult("baseline", "empty", 3, 12.345, 0.5)]
    text = format_table(results)
    lines = text.splitlines()
    assert lines[0].startswith("scheduler")
    assert "12.35" in lines[2]
    assert len(lines) == 3


def test_kernel_bench_agreement():
    results, agree = run_kernel_bench(items=8, calls=40, seed=1)
    assert agree
    assert results[0].backend == "python"
    assert all(r.mean_us > 0 for r in results)
    text = format_kernel_table(results, agree)
    assert "backend" in text
    if len(results) == 2:
        assert "speedup" in text
