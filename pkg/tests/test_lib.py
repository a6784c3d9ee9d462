"""
Tests for settings, the in-memory cache, performance tracking and the table emitter
"""

import json

import pytest
from pydantic import ValidationError

from lib.cache_manager import CacheManager, cache_manager, cached_result
from lib.config import HochschildSettings, load_settings
from lib.performance_tracker import PerformanceTracker, SuiteTiming, benchmark_speed, perf_tracker
from lib.table_emitter import emit, envelope, rows_of, strip_timestamp, to_csv, to_latex


class TestSettings:
    """Environment-driven configuration"""

    def test_defaults(self):
        settings = HochschildSettings()
        assert settings.workers == 1
        assert settings.cache_enabled
        assert settings.log_level == "INFO"

    def test_log_level_normalized(self):
        assert HochschildSettings(log_level="debug").log_level == "DEBUG"
        with pytest.raises(ValidationError):
            HochschildSettings(log_level="loud")

    def test_bounds(self):
        with pytest.raises(ValidationError):
            HochschildSettings(workers=0)

    def test_load_from_env(self, monkeypatch):
        monkeypatch.setenv("HH_WORKERS", "3")
        monkeypatch.setenv("HH_CACHE_ENABLED", "no")
        monkeypatch.setenv("HH_LOG_LEVEL", "warning")
        settings = load_settings()
        assert settings.workers == 3
        assert not settings.cache_enabled
        assert settings.log_level == "WARNING"


class TestCacheManager:
    """Bounded memo"""

    @pytest.fixture
    def cache(self):
        return CacheManager(max_entries=4)

    def test_get_and_set(self, cache):
        assert cache.get("missing", "default") == "default"
        cache.set("k", (1, 2), compute_ms=5.0)
        assert cache.get("k") == (1, 2)
        stats = cache.get_cache_stats()
        assert stats["hit_count"] == 1
        assert stats["miss_count"] == 1
        assert stats["time_saved_ms"] == 5.0

    def test_disabled(self):
        cache = CacheManager(enabled=False)
        cache.set("k", 1)
        assert cache.get("k") is None

    def test_eviction(self, cache):
        for i in range(5):
            cache.set(f"k{i}", i)
        assert len(cache.memory_cache) == 4

    def test_namespaces(self, cache):
        cache.set("a", 1, namespace="koszul")
        cache.set("b", 2, namespace="koszul")
        cache.set("c", 3, namespace="bar")
        assert cache.get_cache_stats()["namespaces"] == {"koszul": 2, "bar": 1}
        assert cache.invalidate("koszul") == 2
        assert cache.get("a") is None
        assert cache.get("c") == 3

    def test_clear(self, cache):
        cache.set("k", 1)
        cache.clear_cache()
        assert cache.get_cache_stats()["cache_entries"] == 0

    def test_keys_are_stable(self, cache):
        assert cache._generate_key(("a", 1)) == cache._generate_key(("a", 1))
        assert cache._generate_key(("a", 1)) != cache._generate_key(("a", 2))

    def test_cached_result(self, monkeypatch):
        monkeypatch.setattr(cache_manager, "enabled", True)
        calls = []

        @cached_result(cache_key_func=lambda n: ("test_lib_square", n))
        def square(n):
            calls.append(n)
            return n * n

        assert square(7) == 49
        assert square(7) == 49
        assert calls == [7]


class TestPerformanceTracker:
    """Timers and suite timings"""

    @pytest.fixture
    def tracker(self):
        return PerformanceTracker()

    def test_timer(self, tracker):
        timer_id = tracker.start_timer("kernel")
        assert tracker.end_timer(timer_id, "kernel") >= 0.0
        assert tracker.metrics[-1].name == "kernel_duration"
        assert tracker.end_timer("nope", "kernel") == 0.0

    def test_suite_summary(self, tracker):
        assert tracker.get_session_summary() == {"status": "No suite data available"}
        tracker.record_suite(SuiteTiming("phi", 12.0, 4, 4))
        tracker.record_suite(SuiteTiming("n2", 30.0, 9, 8))
        summary = tracker.get_session_summary()
        assert summary["checks_run"] == 13
        assert summary["checks_passed"] == 12
        assert summary["slowest_suite"] == "n2"
        assert "- n2: 8/9" in tracker.generate_performance_report()

    def test_timed_block_and_kernel_totals(self, tracker):
        with tracker.timed("rank", m=3):
            pass
        with tracker.timed("rank", m=4):
            pass
        assert tracker.metrics[-1].context == {"m": 4}
        totals = tracker.kernel_totals()
        assert totals["rank_duration"]["calls"] == 2
        assert "## Kernels" in tracker.generate_performance_report()

    def test_reset(self, tracker):
        tracker.record_metric("x", 1.0)
        tracker.reset()
        assert tracker.as_dict() == {"suites": [], "metrics": []}

    def test_benchmark_speed(self):
        @benchmark_speed("test_lib_op")
        def work():
            return 3

        assert work() == 3
        assert perf_tracker.metrics[-1].name == "test_lib_op_speed"


class TestTableEmitter:
    """JSON, CSV and LaTeX output"""

    @pytest.fixture
    def payload(self):
        return envelope("hh", {"m": 3}, {"entries": [{"n": 0, "group": {"free_rank": 2, "torsion": []}}]})

    def test_envelope(self, payload):
        assert set(payload) == {"command", "params", "result", "timestamp"}
        assert set(strip_timestamp(payload)) == {"command", "params", "result"}

    def test_rows(self):
        assert rows_of([5, 6]) == [{"index": 0, "value": 5}, {"index": 1, "value": 6}]
        assert rows_of({"a": 1, "b": {"c": [1, 2]}}) == [{"a": 1, "b.c": "1 2"}]
        assert rows_of(7) == [{"value": 7}]

    def test_json(self, payload):
        text = emit(payload, "json")
        assert text.endswith("\n")
        assert json.loads(text)["params"] == {"m": 3}

    def test_csv(self, payload):
        assert to_csv(payload) == "n,group.free_rank,group.torsion\n0,2,\n"

    def test_latex(self, payload):
        text = to_latex(payload)
        assert r"\begin{tabular}{rrr}" in text
        assert r"group.free\_rank" in text
        assert text.rstrip().endswith(r"\end{tabular}")

    def test_unknown_format(self, payload):
        with pytest.raises(ValueError):
            emit(payload, "xml")
