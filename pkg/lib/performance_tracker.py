"""
Performance Tracking - Wall-time metrics for verification suites and heavy kernels
"""

import functools
import itertools
import logging
import time
from collections import defaultdict
from contextlib import contextmanager
from dataclasses import asdict, dataclass, field
from typing import Any, Dict, Iterator, List, Optional

logger = logging.getLogger(__name__)


@dataclass
class PerformanceMetric:
    name: str
    value: float
    unit: str = "ms"
    recorded_at: float = field(default_factory=time.time)
    context: Dict[str, Any] = field(default_factory=dict)


@dataclass
class SuiteTiming:
    suite: str
    wall_ms: float
    checks: int
    passed: int

    @property
    def failed(self) -> int:
        return self.checks - self.passed


class PerformanceTracker:
    """Collects timings of verify suites and of the exact linear-algebra kernels"""

    def __init__(self):
        self.metrics: List[PerformanceMetric] = []
        self.suite_timings: List[SuiteTiming] = []
        self._open: Dict[str, float] = {}
        self._ids = itertools.count(1)

    def start_timer(self, operation: str) -> str:
        timer_id = f"{operation}#{next(self._ids)}"
        self._open[timer_id] = time.perf_counter()
        return timer_id

    def end_timer(self, timer_id: str, operation: str, context: Optional[Dict[str, Any]] = None) -> float:
        """Close a timer and record `<operation>_duration`; unknown ids give 0.0"""
        started = self._open.pop(timer_id, None)
        if started is None:
            logger.warning(f"✗ No open timer {timer_id}")
            return 0.0

        elapsed_ms = (time.perf_counter() - started) * 1000
        self.record_metric(f"{operation}_duration", elapsed_ms, "ms", context)
        return elapsed_ms

    @contextmanager
    def timed(self, operation: str, **context: Any) -> Iterator[None]:
        timer_id = self.start_timer(operation)
        try:
            yield
        finally:
            self.end_timer(timer_id, operation, context)

    def record_metric(self, name: str, value: float, unit: str = "", context: Optional[Dict[str, Any]] = None):
        self.metrics.append(PerformanceMetric(name, value, unit, context=dict(context or {})))

    def record_suite(self, timing: SuiteTiming):
        self.suite_timings.append(timing)
        marker = "✓" if timing.failed == 0 else "✗"
        logger.info(f"{marker} {timing.suite}: {timing.passed}/{timing.checks} in {timing.wall_ms:.1f}ms")

    def kernel_totals(self) -> Dict[str, Dict[str, float]]:
        """Call count, total and worst time per metric name"""
        grouped: Dict[str, List[float]] = defaultdict(list)
        for metric in self.metrics:
            if metric.unit == "ms":
                grouped[metric.name].append(metric.value)
        return {
            name: {"calls": len(values), "total_ms": round(sum(values), 1), "max_ms": round(max(values), 1)}
            for name, values in grouped.items()
        }

    def get_session_summary(self) -> Dict[str, Any]:
        if not self.suite_timings:
            return {"status": "No suite data available"}

        slowest = max(self.suite_timings, key=lambda t: t.wall_ms)
        return {
            "total_wall_ms": round(sum(t.wall_ms for t in self.suite_timings), 1),
            "suites_run": len(self.suite_timings),
            "checks_run": sum(t.checks for t in self.suite_timings),
            "checks_passed": sum(t.passed for t in self.suite_timings),
            "slowest_suite": slowest.suite,
        }

    def generate_performance_report(self) -> str:
        """Markdown digest of suites and kernels"""
        summary = self.get_session_summary()
        lines = [
            "# Verification Performance Report",
            "",
            f"Checks passed: {summary.get('checks_passed', 0)}/{summary.get('checks_run', 0)}"
            f" over {summary.get('total_wall_ms', 0.0)}ms",
            "",
            "## Suites",
        ]
        lines += [f"- {t.suite}: {t.passed}/{t.checks} in {t.wall_ms:.1f}ms" for t in self.suite_timings]

        kernels = self.kernel_totals()
        if kernels:
            lines += ["", "## Kernels"]
            for name, row in sorted(kernels.items(), key=lambda kv: -kv[1]["total_ms"]):
                lines.append(f"- {name}: {row['calls']} calls, {row['total_ms']}ms total, {row['max_ms']}ms worst")

        return "\n".join(lines) + "\n"

    def as_dict(self) -> Dict[str, Any]:
        return {
            "suites": [asdict(t) for t in self.suite_timings],
            "metrics": [asdict(m) for m in self.metrics],
        }

    def reset(self):
        self.metrics.clear()
        self.suite_timings.clear()
        self._open.clear()


perf_tracker = PerformanceTracker()


def benchmark_speed(operation_name: str):
    """Record the wall time of every call as `<operation_name>_speed`"""

    def decorator(func):
        @functools.wraps(func)
        def wrapper(*args, **kwargs):
            started = time.perf_counter()
            try:
                return func(*args, **kwargs)
            finally:
                perf_tracker.record_metric(
                    f"{operation_name}_speed",
                    (time.perf_counter() - started) * 1000,
                    "ms",
                    {"function": func.__qualname__},
                )

        return wrapper

    return decorator
