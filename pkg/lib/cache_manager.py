"""
Cache Manager - In-memory memo for complexes, block differentials and reducers
"""

import hashlib
import time
import functools
from collections import Counter
from typing import Any, Callable, Dict, Hashable, Optional
from dataclasses import dataclass
import logging

from lib.config import settings

logger = logging.getLogger(__name__)

_MISSING = object()


@dataclass
class CacheEntry:
    key: str
    value: Any
    namespace: str
    timestamp: float
    access_count: int
    compute_ms: float


class CacheManager:
    """Bounded memo keyed by the parameters of an exact computation.

    Values are immutable (matrices, bases, pages), so sharing them between
    callers is safe. Nothing is written to disk.
    """

    def __init__(self, max_entries: int = 512, enabled: bool = True):
        self.max_entries = max_entries
        self.enabled = enabled
        self.memory_cache: Dict[str, CacheEntry] = {}
        self.hit_count = 0
        self.miss_count = 0
        self.time_saved_ms = 0.0

    def _generate_key(self, data: Any) -> str:
        """Digest of the repr of a parameter tuple"""
        content = data if isinstance(data, str) else repr(data)
        return hashlib.sha256(content.encode()).hexdigest()[:16]

    def get(self, key: str, default: Any = None) -> Any:
        entry = self.memory_cache.get(key)
        if entry is None:
            self.miss_count += 1
            logger.debug(f"Cache MISS: {key}")
            return default

        entry.access_count += 1
        self.hit_count += 1
        self.time_saved_ms += entry.compute_ms
        logger.debug(f"Cache HIT: {entry.namespace}/{key} ({entry.access_count} hits)")
        return entry.value

    def set(self, key: str, value: Any, compute_ms: float = 0.0, namespace: str = "default"):
        if not self.enabled:
            return
        self.memory_cache[key] = CacheEntry(key, value, namespace, time.time(), 0, compute_ms)
        logger.debug(f"Cache SET: {namespace}/{key} ({compute_ms:.1f}ms to compute)")
        if len(self.memory_cache) > self.max_entries:
            self.optimize_cache()

    def invalidate(self, namespace: str) -> int:
        """Drop every entry of one namespace; returns how many went"""
        doomed = [k for k, e in self.memory_cache.items() if e.namespace == namespace]
        for key in doomed:
            del self.memory_cache[key]
        return len(doomed)

    def clear_cache(self):
        self.memory_cache.clear()
        self.hit_count = 0
        self.miss_count = 0
        self.time_saved_ms = 0.0
        logger.info("Cache cleared")

    def get_cache_stats(self) -> Dict[str, Any]:
        lookups = self.hit_count + self.miss_count
        hit_rate = 100.0 * self.hit_count / lookups if lookups else 0.0
        return {
            "hit_count": self.hit_count,
            "miss_count": self.miss_count,
            "hit_rate_percent": f"{hit_rate:.1f}%",
            "time_saved_ms": round(self.time_saved_ms, 1),
            "cache_entries": len(self.memory_cache),
            "namespaces": dict(Counter(e.namespace for e in self.memory_cache.values())),
        }

    def optimize_cache(self):
        """Drop the least-accessed quarter once the memo is over capacity"""
        if len(self.memory_cache) <= self.max_entries:
            return

        coldest = sorted(self.memory_cache.values(), key=lambda e: (e.access_count, e.timestamp))
        evicted = coldest[: max(1, len(coldest) // 4)]
        for entry in evicted:
            del self.memory_cache[entry.key]

        logger.info(f"Evicted {len(evicted)} cold entries, {len(self.memory_cache)} remain")


# Global cache manager
cache_manager = CacheManager(
    max_entries=settings.cache_max_entries, enabled=settings.cache_enabled
)


def _namespace(raw_key: Hashable) -> str:
    if isinstance(raw_key, tuple) and raw_key and isinstance(raw_key[0], str):
        return raw_key[0]
    return "default"


def cached_result(cache_key_func: Optional[Callable[..., Any]] = None):
    """Memoize a pure function in the global cache.

    `cache_key_func` maps the call's arguments to a tuple whose first element
    names the namespace, e.g. ("bar_engine", m).
    """

    def decorator(func):
        @functools.wraps(func)
        def wrapper(*args, **kwargs):
            if not cache_manager.enabled:
                return func(*args, **kwargs)

            if cache_key_func:
                raw_key = cache_key_func(*args, **kwargs)
            else:
                raw_key = (func.__qualname__, func.__module__, args, tuple(sorted(kwargs.items())))
            key = cache_manager._generate_key(raw_key)

            hit = cache_manager.get(key, _MISSING)
            if hit is not _MISSING:
                return hit

            start = time.perf_counter()
            value = func(*args, **kwargs)
            cache_manager.set(key, value, (time.perf_counter() - start) * 1000, _namespace(raw_key))
            return value

        return wrapper

    return decorator
