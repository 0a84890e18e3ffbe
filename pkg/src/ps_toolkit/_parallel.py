"""Deterministic chunked execution over integer ranges."""

from __future__ import annotations

import os
from concurrent.futures import ProcessPoolExecutor
from typing import Callable, Sequence, TypeVar

T = TypeVar("T")

# below this many items per worker the pool costs more than it saves
MIN_CHUNK = 20000


def default_workers() -> int:
    return os.cpu_count() or 1


def split_range(start: int, stop: int, parts: int) -> list[tuple[int, int]]:
    """Split [start, stop) into at most ``parts`` contiguous pieces."""
    total = max(0, stop - start)
    parts = max(1, min(parts, total // MIN_CHUNK or 1))
    step = -(-total // parts) if total else 0
    return [(lo, min(lo + step, stop)) for lo in range(start, stop, step)] if total else []


def map_ranges(func: Callable[..., T], start: int, stop: int, workers: int, *args) -> list[T]:
    """Apply ``func(lo, hi, *args)`` to consecutive chunks, results in range order."""
    chunks = split_range(start, stop, workers)
    if len(chunks) <= 1 or workers <= 1:
        return [func(lo, hi, *args) for lo, hi in chunks]
    with ProcessPoolExecutor(max_workers=min(workers, len(chunks))) as pool:
        futures = [pool.submit(func, lo, hi, *args) for lo, hi in chunks]
        return [f.result() for f in futures]


def map_items(func: Callable[[Sequence], T], items: Sequence, workers: int) -> list[T]:
    """Apply ``func`` to contiguous slices of ``items``, results in order."""
    chunks = split_range(0, len(items), workers)
    if len(chunks) <= 1 or workers <= 1:
        return [func(items[lo:hi]) for lo, hi in chunks]
    with ProcessPoolExecutor(max_workers=min(workers, len(chunks))) as pool:
        futures = [pool.submit(func, items[lo:hi]) for lo, hi in chunks]
        return [f.result() for f in futures]
