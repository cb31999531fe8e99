"""Node task scheduling with thread-safe concurrency control.

Simulated nodes run their tasks (local clustering, group merges) on a
thread pool. The queue caps how many run at once with a semaphore and
tracks queue state with lock-protected counters. Results are gathered in
submission order, so what a level produces never depends on scheduling.
"""

import logging
import threading
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Callable, Iterable, Optional, TypeVar

from ddc_tools.engine.constants import DEFAULT_MAX_THREADS, MAX_THREADS

logger = logging.getLogger(__name__)

T = TypeVar("T")
R = TypeVar("R")


@dataclass
class QueueStats:
    """Task queue statistics snapshot.

    All values are captured atomically.

    Attributes:
        active: Number of currently running tasks
        queued: Number of tasks waiting for a slot
        completed: Number of tasks finished so far
        max_concurrent: Maximum allowed concurrent tasks
    """

    active: int
    queued: int
    completed: int
    max_concurrent: int


class NodeTaskQueue:
    """Thread-safe runner for independent node tasks.

    Typical usage:
        >>> queue = NodeTaskQueue(max_concurrent=4)
        >>> models = queue.map(run_leaf, fragments)

    or, slot by slot:
        >>> queue.mark_queued()
        >>> queue.acquire()
        >>> queue.mark_started()
        >>> try:
        ...     run_task()
        ...     queue.mark_completed()
        ... finally:
        ...     queue.release()

    Thread Safety:
        All public methods are thread-safe and can be called from
        multiple threads simultaneously.

    Attributes:
        max_concurrent: Maximum number of simultaneously running tasks
    """

    def __init__(self, max_concurrent: int = DEFAULT_MAX_THREADS) -> None:
        """Initialize task queue.

        Args:
            max_concurrent: Maximum simultaneous tasks (1-64)

        Raises:
            ValueError: If max_concurrent is not in valid range
        """
        if max_concurrent < 1:
            raise ValueError("max_concurrent must be at least 1")
        if max_concurrent > MAX_THREADS:
            raise ValueError(f"max_concurrent should not exceed {MAX_THREADS}")

        self.max_concurrent = max_concurrent
        self._semaphore = threading.Semaphore(max_concurrent)
        self._lock = threading.Lock()
        self._active = 0
        self._queued = 0
        self._completed = 0

    def mark_queued(self) -> None:
        """Count a task as waiting for a slot."""
        with self._lock:
            self._queued += 1

    def mark_started(self) -> None:
        """Move a task from queued to active.

        Raises:
            RuntimeError: If called when no tasks are queued
        """
        with self._lock:
            if self._queued <= 0:
                raise RuntimeError("Cannot start task: nothing queued")
            self._queued -= 1
            self._active += 1

    def mark_completed(self) -> None:
        """Mark an active task as finished.

        Raises:
            RuntimeError: If called when no tasks are active
        """
        with self._lock:
            if self._active <= 0:
                raise RuntimeError("Cannot complete task: nothing active")
            self._active -= 1
            self._completed += 1

    def mark_failed(self) -> None:
        """Drop an active task that raised."""
        with self._lock:
            if self._active <= 0:
                raise RuntimeError("Cannot fail task: nothing active")
            self._active -= 1

    def acquire(self, blocking: bool = True, timeout: Optional[float] = None) -> bool:
        """Acquire a task slot. Must be paired with release()."""
        return self._semaphore.acquire(blocking=blocking, timeout=timeout)

    def release(self) -> None:
        """Release a task slot; call from a finally block."""
        self._semaphore.release()

    def run(self, fn: Callable[[T], R], item: T) -> R:
        """Run one task inside a slot, keeping the counters consistent."""
        self.mark_queued()
        self.acquire()
        try:
            self.mark_started()
            try:
                result = fn(item)
            except BaseException:
                self.mark_failed()
                raise
            self.mark_completed()
            return result
        finally:
            self.release()

    def map(self, fn: Callable[[T], R], items: Iterable[T]) -> list[R]:
        """Run fn over items concurrently and return results in input order.

        If tasks fail, the exception of the earliest failing item (in input
        order) is re-raised after the pool has drained.
        """
        items = list(items)
        if not items:
            return []
        if self.max_concurrent == 1 or len(items) == 1:
            return [self.run(fn, item) for item in items]

        workers = min(self.max_concurrent, len(items))
        with ThreadPoolExecutor(max_workers=workers, thread_name_prefix="ddc-node") as pool:
            futures = [pool.submit(self.run, fn, item) for item in items]
            return [future.result() for future in futures]

    def get_stats(self) -> QueueStats:
        """Consistent snapshot of the queue state."""
        with self._lock:
            return QueueStats(
                active=self._active,
                queued=self._queued,
                completed=self._completed,
                max_concurrent=self.max_concurrent,
            )

    @property
    def active_count(self) -> int:
        with self._lock:
            return self._active

    @property
    def queued_count(self) -> int:
        with self._lock:
            return self._queued

    @property
    def completed_count(self) -> int:
        with self._lock:
            return self._completed

    def __repr__(self) -> str:
        stats = self.get_stats()
        return (
            f"NodeTaskQueue(active={stats.active}, "
            f"queued={stats.queued}, "
            f"completed={stats.completed}, "
            f"max={stats.max_concurrent})"
        )
