"""Barrier-synchronized in-process worker pool.

Workloads spawn exactly `workers` threads, joined before the run finishes.
The body receives (worker_id, barrier); barrier waits are the documented
synchronization points. A failing worker aborts the barrier so its peers
cannot deadlock, and the first exception is re-raised in the caller.
"""

from __future__ import annotations

import threading
from typing import Callable


def run_workers(workers: int, body: Callable[[int, threading.Barrier], None]) -> None:
    barrier = threading.Barrier(workers)
    errors: list[BaseException] = []
    lock = threading.Lock()

    def trampoline(worker_id: int) -> None:
        try:
            body(worker_id, barrier)
        except threading.BrokenBarrierError:
            pass  # a peer failed; its error is reported below
        except BaseException as exc:  # noqa: BLE001 - propagated to caller
            with lock:
                errors.append(exc)
            barrier.abort()

    threads = [
        threading.Thread(target=trampoline, args=(w,), name=f"granscale-worker-{w}")
        for w in range(workers)
    ]
    for t in threads:
        t.start()
    for t in threads:
        t.join()
    if errors:
        raise errors[0]
