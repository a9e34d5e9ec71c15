from __future__ import annotations

from collections import deque
from concurrent.futures import ThreadPoolExecutor
from typing import Callable, Iterable, Iterator, TypeVar

T = TypeVar("T")
R = TypeVar("R")


def ordered_map(fn: Callable[[T], R], items: Iterable[T], workers: int,
                on_error: Callable[[T, BaseException], BaseException] = None) -> Iterator[R]:
    """Apply ``fn`` with at most ``workers`` calls in flight, yielding results in input order.

    On failure, every earlier result is yielded first, then the error (passed
    through ``on_error`` if given) is raised and outstanding work cancelled.
    """
    if workers < 1:
        raise ValueError("workers must be >= 1")
    if workers == 1:
        for item in items:
            try:
                result = fn(item)
            except Exception as exc:
                if on_error is None:
                    raise
                raise on_error(item, exc) from exc
            yield result
        return
    it = iter(items)
    with ThreadPoolExecutor(max_workers=workers) as pool:
        pending: deque = deque()
        try:
            exhausted = False
            while True:
                while not exhausted and len(pending) < workers:
                    try:
                        item = next(it)
                    except StopIteration:
                        exhausted = True
                        break
                    pending.append((item, pool.submit(fn, item)))
                if not pending:
                    return
                item, fut = pending.popleft()
                try:
                    result = fut.result()
                except Exception as exc:
                    if on_error is None:
                        raise
                    raise on_error(item, exc) from exc
                yield result
        finally:
            for _, fut in pending:
                fut.cancel()
