"""ADWIN change detector (adaptive windowing with exponential histograms).

Keeps a variable-length window of recent values compressed into buckets of
exponentially growing size.  Whenever the means of two adjacent sub-windows
differ beyond a Hoeffding-style bound, the older part is dropped and the
detector reports a change.
"""

from __future__ import annotations

import math


class _Bucket:
    __slots__ = ("size", "total", "variance")

    def __init__(self, size: int, total: float, variance: float):
        self.size = size
        self.total = total
        self.variance = variance

    @property
    def mean(self) -> float:
        return self.total / self.size


class Adwin:
    """Adaptive sliding window over a stream of bounded values.

    ``update`` returns True when the window was shrunk, i.e. a distribution
    change was detected.  ``estimate`` is the mean of the current window.
    """

    MAX_BUCKETS = 5
    MIN_SUBWINDOW = 5
    MIN_WIDTH = 16

    def __init__(self, delta: float = 0.002, clock: int = 32):
        self.delta = delta
        self.clock = clock
        # rows[i] holds buckets of 2**i values, newest first within a row
        self.rows: list[list[_Bucket]] = [[]]
        self.width = 0
        self.total = 0.0
        self._variance_m2 = 0.0  # sum of squared deviations over the window
        self._ticks = 0
        self.n_detections = 0

    @property
    def estimate(self) -> float:
        return self.total / self.width if self.width else 0.0

    @property
    def variance(self) -> float:
        return self._variance_m2 / self.width if self.width else 0.0

    def update(self, value: float) -> bool:
        self._insert(value)
        self._ticks += 1
        if self._ticks % self.clock == 0 and self.width > self.MIN_WIDTH:
            return self._detect_and_shrink()
        return False

    # -- exponential histogram maintenance ---------------------------------

    def _insert(self, value: float) -> None:
        if self.width > 0:
            mean = self.total / self.width
            self._variance_m2 += (self.width / (self.width + 1)) * (value - mean) ** 2
        self.width += 1
        self.total += value
        self.rows[0].insert(0, _Bucket(1, value, 0.0))
        self._compress()

    def _compress(self) -> None:
        i = 0
        while i < len(self.rows):
            row = self.rows[i]
            if len(row) <= self.MAX_BUCKETS:
                break
            b = row.pop()  # oldest
            a = row.pop()  # second oldest
            n = a.size + b.size
            d = a.mean - b.mean
            merged = _Bucket(
                n,
                a.total + b.total,
                a.variance + b.variance + a.size * b.size * d * d / n,
            )
            if i + 1 == len(self.rows):
                self.rows.append([])
            self.rows[i + 1].insert(0, merged)
            i += 1

    def _oldest_row(self) -> int:
        for i in range(len(self.rows) - 1, -1, -1):
            if self.rows[i]:
                return i
        return -1

    def _drop_oldest(self) -> None:
        i = self._oldest_row()
        bucket = self.rows[i].pop()
        self.width -= bucket.size
        self.total -= bucket.total
        if self.width > 0:
            mean = self.total / self.width
            d = bucket.mean - mean
            self._variance_m2 -= bucket.variance + \
                bucket.size * self.width / (bucket.size + self.width) * d * d
            self._variance_m2 = max(self._variance_m2, 0.0)
        else:
            self._variance_m2 = 0.0

    def _buckets_old_to_new(self):
        for i in range(len(self.rows) - 1, -1, -1):
            for bucket in reversed(self.rows[i]):
                yield bucket

    # -- change detection ---------------------------------------------------

    def _detect_and_shrink(self) -> bool:
        detected = False
        shrinking = True
        while shrinking:
            shrinking = False
            n0 = 0
            sum0 = 0.0
            buckets = list(self._buckets_old_to_new())
            for bucket in buckets[:-1]:
                n0 += bucket.size
                sum0 += bucket.total
                n1 = self.width - n0
                if n0 < self.MIN_SUBWINDOW or n1 < self.MIN_SUBWINDOW:
                    continue
                u0 = sum0 / n0
                u1 = (self.total - sum0) / n1
                if self._cut(n0, n1, abs(u0 - u1)):
                    detected = True
                    shrinking = self.width > self.MIN_WIDTH
                    self._drop_oldest()
                    break
        if detected:
            self.n_detections += 1
        return detected

    def _cut(self, n0: int, n1: int, diff: float) -> bool:
        delta_prime = self.delta / max(math.log(self.width), 1.0)
        log_term = math.log(2.0 / delta_prime)
        m = 1.0 / (n0 - self.MIN_SUBWINDOW + 1) + 1.0 / (n1 - self.MIN_SUBWINDOW + 1)
        eps = math.sqrt(2.0 * m * self.variance * log_term) + (2.0 / 3.0) * m * log_term
        return diff > eps
