"""In-memory cache of local network scores"""

import threading
from dataclasses import dataclass
from typing import Dict, FrozenSet, Optional, Tuple

ScoreKey = Tuple[str, FrozenSet[str]]


@dataclass
class CacheStats:
    """Hit/miss accounting"""
    hits: int = 0
    misses: int = 0

    @property
    def hit_rate(self) -> float:
        total = self.hits + self.misses
        return self.hits / total if total else 0.0


class LocalScoreCache:
    """
    Thread-safe map from (node, parent set) to local score.

    Scores are pure functions of the dataset, so entries never expire;
    one cache belongs to one dataset and criterion.
    """

    def __init__(self):
        self._cache: Dict[ScoreKey, float] = {}
        self._lock = threading.Lock()
        self.stats = CacheStats()

    def get(self, node: str, parents: FrozenSet[str]) -> Optional[float]:
        """Cached local score or None"""
        with self._lock:
            value = self._cache.get((node, parents))
            if value is None:
                self.stats.misses += 1
            else:
                self.stats.hits += 1
            return value

    def set(self, node: str, parents: FrozenSet[str], value: float) -> None:
        with self._lock:
            self._cache[(node, parents)] = value

    def __len__(self) -> int:
        with self._lock:
            return len(self._cache)
