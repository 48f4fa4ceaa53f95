"""Deterministic random streams shared by every simulation path.

All sampling in this package draws from a SplitMix64 stream rather than
``random`` or numpy generators.  The reason is reproducibility across
implementations: the compiled Monte Carlo kernel re-implements the exact
same integer recurrence and float conversion in C, so a run with a given
seed produces bit-identical draws no matter which backend executes it.

Draw conventions (mirrored by the kernel, do not change casually):
  * ``random()`` maps the top 53 bits of the next u64 to [0, 1).
  * ``randbelow(n)`` is ``min(int(random() * n), n - 1)``.
  * substreams are derived with :func:`substream_seed`.
"""

from __future__ import annotations

_MASK64 = (1 << 64) - 1
_GOLDEN = 0x9E3779B97F4A7C15
_INV_2_53 = 2.0**-53


def mix64(z: int) -> int:
    """SplitMix64 finalizer: a 64-bit bijective hash."""
    z &= _MASK64
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & _MASK64
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & _MASK64
    return z ^ (z >> 31)


def substream_seed(master_seed: int, index: int) -> int:
    """Seed for the ``index``-th child stream of ``master_seed``.

    Used to give every Monte Carlo trial its own stream so that results do
    not depend on execution order or parallel scheduling.
    """
    if index < 0:
        raise ValueError("substream index must be nonnegative")
    return mix64((master_seed & _MASK64) ^ mix64(((index + 1) * _GOLDEN) & _MASK64))


class SplitMix64:
    """Minimal deterministic RNG with a fixed, documented draw discipline."""

    __slots__ = ("_state",)

    def __init__(self, seed: int):
        self._state = seed & _MASK64

    def next_u64(self) -> int:
        self._state = (self._state + _GOLDEN) & _MASK64
        return mix64(self._state)

    def random(self) -> float:
        """Uniform float in [0, 1) with 53 bits of precision."""
        return (self.next_u64() >> 11) * _INV_2_53

    def randbelow(self, n: int) -> int:
        """Uniform integer in [0, n). Consumes exactly one draw."""
        if n <= 0:
            raise ValueError("randbelow needs n >= 1")
        v = int(self.random() * n)
        return v if v < n else n - 1

    def shuffle(self, items: list) -> None:
        """In-place Fisher-Yates shuffle; consumes len(items) - 1 draws."""
        for i in range(len(items) - 1, 0, -1):
            j = self.randbelow(i + 1)
            items[i], items[j] = items[j], items[i]
