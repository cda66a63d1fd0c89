from __future__ import annotations

import random

_MASK64 = 0xFFFFFFFFFFFFFFFF


def splitmix64(x: int) -> int:
    x = (x + 0x9E3779B97F4A7C15) & _MASK64
    x = ((x ^ (x >> 30)) * 0xBF58476D1CE4E5B9) & _MASK64
    x = ((x ^ (x >> 27)) * 0x94D049BB133111EB) & _MASK64
    return x ^ (x >> 31)


def trial_seed(seed: int, trial: int) -> int:
    """64-bit seed for one trial: mix(seed ⊕ trial). Independent of which worker runs it."""
    return splitmix64((seed & _MASK64) ^ splitmix64(trial & _MASK64))


def trial_rng(seed: int, trial: int) -> random.Random:
    return random.Random(trial_seed(seed, trial))
