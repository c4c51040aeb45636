"""Portable, seedable random number generation.

The generator is xoshiro256** seeded through splitmix64, so a 64-bit seed
fully determines the stream and the algorithm can be reproduced in any
language from its published description.  `splitmix64` is also used on its
own to derive independent per-run seeds from a master seed.
"""

from __future__ import annotations

import numpy as np

_MASK64 = 0xFFFFFFFFFFFFFFFF
_SPLITMIX_GAMMA = 0x9E3779B97F4A7C15


def splitmix64(x: int) -> int:
    """One splitmix64 step: advance state ``x`` by the golden gamma and scramble.

    Pure function of the input; used for seed derivation
    (``run_seed = splitmix64(master_seed XOR run_index)``).
    """
    x = (x + _SPLITMIX_GAMMA) & _MASK64
    z = x
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & _MASK64
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & _MASK64
    return (z ^ (z >> 31)) & _MASK64


def seed_state(seed: int) -> np.ndarray:
    """Expand a 64-bit seed into the four xoshiro256** state words."""
    state = np.empty(4, dtype=np.uint64)
    x = seed & _MASK64
    for k in range(4):
        x = (x + _SPLITMIX_GAMMA) & _MASK64
        z = x
        z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & _MASK64
        z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & _MASK64
        state[k] = (z ^ (z >> 31)) & _MASK64
    if not state.any():  # all-zero state is the one forbidden xoshiro state
        state[0] = 1
    return state


class RngStream:
    """xoshiro256** stream; identical seeds give identical sequences.

    The state lives in a 4-word uint64 array so compiled kernels can advance
    the same stream in place.
    """

    algorithm = "xoshiro256** seeded via splitmix64"

    def __init__(self, seed: int):
        self.seed = seed & _MASK64
        self.state = seed_state(seed)

    def next_uint64(self) -> int:
        from ._kernels import next_u64

        return int(next_u64(self.state))

    def random(self) -> float:
        """Uniform float64 in [0, 1) using the top 53 bits."""
        from ._kernels import next_f64

        return float(next_f64(self.state))

    def randbelow(self, bound: int) -> int:
        """Uniform integer in [0, bound) by rejection sampling, bound >= 1."""
        if bound < 1:
            raise ValueError("bound must be >= 1")
        from ._kernels import randbelow

        return int(randbelow(self.state, np.uint64(bound)))

    def copy(self) -> "RngStream":
        dup = object.__new__(RngStream)
        dup.seed = self.seed
        dup.state = self.state.copy()
        return dup
