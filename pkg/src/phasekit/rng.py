"""Seed derivation for reproducible, scheduling-independent experiments.

Every randomized trial gets its own 64-bit seed derived from the master
seed and the trial's identity, so results do not depend on execution
order or worker count.  The derivation rule is fixed:

    state = master_seed
    for each part:                      # strings hashed with FNV-1a 64
        state = splitmix64(state XOR as_u64(part))

splitmix64 is the finalizer from Steele/Lea/Flood (2014); it is a
bijection on 64-bit integers, so distinct inputs never collide for a
single absorption step.  Generators are numpy PCG64 instances, whose
bit stream is fixed by numpy's stream-compatibility guarantee.
"""

import numpy as np

_MASK64 = 0xFFFFFFFFFFFFFFFF


def splitmix64(x: int) -> int:
    """One splitmix64 mixing step (64-bit avalanche)."""
    x = (x + 0x9E3779B97F4A7C15) & _MASK64
    x = ((x ^ (x >> 30)) * 0xBF58476D1CE4E5B9) & _MASK64
    x = ((x ^ (x >> 27)) * 0x94D049BB133111EB) & _MASK64
    return x ^ (x >> 31)


def fnv1a64(text: str) -> int:
    """FNV-1a hash of a UTF-8 string, for absorbing string identifiers."""
    h = 0xCBF29CE484222325
    for byte in text.encode("utf-8"):
        h = ((h ^ byte) * 0x100000001B3) & _MASK64
    return h


def derive_seed(master_seed: int, *parts) -> int:
    """Derive a 64-bit stream seed from a master seed and identity parts.

    Parts may be ints or strings; strings are hashed with FNV-1a before
    absorption.  The same (master_seed, parts) always yields the same
    seed on every platform.
    """
    state = master_seed & _MASK64
    for part in parts:
        if isinstance(part, str):
            value = fnv1a64(part)
        else:
            value = int(part) & _MASK64
        state = splitmix64(state ^ value)
    return state


def make_generator(seed: int) -> np.random.Generator:
    """numpy Generator over PCG64 seeded with a 64-bit integer."""
    return np.random.Generator(np.random.PCG64(seed & _MASK64))
