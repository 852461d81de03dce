"""Portable 64-bit PRNG so synthetic fixtures are bit-identical everywhere.

Seeding: the integer seed (taken mod 2**64) is passed once through
SplitMix64 (increment 0x9E3779B97F4A7C15, multipliers 0xBF58476D1CE4E5B9
and 0x94D049BB133111EB, shifts 30/27/31); a zero result is replaced by
0x9E3779B97F4A7C15.

Generator: xorshift64* (shifts 12, 25, 27; output multiplier
0x2545F4914F6CDD1D).

Doubles: ``(next_u64() >> 11) * 2**-53``, uniform on [0, 1).

Gaussians: Box-Muller, cosine branch only, from two fresh uniforms
``u1, u2``: ``sqrt(-2 ln(1 - u1)) * cos(2 pi u2)``.
"""

import math

MASK64 = (1 << 64) - 1
GOLDEN = 0x9E3779B97F4A7C15
MULTIPLIER = 0x2545F4914F6CDD1D


def splitmix64(x):
    z = (x + GOLDEN) & MASK64
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & MASK64
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & MASK64
    return z ^ (z >> 31)


class XorShift64Star:
    def __init__(self, seed):
        state = splitmix64(int(seed) & MASK64)
        self.state = state or GOLDEN

    def next_u64(self):
        x = self.state
        x ^= x >> 12
        x ^= (x << 25) & MASK64
        x ^= x >> 27
        self.state = x
        return (x * MULTIPLIER) & MASK64

    def uniform(self):
        return (self.next_u64() >> 11) * (1.0 / (1 << 53))

    def gauss(self):
        u1 = self.uniform()
        u2 = self.uniform()
        return math.sqrt(-2.0 * math.log(1.0 - u1)) * math.cos(2.0 * math.pi * u2)
