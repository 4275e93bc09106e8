"""Seeded random streams.

All sampling draws go through numpy's Philox counter-based generator, whose
bounded-integer path (used by permutation) is integer-only. Child streams are
derived from ``SeedSequence([seed, index])`` so adding a slice or a cell never
perturbs the streams of the existing ones.
"""

import numpy as np


def make_rng(seed: int) -> np.random.Generator:
    return np.random.Generator(np.random.Philox(seed))


def derive_seed(seed: int, index: int) -> int:
    return int(np.random.SeedSequence([seed, index]).generate_state(1, dtype=np.uint64)[0])
