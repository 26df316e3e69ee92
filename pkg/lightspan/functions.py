"""General-purpose routines.

It seemed a shame for every module to carry its own copy of seed
plumbing and tolerance checks, so this small module holds them instead.

"""
import hashlib
from math import sqrt

import numpy as np

REL_TOL = 1e-9

def derive_seed(seed, *labels):
    """Return a 64-bit seed derived from a master seed and purpose labels.

    The derivation hashes the text ``"<seed>/<label>/<label>..."`` with
    BLAKE2b and keeps the first eight bytes, little-endian, so any
    language with a BLAKE2b routine can rebuild the same stream tree.

    >>> derive_seed(7, 'build') == derive_seed(7, 'build')
    True
    >>> derive_seed(7, 'build') == derive_seed(7, 'eval')
    False

    """
    text = '/'.join([str(int(seed))] + [str(label) for label in labels])
    digest = hashlib.blake2b(text.encode('ascii'), digest_size=8).digest()
    return int.from_bytes(digest, 'little')

def derive_rng(seed, *labels):
    """Return a NumPy generator for the labeled sub-stream of ``seed``."""
    return np.random.default_rng(derive_seed(seed, *labels))

def spawn_base(rng):
    """Draw a base integer from ``rng`` for a family of child streams."""
    return int(rng.integers(0, 2**63 - 1))

def child_rng(base, *indices):
    """Return the child generator for ``indices`` below ``base``.

    Children depend only on ``(base, indices)``, never on the order in
    which they are requested, so batches may be sampled in any order.

    """
    entropy = [int(base)] + [int(i) for i in indices]
    return np.random.default_rng(np.random.SeedSequence(entropy))

def binomial_stderr(p, trials):
    """Return the standard error of a frequency ``p`` measured over ``trials``.

    >>> round(binomial_stderr(0.5, 100), 6)
    0.05

    """
    return sqrt(max(p * (1.0 - p), 0.0) / trials)

def within(value, bound, rel=REL_TOL):
    """Whether ``value <= bound`` allowing relative slack ``rel``.

    >>> within(1.0 + 1e-12, 1.0)
    True
    >>> within(1.001, 1.0)
    False

    """
    return value <= bound * (1.0 + rel)
