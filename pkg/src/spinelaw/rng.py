"""Counter-based random streams keyed by (master seed, replication, particle).

Every particle owns a 64-bit key derived from the master seed, the
replication index, a purpose tag, and the particle's child-index sequence
from the root.  Draw ``j`` of a particle is a pure function of
``(key, j)``, so the values a particle receives do not depend on the
order in which particles are simulated, on how replications are batched,
on the worker count, or on the simulation horizon.  This is what makes
tree construction reproducible under parallel scheduling and consistent
under horizon extension.

The mixing function is the SplitMix64 finalizer; draw ``j`` from key ``k``
is the SplitMix64 output for state ``k + (j+1)*GOLDEN``.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.special import ndtri

_GOLDEN = np.uint64(0x9E3779B97F4A7C15)
_MIX_A = np.uint64(0xBF58476D1CE4E5B9)
_MIX_B = np.uint64(0x94D049BB133111EB)
_MASK = (1 << 64) - 1

# Purpose tags: distinct tags give statistically unrelated streams for the
# same (seed, replication) pair.  Frozen; changing them changes all output.
PURPOSE_P_TREE = 1
PURPOSE_Q_SPINE = 2
PURPOSE_Q_TREE = 3
PURPOSE_LIFETIME = 4
PURPOSE_AUX = 5

# Per-particle draw-index layout.  Frozen.  Each band is wide enough that
# no simulated particle can run past it (offspring laws cap at 200
# children, motions draw one value per jump/grid step).
DRAW_LIFETIME = 0            # lifetime draw, or thinning (proposal, accept) pairs
DRAW_OFFSPRING = 1 << 20     # offspring-count draw; spine: (offspring, child pick) pairs
DRAW_MOTION = 1 << 21        # motion draws: jump holding times / grid increments


def _mix(x: np.ndarray) -> np.ndarray:
    """SplitMix64 finalizer on uint64 arrays (wrapping arithmetic)."""
    with np.errstate(over="ignore"):
        x = (x ^ (x >> np.uint64(30))) * _MIX_A
        x = (x ^ (x >> np.uint64(27))) * _MIX_B
        return x ^ (x >> np.uint64(31))


def _absorb(state: np.ndarray, value) -> np.ndarray:
    with np.errstate(over="ignore"):
        v = np.asarray(value).astype(np.uint64) + _GOLDEN
        return _mix(np.asarray(state, dtype=np.uint64) ^ _mix(v))


def stream_key(master_seed: int, rep, purpose: int) -> np.ndarray:
    """Root key for one replication stream.  ``rep`` may be an array."""
    k0 = _mix(np.uint64(master_seed & _MASK) + _GOLDEN)
    return _absorb(_absorb(k0, rep), purpose)


def child_key(parent_key: np.ndarray, child_index) -> np.ndarray:
    """Key of a child particle given its parent's key and child index."""
    return _absorb(parent_key, child_index)


def derive_seed(master_seed: int, salt: int) -> int:
    """A decorrelated 63-bit master seed for a sub-experiment."""
    return int(stream_key(master_seed, salt, 0)) >> 1


def uniforms(keys, draw_index) -> np.ndarray:
    """Uniform(0,1) draws, strictly inside the open interval."""
    with np.errstate(over="ignore"):
        state = np.asarray(keys, dtype=np.uint64) + (
            np.asarray(draw_index).astype(np.uint64) + np.uint64(1)
        ) * _GOLDEN
    v = _mix(state)
    return ((v >> np.uint64(11)).astype(np.float64) + 0.5) * 2.0**-53


def exponentials(keys, draw_index, rate) -> np.ndarray:
    """Exponential(rate) draws; rate may be an array."""
    return -np.log(uniforms(keys, draw_index)) / rate


def normals(keys, draw_index) -> np.ndarray:
    """Standard normal draws via the inverse CDF."""
    return ndtri(uniforms(keys, draw_index))


@dataclass(frozen=True)
class RngHandle:
    """Names one replication stream: (master seed, replication index, purpose tag)."""

    master_seed: int
    rep_index: int = 0
    purpose: int = PURPOSE_P_TREE

    def key(self) -> np.ndarray:
        return stream_key(self.master_seed, self.rep_index, self.purpose)
