"""Deterministic 64-bit seed derivation for trial farms."""

GOLDEN = 0x9E3779B97F4A7C15
_MIX1 = 0xBF58476D1CE4E5B9
_MIX2 = 0x94D049BB133111EB
_MASK = (1 << 64) - 1

__all__ = ["seed_for_trial"]


def seed_for_trial(base_seed: int, trial_index: int) -> int:
    """Per-trial seed from a base seed and trial index.

    Splitmix-style avalanche of base + (index+1) * golden-ratio increment.
    The update is a bijection of the 64-bit state for fixed base, so distinct
    trial indices never collide; results are identical regardless of which
    worker evaluates the trial.
    """
    z = (int(base_seed) + (int(trial_index) + 1) * GOLDEN) & _MASK
    z ^= z >> 30
    z = (z * _MIX1) & _MASK
    z ^= z >> 27
    z = (z * _MIX2) & _MASK
    z ^= z >> 31
    return z
