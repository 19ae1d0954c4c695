"""Labelled random substreams derived from one global seed."""

from __future__ import annotations

import hashlib

import numpy as np


def _label_key(label: str) -> int:
    return int.from_bytes(hashlib.sha256(label.encode("utf-8")).digest()[:4], "little")


def seed_sequence(seed: int, label: str, *index: int) -> np.random.SeedSequence:
    """Build the seed sequence for ``label`` (and optional indices) under ``seed``."""
    return np.random.SeedSequence(entropy=seed, spawn_key=(_label_key(label), *index))


def substream(seed: int, label: str, *index: int) -> np.random.Generator:
    """Return an independent generator for one labelled component of a run.

    Args:
        seed: Global run seed.
        label: Component name, e.g. ``"gen"``, ``"explore"`` or ``"sir"``.
        *index: Optional position within the component (instance, repetition).

    Returns:
        A fresh ``numpy.random.Generator``; equal arguments give equal streams.
    """
    return np.random.default_rng(seed_sequence(seed, label, *index))
