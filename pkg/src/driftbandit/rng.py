"""Deterministic scalar random streams.

Every run owns exactly one stream.  The draw order is part of the simulation
contract: within a round the policy draws first (epsilon-greedy: one uniform
for the explore coin, then one uniform for the arm if exploring; Thompson:
one normal per arm in arm-index order), then the environment draws once for
the reward sample.
"""

from __future__ import annotations

from typing import Protocol

import numpy as np


class RngStream(Protocol):
    """Scalar draw interface shared by the production and scripted streams."""

    def uniform(self) -> float:
        """Next value in [0, 1)."""
        ...

    def normal(self) -> float:
        """Next standard normal value."""
        ...


class ScriptExhaustedError(Exception):
    """A scripted stream ran out of supplied values."""

    def __init__(self, supplied: int):
        self.supplied = supplied
        super().__init__(
            f"scripted stream exhausted: draw {supplied + 1} requested "
            f"but only {supplied} values were supplied"
        )


_BLOCK = 1024  # refill size; fixed, part of the seed->stream mapping


class NumpyRng:
    """PCG64-backed stream with block-buffered scalar draws.

    Given a seed, the sequence of uniform()/normal() results is a pure
    function of the call sequence, so identically seeded runs are bit-equal.
    """

    __slots__ = ("_gen", "_ubuf", "_upos", "_nbuf", "_npos")

    def __init__(self, seed: int):
        self._gen = np.random.default_rng(seed)
        self._ubuf: list[float] = []
        self._upos = 0
        self._nbuf: list[float] = []
        self._npos = 0

    def uniform(self) -> float:
        if self._upos >= len(self._ubuf):
            self._ubuf = self._gen.random(_BLOCK).tolist()
            self._upos = 0
        v = self._ubuf[self._upos]
        self._upos += 1
        return v

    def normal(self) -> float:
        if self._npos >= len(self._nbuf):
            self._nbuf = self._gen.standard_normal(_BLOCK).tolist()
            self._npos = 0
        v = self._nbuf[self._npos]
        self._npos += 1
        return v


class ScriptedRng:
    """Replays a fixed list of numbers, in call order, regardless of kind.

    uniform() values must lie in [0, 1); normal() values are unrestricted.
    Used for hand-checkable golden traces.
    """

    __slots__ = ("_values", "_pos")

    def __init__(self, values):
        self._values = [float(v) for v in values]
        self._pos = 0

    @property
    def consumed(self) -> int:
        return self._pos

    def _next(self) -> float:
        if self._pos >= len(self._values):
            raise ScriptExhaustedError(len(self._values))
        v = self._values[self._pos]
        self._pos += 1
        return v

    def uniform(self) -> float:
        v = self._next()
        if not 0.0 <= v < 1.0:
            raise ValueError(f"scripted uniform draw {v} outside [0, 1)")
        return v

    def normal(self) -> float:
        return self._next()
