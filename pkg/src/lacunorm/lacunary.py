"""Lacunary sequences theta = (k_r) and their block decomposition."""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

import numpy as np

__all__ = ["LacunarySequence", "LacunaryError", "Block", "BlockLayout"]


class LacunaryError(ValueError):
    """A generator violates k_0 = 0 / strict increase at block ``r``."""

    def __init__(self, msg, r):
        super().__init__(msg)
        self.r = r


class LacunaryWarning(UserWarning):
    pass


@dataclass(frozen=True)
class Block:
    r: int
    start: int  # first index of J_r, i.e. k_{r-1} + 1
    stop: int   # last index of J_r, i.e. k_r
    h: int

    @property
    def indices(self) -> range:
        return range(self.start, self.stop + 1)


class LacunarySequence:
    """theta = (k_r) with k_0 = 0.

    Built from an explicit list, a geometric rule ``k_r = ceil(c q^r)`` or a
    polynomial rule ``k_r = r^d`` (``r >= 1``; ``k_0 = 0`` always).
    """

    def __init__(self, rule: str, *, q: float = 2.0, c: float = 1.0, d: int = 2,
                 explicit: Sequence[int] | None = None, check_horizon: int = 32):
        self.rule = rule
        self.check_horizon = check_horizon
        if rule == "explicit":
            if explicit is None or len(explicit) < 2:
                raise ValueError("explicit theta needs at least k_0 and k_1")
            ks = [int(v) for v in explicit]
            if any(ks[i] != explicit[i] for i in range(len(ks))):
                raise ValueError("explicit theta entries must be integers")
            self._explicit = tuple(ks)
        elif rule == "geometric":
            if not q > 1:
                raise ValueError(f"geometric theta needs q > 1, got {q}")
            if not c > 0:
                raise ValueError(f"geometric theta needs c > 0, got {c}")
            self.q, self.c = float(q), float(c)
        elif rule == "polynomial":
            if int(d) != d or d < 1:
                raise ValueError(f"polynomial theta needs integer d >= 1, got {d}")
            self.d = int(d)
        else:
            raise ValueError(f"unknown theta rule {rule!r}")
        self._checked = 0
        self._check(self.max_r if rule == "explicit" else check_horizon)

    @classmethod
    def explicit(cls, ks: Sequence[int]) -> "LacunarySequence":
        return cls("explicit", explicit=ks)

    @classmethod
    def geometric(cls, q: float = 2.0, c: float = 1.0) -> "LacunarySequence":
        return cls("geometric", q=q, c=c)

    @classmethod
    def polynomial(cls, d: int = 2) -> "LacunarySequence":
        return cls("polynomial", d=d)

    @property
    def max_r(self) -> int | None:
        return len(self._explicit) - 1 if self.rule == "explicit" else None

    def _raw_k(self, r: int) -> int:
        if r == 0:
            return 0 if self.rule != "explicit" else self._explicit[0]
        if self.rule == "explicit":
            if r > self.max_r:
                raise IndexError(f"explicit theta only defines k_0..k_{self.max_r}, asked for k_{r}")
            return self._explicit[r]
        if self.rule == "polynomial":
            return r ** self.d
        v = self.c * self.q ** r
        # absorb representation error so that exact integers are not bumped up
        nearest = round(v)
        if abs(v - nearest) <= 1e-9 * max(1.0, v):
            return int(nearest)
        return math.ceil(v)

    def _check(self, R: int):
        if R <= self._checked:
            return
        if self._raw_k(0) != 0:
            raise LacunaryError("theta must start with k_0 = 0", 0)
        prev_h = None
        flat = False
        for r in range(1, R + 1):
            h = self._raw_k(r) - self._raw_k(r - 1)
            if h < 1:
                raise LacunaryError(f"theta not strictly increasing at r = {r}", r)
            if prev_h is not None and h < prev_h:
                flat = True
            prev_h = h
        if R > 1 and (flat or self._raw_k(R) - self._raw_k(R - 1) == self._raw_k(1)):
            warnings.warn("block lengths h_r do not grow over the checked horizon; "
                          "h_r -> infinity cannot be confirmed", LacunaryWarning, stacklevel=3)
        self._checked = R

    def k(self, r: int) -> int:
        if r < 0:
            raise ValueError("r must be >= 0")
        self._check(r)
        return self._raw_k(r)

    def h(self, r: int) -> int:
        if r < 1:
            raise ValueError("h_r is defined for r >= 1")
        return self.k(r) - self.k(r - 1)

    def blocks(self, R: int) -> list[Block]:
        """Blocks J_1..J_R; together they tile ``[1, k_R]``."""
        if R < 1:
            raise ValueError("R must be >= 1")
        self._check(R)
        ks = [self._raw_k(r) for r in range(R + 1)]
        return [Block(r, ks[r - 1] + 1, ks[r], ks[r] - ks[r - 1]) for r in range(1, R + 1)]

    def ratio(self, r: int) -> Fraction:
        """phi_r = k_r / k_{r-1} as an exact rational."""
        if r == 1:
            raise ZeroDivisionError("phi_1 is undefined: k_0 = 0")
        if r < 1:
            raise ValueError("r must be >= 2")
        return Fraction(self.k(r), self.k(r - 1))

    def largest_r_within(self, n: int) -> int:
        """Largest R >= 1 with k_R <= n."""
        if self.k(1) > n:
            raise ValueError(f"k_1 = {self.k(1)} already exceeds {n}")
        r = 1
        while (self.max_r is None or r < self.max_r) and self.k(r + 1) <= n:
            r += 1
        return r

    def to_dict(self) -> dict:
        if self.rule == "explicit":
            return {"explicit": list(self._explicit)}
        if self.rule == "geometric":
            return {"rule": "geometric", "q": self.q, "c": self.c}
        return {"rule": "polynomial", "d": self.d}

    def __repr__(self):
        return f"LacunarySequence({self.to_dict()})"


class BlockLayout:
    """Contiguous block structure used by the modular.

    Covers blocks ``J_1..J_R`` and, with ``include_k0``, a synthetic block
    ``{0}`` of length 1 in front of them.
    """

    def __init__(self, theta: LacunarySequence, R: int, include_k0: bool = True):
        blocks = theta.blocks(R)
        starts = [b.start for b in blocks]
        lengths = [b.h for b in blocks]
        ids = [b.r for b in blocks]
        if include_k0:
            starts.insert(0, 0)
            lengths.insert(0, 1)
            ids.insert(0, 0)
        self.R = R
        self.include_k0 = include_k0
        self.first = starts[0]
        self.stop = blocks[-1].stop + 1  # exclusive end of covered indices
        self.block_ids = np.asarray(ids)
        self.h = np.asarray(lengths, dtype=float)
        # offsets relative to self.first for np.add.reduceat
        self.offsets = np.asarray(starts) - self.first

    @property
    def width(self) -> int:
        return self.stop - self.first

    def block_means(self, vals: np.ndarray) -> np.ndarray:
        """Per-block means of ``vals`` (last axis indexed from ``first``)."""
        return np.add.reduceat(vals, self.offsets, axis=-1) / self.h

    def window(self, u: np.ndarray) -> np.ndarray:
        """Slice/zero-pad the last axis of ``u`` to the covered index range."""
        u = np.asarray(u, dtype=float)
        n = u.shape[-1]
        if n >= self.stop:
            return u[..., self.first:self.stop]
        pad = [(0, 0)] * (u.ndim - 1) + [(0, self.stop - n)]
        return np.pad(u, pad)[..., self.first:self.stop]
