"""Finite nonnegative measures made of weighted atoms."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .params import InvalidParameterError


@dataclass(frozen=True)
class DiscreteMeasure:
    """Atoms with nonnegative weights.

    ``groups`` optionally tags each atom with an integer (the slice index when
    the measure is assembled slice by slice).
    """

    atoms: np.ndarray
    weights: np.ndarray
    label: str = ""
    groups: Optional[np.ndarray] = field(default=None)

    def __post_init__(self):
        w = np.asarray(self.weights, dtype=float).reshape(-1)
        a = np.asarray(self.atoms, dtype=float)
        if a.size == 0:
            a = a.reshape(0, a.shape[1] if a.ndim == 2 else 1)
        elif a.ndim == 1:
            a = a.reshape(-1, 1)
        if len(a) != len(w):
            raise InvalidParameterError("need one weight per atom")
        if np.any(w < 0) or not np.all(np.isfinite(w)):
            raise InvalidParameterError("weights must be finite and nonnegative")
        object.__setattr__(self, "atoms", a)
        object.__setattr__(self, "weights", w)
        if self.groups is not None:
            g = np.asarray(self.groups, dtype=np.int64).reshape(-1)
            if len(g) != len(w):
                raise InvalidParameterError("need one group tag per atom")
            object.__setattr__(self, "groups", g)

    @classmethod
    def empty(cls, dim: int = 1, label: str = "") -> "DiscreteMeasure":
        return cls(np.zeros((0, dim)), np.zeros(0), label, np.zeros(0, dtype=np.int64))

    @property
    def dim(self) -> int:
        return self.atoms.shape[1]

    @property
    def mass(self) -> float:
        return float(self.weights.sum())

    def __len__(self):
        return len(self.weights)

    def scaled(self, c: float, label: Optional[str] = None) -> "DiscreteMeasure":
        """Multiply every weight by ``c``."""
        return DiscreteMeasure(self.atoms, self.weights * c, self.label if label is None else label,
                               self.groups)

    def pushforward(self, factor: float, label: Optional[str] = None) -> "DiscreteMeasure":
        """Image under ``z -> factor * z``; weights unchanged."""
        return DiscreteMeasure(self.atoms * factor, self.weights, self.label if label is None else label,
                               self.groups)

    def with_group(self, g: int) -> "DiscreteMeasure":
        return DiscreteMeasure(self.atoms, self.weights, self.label,
                               np.full(len(self.weights), int(g), dtype=np.int64))

    def select(self, mask) -> "DiscreteMeasure":
        g = None if self.groups is None else self.groups[mask]
        return DiscreteMeasure(self.atoms[mask], self.weights[mask], self.label, g)

    @staticmethod
    def concatenate(parts, dim: int, label: str = "") -> "DiscreteMeasure":
        parts = [m for m in parts if len(m)]
        if not parts:
            return DiscreteMeasure.empty(dim, label)
        groups = None
        if all(m.groups is not None for m in parts):
            groups = np.concatenate([m.groups for m in parts])
        return DiscreteMeasure(np.concatenate([m.atoms for m in parts]),
                               np.concatenate([m.weights for m in parts]), label, groups)

    def to_dict(self) -> dict:
        d = {"label": self.label, "atoms": self.atoms.tolist(), "weights": self.weights.tolist()}
        if self.groups is not None:
            d["groups"] = self.groups.tolist()
        return d

    @classmethod
    def from_dict(cls, d: dict) -> "DiscreteMeasure":
        return cls(np.asarray(d["atoms"], dtype=float), np.asarray(d["weights"], dtype=float),
                   d.get("label", ""), d.get("groups"))
