"""Leg geometry and inertial parameters.

Defaults are the 3-link leg constants (link lengths, centre-of-mass offsets,
masses and scalar bending inertias) together with the Denavit-Hartenberg
table of the hip-yaw / hip-pitch / knee chain.
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace

import numpy as np


class ParameterError(ValueError):
    """Raised when a parameter violates its physical range."""

    def __init__(self, key: str, message: str):
        super().__init__(f"{key}: {message}")
        self.key = key
        self.message = message


@dataclass(frozen=True)
class LegGeometry:
    """Link lengths and centre-of-mass distances, in metres."""

    l1: float = 0.12
    l2: float = 0.36
    l3: float = 0.36
    lc1: float = 0.060
    lc2: float = 0.180
    lc3: float = 0.175

    def __post_init__(self):
        for i in (1, 2, 3):
            li = getattr(self, f"l{i}")
            lci = getattr(self, f"lc{i}")
            if not li > 0:
                raise ParameterError(f"l{i}", f"must be > 0, got {li}")
            if not lci > 0:
                raise ParameterError(f"lc{i}", f"must be > 0, got {lci}")
            if lci > li:
                raise ParameterError(f"lc{i}", f"must not exceed l{i} ({lci} > {li})")

    def dh_table(self) -> np.ndarray:
        """Modified DH rows ``(a_{i-1}, alpha_{i-1}, d_i, theta_offset_i)``.

        Row 4 is the fixed foot-tip frame.
        """
        return np.array(
            [
                [0.0, 0.0, 0.0, 0.0],
                [0.0, -np.pi / 2, self.l1, 0.0],
                [self.l2, 0.0, 0.0, 0.0],
                [self.l3, 0.0, 0.0, 0.0],
            ]
        )


@dataclass(frozen=True)
class LegInertial:
    """Link masses (kg), scalar COM inertias (kg m^2) and gravity (m/s^2)."""

    m1: float = 0.10
    m2: float = 0.30
    m3: float = 0.15
    I1: float = 1.20e-4
    I2: float = 3.24e-3
    I3: float = 1.62e-3
    g: float = 9.81

    def __post_init__(self):
        for key in ("m1", "m2", "m3", "I1", "I2", "I3"):
            val = getattr(self, key)
            if not val > 0:
                raise ParameterError(key, f"must be > 0, got {val}")
        if not self.g >= 0:
            raise ParameterError("g", f"must be >= 0, got {self.g}")

    @property
    def masses(self) -> np.ndarray:
        return np.array([self.m1, self.m2, self.m3])

    @property
    def inertias(self) -> np.ndarray:
        return np.array([self.I1, self.I2, self.I3])

    def scaled(self, factor: float) -> "LegInertial":
        """Copy with every mass and inertia multiplied by ``factor``."""
        return replace(
            self,
            m1=self.m1 * factor,
            m2=self.m2 * factor,
            m3=self.m3 * factor,
            I1=self.I1 * factor,
            I2=self.I2 * factor,
            I3=self.I3 * factor,
        )


@dataclass(frozen=True)
class LegParams:
    geom: LegGeometry = field(default_factory=LegGeometry)
    inertial: LegInertial = field(default_factory=LegInertial)


@dataclass(frozen=True)
class JointState:
    """Joint angles ``q`` (rad) and rates ``qd`` (rad/s)."""

    q: np.ndarray
    qd: np.ndarray

    def __post_init__(self):
        q = np.asarray(self.q, dtype=float).reshape(3)
        qd = np.asarray(self.qd, dtype=float).reshape(3)
        if not (np.all(np.isfinite(q)) and np.all(np.isfinite(qd))):
            raise ValueError("JointState entries must be finite")
        object.__setattr__(self, "q", q)
        object.__setattr__(self, "qd", qd)

    @classmethod
    def at_rest(cls, q) -> "JointState":
        return cls(np.asarray(q, dtype=float), np.zeros(3))
