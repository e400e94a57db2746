"""Power-control instances and the SINR / spectral-efficiency model.

Single-antenna APs and UEs with fixed maximum-ratio transmission. For an
allocation ``eta`` (L x K, watts) the SINR of user k is

    (sum_l sqrt(eta[l, k]) * g[l, k]) ** 2
    ----------------------------------------------------------
    sigma2 + sum_{k' != k} sum_l eta[l, k'] * g[l, k] ** 2

i.e. a coherent desired term against non-coherent inter-user interference.
Every solver and the verifier go through these functions.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass
from typing import Any

import numpy as np

from . import _kernels


class Split(str, enum.Enum):
    TRAIN = "train"
    TEST = "test"
    STRESS = "stress"
    SHIFTED = "shifted"

    @property
    def in_distribution(self) -> bool:
        return self in (Split.TRAIN, Split.TEST)


@dataclass(frozen=True)
class Instance:
    """One max-min power-control problem.

    ``gains`` is the L x K effective channel magnitude matrix, ``p_max`` the
    per-AP budget vector, ``sigma2`` the receiver noise power and
    ``gamma_target`` the common SE target (bit/s/Hz) used for acceptance.
    """

    id: str
    split: Split
    gains: np.ndarray
    p_max: np.ndarray
    sigma2: float
    gamma_target: float

    def __post_init__(self) -> None:
        g = np.array(self.gains, dtype=np.float64, order="C")
        p = np.array(self.p_max, dtype=np.float64)
        if g.ndim != 2 or g.shape[0] < 1 or g.shape[1] < 1:
            raise ValueError(f"gains must be a non-empty L x K matrix, got shape {g.shape}")
        if not np.all(np.isfinite(g)) or np.any(g < 0):
            raise ValueError("gains must be finite and nonnegative")
        if p.shape != (g.shape[0],):
            raise ValueError(f"p_max must have length L={g.shape[0]}, got shape {p.shape}")
        if not np.all(np.isfinite(p)) or np.any(p <= 0):
            raise ValueError("p_max entries must be finite and positive")
        if not (np.isfinite(self.sigma2) and self.sigma2 > 0):
            raise ValueError("sigma2 must be positive")
        if not (np.isfinite(self.gamma_target) and self.gamma_target >= 0):
            raise ValueError("gamma_target must be nonnegative")
        g.flags.writeable = False
        p.flags.writeable = False
        object.__setattr__(self, "gains", g)
        object.__setattr__(self, "p_max", p)
        object.__setattr__(self, "sigma2", float(self.sigma2))
        object.__setattr__(self, "gamma_target", float(self.gamma_target))
        object.__setattr__(self, "split", Split(self.split))

    @property
    def L(self) -> int:
        return self.gains.shape[0]

    @property
    def K(self) -> int:
        return self.gains.shape[1]

    def replace(self, **changes: Any) -> Instance:
        fields = dict(
            id=self.id,
            split=self.split,
            gains=self.gains,
            p_max=self.p_max,
            sigma2=self.sigma2,
            gamma_target=self.gamma_target,
        )
        fields.update(changes)
        return Instance(**fields)

    def to_dict(self) -> dict[str, Any]:
        return {
            "id": self.id,
            "split": self.split.value,
            "L": self.L,
            "K": self.K,
            "gains": self.gains.tolist(),
            "p_max": self.p_max.tolist(),
            "sigma2": self.sigma2,
            "gamma_target": self.gamma_target,
        }

    @classmethod
    def from_dict(cls, d: dict[str, Any]) -> Instance:
        inst = cls(
            id=str(d["id"]),
            split=Split(d["split"]),
            gains=np.array(d["gains"], dtype=np.float64),
            p_max=np.array(d["p_max"], dtype=np.float64),
            sigma2=float(d["sigma2"]),
            gamma_target=float(d["gamma_target"]),
        )
        if inst.L != int(d["L"]) or inst.K != int(d["K"]):
            raise ValueError(f"instance {inst.id}: L/K fields disagree with gains shape")
        return inst


@dataclass(frozen=True)
class PowerAllocation:
    """Candidate power coefficients ``eta`` (L x K, watts).

    Only shape is enforced here. Sign, finiteness and the per-AP budget are
    judged by the verifier so that a broken candidate can still be reported.
    """

    eta: np.ndarray

    def __post_init__(self) -> None:
        eta = np.array(self.eta, dtype=np.float64, order="C")
        if eta.ndim != 2:
            raise ValueError(f"eta must be a 2-D matrix, got shape {eta.shape}")
        eta.flags.writeable = False
        object.__setattr__(self, "eta", eta)

    @classmethod
    def zeros(cls, n_ap: int, n_ue: int) -> PowerAllocation:
        return cls(np.zeros((n_ap, n_ue)))


def _check_dims(inst: Instance, alloc: PowerAllocation) -> None:
    if alloc.eta.shape != inst.gains.shape:
        raise ValueError(
            f"allocation shape {alloc.eta.shape} does not match instance {inst.gains.shape}"
        )


def compute_sinr(inst: Instance, alloc: PowerAllocation) -> np.ndarray:
    _check_dims(inst, alloc)
    if np.any(alloc.eta < 0):
        raise ValueError("allocation has negative entries")
    if not np.all(np.isfinite(alloc.eta)):
        raise ValueError("allocation has non-finite entries")
    return _kernels.sinr(inst.gains, alloc.eta, inst.sigma2)


def se_from_sinr(sinr: np.ndarray) -> np.ndarray:
    return np.log2(1.0 + np.asarray(sinr, dtype=np.float64))


def compute_se(inst: Instance, alloc: PowerAllocation) -> np.ndarray:
    """Per-user spectral efficiency log2(1 + SINR_k) in bit/s/Hz."""
    return se_from_sinr(compute_sinr(inst, alloc))


def min_rate(rates: np.ndarray) -> float:
    rates = np.asarray(rates, dtype=np.float64)
    if rates.size == 0:
        raise ValueError("min_rate of an empty rate vector")
    return float(rates.min())


def per_ap_load(alloc: PowerAllocation) -> np.ndarray:
    return alloc.eta.sum(axis=1)
