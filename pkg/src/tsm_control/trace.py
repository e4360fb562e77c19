"""Simulation trace container and its CSV form."""

from __future__ import annotations

import io
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .friction import FrictionParams
from .plant import PlantParams
from .stability import GroundTruth

TRACE_COLUMNS = (
    "t", "y_r", "y", "e_r", "u", "F", "zeta", "xi1", "xi2",
    "m_hat", "D_star_hat", "theta_hat_1", "theta_hat_2", "theta_hat_3",
    "T_e", "T_d", "V", "V_bound", "x_enc", "x_est", "v_est",
)


@dataclass
class Trace:
    """Column-oriented record of one run; one row per integration step."""

    columns: dict[str, np.ndarray]
    dt: float
    truth: GroundTruth | None = None
    friction: FrictionParams | None = None
    plant: PlantParams | None = None
    meta: dict = field(default_factory=dict)

    def __len__(self) -> int:
        return len(self.columns["t"])

    def __getitem__(self, name: str) -> np.ndarray:
        return self.columns[name]

    def as_matrix(self) -> np.ndarray:
        return np.column_stack([self.columns[c] for c in TRACE_COLUMNS])

    def to_csv(self) -> str:
        buf = io.StringIO()
        np.savetxt(buf, self.as_matrix(), fmt="%.17g", delimiter=",",
                   header=",".join(TRACE_COLUMNS), comments="")
        return buf.getvalue()

    def write_csv(self, path: str | Path) -> Path:
        path = Path(path)
        path.write_text(self.to_csv())
        return path


def read_csv(path: str | Path) -> dict[str, np.ndarray]:
    data = np.genfromtxt(path, delimiter=",", names=True)
    return {name: np.asarray(data[name]) for name in data.dtype.names}
