"""Sample sets fed to the statistics services."""

from dataclasses import dataclass

import numpy as np


@dataclass(frozen=True, eq=False)
class SampleSet:
    values: np.ndarray
    unit: str = ""
    name: str = ""

    def __post_init__(self) -> None:
        values = np.asarray(self.values, dtype=np.float64).ravel()
        if not np.all(np.isfinite(values)):
            raise ValueError(f"sample set '{self.name}' contains non-finite values")
        object.__setattr__(self, "values", values)

    def __len__(self) -> int:
        return int(self.values.size)
