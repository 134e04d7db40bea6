from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np


@dataclass
class CorrelationSeries:
    """Two-time correlation values on a lag grid.

    ``stderr`` is None for deterministic methods. ``warnings`` carries
    statistics caveats (e.g. too few Monte Carlo trajectories) rather than
    raising them.
    """

    lags: np.ndarray
    values: np.ndarray
    method: str
    stderr: np.ndarray | None = None
    warnings: list[str] = field(default_factory=list)

    def __len__(self):
        return len(self.lags)
