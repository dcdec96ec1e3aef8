import sys
from pathlib import Path

import numpy as np
import pytest

sys.path.insert(0, str(Path(__file__).parent))

from mceus.model import CineLoop


@pytest.fixture
def small_loop():
    """10-frame 8x8 loop with 3 pre-contrast frames and a bright late phase."""
    rng = np.random.default_rng(42)
    frames = rng.uniform(0.0, 0.2, (10, 8, 8))
    frames[4:] += 0.3
    np.clip(frames, 0.0, 1.0, out=frames)
    return CineLoop(frames=frames, frame_rate_hz=2.0, pre_contrast=(0, 2),
                    bolus_arrival_index=3)


def make_loop(frames, pre=(0, 2), bolus=3, fps=1.0):
    return CineLoop(frames=np.asarray(frames, dtype=np.float64),
                    frame_rate_hz=fps, pre_contrast=pre,
                    bolus_arrival_index=bolus)
