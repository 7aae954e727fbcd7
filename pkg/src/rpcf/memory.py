"""Bounded, importance-weighted training-sample store and update schedule.

Each inserted sample gets weight omega while existing weights decay by
(1 - omega); the first sample gets weight 1.  When the store is full the
minimum-weight sample is evicted (never the newest) and weights are
renormalized to sum 1.
"""

from dataclasses import dataclass, field

import numpy as np


@dataclass(eq=False)
class TrainingSample:
    x_hat: np.ndarray  # (D, H, W) complex spectra of a windowed feature stack
    weight: float
    frame_index: int


@dataclass
class SampleMemory:
    capacity: int = 50
    learning_rate: float = 0.02
    update_interval: int = 6
    samples: list = field(default_factory=list)

    def __len__(self):
        return len(self.samples)

    @property
    def weights(self):
        return np.array([s.weight for s in self.samples])

    def spectra(self):
        """Stacked view (T, D, H, W) plus the weight vector, for the solver."""
        x = np.stack([s.x_hat for s in self.samples])
        return x, self.weights


def insert_sample(memory: SampleMemory, x_hat, frame_index):
    """Insert a sample spectrum stack, decaying and renormalizing weights."""
    x_hat = np.asarray(x_hat, dtype=np.complex128)
    if memory.samples and x_hat.shape != memory.samples[0].x_hat.shape:
        raise ValueError(
            f"sample shape {x_hat.shape} does not match memory "
            f"{memory.samples[0].x_hat.shape}"
        )
    if not memory.samples:
        memory.samples.append(TrainingSample(x_hat, 1.0, frame_index))
        return memory
    omega = memory.learning_rate
    for s in memory.samples:
        s.weight *= 1.0 - omega
    new = TrainingSample(x_hat, omega, frame_index)
    memory.samples.append(new)
    if len(memory.samples) > memory.capacity:
        evictable = [s for s in memory.samples if s is not new]
        victim = min(evictable, key=lambda s: s.weight)
        memory.samples.remove(victim)
        total = sum(s.weight for s in memory.samples)
        for s in memory.samples:
            s.weight /= total
    return memory


def should_update(memory: SampleMemory, frame_index):
    """True on the first frame and every update_interval-th frame after."""
    return frame_index == 1 or frame_index % memory.update_interval == 0
