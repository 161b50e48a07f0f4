"""Updating Monte Carlo sample sets when an input density changes.

Four strategies move a sample set drawn from ``p`` to one that follows
``q``: importance reweighting, augmenting, filtering and the mixed
update. Supporting modules cover density algebra, Bayesian refitting of
input models and a plate-buckling application.
"""

from .density import Density, Family, SupportInterval
from .geometry import partition, total_variation, max_ratio
from .samples import Provenance, SampleSet, Strategy, UpdateReport
from .strategies import augment, choose_strategy, ess, filter_samples, mixed_update, reweight, update

__version__ = "0.1.0"

__all__ = [
    "Density", "Family", "SupportInterval",
    "partition", "total_variation", "max_ratio",
    "Provenance", "SampleSet", "Strategy", "UpdateReport",
    "augment", "choose_strategy", "ess", "filter_samples", "mixed_update", "reweight", "update",
]
