# The MIT License (MIT)
# Copyright © 2025 <kisa134>

from dpgda.config import PipelineConfig, SamplerSpec

from .base_sampler import BaseSampler
from .ros import RandomOverSampler, ros
from .smote import SmoteSampler, nearest_neighbors, smote, smote_interpolate
from .jitter import JitterSampler, jitter
from .dpgda_sampler import DPGSampler, NoAugmentation

METHODS = ("dpgda", "ros", "smote", "jitter", "none")


def build_sampler(spec: SamplerSpec, pipeline: PipelineConfig = PipelineConfig(), jobs: int = 1) -> BaseSampler:
    """Sampler instance for a method name from `METHODS`."""
    if spec.kind == "ros":
        return RandomOverSampler()
    if spec.kind == "smote":
        return SmoteSampler(spec.k_neighbors)
    if spec.kind == "jitter":
        return JitterSampler(spec.sigma_fraction)
    if spec.kind == "dpgda":
        return DPGSampler(pipeline, jobs)
    return NoAugmentation()


__all__ = [
    'BaseSampler',
    'RandomOverSampler',
    'SmoteSampler',
    'JitterSampler',
    'DPGSampler',
    'NoAugmentation',
    'ros',
    'smote',
    'smote_interpolate',
    'nearest_neighbors',
    'jitter',
    'build_sampler',
    'METHODS',
]
