# The MIT License (MIT)
# Copyright © 2025 <kisa134>

from .fitness import Candidate, FitnessComponents, combine, fitness, fitness_batch, sparsity_epsilon
from .trace import Trace, TraceRecord, load_trace
from .genetic import GeneticSearch, evolve, search_box
from .augmentor import AugmentationResult, augment_dataset, fit_surrogate, required_synthetic, synthesize_minority

__all__ = [
    'Candidate',
    'FitnessComponents',
    'combine',
    'fitness',
    'fitness_batch',
    'sparsity_epsilon',
    'Trace',
    'TraceRecord',
    'load_trace',
    'GeneticSearch',
    'evolve',
    'search_box',
    'AugmentationResult',
    'augment_dataset',
    'synthesize_minority',
    'fit_surrogate',
    'required_synthetic',
]
