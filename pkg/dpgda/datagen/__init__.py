# The MIT License (MIT)
# Copyright © 2025 <kisa134>

from .domains import (BUILTIN_DOMAINS, DomainConfig, FeatureSpec, LabelCondition, class_counts_for,
                      generate_domain, load_domain_config, parse_ratio, write_generated)
from .shapes import SHAPES, generate_shape, shape_rules

__all__ = [
    'BUILTIN_DOMAINS',
    'DomainConfig',
    'FeatureSpec',
    'LabelCondition',
    'class_counts_for',
    'parse_ratio',
    'load_domain_config',
    'generate_domain',
    'write_generated',
    'SHAPES',
    'generate_shape',
    'shape_rules',
]
