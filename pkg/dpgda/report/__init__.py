# The MIT License (MIT)
# Copyright © 2025 <kisa134>

from .figures import (VIOLATION_MARK, Figure, cumulative_change_barplot, delta_frame, delta_table,
                      evolution_heatmap, pairwise_violation_plot, read_heatmap_values, violation_heatmap,
                      violation_matrix)
from .svg import SvgCanvas, color_scale, fmt

__all__ = [
    'Figure',
    'VIOLATION_MARK',
    'delta_frame',
    'delta_table',
    'evolution_heatmap',
    'read_heatmap_values',
    'cumulative_change_barplot',
    'violation_matrix',
    'violation_heatmap',
    'pairwise_violation_plot',
    'SvgCanvas',
    'color_scale',
    'fmt',
]
