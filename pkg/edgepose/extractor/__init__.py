"""Line segment extraction"""

from edgepose.extractor.line_extractor import (ExtremePoints, LineExtractor, LineModel, LineSegment,
                                               extract_all_segments, extreme_points, fit_line,
                                               ransac_line, reference_index, segments_to_json)

__all__ = [
    'ExtremePoints', 'LineExtractor', 'LineModel', 'LineSegment', 'extract_all_segments',
    'extreme_points', 'fit_line', 'ransac_line', 'reference_index', 'segments_to_json',
]
