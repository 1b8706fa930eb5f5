import csv
import json
import os
import platform
from typing import Any, Dict, List, Optional, Sequence

import numpy as np

from edgepose.analyzer.edge_detector import ScoredCloud
from edgepose.utils.accel import NUMBA_AVAILABLE


def machine_info() -> List[str]:
    return [
        f"machine: {platform.machine()} {platform.processor() or 'unknown cpu'}",
        f"system: {platform.system()} {platform.release()}",
        f"python: {platform.python_version()}, numpy {np.__version__}, numba {'on' if NUMBA_AVAILABLE else 'off'}",
        f"cpus: {os.cpu_count()}",
    ]


class Reporter:
    """Writes the CSV and JSON result files of one command into ``output_dir``."""

    def __init__(self, output_dir: str):
        self.output_dir = output_dir
        os.makedirs(output_dir, exist_ok=True)

    def path(self, name: str) -> str:
        return os.path.join(self.output_dir, name)

    def _write_rows(self, name: str, header: Sequence[str], rows: List[Sequence[Any]],
                    comments: Optional[List[str]] = None) -> str:
        path = self.path(name)
        with open(path, 'w', newline='') as f:
            for line in comments or []:
                f.write(f"# {line}\n")
            writer = csv.writer(f, lineterminator="\n")
            writer.writerow(header)
            writer.writerows(rows)
        return path

    def write_json(self, name: str, text: str) -> str:
        path = self.path(name)
        with open(path, 'w') as f:
            f.write(text)
            f.write("\n")
        return path

    def write_bytes(self, name: str, data: bytes) -> str:
        path = self.path(name)
        with open(path, 'wb') as f:
            f.write(data)
        return path

    def write_scores(self, scored: ScoredCloud, index_map: Optional[np.ndarray] = None,
                     name: str = "scores.csv") -> str:
        """Per-point score, neighbor count and edge flag; ``index_map`` maps rows to input indices."""
        indices = index_map if index_map is not None else np.arange(len(scored))
        rows = [[int(i), f"{s:.6f}", int(k), int(e)]
                for i, s, k, e in zip(indices, scored.scores, scored.neighbor_counts, scored.edge_mask)]
        return self._write_rows(name, ["index", "score", "neighbors", "edge"], rows)

    def write_histogram(self, scored: ScoredCloud, bins: int = 20, name: str = "score_histogram.csv") -> str:
        counts, edges = scored.histogram(bins)
        rows = [[f"{lo:.2f}", f"{hi:.2f}", int(c)] for lo, hi, c in zip(edges[:-1], edges[1:], counts)]
        return self._write_rows(name, ["bin_lower", "bin_upper", "count"], rows)

    def write_timings(self, rows: List[Dict[str, Any]], name: str = "timings.csv") -> str:
        """Timing rows preceded by machine info comment lines."""
        if not rows:
            return self._write_rows(name, ["stage", "seconds"], [], comments=machine_info())
        header = list(rows[0].keys())
        body = [[_format(row[key]) for key in header] for row in rows]
        return self._write_rows(name, header, body, comments=machine_info())

    def write_table(self, name: str, rows: List[Dict[str, Any]]) -> str:
        """CSV of homogeneous dict rows in insertion order of the first row's keys."""
        if not rows:
            return self._write_rows(name, [], [])
        header = list(rows[0].keys())
        return self._write_rows(name, header, [[_format(row[key]) for key in header] for row in rows])


def _format(value: Any) -> Any:
    if isinstance(value, float):
        return f"{value:.6g}" if value != 0 else "0"
    if value is None:
        return ""
    return value
