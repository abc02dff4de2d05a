"""
Emit Service
Writes experiment results as CSV tables, JSON records, gnuplot scripts and
optional plotly HTML figures
"""

import logging
import os
import threading
from collections import defaultdict
from typing import Any, Dict, List, Optional, Sequence

import pandas as pd
import plotly.graph_objects as go

from ..core.config import settings
from ..core.exceptions import EmitError, InvalidParameterError
from ..core.schemas import EmitSpec, ExperimentResult
from .experiment_service import SUMMARY_COLUMNS

logger = logging.getLogger(__name__)

HTML_DIV_ID = "qwalk-figure"


class EmitService:
    """Serializes results to disk; writes to the same path never interleave"""

    def __init__(self, significant_digits: Optional[int] = None):
        self.significant_digits = significant_digits or settings.CSV_SIGNIFICANT_DIGITS
        self._locks: Dict[str, threading.Lock] = defaultdict(threading.Lock)
        self._locks_guard = threading.Lock()

    @property
    def float_format(self) -> str:
        return f"%.{self.significant_digits}g"

    def _lock_for(self, path: str) -> threading.Lock:
        with self._locks_guard:
            return self._locks[os.path.abspath(path)]

    def _write_text(self, path: str, text: str) -> str:
        try:
            with self._lock_for(path):
                directory = os.path.dirname(path)
                if directory:
                    os.makedirs(directory, exist_ok=True)
                with open(path, "w", encoding="utf-8", newline="\n") as handle:
                    handle.write(text)
        except OSError as e:
            logger.error(f"Error writing {path}: {str(e)}")
            raise EmitError(f"Cannot write output ({e.strerror})", path) from e
        logger.debug(f"Wrote {path}")
        return path

    def table(self, result: ExperimentResult, include_zero_rows: bool = False) -> pd.DataFrame:
        """position plus probability or n_j, positions ascending"""
        if result.positions is None or result.series is None:
            raise InvalidParameterError(
                f"result '{result.name}' has no distribution or profile to tabulate"
            )
        frame = pd.DataFrame({"position": result.positions, result.value_label: result.series})
        if not include_zero_rows:
            frame = frame[frame[result.value_label] != 0.0]
        return frame.sort_values("position").reset_index(drop=True)

    def write_csv(self, result: ExperimentResult, path: str, include_zero_rows: bool = False) -> str:
        frame = self.table(result, include_zero_rows)
        text = frame.to_csv(index=False, float_format=self.float_format, lineterminator="\n")
        return self._write_text(path, text)

    def write_json(self, result: ExperimentResult, path: str) -> str:
        return self._write_text(path, result.json(indent=2, sort_keys=True) + "\n")

    def gnuplot_script(self, entries: Sequence[Dict[str, str]], script_path: str, ylabel: str) -> str:
        """Overlay plot of every CSV; paths are relative to the script"""
        base = os.path.dirname(os.path.abspath(script_path))
        lines = [
            "set datafile separator ','",
            "set key autotitle columnhead",
            "set xlabel 'position j'",
            f"set ylabel '{ylabel}'",
            "set grid",
        ]
        plots = []
        for entry in entries:
            relative = os.path.relpath(os.path.abspath(entry["csv"]), base).replace(os.sep, "/")
            plots.append(f"'{relative}' using 1:2 with linespoints title '{entry['title']}'")
        lines.append("plot " + ", \\\n     ".join(plots))
        return "\n".join(lines) + "\n"

    def write_plot_script(
        self, entries: Sequence[Dict[str, str]], path: str, ylabel: str
    ) -> str:
        return self._write_text(path, self.gnuplot_script(entries, path, ylabel))

    def write_html(self, results: Sequence[ExperimentResult], path: str) -> str:
        figure = go.Figure()
        for result in results:
            frame = self.table(result, include_zero_rows=False)
            figure.add_trace(
                go.Scatter(
                    x=frame["position"],
                    y=frame[result.value_label],
                    mode="lines+markers",
                    name=result.name,
                )
            )
        figure.update_layout(
            xaxis_title="position j",
            yaxis_title=results[0].value_label if results else "",
            template="plotly_white",
        )
        html = figure.to_html(include_plotlyjs="cdn", full_html=True, div_id=HTML_DIV_ID)
        return self._write_text(path, html)

    def emit(self, result: ExperimentResult, spec: EmitSpec) -> List[str]:
        """Write every artifact the emit spec names"""
        written = []
        if spec.csv_path:
            written.append(self.write_csv(result, spec.csv_path, spec.include_zero_rows))
        if spec.json_path:
            written.append(self.write_json(result, spec.json_path))
        if spec.plot_script:
            entries = [{"csv": spec.csv_path, "title": result.name}]
            written.append(self.write_plot_script(entries, spec.plot_script, result.value_label))
        if spec.plot_html:
            written.append(self.write_html([result], spec.plot_html))
        return written

    def emit_batch(
        self,
        results: Sequence[ExperimentResult],
        out_dir: str,
        overlay_name: str,
        include_zero_rows: Optional[bool] = None,
        html: bool = False,
    ) -> List[str]:
        """One CSV and JSON per result plus a shared overlay script"""
        if include_zero_rows is None:
            include_zero_rows = settings.CSV_INCLUDE_ZERO_ROWS
        written = []
        entries = []
        for result in results:
            if result.positions is not None:
                csv_path = os.path.join(out_dir, f"{result.name}.csv")
                written.append(self.write_csv(result, csv_path, include_zero_rows))
                entries.append({"csv": csv_path, "title": result.name})
            written.append(self.write_json(result, os.path.join(out_dir, f"{result.name}.json")))

        if entries:
            ylabel = results[0].value_label
            written.append(
                self.write_plot_script(entries, os.path.join(out_dir, f"{overlay_name}.gp"), ylabel)
            )
            if html:
                tabulated = [result for result in results if result.positions is not None]
                written.append(self.write_html(tabulated, os.path.join(out_dir, f"{overlay_name}.html")))
        logger.info(f"Wrote {len(written)} files to {out_dir}")
        return written

    def write_summary(self, rows: Sequence[Dict[str, Any]], path: str) -> str:
        frame = pd.DataFrame(list(rows), columns=SUMMARY_COLUMNS)
        text = frame.to_csv(index=False, float_format=self.float_format, lineterminator="\n")
        return self._write_text(path, text)
