import json
import logging
from pathlib import Path
from typing import Dict, Iterable, List, Optional

import numpy as np
import pandas as pd

from junction.models.analysis_models import ErrorTrace
from junction.models.grid_models import Grid, GridFn
from junction.models.params_models import ModelParams
from junction.models.series_models import SeriesRun
from junction.models.solution_models import FieldSolution, SolutionClass

logger = logging.getLogger(__name__)

FLOAT_FORMAT = "%.17g"
SOLUTION_COLUMNS = ["x", "E", "dE", "c_plus", "c_minus"]


def solution_header(solution: FieldSolution) -> Dict:
    p = solution.params
    return {
        "params": {"nu": p.nu, "tau_plus": p.tau_plus, "c0": p.c0, "c1": p.c1, "j": p.j,
                   "delta_j": p.delta_j},
        "class": None if solution.class_label is None else solution.class_label.value,
        "phi_plus": solution.phi_plus,
        "phi_minus": solution.phi_minus,
        "nu_e_max_sq": solution.nu_e_max_sq,
        "grid_n": solution.grid.n_intervals,
    }


def _json_default(value):
    if isinstance(value, np.generic):
        return value.item()
    if isinstance(value, Path):
        return str(value)
    raise TypeError(f"cannot serialise {type(value).__name__}")


def dumps(payload) -> str:
    return json.dumps(payload, indent=2, default=_json_default, allow_nan=True)


class ArtifactWriter:
    def __init__(self, out_dir: Path, formats: Iterable[str] = ("csv", "json")):
        """
        Writer for the CSV/JSON files of one invocation

        Args:
            out_dir: Directory receiving the artifacts (created on demand)
            formats: Subset of {"csv", "json"} to emit
        """
        self.out_dir = Path(out_dir)
        self.formats = set(formats)
        self.written: List[Path] = []

    def _target(self, name: str) -> Path:
        self.out_dir.mkdir(parents=True, exist_ok=True)
        return self.out_dir / name

    def _frame_to_csv(self, frame: pd.DataFrame, name: str, header: Optional[Dict] = None) -> Path:
        path = self._target(name)
        try:
            with open(path, "w", encoding="utf-8", newline="") as handle:
                if header is not None:
                    handle.write("# " + json.dumps(header, default=_json_default) + "\n")
                frame.to_csv(handle, index=False, float_format=FLOAT_FORMAT)
        except OSError as e:
            logger.error("could not write %s: %s", path, e)
            raise
        self.written.append(path)
        logger.debug("wrote %s", path)
        return path

    def write_json(self, payload, name: str) -> Optional[Path]:
        """
        Write a JSON document when the json format is enabled

        Args:
            payload: JSON-serialisable object
            name: File name inside the output directory

        Returns:
            The path written, or None when json output is disabled
        """
        if "json" not in self.formats:
            return None
        path = self._target(name)
        try:
            path.write_text(dumps(payload) + "\n", encoding="utf-8")
        except OSError as e:
            logger.error("could not write %s: %s", path, e)
            raise
        self.written.append(path)
        return path

    def write_solution(self, solution: FieldSolution, name: str = "solution.csv") -> Optional[Path]:
        if "csv" not in self.formats:
            return None
        frame = pd.DataFrame({"x": solution.x, "E": solution.field, "dE": solution.slope,
                              "c_plus": solution.c_plus.values, "c_minus": solution.c_minus.values})
        return self._frame_to_csv(frame, name, header=solution_header(solution))

    def write_trace(self, trace: ErrorTrace, name: str = "trace.csv") -> Optional[Path]:
        """
        Write the per-order error measures for log-scale plotting

        Args:
            trace: Error trace of a series run
            name: File name inside the output directory

        Returns:
            The path written, or None when csv output is disabled
        """
        if "csv" not in self.formats:
            return None
        frame = pd.DataFrame({
            "n": trace.orders,
            "delta_0": trace.weighted(0.0),
            "delta_1": trace.weighted(1.0),
            "delta_half": trace.delta,
        })
        if trace.delta_integral is not None:
            frame["delta_bar"] = trace.delta_integral
        frame["unreliable"] = trace.unreliable
        return self._frame_to_csv(frame, name)

    def write_series(self, run: SeriesRun, name: str = "series.csv") -> Optional[Path]:
        if "csv" not in self.formats:
            return None
        frame = pd.DataFrame({"n": [term.order for term in run.terms],
                              "max_abs_E_n": [term.max_abs for term in run.terms],
                              "max_abs_partial": np.max(np.abs(run.partial_E), axis=1)})
        return self._frame_to_csv(frame, name)

    def write_snapshot(self, run: SeriesRun, n: int, reference: FieldSolution) -> Optional[Path]:
        """Partial sum of order n next to the reference field, one row per node."""
        if "csv" not in self.formats:
            return None
        partial = run.partial_sum(n)
        frame = pd.DataFrame({"x": run.grid.nodes, "E_n": partial.values,
                              "dE_n": partial.derivative,
                              "E_ref": reference.field, "dE_ref": reference.slope})
        return self._frame_to_csv(frame, f"snapshot_{n:03d}.csv")

    def write_table(self, frame: pd.DataFrame, stem: str) -> List[Path]:
        paths = []
        if "csv" in self.formats:
            paths.append(self._frame_to_csv(frame, f"{stem}.csv"))
        json_path = self.write_json(frame.to_dict(orient="records"), f"{stem}.json")
        if json_path is not None:
            paths.append(json_path)
        return paths


class JsonLinesCollector:
    def __init__(self, path: Path):
        """
        Single writer for sweep results; every case becomes one line

        Args:
            path: Target file, truncated on open
        """
        self.path = Path(path)
        self.path.parent.mkdir(parents=True, exist_ok=True)
        self.path.write_text("", encoding="utf-8")
        self.count = 0

    def append(self, row: Dict) -> None:
        with open(self.path, "a", encoding="utf-8") as handle:
            handle.write(json.dumps(row, default=_json_default) + "\n")
        self.count += 1


def read_solution(path: Path) -> FieldSolution:
    """
    Read a solution CSV written by ``ArtifactWriter.write_solution``

    Args:
        path: CSV file with a JSON header line

    Returns:
        The stored solution on its original grid
    """
    path = Path(path)
    with open(path, "r", encoding="utf-8") as handle:
        first = handle.readline()
    if not first.startswith("# "):
        raise ValueError(f"{path} has no solution header")
    header = json.loads(first[2:])
    frame = pd.read_csv(path, skiprows=1, float_precision="round_trip")
    missing = set(SOLUTION_COLUMNS) - set(frame.columns)
    if missing:
        raise ValueError(f"{path} lacks columns {sorted(missing)}")
    raw = header["params"]
    params = ModelParams(nu=raw["nu"], tau_plus=raw["tau_plus"], c0=raw["c0"], c1=raw["c1"],
                         j=raw["j"])
    grid = Grid(n_intervals=header["grid_n"])
    label = header.get("class")
    return FieldSolution(
        params=params,
        E=GridFn(grid=grid, values=frame["E"].to_numpy(), derivative=frame["dE"].to_numpy()),
        c_plus=GridFn(grid=grid, values=frame["c_plus"].to_numpy()),
        c_minus=GridFn(grid=grid, values=frame["c_minus"].to_numpy()),
        phi_plus=header["phi_plus"], phi_minus=header["phi_minus"],
        class_label=None if label is None else SolutionClass(label))
