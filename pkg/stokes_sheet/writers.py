"""CSV tables, JSON sidecars and resumable profile snapshots on local disk."""

import json
import logging
from pathlib import Path
from typing import Any, Iterable

import numpy as np

from . import __version__
from .evolution import EvolutionState
from .models import FluidParams
from .profile import InterfaceProfile

logger = logging.getLogger(__name__)

FLOAT_FORMAT = "%.17g"

TIMESERIES_COLUMNS = ["t", "mean", "amp_max", "slope_max", "c1", "c3"]
SPECTRUM_COLUMNS = ["k", "lambda_analytic", "lambda_numeric_re", "lambda_numeric_im"]
BRANCH_COLUMNS = ["ell", "s", "lambda", "amplitude", "slope_max", "eig_lead_re"]
FIELDS_COLUMNS = ["x1", "x2", "v1", "v2", "q", "side"]
SNAPSHOT_COLUMNS = ["xi", "f"]


class LocalWriter:
    """Write run outputs under one directory."""

    def __init__(self, output_dir: str | Path = "./output"):
        self.output_dir = Path(output_dir)
        self.output_dir.mkdir(parents=True, exist_ok=True)

    def write_table(self, name: str, columns: list[str], rows: Iterable[Iterable[float]]) -> Path:
        """Save rows as CSV with 17 significant digits; NaN marks a missing value."""
        data = np.array([list(row) for row in rows], dtype=float).reshape(-1, len(columns))
        path = self.output_dir / f"{name}.csv"
        np.savetxt(path, data, fmt=FLOAT_FORMAT, delimiter=",", header=",".join(columns), comments="")
        logger.debug("wrote %s (%d rows)", path, data.shape[0])
        return path

    def write_sidecar(self, name: str, metadata: dict[str, Any]) -> Path:
        """JSON metadata next to a table; keys are sorted so reruns are byte-identical."""
        path = self.output_dir / f"{name}.json"
        payload = {"version": __version__, **metadata}
        path.write_text(json.dumps(payload, indent=2, sort_keys=True) + "\n")
        return path

    def write_timeseries(self, trajectory: list[EvolutionState], modes: int) -> Path:
        columns = TIMESERIES_COLUMNS + [f"a{k}" for k in range(1, modes + 1)]
        rows = []
        for state in trajectory:
            d = state.diagnostics
            rows.append([state.t, d.mean, d.amp_max, d.slope_max, d.c1, d.c3, *d.amplitudes[:modes]])
        return self.write_table("timeseries", columns, rows)

    def write_snapshot(self, state: EvolutionState, index: int, scheme: str) -> Path:
        """Profile samples plus the state needed to resume from them."""
        directory = self.output_dir / "snapshots"
        directory.mkdir(exist_ok=True)
        name = f"f_{index:06d}"
        path = directory / f"{name}.csv"
        data = np.column_stack([state.profile.xi, state.profile.samples])
        np.savetxt(path, data, fmt=FLOAT_FORMAT, delimiter=",", header=",".join(SNAPSHOT_COLUMNS), comments="")

        sidecar = {
            "version": __version__,
            "t": state.t,
            "dt": state.dt,
            "scheme": scheme,
            "n": state.profile.n,
            "modes": state.modes,
            "params": state.params.model_dump(),
            "memory": _encode_memory(state.memory),
        }
        (directory / f"{name}.json").write_text(json.dumps(sidecar, indent=2, sort_keys=True) + "\n")
        return path


def _encode_memory(memory: tuple[np.ndarray, np.ndarray] | None) -> dict | None:
    if memory is None:
        return None
    previous, previous_rhs = memory
    return {
        "previous_re": previous.real.tolist(),
        "previous_im": previous.imag.tolist(),
        "previous_rhs_re": previous_rhs.real.tolist(),
        "previous_rhs_im": previous_rhs.imag.tolist(),
    }


def _decode_memory(payload: dict | None) -> tuple[np.ndarray, np.ndarray] | None:
    if payload is None:
        return None
    previous = np.array(payload["previous_re"]) + 1j * np.array(payload["previous_im"])
    previous_rhs = np.array(payload["previous_rhs_re"]) + 1j * np.array(payload["previous_rhs_im"])
    return previous, previous_rhs


def read_snapshot(path: str | Path, params: FluidParams | None = None) -> tuple[EvolutionState, str]:
    """Load a snapshot and its sidecar.

    Args:
        path: The snapshot CSV.
        params: Override for the parameters stored in the sidecar.

    Returns:
        The state to resume from and the scheme that produced it.

    Raises:
        ValueError: If the files are missing or inconsistent.
    """
    path = Path(path)
    sidecar_path = path.with_suffix(".json")
    if not path.exists() or not sidecar_path.exists():
        raise ValueError(f"snapshot {path} needs its JSON sidecar {sidecar_path.name}")
    data = np.loadtxt(path, delimiter=",", skiprows=1, ndmin=2)
    sidecar = json.loads(sidecar_path.read_text())
    if data.shape[1] != len(SNAPSHOT_COLUMNS) or data.shape[0] != sidecar["n"]:
        raise ValueError(f"snapshot {path} does not match its sidecar")

    state = EvolutionState(
        t=float(sidecar["t"]),
        profile=InterfaceProfile(data[:, 1]),
        params=params or FluidParams(**sidecar["params"]),
        modes=int(sidecar.get("modes", 8)),
        dt=sidecar.get("dt"),
        memory=_decode_memory(sidecar.get("memory")),
    )
    return state, sidecar["scheme"]
