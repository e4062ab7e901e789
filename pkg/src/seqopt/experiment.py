"""Multi-trial experiments, the single-gate shot-noise study, and trace summaries."""
from __future__ import annotations

import csv
import json
import logging
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Sequence

import numpy as np

from .circuit import CostOracle
from .errors import ConfigurationError, ParseError
from .optimizers import fqs_step, fraxis_step, rotosolve_step
from .statevector import PauliSum, fidelity
from .trial import TRACE_HEADER, Algorithm, Problem, TrialConfig, TrialTrace, init_circuit, run_trial

log = logging.getLogger(__name__)

GRID_POINTS = 101


@dataclass
class ExperimentConfig:
    problem: Problem
    layers: int
    algorithms: list[Algorithm]
    trials: int = 20
    shots: int | None = None
    base_seed: int = 0
    iterations: int = 50
    lr: float = 0.1
    reference_energy: float | None = None
    out: str = "runs/experiment"
    parallel: int = 1
    name: str = ""

    def __post_init__(self):
        if self.trials < 1:
            raise ConfigurationError("trials: must be >= 1")
        if not self.algorithms:
            raise ConfigurationError("algorithms: at least one algorithm is required")

    def trial_config(self, algorithm: Algorithm) -> TrialConfig:
        return TrialConfig(self.problem, self.layers, algorithm, self.shots, self.iterations, self.lr)

    @property
    def budget(self) -> int:
        return self.trial_config(self.algorithms[0]).budget

    def to_dict(self) -> dict:
        return {
            "name": self.name,
            "problem": self.problem.to_dict(),
            "layers": self.layers,
            "algorithms": [a.to_dict() for a in self.algorithms],
            "trials": self.trials,
            "shots": "exact" if self.shots is None else self.shots,
            "base_seed": self.base_seed,
            "iterations": self.iterations,
            "lr": self.lr,
            "reference_energy": self.reference_energy,
            "out": self.out,
            "parallel": self.parallel,
        }

    @classmethod
    def from_dict(cls, doc: dict) -> "ExperimentConfig":
        """Validate a JSON document, reporting every bad field at once."""
        errors = []

        def grab(key, convert, default=None, required=False):
            if key not in doc or doc[key] is None:
                if required:
                    errors.append(f"{key}: required")
                return default
            try:
                return convert(doc[key])
            except (ConfigurationError, TypeError, ValueError, KeyError) as exc:
                errors.append(f"{key}: {exc}")
                return default

        def problem(p):
            if not isinstance(p, dict):
                raise TypeError("expected an object")
            return Problem(**p)

        def algorithms(items):
            if isinstance(items, dict):
                items = [items]
            return [Algorithm(**a) for a in items]

        def positive_int(v):
            if isinstance(v, bool) or int(v) != v or v < 1:
                raise ValueError(f"expected a positive integer, got {v!r}")
            return int(v)

        prob = grab("problem", problem, required=True)
        algos = grab("algorithms", algorithms) or grab("algorithm", algorithms)
        if not algos:
            errors.append("algorithms: required")
        kwargs = dict(
            layers=grab("layers", positive_int, required=True),
            trials=grab("trials", positive_int, 20),
            shots=grab("shots", parse_shots, None),
            base_seed=grab("base_seed", int, 0),
            iterations=grab("iterations", positive_int, 50),
            lr=grab("lr", float, 0.1),
            reference_energy=grab("reference_energy", float, None),
            out=grab("out", str, "runs/experiment"),
            parallel=grab("parallel", positive_int, 1),
            name=grab("name", str, ""),
        )
        unknown = set(doc) - {
            "problem", "algorithms", "algorithm", "layers", "trials", "shots", "base_seed",
            "iterations", "lr", "reference_energy", "out", "parallel", "name",
        }
        errors.extend(f"{k}: unknown field" for k in sorted(unknown))
        if errors:
            raise ConfigurationError("invalid experiment config:\n  " + "\n  ".join(errors))
        return cls(problem=prob, algorithms=algos, **kwargs)


def parse_shots(value) -> int | None:
    if value is None or (isinstance(value, str) and value.lower() == "exact"):
        return None
    if isinstance(value, bool) or int(value) != float(value) or int(value) < 1:
        raise ValueError(f"shots must be 'exact' or a positive integer, got {value!r}")
    return int(value)


def load_config(path: str | Path) -> ExperimentConfig:
    with open(path) as fh:
        return ExperimentConfig.from_dict(json.load(fh))


# ---------------------------------------------------------------------------
# Running


def _run_one(args) -> TrialTrace:
    config, seed = args
    return run_trial(config, seed)


def step_interpolate(evals: np.ndarray, costs: np.ndarray, grid: np.ndarray) -> np.ndarray:
    """Cost of the latest record at or before each grid point."""
    pos = np.searchsorted(evals, grid, side="right") - 1
    return costs[np.clip(pos, 0, None)]


def mean_curve(traces: Sequence[TrialTrace], grid: np.ndarray) -> np.ndarray:
    return np.mean([step_interpolate(t.evals, t.costs, grid) for t in traces], axis=0)


def run_experiment(config: ExperimentConfig, out: str | Path | None = None) -> dict:
    """Run every algorithm for ``config.trials`` seeds and write the artifacts.

    Trial ``k`` of every algorithm uses seed ``base_seed + k``, so all
    algorithms see the same random-state target in a given trial. Writes
    ``traces.csv``, ``summary.json`` and ``config.json`` under ``out``.
    """
    out = Path(out or config.out)
    try:
        out.mkdir(parents=True, exist_ok=True)
    except OSError as exc:
        raise OSError(f"cannot create output directory {out}: {exc}") from exc

    tasks = [
        (config.trial_config(a), config.base_seed + k)
        for a in config.algorithms
        for k in range(config.trials)
    ]
    if config.parallel > 1:
        with ProcessPoolExecutor(max_workers=config.parallel) as pool:
            traces = list(pool.map(_run_one, tasks))
    else:
        traces = []
        for task in tasks:
            traces.append(_run_one(task))
            log.debug("finished %s seed %d", task[0].algorithm.label, task[1])

    budget = config.budget
    grid = np.linspace(0, budget, GRID_POINTS).round().astype(int)
    with open(out / "traces.csv", "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(TRACE_HEADER)
        for idx, tr in enumerate(traces):
            w.writerows(tr.csv_rows(idx % config.trials))

    per_algo = {}
    for i, algo in enumerate(config.algorithms):
        group = traces[i * config.trials : (i + 1) * config.trials]
        finals = np.array([t.final_cost for t in group])
        entry = {
            "algorithm": algo.name,
            "hyperparam": algo.hyperparam,
            "trials": len(group),
            "final_mean": float(finals.mean()),
            "final_std": float(finals.std()),
            "truncated_trials": sum(t.truncated for t in group),
            "mean_curve": [float(x) for x in mean_curve(group, grid)],
        }
        if config.reference_energy is not None:
            entry["relative_error"] = relative_error(config.reference_energy, entry["final_mean"])
        per_algo[algo.label] = entry

    summary = {
        "name": config.name,
        "metric": "trace_distance" if config.problem.kind == "random_state" else "energy",
        "budget": budget,
        "grid": [int(g) for g in grid],
        "reference_energy": config.reference_energy,
        "algorithms": per_algo,
    }
    (out / "summary.json").write_text(json.dumps(summary, indent=2) + "\n")
    (out / "config.json").write_text(json.dumps(config.to_dict(), indent=2) + "\n")
    summary["traces"] = traces
    return summary


def relative_error(reference: float, value: float) -> float:
    """``(E_g - <M>) / E_g``; zero when the value reaches the reference."""
    return (reference - value) / reference


# ---------------------------------------------------------------------------
# Single-gate shot-noise study

FIDELITY_ALGORITHMS = {"rotosolve": rotosolve_step, "fraxis": fraxis_step, "fqs": fqs_step}


def gate_fidelity(u: np.ndarray, v: np.ndarray) -> float:
    """``|Tr(u^dagger v)|**2 / 4``."""
    return float(abs(np.trace(u.conj().T @ v)) ** 2 / 4)


@dataclass
class FidelityStudy:
    shots: list
    records: list[tuple[str, object, int, float, float]] = field(default_factory=list)

    def values(self, algorithm: str, shots, column: int = 3) -> np.ndarray:
        return np.array([r[column] for r in self.records if r[0] == algorithm and r[1] == shots])

    def median(self, algorithm: str, shots) -> float:
        return float(np.median(self.values(algorithm, shots)))

    def histograms(self, bins: int = 50) -> dict:
        edges = np.linspace(0.0, 1.0, bins + 1)
        return {
            (a, s): np.histogram(np.clip(self.values(a, s), 0, 1), bins=edges)[0]
            for a in FIDELITY_ALGORITHMS
            for s in self.shots
        }


def gate_fidelity_study(
    shots: Iterable = (1024, 4096, 8192),
    trials: int = 10_000,
    base_seed: int = 0,
    out: str | Path | None = None,
    bins: int = 50,
) -> FidelityStudy:
    """Optimize one gate on ``X + Y + Z`` with and without shot noise.

    For every algorithm and trial the same random initial gate is optimized
    once with the exact oracle and once per shot count; the study records the
    gate fidelity between the two optimized unitaries, plus the fidelity of
    the states they prepare from ``|0>`` (insensitive to phases that leave
    ``|0>`` unchanged). A shot entry of ``None`` compares exact against exact.
    """
    if trials < 1:
        raise ConfigurationError("trials must be >= 1")
    shots = [None if s is None or s == "exact" else int(s) for s in shots]
    obs = PauliSum.from_pairs([(1.0, "X"), (1.0, "Y"), (1.0, "Z")])
    study = FidelityStudy(list(shots))
    for algo, step in FIDELITY_ALGORITHMS.items():
        for t in range(trials):
            seed = base_seed + t
            start = init_circuit(1, 1, algo, np.random.default_rng(seed))
            exact = step(start.copy(), 0, CostOracle(obs))
            u_exact = exact.matrix(0)
            for s in shots:
                rng = np.random.default_rng([seed, s or 0])
                noisy = step(start.copy(), 0, CostOracle(obs, s, rng if s else None))
                u_noisy = noisy.matrix(0)
                study.records.append(
                    (algo, s, t, gate_fidelity(u_exact, u_noisy), fidelity(exact.state(), noisy.state()))
                )
    if out is not None:
        write_fidelity_study(study, Path(out), bins)
    return study


def write_fidelity_study(study: FidelityStudy, out: Path, bins: int = 50) -> None:
    out.mkdir(parents=True, exist_ok=True)
    with open(out / "fidelity.csv", "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(("algorithm", "shots", "trial", "gate_fidelity", "state_fidelity"))
        for a, s, t, g, f in study.records:
            w.writerow((a, "exact" if s is None else s, t, repr(g), repr(f)))
    edges = np.linspace(0.0, 1.0, bins + 1)
    with open(out / "histograms.csv", "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(("algorithm", "shots", "bin_lo", "bin_hi", "count"))
        for (a, s), counts in study.histograms(bins).items():
            for lo, hi, c in zip(edges[:-1], edges[1:], counts):
                w.writerow((a, "exact" if s is None else s, f"{lo:.4f}", f"{hi:.4f}", int(c)))


# ---------------------------------------------------------------------------
# Summaries of trace CSVs


def read_traces(path: str | Path) -> dict[tuple[str, str, int], list[tuple[int, float]]]:
    """Parse a traces CSV into ``{(algorithm, hyperparam, trial): records}``."""
    traces: dict = {}
    with open(path, newline="") as fh:
        reader = csv.reader(fh)
        header = next(reader, None)
        if header is None or tuple(h.strip() for h in header) != TRACE_HEADER:
            raise ParseError(f"expected header {','.join(TRACE_HEADER)}, got {header}", 1)
        for row in reader:
            line = reader.line_num
            if not row:
                continue
            if len(row) != len(TRACE_HEADER):
                raise ParseError(f"expected {len(TRACE_HEADER)} fields, got {len(row)}", line)
            try:
                trial, evals, cost = int(row[0]), int(row[3]), float(row[4])
            except ValueError as exc:
                raise ParseError(str(exc), line) from None
            if not math.isfinite(cost):
                raise ParseError(f"non-finite cost {row[4]!r}", line)
            recs = traces.setdefault((row[1], row[2], trial), [])
            if recs and evals < recs[-1][0]:
                raise ParseError("evals_used decreases within a trial", line)
            recs.append((evals, cost))
    return traces


def summarize(paths: Sequence[str | Path], reference_energy: float | None = None) -> list[dict]:
    """Per (algorithm, hyperparam): final-cost statistics and decile means."""
    groups: dict[tuple[str, str], list[list[tuple[int, float]]]] = {}
    for path in paths:
        for (algo, hp, _), recs in read_traces(path).items():
            groups.setdefault((algo, hp), []).append(recs)
    rows = []
    for (algo, hp), trials in groups.items():
        finals = np.array([r[-1][1] for r in trials])
        budget = max(r[-1][0] for r in trials)
        points = np.array([round(budget * k / 10) for k in range(1, 11)])
        curves = [
            step_interpolate(np.array([e for e, _ in r]), np.array([c for _, c in r]), points)
            for r in trials
        ]
        row = {
            "algorithm": algo,
            "hyperparam": hp,
            "trials": len(trials),
            "final_mean": float(finals.mean()),
            "final_std": float(finals.std()),
            "decile_means": [float(x) for x in np.mean(curves, axis=0)],
        }
        if reference_energy is not None:
            row["relative_error"] = relative_error(reference_energy, row["final_mean"])
        rows.append(row)
    return rows


def format_summary(rows: list[dict]) -> str:
    has_ref = any("relative_error" in r for r in rows)
    head = f"{'algorithm':<22}{'hyperparam':<12}{'trials':>7}{'final mean':>14}{'final std':>12}"
    if has_ref:
        head += f"{'dE/E_g':>12}"
    lines = [head, "-" * len(head)]
    for r in rows:
        line = (
            f"{r['algorithm']:<22}{r['hyperparam']:<12}{r['trials']:>7}"
            f"{r['final_mean']:>14.6f}{r['final_std']:>12.6f}"
        )
        if has_ref:
            line += f"{r.get('relative_error', float('nan')):>12.3e}"
        lines.append(line)
    return "\n".join(lines)


# ---------------------------------------------------------------------------
# Presets mirroring the published experiments


def _all_algorithms() -> list[dict]:
    return (
        [{"name": n} for n in ("adam", "rotosolve", "rotosolve_haar", "fraxis", "fqs")]
        + [{"name": "gate_hybrid", "p": p} for p in (0.2, 0.4, 0.6, 0.8)]
        + [{"name": "iter_hybrid_fqs", "N": n} for n in (2, 3, 4)]
        + [{"name": "iter_hybrid_rotohaar", "N": n} for n in (3, 4, 5)]
    )


PRESETS: dict[str, dict] = {
    "heisenberg1d-5q-shots": {
        "problem": {"kind": "heisenberg1d", "n": 5},
        "layers": 5,
        "algorithms": [{"name": n} for n in ("rotosolve", "rotosolve_haar", "fraxis", "fqs")]
        + [{"name": "gate_hybrid", "p": 0.5}, {"name": "iter_hybrid_fqs", "N": 2}],
        "trials": 20,
        "shots": 8192,
        "reference_energy": -8.4721,
    },
    "heisenberg1d-6q": {
        "problem": {"kind": "heisenberg1d", "n": 6},
        "layers": 10,
        "algorithms": _all_algorithms(),
        "trials": 20,
        "shots": 8192,
        "reference_energy": -11.2111,
    },
    "heisenberg1d-10q": {
        "problem": {"kind": "heisenberg1d", "n": 10},
        "layers": 10,
        "algorithms": _all_algorithms(),
        "trials": 20,
        "shots": 8192,
        "reference_energy": -18.3688,
    },
    "heisenberg2d-2x3": {
        "problem": {"kind": "heisenberg2d", "rows": 2, "cols": 3},
        "layers": 10,
        "algorithms": _all_algorithms(),
        "trials": 20,
        "shots": 8192,
        "reference_energy": -12.5175,
    },
    "heisenberg2d-3x5": {
        "problem": {"kind": "heisenberg2d", "rows": 3, "cols": 5},
        "layers": 10,
        "algorithms": _all_algorithms(),
        "trials": 20,
        "shots": 8192,
        "reference_energy": -34.5505,
    },
    "h2": {
        "problem": {"kind": "h2"},
        "layers": 5,
        "algorithms": _all_algorithms(),
        "trials": 20,
        "shots": 8192,
        "reference_energy": -1.1373,
    },
    "random-state-4q": {
        "problem": {"kind": "random_state", "n": 4},
        "layers": 2,
        "algorithms": _all_algorithms(),
        "trials": 30,
        "shots": "exact",
    },
    "random-state-5q": {
        "problem": {"kind": "random_state", "n": 5},
        "layers": 5,
        "algorithms": _all_algorithms(),
        "trials": 30,
        "shots": "exact",
    },
}


def preset(name: str) -> dict:
    if name not in PRESETS:
        raise ConfigurationError(f"unknown preset {name!r}; choose from {sorted(PRESETS)}")
    doc = json.loads(json.dumps(PRESETS[name]))
    doc.setdefault("name", name)
    doc.setdefault("out", f"runs/{name}")
    return doc
