"""Experiment harness: JSON configs, seeded batch runs, CSV/summary artifacts.

Determinism contract: a (config, seed) pair fully determines every trace.
Seeds feed only optimizer restart scatter, QAOA parameter initialization,
and reduced-recording Pauli sampling; the filter itself is deterministic.
"""

from __future__ import annotations

import json
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path
from typing import Optional

import numpy as np

from .errors import ConfigError
from .filtering import EvolutionTrace, FilterConfig, nh_evolve
from .optimize import OptimizerConfig
from .pauli import Hamiltonian, spectral_info
from .problems import parse_dimacs, sat_to_hamiltonian, tfim_hamiltonian
from .recording import (
    RecordingConfig,
    full_record_run,
    reduced_record_co,
    reduced_record_mb,
)
from .statevector import StateVector, plus_state, zero_state
from .variational import (
    AnsatzSpec,
    EntanglerLayer,
    HadamardLayer,
    QaoaConfig,
    ResourceFactors,
    SingleQubitLayer,
    ansatz_preset,
    hybrid_cucu,
    hybrid_uucc,
    qaoa_run,
    recording_ansatz,
    REFERENCE_RESOURCES,
)
from . import fixtures

CONFIG_VERSION = 1
ALGORITHMS = (
    "nonherm",
    "hybrid_cucu",
    "hybrid_uucc",
    "qaoa",
    "record_full",
    "record_co",
    "record_mb",
)


@dataclass
class ProblemSpec:
    kind: str  # "tfim" | "sat" | "fixture"
    n: int = 0
    j: float = fixtures.TFIM_COUPLING
    h_x: float = fixtures.TFIM_COUPLING
    periodic: bool = True
    dimacs_path: Optional[str] = None
    fixture_key: Optional[str] = None

    @classmethod
    def from_json(cls, obj) -> "ProblemSpec":
        if not isinstance(obj, dict) or "kind" not in obj:
            raise ConfigError("problem must be an object with a 'kind'")
        kind = obj["kind"]
        if kind == "tfim":
            try:
                return cls(
                    kind="tfim",
                    n=int(obj["n"]),
                    j=float(obj.get("j", fixtures.TFIM_COUPLING)),
                    h_x=float(obj.get("h_x", fixtures.TFIM_COUPLING)),
                    periodic=bool(obj.get("periodic", True)),
                )
            except KeyError as exc:
                raise ConfigError(f"tfim problem missing {exc}") from exc
        if kind == "sat":
            if "dimacs" in obj:
                return cls(kind="sat", dimacs_path=str(obj["dimacs"]))
            if "fixture" in obj:
                return cls(kind="sat", fixture_key=str(obj["fixture"]))
            raise ConfigError("sat problem needs 'dimacs' or 'fixture'")
        if kind == "fixture":
            return cls(kind="fixture", fixture_key=str(obj.get("key", "")))
        raise ConfigError(f"unknown problem kind {kind!r}")

    def build(self) -> Hamiltonian:
        if self.kind == "tfim":
            return tfim_hamiltonian(self.n, self.j, self.h_x, self.periodic)
        if self.kind == "sat" and self.dimacs_path is not None:
            return sat_to_hamiltonian(parse_dimacs(Path(self.dimacs_path).read_text()))
        key = self.fixture_key or ""
        if key not in fixtures.PROBLEMS:
            raise ConfigError(f"unknown fixture key {key!r}")
        return fixtures.PROBLEMS[key]()

    def label(self) -> str:
        if self.kind == "tfim":
            return f"tfim{self.n}" + ("" if self.periodic else "-open")
        if self.dimacs_path is not None:
            return Path(self.dimacs_path).stem
        return self.fixture_key or "?"


@dataclass
class ResourceInputs:
    n_u: int = 1
    n_shots: int = 1
    n_ite: int = 1
    n_h: Optional[int] = None  # None: number of Hamiltonian terms

    @classmethod
    def from_json(cls, obj) -> "ResourceInputs":
        obj = obj or {}
        return cls(
            n_u=int(obj.get("n_u", 1)),
            n_shots=int(obj.get("n_shots", 1)),
            n_ite=int(obj.get("n_ite", 1)),
            n_h=int(obj["n_h"]) if obj.get("n_h") is not None else None,
        )


def _ansatz_from_json(obj, n_qubits: int) -> AnsatzSpec:
    if obj is None:
        return AnsatzSpec(n_qubits, ())
    if isinstance(obj, str):
        spec = ansatz_preset(obj)
        if spec.n_qubits != n_qubits:
            raise ConfigError(
                f"ansatz preset {obj!r} is for {spec.n_qubits} qubits, problem has {n_qubits}"
            )
        return spec
    if not isinstance(obj, dict):
        raise ConfigError("ansatz must be a preset name or an object")
    kind = obj.get("kind", "rotation-block")
    if kind == "recording":
        return recording_ansatz(
            n_qubits,
            depth=int(obj.get("depth", 3)),
            axes=tuple(obj.get("axes", ("Ry", "Rz"))),
            closing_layer=bool(obj.get("closing_layer", True)),
        )
    if kind == "rotation-block":
        layers = []
        for _ in range(int(obj.get("repeat", 1))):
            layers.append(
                SingleQubitLayer(tuple(obj.get("axes", ("Rz", "Rx"))), obj.get("sharing", "per-qubit"))
            )
        return AnsatzSpec(n_qubits, tuple(layers))
    if kind == "layers":
        layers = []
        for entry in obj.get("layers", []):
            t = entry.get("type")
            if t == "hadamard":
                layers.append(HadamardLayer())
            elif t == "entangler":
                layers.append(EntanglerLayer(entry.get("topology", "chain")))
            elif t == "rotations":
                layers.append(
                    SingleQubitLayer(tuple(entry["axes"]), entry.get("sharing", "per-qubit"))
                )
            else:
                raise ConfigError(f"unknown layer type {t!r}")
        return AnsatzSpec(n_qubits, tuple(layers))
    raise ConfigError(f"unknown ansatz kind {kind!r}")


@dataclass
class ExperimentConfig:
    problem: ProblemSpec
    algorithm: str
    seeds: tuple[int, ...]
    output_dir: Optional[str] = None
    initial_state: str = "plus"
    max_steps: int = 50
    dt: Optional[float] = None
    margin: float = 1e-3
    eta: float = 0.1
    optimizer: dict = field(default_factory=dict)
    ansatz: object = None
    qaoa: dict = field(default_factory=dict)
    recording: dict = field(default_factory=dict)
    resources: ResourceInputs = field(default_factory=ResourceInputs)
    workers: int = 1

    @classmethod
    def from_json(cls, obj) -> "ExperimentConfig":
        if not isinstance(obj, dict):
            raise ConfigError("config must be a JSON object")
        if obj.get("version") != CONFIG_VERSION:
            raise ConfigError(f"config version must be {CONFIG_VERSION}")
        if "problem" not in obj or "algorithm" not in obj:
            raise ConfigError("config needs 'problem' and 'algorithm'")
        algorithm = obj["algorithm"]
        if algorithm not in ALGORITHMS:
            raise ConfigError(f"unknown algorithm {algorithm!r}; choose from {ALGORITHMS}")
        seeds = obj.get("seeds", [0])
        if not isinstance(seeds, list) or not seeds:
            raise ConfigError("seeds must be a nonempty list")
        flt = obj.get("filter", {})
        initial_state = obj.get("initial_state", "plus")
        if initial_state not in ("plus", "zero"):
            raise ConfigError("initial_state must be 'plus' or 'zero'")
        try:
            cfg = cls(
                problem=ProblemSpec.from_json(obj["problem"]),
                algorithm=algorithm,
                seeds=tuple(int(s) for s in seeds),
                output_dir=obj.get("output_dir"),
                initial_state=initial_state,
                max_steps=int(flt.get("max_steps", 50)),
                dt=float(flt["dt"]) if flt.get("dt") is not None else None,
                margin=float(flt.get("margin", 1e-3)),
                eta=float(flt.get("eta", 0.1)),
                optimizer=obj.get("optimizer", {}),
                ansatz=obj.get("ansatz"),
                qaoa=obj.get("qaoa", {}),
                recording=obj.get("recording", {}),
                resources=ResourceInputs.from_json(obj.get("resources")),
                workers=int(obj.get("workers", 1)),
            )
        except (TypeError, ValueError) as exc:
            raise ConfigError(f"bad config value: {exc}") from exc
        if cfg.workers < 1:
            raise ConfigError("workers must be >= 1")
        return cfg

    def filter_config(self) -> FilterConfig:
        try:
            return FilterConfig(
                max_steps=self.max_steps, dt=self.dt, margin=self.margin, eta=self.eta
            )
        except ValueError as exc:
            raise ConfigError(f"bad filter config: {exc}") from exc

    def optimizer_config(self, seed: int) -> OptimizerConfig:
        obj = dict(self.optimizer)
        obj.setdefault("seed", seed)
        try:
            return OptimizerConfig(**obj)
        except (TypeError, ValueError) as exc:
            raise ConfigError(f"bad optimizer config: {exc}") from exc

    def recording_config(self, ham: Hamiltonian, seed: int) -> RecordingConfig:
        obj = dict(self.recording)
        mode = {"record_full": "full", "record_co": "reduced-co", "record_mb": "reduced-mb"}[
            self.algorithm
        ]
        ansatz = _ansatz_from_json(
            obj.pop("ansatz", self.ansatz or {"kind": "recording"}), ham.n_qubits
        )
        try:
            return RecordingConfig(
                segment_steps=int(obj.get("segment_steps", 1)),
                repetitions=int(obj.get("repetitions", self.max_steps)),
                ansatz=ansatz,
                optimizer=self.optimizer_config(seed),
                mode=mode,
                c_b=float(obj.get("c_b", 0.5)),
                c_r_schedule=tuple(obj.get("c_r_schedule", ())),
                eta=float(obj.get("eta", self.eta)),
                dt=self.dt,
                margin=self.margin,
                loss=obj.get("loss", "squared"),
                local_loss=bool(obj.get("local_loss", False)),
                fidelity_floor=float(obj.get("fidelity_floor", 0.9)),
            )
        except ValueError as exc:
            raise ConfigError(f"bad recording config: {exc}") from exc

    def initial(self, n_qubits: int) -> StateVector:
        return plus_state(n_qubits) if self.initial_state == "plus" else zero_state(n_qubits)


@dataclass
class RunSummary:
    problem: str
    algorithm: str
    seed: int
    final_energy: float
    ground_energy: float
    relative_error: float
    steps_to_accuracy: Optional[int]
    final_norm: float
    wall_time_s: float
    factors: ResourceFactors

    @property
    def n_depth(self) -> int:
        return self.factors.depth()

    @property
    def n_meas(self) -> int:
        return self.factors.measurements()

    def to_json(self) -> dict:
        return {
            "problem": self.problem,
            "algorithm": self.algorithm,
            "seed": self.seed,
            "final_energy": self.final_energy,
            "ground_energy": self.ground_energy,
            "relative_error": self.relative_error,
            "steps_to_accuracy": self.steps_to_accuracy,
            "final_norm": self.final_norm,
            "wall_time_s": self.wall_time_s,
            "n_step": self.factors.n_step,
            "n_u": self.factors.n_u,
            "n_h": self.factors.n_h,
            "n_para": self.factors.n_para,
            "n_ite": self.factors.n_ite,
            "n_shots": self.factors.n_shots,
            "qaoa_style": self.factors.qaoa_style,
            "n_depth": self.n_depth,
            "n_meas": self.n_meas,
            "depth_cell": self.factors.depth_cell(),
            "meas_cell": self.factors.meas_cell(),
        }

    @classmethod
    def from_json(cls, obj: dict) -> "RunSummary":
        return cls(
            problem=obj["problem"],
            algorithm=obj["algorithm"],
            seed=obj["seed"],
            final_energy=obj["final_energy"],
            ground_energy=obj["ground_energy"],
            relative_error=obj["relative_error"],
            steps_to_accuracy=obj["steps_to_accuracy"],
            final_norm=obj["final_norm"],
            wall_time_s=obj["wall_time_s"],
            factors=ResourceFactors(
                obj["n_step"],
                obj["n_u"],
                obj["n_h"],
                obj["n_para"],
                obj["n_ite"],
                obj["n_shots"],
                obj["qaoa_style"],
            ),
        )


def relative_error(final_energy: float, ground_energy: float) -> float:
    """|E_f - E_g| / |E_g|, falling back to |E_f| when E_g = 0."""
    if ground_energy != 0.0:
        return abs(final_energy - ground_energy) / abs(ground_energy)
    return abs(final_energy)


def run_single(cfg: ExperimentConfig, seed: int) -> tuple[EvolutionTrace, RunSummary]:
    ham = cfg.problem.build()
    psi0 = cfg.initial(ham.n_qubits)
    started = time.perf_counter()
    n_para = 1
    qaoa_style = False

    if cfg.algorithm == "nonherm":
        trace = nh_evolve(psi0, ham, cfg.filter_config())
    elif cfg.algorithm == "hybrid_cucu":
        block = _ansatz_from_json(cfg.ansatz, ham.n_qubits)
        n_para = max(block.param_count, 1)
        trace = hybrid_cucu(psi0, ham, block, cfg.filter_config(), cfg.optimizer_config(seed))
    elif cfg.algorithm == "hybrid_uucc":
        front = _ansatz_from_json(cfg.ansatz, ham.n_qubits)
        n_para = max(front.param_count, 1)
        trace = hybrid_uucc(psi0, ham, front, cfg.filter_config(), cfg.optimizer_config(seed))
    elif cfg.algorithm == "qaoa":
        depth = int(cfg.qaoa.get("depth", 1))
        rng = np.random.default_rng(seed)
        scale = float(cfg.qaoa.get("init_scale", 0.1))
        gammas = cfg.qaoa.get("initial_gammas")
        betas = cfg.qaoa.get("initial_betas")
        if gammas is None:
            gammas = rng.uniform(-scale, scale, depth).tolist()
        if betas is None:
            betas = rng.uniform(-scale, scale, depth).tolist()
        try:
            qcfg = QaoaConfig(
                depth=depth,
                optimizer=cfg.optimizer_config(seed),
                initial_gammas=gammas,
                initial_betas=betas,
            )
        except ValueError as exc:
            raise ConfigError(f"bad qaoa config: {exc}") from exc
        result = qaoa_run(ham, qcfg, psi0)
        trace = result.trace
        n_para = 2 * depth
        qaoa_style = True
    elif cfg.algorithm in ("record_full", "record_co", "record_mb"):
        rcfg = cfg.recording_config(ham, seed)
        n_para = max(rcfg.ansatz.param_count, 1)
        reference = zero_state(ham.n_qubits)
        if cfg.algorithm == "record_full":
            trace = full_record_run(reference, ham, rcfg)
        elif cfg.algorithm == "record_co":
            trace = reduced_record_co(reference, ham, rcfg)
        else:
            trace = reduced_record_mb(reference, ham, rcfg, seed=seed)
    else:  # pragma: no cover - guarded by config validation
        raise ConfigError(f"unknown algorithm {cfg.algorithm!r}")

    wall = time.perf_counter() - started
    info = spectral_info(ham)
    steps = trace.steps_to_accuracy(info.ground_energy, 0.01)
    factors = ResourceFactors(
        n_step=steps if steps is not None else trace.final.step,
        n_u=cfg.resources.n_u,
        n_h=cfg.resources.n_h if cfg.resources.n_h is not None else len(ham.terms),
        n_para=n_para,
        n_ite=cfg.resources.n_ite,
        n_shots=cfg.resources.n_shots,
        qaoa_style=qaoa_style,
    )
    summary = RunSummary(
        problem=cfg.problem.label(),
        algorithm=cfg.algorithm,
        seed=seed,
        final_energy=trace.final.energy,
        ground_energy=info.ground_energy,
        relative_error=relative_error(trace.final.energy, info.ground_energy),
        steps_to_accuracy=steps,
        final_norm=trace.final.norm,
        wall_time_s=wall,
        factors=factors,
    )
    return trace, summary


@dataclass
class ExperimentResult:
    config: ExperimentConfig
    traces: dict[int, EvolutionTrace]
    summaries: dict[int, RunSummary]

    def aggregate(self) -> dict:
        """Per-step mean/min/max energy across seeds (the error-bar data)."""
        seed_order = list(self.config.seeds)
        all_rows = [self.traces[s].rows for s in seed_order]
        n_steps = min(len(rows) for rows in all_rows)
        energies = np.array([[rows[i].energy for i in range(n_steps)] for rows in all_rows])
        return {
            "steps": [all_rows[0][i].step for i in range(n_steps)],
            "energy_mean": energies.mean(axis=0).tolist(),
            "energy_min": energies.min(axis=0).tolist(),
            "energy_max": energies.max(axis=0).tolist(),
        }


def run_experiment(cfg: ExperimentConfig) -> ExperimentResult:
    """One trace per seed, merged deterministically in seed order."""
    if cfg.workers > 1:
        with ProcessPoolExecutor(max_workers=cfg.workers) as pool:
            results = list(pool.map(_run_single_star, [(cfg, s) for s in cfg.seeds]))
    else:
        results = [run_single(cfg, s) for s in cfg.seeds]
    traces = {s: tr for s, (tr, _) in zip(cfg.seeds, results)}
    summaries = {s: sm for s, (_, sm) in zip(cfg.seeds, results)}
    return ExperimentResult(cfg, traces, summaries)


def _run_single_star(args):
    return run_single(*args)


def write_outputs(result: ExperimentResult, out_dir) -> list[Path]:
    """Trace CSV per seed plus one summary.json; returns written paths."""
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    written = []
    for seed in result.config.seeds:
        path = out / f"trace_seed{seed}.csv"
        with open(path, "w") as fh:
            result.traces[seed].write_csv(fh)
        written.append(path)
    summary_path = out / "summary.json"
    payload = {
        "problem": result.config.problem.label(),
        "algorithm": result.config.algorithm,
        "seeds": list(result.config.seeds),
        "per_seed": [result.summaries[s].to_json() for s in result.config.seeds],
        "aggregate": result.aggregate(),
    }
    with open(summary_path, "w") as fh:
        json.dump(payload, fh, indent=2, sort_keys=True)
        fh.write("\n")
    written.append(summary_path)
    return written


# -- comparison report ------------------------------------------------------------


def compare_report(summaries: list[RunSummary]) -> tuple[str, str]:
    """Side-by-side table (text, csv) in the a*b = c rendering.

    All summaries must describe the same problem.
    """
    if not summaries:
        raise ValueError("no summaries to compare")
    problems = {s.problem for s in summaries}
    if len(problems) != 1:
        raise ValueError(f"summaries mix problems: {sorted(problems)}")
    problem = problems.pop()
    header = ["algorithm", "seed", "steps_to_1pct", "depth", "meas"]
    rows = []
    for s in summaries:
        rows.append(
            [
                s.algorithm,
                str(s.seed),
                "not reached" if s.steps_to_accuracy is None else str(s.steps_to_accuracy),
                s.factors.depth_cell(),
                s.factors.meas_cell(),
            ]
        )
    widths = [max(len(header[i]), *(len(r[i]) for r in rows)) for i in range(len(header))]
    lines = [f"problem: {problem}"]
    lines.append("  ".join(header[i].ljust(widths[i]) for i in range(len(header))))
    for r in rows:
        lines.append("  ".join(r[i].ljust(widths[i]) for i in range(len(header))))
    text = "\n".join(lines) + "\n"
    csv_lines = [",".join(["problem"] + header)]
    for r in rows:
        csv_lines.append(",".join([problem] + r))
    return text, "\n".join(csv_lines) + "\n"


def reference_resource_table() -> str:
    """The built-in benchmark resource table in the a*b = c rendering."""
    problems = list(REFERENCE_RESOURCES)
    lines = []
    header = ["", *problems]
    rows = [
        ("qaoa (depth)", [REFERENCE_RESOURCES[p]["qaoa"].depth_cell() for p in problems]),
        ("hybrid (depth)", [REFERENCE_RESOURCES[p]["hybrid"].depth_cell() for p in problems]),
        ("qaoa (meas)", [REFERENCE_RESOURCES[p]["qaoa"].meas_cell() for p in problems]),
        ("hybrid (meas)", [REFERENCE_RESOURCES[p]["hybrid"].meas_cell() for p in problems]),
    ]
    table = [header] + [[label, *cells] for label, cells in rows]
    widths = [max(len(row[i]) for row in table) for i in range(len(header))]
    for row in table:
        lines.append("  ".join(row[i].ljust(widths[i]) for i in range(len(row))).rstrip())
    return "\n".join(lines) + "\n"
