from __future__ import annotations

import sys
from argparse import Namespace
from pathlib import Path

import numpy as np

from app.cli.config import ExperimentConfig, load_config
from app.feedforward.budget import loss_budget, timing_report
from app.feedforward.compensation import random_fiber_unitary, simulate_compensation
from app.montecarlo.output import write_sweep
from app.montecarlo.sweep import SweepSpec, sweep_bloch
from app.optics.metrics import concurrence, fidelity_pure, purity
from app.optics.serialization import density_to_dict
from app.optics.states import BELL_STATES, NAMED_STATES, DensityMatrix
from app.tomography.counts import (
    CountRecord, probabilities_from_state, read_counts_csv, sample_counts, write_counts_csv,
)
from app.tomography.reconstruction import reconstruct_from_counts
from app.tomography.suites import TomographySetting, suite_for
from app.utils.enums import ExitCode, NoiseModel, Plane, TemplateName
from app.utils.exceptions import ConfigError
from app.utils.logging import logger
from app.utils.processor_base import ProcessorBase
from app.utils.template_manager import TemplateManager
from app.utils.utilities import Utilities

TARGETS = ("psi-minus", *NAMED_STATES)


def resolve_target(name: str, dim: int):
    """Named single-photon state for dim 2, Bell state for dim 4."""
    if dim == 4:
        if name not in BELL_STATES:
            raise ConfigError(f"target '{name}' is not a two-photon state")
        return BELL_STATES[name]
    if name not in NAMED_STATES:
        raise ConfigError(f"target '{name}' is not a single-photon state")
    return NAMED_STATES[name]


def require_seed(args: Namespace) -> int:
    if args.seed is not None:
        return args.seed
    if sys.stdin is not None and sys.stdin.isatty():
        logger.warning({'message': "no --seed given in an interactive session; using seed 0"})
        return 0
    raise ConfigError("--seed is required for reproducible runs")


class SweepCommand(ProcessorBase):
    def _process(self, args: Namespace) -> ExitCode:
        config: ExperimentConfig = load_config(args.config, args.config_format)
        overrides = {"seed": require_seed(args)}
        if args.plane:
            overrides["plane"] = Plane(args.plane)
        if args.feedforward:
            overrides["feedforward"] = args.feedforward == "on"
        if args.infinite_statistics:
            overrides["infinite_statistics"] = True
        spec = SweepSpec.model_validate({**config.sweep.model_dump(), **overrides})
        out_dir = Path(args.out) if args.out else config.output_dir
        result = sweep_bloch(spec, config.switch)
        csv_path, json_path = write_sweep(result, out_dir)
        fidelities = result.fidelities
        print(TemplateManager().render_template(
            TemplateName.SWEEP_SUMMARY,
            plane=result.plane.value,
            feedforward=result.feedforward,
            n_points=len(result.points),
            mean=result.mean_fidelity,
            low=float(fidelities.min()),
            high=float(fidelities.max()),
            csv_path=csv_path,
            json_path=json_path,
        ), end="")
        return ExitCode.SUCCESS


class TomoCommand(ProcessorBase):
    def _process(self, args: Namespace) -> ExitCode:
        records = read_counts_csv(args.counts)
        dim = args.dim or records[0].setting.dim
        if any(record.setting.dim != dim for record in records):
            raise ConfigError(f"count file rows do not match --dim {dim}")
        target_name = args.target or ("psi-minus" if dim == 4 else "H")
        target = resolve_target(target_name, dim)
        result = reconstruct_from_counts(records, dim)
        rho = result.rho
        report = {
            "dim": dim,
            "target": target_name,
            "fidelity": round(fidelity_pure(rho, target), 12),
            "purity": round(purity(rho), 12),
            "concurrence": round(concurrence(rho), 12) if dim == 4 else None,
            "residual": round(result.residual, 12),
            "iterations": result.iterations,
            "converged": result.converged,
            "rho": density_to_dict(rho),
        }
        if args.out:
            Utilities.atomic_write_text(args.out, Utilities.to_json(report))
        rows = [
            "  ".join(f"({Utilities.fmt6(z.real)}, {Utilities.fmt6(z.imag)})" for z in row)
            for row in rho.matrix
        ]
        print(TemplateManager().render_template(
            TemplateName.TOMOGRAPHY_REPORT,
            dim=dim,
            n_settings=len(records),
            target=target_name,
            fidelity=report["fidelity"],
            purity=report["purity"],
            concurrence=report["concurrence"],
            residual=result.residual,
            iterations=result.iterations,
            converged=result.converged,
            rows=rows,
        ), end="")
        return ExitCode.SUCCESS


class TimingCommand(ProcessorBase):
    def _process(self, args: Namespace) -> ExitCode:
        config = load_config(args.config, args.config_format)
        report = timing_report(config.timing, config.switch)
        losses = loss_budget(config.loss)
        if args.format == "json":
            print(Utilities.to_json({
                "timing": {key: value for key, value in vars(report).items()},
                "loss": {
                    "components": [component.model_dump() for component in losses.components],
                    "total_db": losses.total_db,
                    "transmission": losses.transmission,
                },
            }), end="")
        else:
            print(TemplateManager().render_template(TemplateName.TIMING_REPORT, report=report, loss=losses), end="")
        return ExitCode.SUCCESS if report.feasible else ExitCode.INFEASIBLE


class SimulateCountsCommand(ProcessorBase):
    def _process(self, args: Namespace) -> ExitCode:
        seed = require_seed(args)
        dim = args.dim
        state = resolve_target(args.state, dim)
        rho = DensityMatrix.from_pure(state.vector if dim == 2 else state)
        suite = list(suite_for(dim))
        if args.settings:
            if not 1 <= args.settings <= len(suite):
                raise ConfigError(f"--settings must lie in [1, {len(suite)}]")
            suite = suite[:args.settings]
        probabilities = probabilities_from_state(rho, suite)
        if args.exact:
            records = [_exact_record(setting, row, args.counts) for setting, row in zip(suite, probabilities)]
        else:
            records = sample_counts(suite, probabilities, args.counts, seed, NoiseModel(args.noise_model))
        path = write_counts_csv(records, args.out)
        print(f"wrote {len(records)} settings to {path}")
        return ExitCode.SUCCESS


def _exact_record(setting: TomographySetting, probabilities: np.ndarray, n: int) -> CountRecord:
    return CountRecord(setting, tuple(int(round(p * n)) for p in probabilities))


class CompensateCommand(ProcessorBase):
    def _process(self, args: Namespace) -> ExitCode:
        seed = require_seed(args)
        fiber = random_fiber_unitary(seed)
        report = simulate_compensation(fiber, seed, tolerance=args.tolerance, max_iterations=args.max_iterations)
        print(TemplateManager().render_template(TemplateName.COMPENSATION_REPORT, seed=seed, report=report), end="")
        return ExitCode.SUCCESS if report.converged else ExitCode.RUNTIME_ERROR
