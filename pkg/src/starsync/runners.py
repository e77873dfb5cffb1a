"""Command implementations shared by the HTTP service and the CLI.

Each runner takes a validated ``RunConfig`` and returns a JSON-ready report
plus named CSV artifacts.  All numerical work happens in the core modules;
this layer only orchestrates and formats.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import __version__
from .config import RunConfig
from .dynamics import (
    init_state,
    make_dissipation,
    occupation_series,
    position_trajectory,
    sync_metrics,
)
from .errors import DiagnosticsError, ParameterError
from .fock import fock_oracle_evolve
from .model import build_potential
from .modes import (
    classify_exact_modes,
    exact_diagonalize,
    g_eigensystem,
    perturb_corrections,
)
from .reporting import csv_text, modes_csv, sweep_csv, trajectory_csv
from .sweep import frequency_sweep, scaling_fit
from .transform import build_canonical_transform


@dataclass(frozen=True)
class RunOutcome:
    report: dict
    artifacts: dict[str, str]


def _base_report(cfg: RunConfig, command: str) -> dict:
    return {
        "command": command,
        "version": __version__,
        "config": cfg.model_dump(mode="json"),
    }


def _mode_pipeline(cfg: RunConfig):
    params = cfg.network.to_params()
    decomp = build_potential(params)
    modes = perturb_corrections(g_eigensystem(decomp), decomp)
    return params, decomp, modes


def run_modes(cfg: RunConfig) -> RunOutcome:
    """Spectrum report: corrected constants, both frequency sets, tags."""
    params, decomp, modes = _mode_pipeline(cfg)
    spectrum = exact_diagonalize(decomp)
    i_plus, i_minus, protected = classify_exact_modes(spectrum, modes)
    exact_for_mode = [i_plus, i_minus, *protected]  # (+, -, 0_j) order

    tags = ["leaking+", "leaking-"] + ["protected"] * modes.n_protected
    rows = []
    for mode_idx in range(modes.size):
        rows.append(
            {
                "mode": mode_idx,
                "tag": tags[mode_idx],
                "k_corrected": float(modes.k_corr[mode_idx]),
                "freq_perturbative": float(modes.freqs[mode_idx]),
                "freq_exact": float(spectrum.freqs[exact_for_mode[mode_idx]]),
            }
        )
    rows.sort(key=lambda r: r["freq_perturbative"])

    report = _base_report(cfg, "modes")
    report.update(
        {
            "xi": decomp.xi,
            "regime_warning": modes.regime_warning,
            "theta_mix": modes.theta_mix,
            "k_av": decomp.k_av,
            "g_av": decomp.g_av,
            "delta": decomp.delta,
            "lambda_sq": decomp.lambda_sq,
            "modes": rows,
        }
    )
    return RunOutcome(report=report, artifacts={"modes.csv": modes_csv(rows)})


def run_sweep(cfg: RunConfig) -> RunOutcome:
    """Coupling sweep: frequency table CSV plus fit summary."""
    cfg.require("sweep")
    sw = cfg.sweep
    params = cfg.network.to_params()
    result = frequency_sweep(
        params, sw.g_min, sw.g_max, sw.steps, tuple(sw.offsets), grid=sw.grid
    )
    fit = result.fit
    if sw.fit_threshold is not None:
        fit = scaling_fit(result, sw.fit_threshold)

    report = _base_report(cfg, "sweep")
    report.update(
        {
            "k_av": result.k_av,
            "g_grid": [float(g) for g in result.g_grid],
            "spread_first": float(result.spread[0]),
            "spread_last": float(result.spread[-1]),
            "fit": None
            if fit is None
            else {
                "exponent": fit.exponent,
                "stderr": fit.stderr,
                "constant": fit.constant,
                "n_points": fit.n_points,
            },
        }
    )
    return RunOutcome(report=report, artifacts={"sweep.csv": sweep_csv(result)})


def _evolution_setup(cfg: RunConfig):
    cfg.require("initial_state")
    cfg.require("time")
    params, decomp, modes = _mode_pipeline(cfg)
    if len(cfg.initial_state.preparations) != params.n + 1:
        raise ParameterError(
            f"initial_state.preparations must list all {params.n + 1} modes"
        )
    transform = build_canonical_transform(modes, params)
    diss = make_dissipation(
        modes,
        params,
        gamma_plus=cfg.dissipation.gamma_plus,
        gamma_minus=cfg.dissipation.gamma_minus,
    )
    preps = [p.to_prep() for p in cfg.initial_state.preparations]
    times = np.linspace(0.0, cfg.time.t_max, cfg.time.samples)
    return params, decomp, modes, transform, diss, preps, times


def run_evolve(cfg: RunConfig) -> RunOutcome:
    """Gaussian-engine trajectory with synchronization metrics."""
    params, decomp, modes, transform, diss, preps, times = _evolution_setup(cfg)
    state0 = init_state(preps, frame=cfg.initial_state.frame)
    labels = cfg.observables or [f"x_{l + 1}" for l in range(params.n + 1)]
    traj = position_trajectory(state0, transform, diss, modes, times, labels)
    for name, values in occupation_series(state0, transform, diss, modes, times).items():
        traj.series[name] = values

    report = _base_report(cfg, "evolve")
    report.update(
        {
            "freqs_normal": [float(w) for w in modes.freqs],
            "gamma_plus": diss.gamma_plus,
            "gamma_minus": diss.gamma_minus,
            "nbar_plus": diss.nbar_plus,
            "nbar_minus": diss.nbar_minus,
            "xi": decomp.xi,
            "regime_warning": modes.regime_warning,
        }
    )
    try:
        metrics = sync_metrics(traj, window=cfg.metrics.window)
        report["metrics"] = {
            "correlations": metrics.correlations,
            "dominant_freqs": metrics.dominant_freqs,
            "max_freq_diff": metrics.max_freq_diff,
            "window_start": metrics.window_start,
            "window_end": metrics.window_end,
        }
    except DiagnosticsError as exc:
        report["metrics_error"] = {"code": exc.code, "message": str(exc)}
    return RunOutcome(report=report, artifacts={"trajectory.csv": trajectory_csv(traj)})


def run_oracle(cfg: RunConfig) -> RunOutcome:
    """Fock-oracle run compared against the Gaussian engine."""
    cfg.require("oracle")
    params, decomp, modes, transform, diss, preps, times = _evolution_setup(cfg)
    if cfg.initial_state.frame != "normal":
        raise ParameterError(
            "the Fock oracle requires a normal-frame product preparation"
        )
    state0 = init_state(preps, frame="normal")
    labels = [f"x_{l + 1}" for l in range(params.n + 1)]
    gauss = position_trajectory(state0, transform, diss, modes, times, labels)
    gauss_occ = occupation_series(state0, transform, diss, modes, times)

    fock, diag = fock_oracle_evolve(
        params,
        modes,
        diss,
        cutoff=cfg.oracle.cutoff,
        preps=preps,
        times=times,
        dim_cap=cfg.oracle.dim_cap,
        step_check=cfg.oracle.step_check,
        picture=cfg.oracle.picture,
    )

    agreement = {}
    series: dict[str, np.ndarray] = {}
    for label in labels:
        series[f"{label}_gaussian"] = gauss.series[label]
        series[f"{label}_fock"] = fock.series[label]
        agreement[label] = float(np.max(np.abs(gauss.series[label] - fock.series[label])))
    for name in ("n_plus", "n_minus"):
        series[f"{name}_gaussian"] = gauss_occ[name]
        series[f"{name}_fock"] = fock.series[name]
        agreement[name] = float(np.max(np.abs(gauss_occ[name] - fock.series[name])))

    header = ["t"] + sorted(series)
    columns = [times] + [series[k] for k in sorted(series)]
    report = _base_report(cfg, "oracle")
    report.update(
        {
            "agreement": agreement,
            "max_disagreement": max(agreement.values()),
            "diagnostics": diag,
            "freqs_normal": [float(w) for w in modes.freqs],
        }
    )
    return RunOutcome(report=report, artifacts={"oracle.csv": csv_text(header, columns)})


RUNNERS = {
    "modes": run_modes,
    "sweep": run_sweep,
    "evolve": run_evolve,
    "oracle": run_oracle,
}
