"""End-to-end analysis: dataset in, significance report and artifacts out."""

from __future__ import annotations

import dataclasses
import math
import warnings as _warnings
from dataclasses import dataclass, field
from pathlib import Path
from typing import Optional, Sequence

import numpy as np

from .dataio import emit_report, parse_dataset, write_table_csv
from .errors import DataError, DomainError
from .leggett_garg import KKind, k_n_classical, k_n_quantum_from_survival, lgi_bound
from .montecarlo import (
    MIN_REPLICAS_FOR_CLAIM,
    PseudoConfig,
    SignificanceReport,
    chi_square_quantum,
    classical_null_distribution,
    count_violations,
    fit_beta_binomial,
    z_significance,
)
from .oscillation import OscParams, accumulated_phase, survival_probability
from .selection import (
    MISMATCH_MODES,
    MeasuredPoint,
    attach_phases,
    evaluate_tuple,
    select_ntuples,
)

MODES = ("analyze", "simulate", "curve", "triples")
STANDARD_ORDERS = (3, 4)

CHI2_CAVEAT = (
    "Tuples share measured points and their K values are strongly correlated; "
    "the chi-square against the model curve treats them as independent and is "
    "a descriptive summary, not a calibrated goodness-of-fit."
)


@dataclass
class RunConfig:
    """Everything one invocation needs; mirrored field-for-field by the config JSON."""

    params: OscParams
    mode: str = "analyze"
    data: Optional[Path] = None
    out_dir: Path = Path("nulgi_out")
    order: int = 3
    tolerance: float = 0.005
    mismatch_mode: str = "relative"
    pseudo: PseudoConfig = field(default_factory=PseudoConfig)
    truth: str = "quantum"
    bins: int = 30
    e_min_gev: float = 0.5
    e_max_gev: float = 50.0
    rel_error: float = 0.05
    flat_p: float = 0.5
    fit_curve: bool = False
    allow_high_order: bool = False

    def __post_init__(self) -> None:
        if self.mode not in MODES:
            raise DomainError(f"mode must be one of {MODES}, got {self.mode!r}")
        if not isinstance(self.order, int) or self.order < 3:
            raise DomainError(f"order must be an integer >= 3, got {self.order}")
        if self.order not in STANDARD_ORDERS and not self.allow_high_order:
            raise DomainError(
                f"order {self.order} is outside the validated range {STANDARD_ORDERS}; "
                "set allow_high_order to proceed anyway"
            )
        if not self.tolerance > 0.0:
            raise DomainError(f"tolerance must be positive, got {self.tolerance}")
        if self.mismatch_mode not in MISMATCH_MODES:
            raise DomainError(f"mismatch_mode must be one of {MISMATCH_MODES}")


def curve_table(
    params: OscParams, e_min_gev: float, e_max_gev: float, points: int = 400
) -> tuple[np.ndarray, np.ndarray]:
    """Dense model survival curve on a log energy grid."""
    if not 0.0 < e_min_gev < e_max_gev:
        raise DomainError("need 0 < e_min_gev < e_max_gev")
    energies = np.geomspace(e_min_gev, e_max_gev, points)
    psis = np.array([accumulated_phase(params, e) for e in energies])
    return energies, np.asarray(survival_probability(params.sin2_2theta, psis))


def fit_curve_params(
    dataset: Sequence[MeasuredPoint],
    params: OscParams,
    dm2_lo: float = 1.0e-4,
    dm2_hi: float = 1.0e-2,
    grid: int = 201,
    rounds: int = 4,
) -> OscParams:
    """Least-squares fit of the mass splitting and amplitude to the data.

    For a fixed splitting the model is linear in the amplitude, so the
    optimal amplitude has a closed form; the splitting is scanned on a log
    grid which is then refined around the minimum. Deterministic; returns
    params with the two fitted fields replaced.
    """
    energies = np.array([p.energy_gev for p in dataset])
    probs = np.array([p.p_mumu for p in dataset])
    sigmas = np.array([max(p.sigma, 1.0e-6) for p in dataset])
    weights = 1.0 / sigmas**2

    base = dataclasses.replace(params, dm2=1.0)
    psi_per_dm2 = np.array([accumulated_phase(base, e) for e in energies])

    def best_for(dm2_values: np.ndarray) -> tuple[float, float, float]:
        best = (math.inf, params.dm2, params.sin2_2theta)
        for dm2 in dm2_values:
            q = np.sin(psi_per_dm2 * dm2) ** 2
            denom = float(np.sum(weights * q * q))
            amp = 0.0 if denom == 0.0 else float(
                np.sum(weights * q * (1.0 - probs)) / denom
            )
            amp = min(1.0, max(0.0, amp))
            chi2 = float(np.sum(weights * (probs - (1.0 - amp * q)) ** 2))
            if chi2 < best[0]:
                best = (chi2, float(dm2), amp)
        return best

    lo, hi = dm2_lo, dm2_hi
    best = best_for(np.geomspace(lo, hi, grid))
    for _ in range(rounds - 1):
        step = (hi / lo) ** (1.0 / (grid - 1))
        lo = best[1] / step**4
        hi = best[1] * step**4
        best = best_for(np.geomspace(lo, hi, grid))
    return dataclasses.replace(params, dm2=best[1], sin2_2theta=best[2])


def _tuple_row(ptuple, k_value, dataset, model_params) -> dict:
    comps = [dataset[i] for i in ptuple.indices]
    target = dataset[ptuple.target_index]
    phases = [float(p.psi) for p in comps]
    phase_sum = float(sum(phases))
    s2t = model_params.sin2_2theta
    model = k_n_quantum_from_survival(
        [float(survival_probability(s2t, p)) for p in phases],
        float(survival_probability(s2t, phase_sum)),
        kind=KKind.QUANTUM_THEORY,
    ).value
    classical = k_n_classical([2.0 * p.p_mumu - 1.0 for p in comps]).value
    return {
        "component_indices": list(ptuple.indices),
        "target_index": ptuple.target_index,
        "n": ptuple.n,
        "mismatch": ptuple.mismatch,
        "component_phases": phases,
        "phase_sum": phase_sum,
        "target_psi": float(target.psi),
        "k_value": k_value.value,
        "k_sigma": k_value.uncertainty,
        "violation": bool(k_value.value > lgi_bound(ptuple.n)),
        "k_classical_data": classical,
        "k_quantum_model": model,
    }


def _config_echo(config: RunConfig, fitted: Optional[OscParams]) -> dict:
    echo = dataclasses.asdict(config)
    echo["data"] = None if config.data is None else str(config.data)
    echo["out_dir"] = str(config.out_dir)
    if fitted is not None:
        echo["fitted_params"] = dataclasses.asdict(fitted)
    return echo


def _analyze(
    points: Sequence[MeasuredPoint], config: RunConfig
) -> tuple[SignificanceReport, Optional[np.ndarray]]:
    """Shared implementation; returns the report plus the raw null counts."""
    if len(points) < config.order:
        raise DataError(
            f"need at least {config.order} points for order {config.order}, "
            f"got {len(points)}"
        )
    decorated = attach_phases(points, config.params)
    tuples = select_ntuples(
        decorated, config.order, config.tolerance, config.mismatch_mode
    )
    pseudo = dataclasses.replace(config.pseudo, tolerance=config.tolerance)

    if not tuples:
        report = SignificanceReport(
            n_tuples=0,
            n_violations_observed=None,
            null_fit=None,
            z_score=None,
            chi2_quantum=None,
            dof=None,
            status="no_tuples",
            config=_config_echo(config, None),
            notes=["No phase tuples satisfied the sum rule at this tolerance."],
        )
        return report, None

    report_warnings: list[str] = []
    fitted = None
    model_params = config.params
    if config.fit_curve:
        fitted = fit_curve_params(decorated, config.params)
        model_params = fitted

    k_values = [evaluate_tuple(t, decorated) for t in tuples]
    observed = count_violations(k_values, config.order)

    if pseudo.replicas < MIN_REPLICAS_FOR_CLAIM:
        report_warnings.append(
            f"only {pseudo.replicas} replicas; significance estimates are unstable"
        )
    if all(p.sigma == 0.0 for p in decorated):
        report_warnings.append("all uncertainties are zero; the null is a point mass")

    with _warnings.catch_warnings():
        _warnings.simplefilter("ignore")
        counts = classical_null_distribution(decorated, tuples, pseudo)
    fit = fit_beta_binomial(counts, len(tuples))
    z = z_significance(observed, fit)
    if fit.kind == "degenerate":
        report_warnings.append(
            "null counts carry no variance; z uses the 1/replicas floor"
        )

    try:
        chi2, dof = chi_square_quantum(k_values, model_params)
    except DomainError as exc:
        chi2, dof = None, None
        report_warnings.append(f"chi-square skipped: {exc}")

    report = SignificanceReport(
        n_tuples=len(tuples),
        n_violations_observed=observed,
        null_fit=fit,
        z_score=float(z),
        chi2_quantum=chi2,
        dof=dof,
        status="ok",
        config=_config_echo(config, fitted),
        tuples=[
            _tuple_row(t, kv, decorated, model_params)
            for t, kv in zip(tuples, k_values)
        ],
        warnings=report_warnings,
        notes=[CHI2_CAVEAT],
    )
    return report, counts


def analyze_dataset(
    points: Sequence[MeasuredPoint], config: RunConfig
) -> SignificanceReport:
    """Run the full significance analysis in memory.

    Attaches phases, selects tuples, evaluates the observed statistic,
    builds the classical null, fits it, and scores the observation. Writes
    nothing; use run_analysis for the artifact-emitting variant.
    """
    report, _ = _analyze(points, config)
    return report


def _write_artifacts(
    report: SignificanceReport,
    points: Sequence[MeasuredPoint],
    config: RunConfig,
    counts: Optional[np.ndarray],
) -> None:
    out = Path(config.out_dir)
    out.mkdir(parents=True, exist_ok=True)
    emit_report(report, out / "report.json")

    write_table_csv(
        out / "tuples.csv",
        (
            "component_indices", "target_index", "n", "mismatch",
            "component_phases", "phase_sum", "target_psi", "k_value",
            "k_sigma", "violation", "k_classical_data", "k_quantum_model",
        ),
        [
            (
                ";".join(str(i) for i in t["component_indices"]),
                t["target_index"],
                t["n"],
                float(t["mismatch"]),
                ";".join(repr(p) for p in t["component_phases"]),
                float(t["phase_sum"]),
                float(t["target_psi"]),
                float(t["k_value"]),
                float(t["k_sigma"]) if t["k_sigma"] is not None else "",
                int(t["violation"]),
                float(t["k_classical_data"]),
                float(t["k_quantum_model"]),
            )
            for t in report.tuples
        ],
    )
    write_table_csv(
        out / "k_vs_phase.csv",
        ("phase_sum", "k_value", "k_sigma", "k_classical_data",
         "k_quantum_model", "violation"),
        [
            (
                float(t["phase_sum"]),
                float(t["k_value"]),
                float(t["k_sigma"]) if t["k_sigma"] is not None else "",
                float(t["k_classical_data"]),
                float(t["k_quantum_model"]),
                int(t["violation"]),
            )
            for t in report.tuples
        ],
    )
    if counts is not None:
        values, freq = np.unique(counts, return_counts=True)
        write_table_csv(
            out / "null_counts.csv",
            ("violations", "replicas"),
            [(int(v), int(f)) for v, f in zip(values, freq)],
        )
    if points:
        lo = min(p.energy_gev for p in points)
        hi = max(p.energy_gev for p in points)
        energies, model = curve_table(config.params, lo, hi)
        header = ["energy_gev", "p_model"]
        cols = [energies, model]
        if "fitted_params" in report.config:
            fitted = OscParams(**report.config["fitted_params"])
            cols.append(curve_table(fitted, lo, hi)[1])
            header.append("p_model_fitted")
        write_table_csv(
            out / "curve.csv",
            header,
            [tuple(float(c[i]) for c in cols) for i in range(len(energies))],
        )


def run_analysis(config: RunConfig) -> SignificanceReport:
    """Parse the configured dataset, analyze it, and write all artifacts.

    Writes report.json, tuples.csv, k_vs_phase.csv, null_counts.csv and
    curve.csv into out_dir. Identical datasets and configs produce
    byte-identical artifacts.
    """
    if config.data is None:
        raise DomainError("analysis requires a dataset path")
    points = parse_dataset(config.data)
    report, counts = _analyze(points, config)
    _write_artifacts(report, points, config, counts)
    return report
