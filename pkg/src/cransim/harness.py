"""Batch experiment driver: seeded Monte-Carlo trials, sweeps, aggregation, CSV.

A master seed plus a trial index deterministically derive independent generator
sub-streams (one for channel generation, one for pilot noise), so trials are
reproducible regardless of execution order and channel draws stay paired
across modes, sweep values and CSI settings.
"""

import csv
import json
import math
import warnings
from dataclasses import dataclass, replace

import numpy as np

from . import capacity as cap
from .compression import build_plan
from .csi import estimate_channels, whiten
from .dimred import full_joint_mi, mfgs_select, signal_space_basis, truncate_selection
from .scenario import SystemConfig, generate_realization

CONFIG_SCHEMA = "cransim-sweep-v1"

MODES = ("proposed", "local_baseline", "unquantized", "cutset")
CSI_MODES = ("perfect", "pilot")
SWEEP_VARIABLES = ("fronthaul_rate", "rho", "N", "pilot_snr")

OUTPUTS = ("sum_capacity", "user_capacity", "baseline", "mi_proportion", "cutset", "best_n")

# (mode, metric) rows switched on by each requested output, in emission order
_OUTPUT_ROWS = {
    "sum_capacity": (("proposed", "sum_capacity"), ("proposed", "lmmse_sum_capacity")),
    "user_capacity": (("proposed", "user_capacity"),),
    "best_n": (("best_n", "sum_capacity"),),
    "baseline": (("local_baseline", "sum_capacity"),
                 ("local_baseline", "lmmse_sum_capacity"),
                 ("local_baseline", "user_capacity")),
    "mi_proportion": (("unquantized", "reduced_mi"), ("unquantized", "full_mi"),
                      ("unquantized", "mi_proportion")),
    "cutset": (("cutset", "cutset"),),
}

CSV_COLUMNS = ("sweep_var", "value", "mode", "csi_mode", "N", "metric",
               "mean", "p05", "trials", "seed")


@dataclass
class SweepSpec:
    """One batch experiment: a base configuration plus the variable swept over it.

    outputs defaults to everything applicable (best-N selection only when
    n_candidates is given).
    """

    base: SystemConfig
    sweep_variable: str
    values: list
    trials: int = 500
    outputs: tuple | None = None
    n_candidates: tuple = ()

    def __post_init__(self):
        if self.outputs is None:
            self.outputs = OUTPUTS if self.n_candidates else tuple(
                o for o in OUTPUTS if o != "best_n")
        self.outputs = tuple(self.outputs)
        self.validate()

    def validate(self):
        if self.sweep_variable not in SWEEP_VARIABLES:
            raise ValueError(f"sweep_variable must be one of {SWEEP_VARIABLES}")
        if len(self.values) == 0:
            raise ValueError("values must be non-empty")
        if self.trials < 1:
            raise ValueError("trials must be >= 1")
        unknown = set(self.outputs) - set(OUTPUTS)
        if unknown:
            raise ValueError(f"unknown outputs {sorted(unknown)}; valid: {OUTPUTS}")
        if "best_n" in self.outputs and not self.n_candidates:
            raise ValueError("output 'best_n' requires a non-empty n_candidates list")
        maxc = self.base.max_components
        if any(not 1 <= int(n) <= maxc for n in self.n_candidates):
            raise ValueError(f"n_candidates must lie in [1, {maxc}]")
        for v in self.values:
            # constructing the per-value config runs the full field validation
            replace(self.base, **{self.sweep_variable: v})


@dataclass
class TrialRecord:
    """Metrics of one (realization, mode) evaluation, reproducible from (config, seed, trial)."""

    trial: int
    seed: int
    config: SystemConfig
    mode: str
    csi_mode: str
    metrics: dict
    details: dict | None = None


@dataclass
class SweepRow:
    """One aggregated CSV row."""

    sweep_var: str
    value: float
    mode: str
    csi_mode: str
    N: int
    metric: str
    mean: float
    p05: float
    trials: int
    seed: int


def trial_stream(master_seed, trial, lane=0):
    """Independent generator sub-stream for (trial, lane), derived from the master seed.

    Lane 0 carries channel generation, lane 1 pilot noise; re-creating a lane
    replays it, which keeps draws paired across modes and sweep values.
    """
    return np.random.default_rng(np.random.SeedSequence(master_seed, spawn_key=(trial, lane)))


def _check_dimension_advice(config):
    if config.N < math.ceil(config.K / config.L):
        warnings.warn(
            f"N = {config.N} is below ceil(K/L) = {math.ceil(config.K / config.L)}; "
            "the reduced signals cannot span all users and performance will suffer",
            stacklevel=3)


def _csi_state(channels, config, csi_mode, pilot_rng_factory):
    """Selection-domain channels and whitening state for one realization.

    Returns (H_sel, phi_true_H, omega_inv_sqrt, csi_model, csi_label): under
    pilot CSI H_sel holds the whitened estimates and phi_true_H the true
    channels for quantiser-noise evaluation; under perfect CSI the latter two
    are None and H_sel is the truth.
    """
    if csi_mode == "perfect":
        return channels.H, None, None, None, "perfect"
    if csi_mode != "pilot":
        raise ValueError(f"csi mode must be one of {CSI_MODES}")
    if isinstance(config.pilot_snr, str):
        raise ValueError("csi mode 'pilot' requires a numeric pilot_snr in the config")
    model = estimate_channels(channels, config.pilot_snr, pilot_rng_factory())
    H_check, omega_inv_sqrt = whiten(model, config.rho)
    return H_check, channels.H, omega_inv_sqrt, model, "lower-bound"


def _metrics_from_report(report):
    return {
        "sum_capacity": report.sum_capacity,
        "lmmse_sum_capacity": float(np.sum(report.user_capacity)),
        "user_capacity": report.user_capacity,
        "sqinr": report.sqinr,
        "reduced_mi": report.reduced_mi,
        "full_mi": report.full_mi,
        "mi_proportion": report.reduced_mi / report.full_mi if report.full_mi > 0 else 0.0,
        "cutset": report.cutset,
    }


def _evaluate_mode(channels, config, mode, H_sel, phi_true_H, omega_inv_sqrt,
                   csi_label, selection=None, surcharge=0.0, want_details=False):
    """Metrics of one mode on one realization. Returns (metrics, details)."""
    rho, R = config.rho, config.fronthaul_rate

    if mode == "cutset":
        metrics = {"cutset": cap.cutset_bound(channels.H, rho, R),
                   "full_mi": full_joint_mi(H_sel, rho)}
        return metrics, None

    if mode == "local_baseline":
        Q = signal_space_basis(H_sel)
        reduced_mi = full_joint_mi(H_sel, rho)   # the signal-space basis is lossless
        selection = None
    elif mode in ("proposed", "unquantized"):
        if selection is None:
            selection = mfgs_select(H_sel, rho, config.N)
        Q = selection.Q
        reduced_mi = selection.mi
    else:
        raise ValueError(f"mode must be one of {MODES}")

    if mode == "unquantized":
        G = [Ql.conj().T @ Hl for Ql, Hl in zip(Q, H_sel)]
        phi = [np.zeros(Gl.shape[0]) for Gl in G]
        plan = None
    else:
        plan = build_plan(Q, H_sel, R, rho, H_true_list=phi_true_H,
                          omega_inv_sqrt_list=omega_inv_sqrt, surcharge=surcharge)
        G, phi = plan.active_channels()

    report = cap.capacity_report(G, phi, channels.H, H_sel, rho, R, reduced_mi,
                                 csi_mode=csi_label)
    details = None
    if want_details:
        details = {"selection": selection, "plan": plan, "report": report}
    return _metrics_from_report(report), details


def run_trial(config, mode="proposed", csi="perfect", trial=0, surcharge=0.0,
              details=False):
    """Run the full pipeline for one realization and one mode.

    The realization is reproduced from (config.rng_seed, trial), so calling
    with different modes but the same trial index evaluates the same channels.
    """
    if mode not in MODES:
        raise ValueError(f"mode must be one of {MODES}")
    if mode in ("proposed", "unquantized"):
        _check_dimension_advice(config)
    channels = generate_realization(config, trial_stream(config.rng_seed, trial, 0))
    H_sel, phi_true_H, omega_inv_sqrt, csi_model, csi_label = _csi_state(
        channels, config, csi, lambda: trial_stream(config.rng_seed, trial, 1))
    try:
        metrics, det = _evaluate_mode(channels, config, mode, H_sel, phi_true_H,
                                      omega_inv_sqrt, csi_label,
                                      surcharge=surcharge, want_details=details)
    except Exception as exc:
        raise RuntimeError(f"trial {trial} failed in mode '{mode}' (csi={csi})") from exc
    if details and det is not None:
        det["channels"] = channels
        det["csi"] = csi_model
    return TrialRecord(trial=trial, seed=config.rng_seed, config=config, mode=mode,
                       csi_mode=csi_label, metrics=metrics, details=det)


def best_dimension(config, R, n_candidates, trials, csi="perfect", surcharge=0.0):
    """Pick the reduced dimension maximising mean sum capacity at fronthaul rate R.

    One greedy run at max(n_candidates) serves every candidate via the prefix
    property. Returns (best_n, best_mean_capacity); ties go to the smaller N.
    """
    cands = sorted({int(n) for n in n_candidates})
    if not cands or cands[0] < 1 or cands[-1] > config.max_components:
        raise ValueError(f"n_candidates must be a non-empty subset of [1, {config.max_components}]")
    cfg = replace(config, fronthaul_rate=R, N=cands[-1])
    sums = {n: 0.0 for n in cands}
    for trial in range(trials):
        channels = generate_realization(cfg, trial_stream(cfg.rng_seed, trial, 0))
        H_sel, phi_true_H, omega_inv_sqrt, _, _ = _csi_state(
            channels, cfg, csi, lambda: trial_stream(cfg.rng_seed, trial, 1))
        sel = mfgs_select(H_sel, cfg.rho, cands[-1])
        for n in cands:
            seln = sel if n == cands[-1] else truncate_selection(sel, H_sel, cfg.rho, n)
            plan = build_plan(seln.Q, H_sel, R, cfg.rho, H_true_list=phi_true_H,
                              omega_inv_sqrt_list=omega_inv_sqrt, surcharge=surcharge)
            G, phi = plan.active_channels()
            sums[n] += cap.sum_capacity(G, phi, cfg.rho, K=cfg.K)
    best_n = cands[0]
    for n in cands[1:]:
        if sums[n] > sums[best_n]:
            best_n = n
    return best_n, sums[best_n] / trials


def mi_proportion_sweep(config, rho_values, n_values, trials):
    """Mean captured proportion of the full-dimension MI, over an (SNR, N) grid.

    Returns an array of shape (len(rho_values), len(n_values)) with
    E[reduced MI / full MI] under perfect CSI; one greedy run at max(n_values)
    per (trial, SNR) serves all N via the recorded MI trajectory.
    """
    n_values = [int(n) for n in n_values]
    if any(not 1 <= n <= config.max_components for n in n_values):
        raise ValueError(f"n_values must lie in [1, {config.max_components}]")
    nmax = max(n_values)
    out = np.zeros((len(rho_values), len(n_values)))
    for trial in range(trials):
        channels = generate_realization(config, trial_stream(config.rng_seed, trial, 0))
        for i, rho in enumerate(rho_values):
            sel = mfgs_select(channels.H, rho, nmax)
            full = full_joint_mi(channels.H, rho)
            for j, n in enumerate(n_values):
                out[i, j] += sel.mi_trajectory[n * config.L - 1] / full
    return out / trials


def _aggregate(values_by_key, pooled):
    """(mean, p05) of a sample list; pooled user samples are concatenated first."""
    if pooled:
        data = np.concatenate(values_by_key)
    else:
        data = np.asarray(values_by_key, dtype=float)
    return float(np.mean(data)), float(np.percentile(data, 5.0))


def run_sweep(spec, csi="perfect", surcharge=0.0):
    """Run a full Monte-Carlo sweep and aggregate it into CSV-ready rows.

    Trials are paired: every sweep value and mode sees the same channel draws
    (and the same pilot noise under pilot CSI). Selections are cached per
    trial and reused across sweep values whenever the SNR and CSI state do
    not change, and truncated to each requested dimension via the prefix
    property.
    """
    if csi not in CSI_MODES:
        raise ValueError(f"csi must be one of {CSI_MODES}")
    base = spec.base
    if csi == "pilot" and spec.sweep_variable != "pilot_snr" and isinstance(base.pilot_snr, str):
        raise ValueError("csi mode 'pilot' requires a numeric pilot_snr in the base config")

    rows_wanted = []
    for output in spec.outputs:
        rows_wanted.extend(_OUTPUT_ROWS[output])
    modes_wanted = {mode for mode, _ in rows_wanted}

    cands = sorted({int(n) for n in spec.n_candidates}) if "best_n" in modes_wanted else []

    # largest selection dimension any value will need, so one greedy run serves all
    need_sel = {"proposed", "unquantized"} & modes_wanted
    nmax = 0
    if need_sel:
        if spec.sweep_variable == "N":
            nmax = max(int(v) for v in spec.values)
        else:
            nmax = base.N
    if cands:
        nmax = max(nmax, cands[-1])

    configs = [replace(base, **{spec.sweep_variable: v}) for v in spec.values]
    if need_sel:
        for cfg in configs:
            _check_dimension_advice(cfg)

    samples = {}          # (value_idx, mode, metric) -> list of scalars or arrays
    bestn_samples = {}    # (value_idx, n) -> list of sum capacities

    def push(vi, mode, metric, value):
        samples.setdefault((vi, mode, metric), []).append(value)

    for trial in range(spec.trials):
        channels = generate_realization(base, trial_stream(base.rng_seed, trial, 0))
        csi_cache = {}
        sel_cache = {}

        for vi, cfg in enumerate(configs):
            csi_key = (cfg.pilot_snr if csi == "pilot" else "perfect", cfg.rho)
            if csi_key not in csi_cache:
                csi_cache[csi_key] = _csi_state(
                    channels, cfg, csi, lambda: trial_stream(base.rng_seed, trial, 1))
            H_sel, phi_true_H, omega_inv_sqrt, _, csi_label = csi_cache[csi_key]

            selection = None
            if need_sel or cands:
                if csi_key not in sel_cache:
                    sel_cache[csi_key] = mfgs_select(H_sel, cfg.rho, max(nmax, cfg.N))
                sel_full = sel_cache[csi_key]
                if cfg.N < len(sel_full.S[0]):
                    selection = truncate_selection(sel_full, H_sel, cfg.rho, cfg.N)
                else:
                    selection = sel_full

            for mode in MODES:
                if mode not in modes_wanted:
                    continue
                metrics, _ = _evaluate_mode(channels, cfg, mode, H_sel, phi_true_H,
                                            omega_inv_sqrt, csi_label,
                                            selection=selection, surcharge=surcharge)
                for metric in set(m for md, m in rows_wanted if md == mode):
                    push(vi, mode, metric, metrics[metric])

            if cands:
                for n in cands:
                    seln = (sel_full if n == len(sel_full.S[0])
                            else truncate_selection(sel_full, H_sel, cfg.rho, n))
                    plan = build_plan(seln.Q, H_sel, cfg.fronthaul_rate, cfg.rho,
                                      H_true_list=phi_true_H,
                                      omega_inv_sqrt_list=omega_inv_sqrt,
                                      surcharge=surcharge)
                    G, phi = plan.active_channels()
                    bestn_samples.setdefault((vi, n), []).append(
                        cap.sum_capacity(G, phi, cfg.rho, K=cfg.K))

    csi_label_out = "perfect" if csi == "perfect" else "lower-bound"
    rows = []
    for vi, (v, cfg) in enumerate(zip(spec.values, configs)):
        for mode, metric in rows_wanted:
            if mode == "best_n":
                means = {n: float(np.mean(bestn_samples[(vi, n)])) for n in cands}
                best = cands[0]
                for n in cands[1:]:
                    if means[n] > means[best]:
                        best = n
                mean, p05 = _aggregate(bestn_samples[(vi, best)], pooled=False)
                n_col = best
            else:
                key = (vi, mode, metric)
                mean, p05 = _aggregate(samples[key], pooled=(metric == "user_capacity"))
                n_col = {"proposed": cfg.N, "unquantized": cfg.N,
                         "local_baseline": cfg.max_components, "cutset": 0}[mode]
            rows.append(SweepRow(sweep_var=spec.sweep_variable, value=float(v),
                                 mode=mode, csi_mode=csi_label_out, N=int(n_col),
                                 metric=metric, mean=mean, p05=p05,
                                 trials=spec.trials, seed=base.rng_seed))
    return rows


def _fmt(x):
    return format(float(x), ".17g")


def emit_csv(rows, path):
    """Write aggregated rows as CSV with round-trippable 17-significant-digit floats."""
    with open(path, "w", newline="") as f:
        writer = csv.writer(f, lineterminator="\n")
        writer.writerow(CSV_COLUMNS)
        for r in rows:
            writer.writerow([r.sweep_var, _fmt(r.value), r.mode, r.csi_mode, int(r.N),
                             r.metric, _fmt(r.mean), _fmt(r.p05), int(r.trials),
                             int(r.seed)])


def read_csv(path):
    """Parse a file produced by emit_csv back into SweepRow objects."""
    rows = []
    with open(path, newline="") as f:
        reader = csv.DictReader(f)
        if tuple(reader.fieldnames) != CSV_COLUMNS:
            raise ValueError(f"unexpected CSV header {reader.fieldnames}")
        for rec in reader:
            rows.append(SweepRow(
                sweep_var=rec["sweep_var"], value=float(rec["value"]), mode=rec["mode"],
                csi_mode=rec["csi_mode"], N=int(rec["N"]), metric=rec["metric"],
                mean=float(rec["mean"]), p05=float(rec["p05"]),
                trials=int(rec["trials"]), seed=int(rec["seed"])))
    return rows


_SYSTEM_DB_ALTERNATES = {"rho_db": "rho", "pilot_snr_db": "pilot_snr"}


def sweep_spec_from_dict(data):
    """Build a SweepSpec from a parsed config mapping (see CONFIG_SCHEMA).

    The "system" section mirrors SystemConfig fields; `rho_db` / `pilot_snr_db`
    may replace their linear counterparts. The "sweep" section mirrors
    SweepSpec. Unknown keys are rejected.
    """
    if data.get("schema") != CONFIG_SCHEMA:
        raise ValueError(f"config schema must be '{CONFIG_SCHEMA}', got {data.get('schema')!r}")
    unknown = set(data) - {"schema", "system", "sweep"}
    if unknown:
        raise ValueError(f"unknown top-level keys {sorted(unknown)}")

    system = dict(data.get("system", {}))
    for db_key, lin_key in _SYSTEM_DB_ALTERNATES.items():
        if db_key in system:
            if lin_key in system:
                raise ValueError(f"give either {db_key} or {lin_key}, not both")
            system[lin_key] = 10.0 ** (system.pop(db_key) / 10.0)
    valid_fields = set(SystemConfig.__dataclass_fields__)
    unknown = set(system) - valid_fields
    if unknown:
        raise ValueError(f"unknown system keys {sorted(unknown)}")
    base = SystemConfig(**system)

    sweep = dict(data.get("sweep", {}))
    unknown = set(sweep) - {"variable", "values", "trials", "outputs", "n_candidates"}
    if unknown:
        raise ValueError(f"unknown sweep keys {sorted(unknown)}")
    outputs = sweep.get("outputs")
    return SweepSpec(base=base,
                     sweep_variable=sweep.get("variable", "fronthaul_rate"),
                     values=list(sweep.get("values", [])),
                     trials=int(sweep.get("trials", 500)),
                     outputs=tuple(outputs) if outputs is not None else None,
                     n_candidates=tuple(sweep.get("n_candidates", ())))


def load_sweep_spec(path):
    """Load a sweep configuration from a JSON file."""
    with open(path) as f:
        data = json.load(f)
    return sweep_spec_from_dict(data)
