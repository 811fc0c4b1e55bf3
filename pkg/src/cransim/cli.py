"""Command-line entry point: `cransim {sweep,trial,validate}`."""

import argparse
import logging
import sys
from dataclasses import replace

import numpy as np

from .compression import LLOYD_MAX_RATE_PENALTY
from .harness import CSI_MODES, MODES, emit_csv, load_sweep_spec, run_sweep, run_trial
from .validation import run_validation


def _add_common(p):
    p.add_argument("--seed", type=int, default=None, help="override the master RNG seed")
    p.add_argument("--csi", choices=CSI_MODES, default=None,
                   help="CSI mode (default: pilot when the config has a numeric pilot_snr)")
    p.add_argument("--lloyd-max", action="store_true",
                   help=f"charge {LLOYD_MAX_RATE_PENALTY} bits per quantised scalar for "
                        "fixed-rate Lloyd-Max quantisation")


def build_parser():
    parser = argparse.ArgumentParser(
        prog="cransim",
        description="Dimension-reduction fronthaul compression experiments for "
                    "distributed MIMO uplink C-RAN")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("sweep", help="run a Monte-Carlo sweep from a JSON config, write CSV")
    p.add_argument("--config", required=True, help="path to a sweep config (JSON)")
    p.add_argument("--output", required=True, help="path of the CSV file to write")
    p.add_argument("--trials", type=int, default=None, help="override the trial count")
    _add_common(p)

    p = sub.add_parser("trial", help="run one realization and print verbose diagnostics")
    p.add_argument("--config", required=True, help="path to a sweep config (JSON); "
                                                   "only its system section is used")
    p.add_argument("--mode", choices=MODES, default="proposed")
    p.add_argument("--trial", type=int, default=0, help="trial index within the seed's streams")
    _add_common(p)

    p = sub.add_parser("validate", help="run the oracle/invariant suite and report pass/fail")
    p.add_argument("--seed", type=int, default=0)
    return parser


def _resolved(spec, args):
    base = spec.base
    if args.seed is not None:
        base = replace(base, rng_seed=args.seed)
    spec = replace(spec, base=base)
    if getattr(args, "trials", None) is not None:
        spec = replace(spec, trials=args.trials)
    csi = args.csi
    if csi is None:
        csi = "perfect" if isinstance(base.pilot_snr, str) else "pilot"
    surcharge = LLOYD_MAX_RATE_PENALTY if args.lloyd_max else 0.0
    return spec, csi, surcharge


def _cmd_sweep(args):
    spec = load_sweep_spec(args.config)
    spec, csi, surcharge = _resolved(spec, args)
    rows = run_sweep(spec, csi=csi, surcharge=surcharge)
    emit_csv(rows, args.output)
    print(f"wrote {len(rows)} rows to {args.output}")
    return 0


def _cmd_trial(args):
    spec = load_sweep_spec(args.config)
    args.trials = None
    spec, csi, surcharge = _resolved(spec, args)
    cfg = spec.base
    record = run_trial(cfg, mode=args.mode, csi=csi, trial=args.trial,
                       surcharge=surcharge, details=True)

    print(f"mode={args.mode} csi={record.csi_mode} trial={args.trial} seed={cfg.rng_seed}")
    print(f"K={cfg.K} L={cfg.L} M={cfg.M} N={cfg.N} rho={cfg.rho:.6g} "
          f"R={cfg.fronthaul_rate:.6g} pilot_snr={cfg.pilot_snr}")
    det = record.details or {}
    sel = det.get("selection")
    if sel is not None:
        for l, users in enumerate(sel.S):
            print(f"receiver {l}: selected users {users}")
        traj = np.array2string(sel.mi_trajectory, precision=4, separator=", ")
        print(f"mutual-information trajectory (bits): {traj}")
    plan = det.get("plan")
    if plan is not None:
        for l in range(len(plan.G)):
            lam = np.array2string(plan.lam[l], precision=4, separator=", ")
            rates = np.array2string(plan.rates[l], precision=4, separator=", ")
            phi = np.array2string(plan.Phi[l], precision=4, separator=", ")
            print(f"receiver {l}: eigenvalues {lam}")
            print(f"receiver {l}: rates {rates} (active {plan.active[l]})")
            print(f"receiver {l}: quantisation noise {phi}")
    for name in ("sum_capacity", "lmmse_sum_capacity", "reduced_mi", "full_mi", "cutset"):
        if name in record.metrics:
            print(f"{name}: {record.metrics[name]:.6f}")
    if "user_capacity" in record.metrics:
        user = np.array2string(record.metrics["user_capacity"], precision=4, separator=", ")
        print(f"per-user LMMSE capacity: {user}")
    return 0


def _cmd_validate(args):
    results = run_validation(seed=args.seed)
    failed = 0
    for name, ok, detail in results:
        status = "PASS" if ok else "FAIL"
        suffix = f" ({detail})" if detail else ""
        print(f"{status}  {name}{suffix}")
        failed += 0 if ok else 1
    print(f"{len(results) - failed}/{len(results)} checks passed")
    return 0 if failed == 0 else 1


def main(argv=None):
    logging.basicConfig(level=logging.WARNING)
    args = build_parser().parse_args(argv)
    if args.command == "sweep":
        return _cmd_sweep(args)
    if args.command == "trial":
        return _cmd_trial(args)
    return _cmd_validate(args)


if __name__ == "__main__":
    sys.exit(main())
