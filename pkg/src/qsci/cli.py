"""Command-line interface.

Subcommands: fcidump-info, fci, hci, cipsi, evolve, qsci, pt2,
extrapolate, pec, and run (the full pipeline).  Options may come from a
``key=value`` config file via --config; explicit flags win on conflict.
Worker count is controlled only by the QSCI_WORKERS environment variable.

Exit codes: 0 ok, 2 usage/config, 3 I/O, 4 capability limit,
5 solver non-convergence, 1 other errors.
"""

from __future__ import annotations

import argparse
import json
import sys
from dataclasses import fields

import numpy as np

from . import checkpoint as ckpt
from .baselines import cipsi_run, fci_solve, hci_run
from .determinants import hartree_fock, sector_dimension
from .errors import CapabilityError, ConvergenceError, QsciError
from .integrals import load_fcidump
from .pipeline import RunConfig, pec_scan, read_points_file, run_pipeline
from .pt2 import epstein_nesbet_pt2, extrapolate_pt2
from .qubit_hamiltonian import jordan_wigner, l1_norm
from .slater_condon import diagonal_element

_BOOL_KEYS = {"collate_steps", "run_fci", "run_hci", "run_cipsi"}
_INT_KEYS = {
    "n_alpha", "n_beta", "steps", "instances", "shots", "qdrift_n", "d_max",
    "rounds", "samples", "seed", "max_outer", "cipsi_select",
}
_FLOAT_KEYS = {
    "tau", "qdrift_eps", "p_dep", "eps_screen", "eps_wf", "delta_conv", "hci_delta",
}


def _parse_config_file(path) -> dict:
    values: dict = {}
    valid = {f.name for f in fields(RunConfig)}
    with open(path, "r", encoding="ascii") as handle:
        for ln, line in enumerate(handle, start=1):
            line = line.strip()
            if not line or line.startswith("#"):
                continue
            if "=" not in line:
                raise ValueError(f"{path}: line {ln}: expected key=value, got {line!r}")
            key, _, raw = line.partition("=")
            key = key.strip().replace("-", "_")
            raw = raw.strip()
            if key not in valid:
                raise ValueError(f"{path}: line {ln}: unknown key {key!r}")
            if key in _BOOL_KEYS:
                values[key] = raw.lower() in ("1", "true", "yes", "on")
            elif key in _INT_KEYS:
                values[key] = int(raw)
            elif key in _FLOAT_KEYS:
                values[key] = float(raw)
            else:
                values[key] = raw
    return values


def _add_pipeline_flags(parser: argparse.ArgumentParser, need_fcidump=True):
    parser.add_argument("--config", help="key=value config file; flags override it")
    parser.add_argument("--fcidump", required=False, help="FCIDUMP path" + ("" if need_fcidump else " (per-point files come from the scan list)"))
    parser.add_argument("--outdir", help="artifact directory (default qsci_out)")
    parser.add_argument("--na", dest="n_alpha", type=int, help="alpha electron count override")
    parser.add_argument("--nb", dest="n_beta", type=int, help="beta electron count override")
    parser.add_argument("--tau", type=float, help="time-step increment (default 2*pi/5)")
    parser.add_argument("--steps", type=int, help="number of evolution time steps (default 5)")
    parser.add_argument("--instances", type=int, help="circuit instances per step (default 50)")
    parser.add_argument("--shots", type=int, help="shots per instance (default 1024)")
    parser.add_argument("--qdrift-n", dest="qdrift_n", type=int, help="rotations per circuit (default 200)")
    parser.add_argument("--qdrift-eps", dest="qdrift_eps", type=float,
                        help="channel precision; sets N = ceil(2 lambda^2 t^2 / eps)")
    parser.add_argument("--p-dep", dest="p_dep", type=float, help="depolarizing shot-replacement probability")
    parser.add_argument("--dmax", dest="d_max", type=int, help="subspace cap (default 50000)")
    parser.add_argument("--rounds", type=int, help="sampling rounds per measurement set (default 10)")
    parser.add_argument("--samples", type=int, help="samples per screened configuration (default 100)")
    parser.add_argument("--eps-screen", dest="eps_screen", type=float, help="parent screening threshold (default 1e-2)")
    parser.add_argument("--eps-wf", dest="eps_wf", type=float, help="coefficient filter threshold (default 1e-5)")
    parser.add_argument("--delta-conv", dest="delta_conv", type=float, help="energy convergence tolerance (default 1e-6)")
    parser.add_argument("--seed", type=int, help="master seed (default 7)")
    parser.add_argument("--collate", dest="collate_steps", action="store_true", default=None,
                        help="pool all time steps into one measurement set")
    parser.add_argument("--measurements", dest="measurements_in",
                        help="read step_*.txt files from this directory instead of simulating")
    parser.add_argument("--checkpoint", dest="checkpoint_path", help="write a checkpoint after each pass")
    parser.add_argument("--resume", dest="resume_from", help="resume from a checkpoint file")
    parser.add_argument("--max-outer", dest="max_outer", type=int, help="stop after this many passes")
    parser.add_argument("--fci", dest="run_fci", action="store_true", default=None, help="also solve FCI")
    parser.add_argument("--hci", dest="run_hci", action="store_true", default=None, help="also run the heatbath baseline")
    parser.add_argument("--cipsi", dest="run_cipsi", action="store_true", default=None, help="also run the CIPSI-style baseline")
    parser.add_argument("--hci-delta", dest="hci_delta", type=float, help="heatbath selection threshold (default 1e-4)")
    parser.add_argument("--cipsi-select", dest="cipsi_select", type=int, help="CIPSI additions per iteration (default 10)")


def _build_config(args) -> RunConfig:
    config = RunConfig(log=lambda msg: print(msg, file=sys.stderr))
    if getattr(args, "config", None):
        for key, value in _parse_config_file(args.config).items():
            setattr(config, key, value)
    for f in fields(RunConfig):
        value = getattr(args, f.name, None)
        if value is not None:
            setattr(config, f.name, value)
    if not config.fcidump:
        raise ValueError("an FCIDUMP path is required (--fcidump or config file)")
    if config.qdrift_eps is not None:
        config.qdrift_n = None
    return config


def _sector_args(parser):
    parser.add_argument("--na", dest="n_alpha", type=int, help="alpha electrons (default from NELEC/MS2)")
    parser.add_argument("--nb", dest="n_beta", type=int, help="beta electrons (default from NELEC/MS2)")


def _load_with_sector(args):
    store = load_fcidump(args.fcidump)
    na = store.n_alpha if args.n_alpha is None else args.n_alpha
    nb = store.n_beta if args.n_beta is None else args.n_beta
    return store, (na, nb)


def cmd_fcidump_info(args) -> int:
    store = load_fcidump(args.fcidump)
    hf = hartree_fock(store.norb, store.n_alpha, store.n_beta)
    info = {
        "norb": store.norb,
        "n_elec": store.n_elec,
        "ms2": store.ms2,
        "core_energy": store.core_energy,
        "sector": [store.n_alpha, store.n_beta],
        "sector_dimension": sector_dimension(store.norb, store.n_alpha, store.n_beta),
        "e_hf": diagonal_element(hf, store),
    }
    if args.l1:
        info["lambda_l1"] = l1_norm(jordan_wigner(store))
    print(json.dumps(info, indent=2, sort_keys=True))
    return 0


def cmd_fci(args) -> int:
    store, sector = _load_with_sector(args)
    result = fci_solve(store, sector)
    print(json.dumps({"method": "fci", "dim": len(result.dets), "energy": result.energy}, sort_keys=True))
    return 0


def cmd_hci(args) -> int:
    store, sector = _load_with_sector(args)
    result = hci_run(store, sector, args.delta, args.delta_conv)
    print(json.dumps({"method": "hci", "delta": args.delta, "dim": len(result.dets),
                      "energy": result.energy, "trace": result.trace}, sort_keys=True))
    return 0


def cmd_cipsi(args) -> int:
    store, sector = _load_with_sector(args)
    max_dim = args.max_dim or sector_dimension(store.norb, *sector)
    result = cipsi_run(store, sector, args.n_select, max_dim)
    print(json.dumps({"method": "cipsi", "dim": len(result.dets), "energy": result.energy,
                      "intruders": result.intruders, "trace": result.trace}, sort_keys=True))
    return 0


def cmd_evolve(args) -> int:
    config = _build_config(args)
    from .evolution_sim import evolve_and_measure
    from .measurements import write_measurement_dir

    store = load_fcidump(config.fcidump)
    sector = config.sector(store)
    ham = jordan_wigner(store)
    epsilon = config.qdrift_eps
    sets = evolve_and_measure(
        ham,
        hartree_fock(store.norb, *sector),
        config.tau,
        config.steps,
        config.instances,
        config.shots,
        n_rotations=None if epsilon is not None else config.qdrift_n,
        epsilon=epsilon,
        p_dep=config.p_dep,
        seed=config.seed,
    )
    paths = write_measurement_dir(sets, config.outdir)
    print(json.dumps({"measurement_files": paths}, sort_keys=True))
    return 0


def cmd_qsci(args) -> int:
    # Measurements-to-energy stage: simulate unless a directory is given.
    config = _build_config(args)
    config.run_fci = config.run_hci = config.run_cipsi = False
    result = run_pipeline(config)
    print(json.dumps(result, indent=2, sort_keys=True))
    return 0


def cmd_run(args) -> int:
    config = _build_config(args)
    result = run_pipeline(config)
    print(json.dumps(result, indent=2, sort_keys=True))
    return 0


def cmd_pt2(args) -> int:
    store = load_fcidump(args.fcidump)
    state = ckpt.load_checkpoint(args.checkpoint, store)
    result = epstein_nesbet_pt2(state, store)
    print(json.dumps({
        "e_variational": state.energy,
        "e_pt2": result.correction,
        "e_total": state.energy + result.correction,
        "externals": result.n_external,
        "intruders": result.intruders,
    }, indent=2, sort_keys=True))
    return 0


def cmd_extrapolate(args) -> int:
    points = []
    with open(args.points, "r", encoding="ascii") as handle:
        for ln, line in enumerate(handle, start=1):
            line = line.strip()
            if not line or line.startswith("#"):
                continue
            parts = line.replace(",", " ").split()
            if len(parts) != 2:
                raise ValueError(f"{args.points}: line {ln}: expected 'pt2 energy'")
            points.append((float(parts[0]), float(parts[1])))
    fit = extrapolate_pt2(points)
    print(json.dumps({"intercept": fit.intercept, "slope": fit.slope,
                      "r_squared": fit.r_squared, "n_points": fit.n_points}, sort_keys=True))
    return 0


def cmd_pec(args) -> int:
    config = _build_config(args) if args.fcidump or args.config else RunConfig(
        fcidump="unused", log=lambda msg: print(msg, file=sys.stderr))
    if args.fcidump is None:
        config.fcidump = "per-point"
    for name in ("run_fci", "run_hci", "run_cipsi"):
        if getattr(args, name, None):
            setattr(config, name, True)
    points = read_points_file(args.points)
    outcome = pec_scan(config, points, args.outdir or config.outdir)
    print(json.dumps({"curve": outcome["curve"], "failures": outcome["failures"]}, sort_keys=True))
    return 0 if not outcome["failures"] else 1


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="qsci", description=__doc__,
                                     formatter_class=argparse.RawDescriptionHelpFormatter)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("fcidump-info", help="summarize an FCIDUMP file")
    p.add_argument("--fcidump", required=True)
    p.add_argument("--l1", action="store_true", help="also report the mapped l1 norm")
    p.set_defaults(func=cmd_fcidump_info)

    p = sub.add_parser("fci", help="exact diagonalization over the sector")
    p.add_argument("--fcidump", required=True)
    _sector_args(p)
    p.set_defaults(func=cmd_fci)

    p = sub.add_parser("hci", help="heatbath selection baseline")
    p.add_argument("--fcidump", required=True)
    _sector_args(p)
    p.add_argument("--delta", type=float, required=True, help="selection threshold")
    p.add_argument("--delta-conv", dest="delta_conv", type=float, default=1e-9)
    p.set_defaults(func=cmd_hci)

    p = sub.add_parser("cipsi", help="perturbative selection baseline")
    p.add_argument("--fcidump", required=True)
    _sector_args(p)
    p.add_argument("--n-select", dest="n_select", type=int, default=10)
    p.add_argument("--max-dim", dest="max_dim", type=int, default=None)
    p.set_defaults(func=cmd_cipsi)

    p = sub.add_parser("evolve", help="simulate measurements only")
    _add_pipeline_flags(p)
    p.set_defaults(func=cmd_evolve)

    p = sub.add_parser("qsci", help="sampling loop from measurements or simulation")
    _add_pipeline_flags(p)
    p.set_defaults(func=cmd_qsci)

    p = sub.add_parser("run", help="full pipeline incl. correction and baselines")
    _add_pipeline_flags(p)
    p.set_defaults(func=cmd_run)

    p = sub.add_parser("pt2", help="second-order correction from a checkpoint")
    p.add_argument("--fcidump", required=True)
    p.add_argument("--checkpoint", required=True)
    p.set_defaults(func=cmd_pt2)

    p = sub.add_parser("extrapolate", help="zero-correction fit from a points file")
    p.add_argument("--points", required=True, help="lines of 'pt2_correction energy'")
    p.set_defaults(func=cmd_extrapolate)

    p = sub.add_parser("pec", help="scan a list of geometries (tag path lines)")
    _add_pipeline_flags(p, need_fcidump=False)
    p.add_argument("--points", required=True, help="scan list: 'tag fcidump-path' per line")
    p.set_defaults(func=cmd_pec)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except FileNotFoundError as err:
        print(f"error: {err}", file=sys.stderr)
        return 3
    except CapabilityError as err:
        print(f"error: {err}", file=sys.stderr)
        return 4
    except ConvergenceError as err:
        print(f"error: {err}", file=sys.stderr)
        return 5
    except (QsciError, ValueError) as err:
        print(f"error: {err}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
