"""End-to-end drivers: single-point pipeline and potential-curve scans.

Artifacts per run directory:

* ``measurements/step_NNN.txt``  raw shots per evolution time
* ``trace.csv``                  (step, round, phase, dim, energy, delta)
* ``timings.csv``                wall times per trace row (not deterministic)
* ``result.json``                energies, correction, extrapolation, baselines
* ``compactness.csv``            |D|-at-1-mHa per method (when baselines run)
* ``MANIFEST.json``              artifact list; notes incompleteness on failure

Every number in ``result.json`` traces back to a trace.csv row or is the
sum of one with the reported correction.  Identical (config, seed) give
byte-identical deterministic artifacts for any worker count.
"""

from __future__ import annotations

import json
import math
import os
from dataclasses import dataclass, field, replace
from types import SimpleNamespace

from . import checkpoint as ckpt
from .baselines import cipsi_run, dim_at_threshold, fci_solve, hci_run
from .determinants import hartree_fock, sector_dimension
from .errors import CapabilityError, QsciError
from .evolution_sim import evolve_and_measure
from .integrals import IntegralStore, load_fcidump
from .measurements import collate, read_measurement_dir, write_measurement_dir
from .pt2 import epstein_nesbet_pt2, extrapolate_pt2
from .qubit_hamiltonian import jordan_wigner
from .sampler import SamplerConfig, SubspaceState, run_qsci
from .slater_condon import diagonal_element

TAU_DEFAULT = 2.0 * math.pi / 5.0


@dataclass
class RunConfig:
    """Everything one pipeline invocation needs; defaults are desk-scale
    versions of the reference protocol (tau = 2pi/5, 5 steps, 50 circuit
    instances of 1024 shots, D_max 5e4, 10 rounds, 100 samples per parent,
    screening 1e-2, wavefunction filter 1e-5)."""

    fcidump: str = ""
    outdir: str = "qsci_out"
    n_alpha: int | None = None
    n_beta: int | None = None
    tau: float = TAU_DEFAULT
    steps: int = 5
    instances: int = 50
    shots: int = 1024
    qdrift_n: int | None = 200
    qdrift_eps: float | None = None
    p_dep: float = 0.0
    d_max: int = 50_000
    rounds: int = 10
    samples: int = 100
    eps_screen: float = 1e-2
    eps_wf: float = 1e-5
    delta_conv: float = 1e-6
    seed: int = 7
    collate_steps: bool = False
    measurements_in: str | None = None
    checkpoint_path: str | None = None
    resume_from: str | None = None
    max_outer: int | None = None
    run_fci: bool = False
    run_hci: bool = False
    run_cipsi: bool = False
    hci_delta: float = 1e-4
    cipsi_select: int = 10
    log: object = field(default=None, repr=False)

    def sector(self, store: IntegralStore) -> tuple[int, int]:
        na = store.n_alpha if self.n_alpha is None else self.n_alpha
        nb = store.n_beta if self.n_beta is None else self.n_beta
        return (na, nb)

    def sampler_config(self) -> SamplerConfig:
        return SamplerConfig(
            d_max=self.d_max,
            n_rounds=self.rounds,
            n_samples=self.samples,
            eps_screen=self.eps_screen,
            eps_wf=self.eps_wf,
            delta_conv=self.delta_conv,
            seed=self.seed,
        )


def _say(config: RunConfig, message: str) -> None:
    if config.log is not None:
        config.log(message)


def write_trace_csv(state: SubspaceState, path) -> None:
    with open(path, "w", encoding="ascii", newline="\n") as handle:
        handle.write("step,round,phase,dim,energy,delta\n")
        for rec in state.trace:
            handle.write(
                f"{rec.step},{rec.round},{rec.phase},{rec.dim},{rec.energy!r},{rec.delta!r}\n"
            )


def write_timings_csv(state: SubspaceState, path) -> None:
    with open(path, "w", encoding="ascii", newline="\n") as handle:
        handle.write("step,round,phase,wall_time_s\n")
        for rec in state.trace:
            handle.write(f"{rec.step},{rec.round},{rec.phase},{rec.wall_time!r}\n")


def _write_json(payload, path) -> None:
    with open(path, "w", encoding="ascii", newline="\n") as handle:
        json.dump(payload, handle, indent=2, sort_keys=True)
        handle.write("\n")


def extrapolation_points(state: SubspaceState, store: IntegralStore):
    """(PT2 correction, variational energy) per recorded pass snapshot."""
    points = []
    for dets, energy, vector in state.snapshots:
        holder = SimpleNamespace(dets=dets, energy=energy, vector=vector)
        pt2 = epstein_nesbet_pt2(holder, store)
        points.append((pt2.correction, energy))
    return points


def run_pipeline(config: RunConfig) -> dict:
    """Simulate (or ingest) measurements, sample, correct, compare.

    Returns the result payload; artifacts land in ``config.outdir``.  On
    failure partial outputs stay behind with a MANIFEST marking the run
    incomplete, except that an unreadable FCIDUMP aborts before any
    output exists.
    """
    if not os.path.isfile(config.fcidump):
        raise FileNotFoundError(f"FCIDUMP not found: {config.fcidump}")
    store = load_fcidump(config.fcidump)
    sector = config.sector(store)

    outdir = config.outdir
    os.makedirs(outdir, exist_ok=True)
    artifacts: list[str] = []
    manifest_path = os.path.join(outdir, "MANIFEST.json")

    def note(name: str):
        artifacts.append(name)

    try:
        result = _pipeline_stages(config, store, sector, outdir, note)
    except Exception as err:
        _write_json(
            {
                "complete": False,
                "artifacts": sorted(artifacts),
                "error": {"type": type(err).__name__, "message": str(err)},
            },
            manifest_path,
        )
        raise
    _write_json({"complete": True, "artifacts": sorted(artifacts)}, manifest_path)
    return result


def _pipeline_stages(config: RunConfig, store, sector, outdir, note) -> dict:
    reference = hartree_fock(store.norb, *sector)
    e_hf = diagonal_element(reference, store)

    if config.measurements_in:
        sets = read_measurement_dir(config.measurements_in)
        _say(config, f"read {len(sets)} measurement sets from {config.measurements_in}")
    else:
        ham = jordan_wigner(store)
        _say(config, f"mapped Hamiltonian: {len(ham)} terms on {ham.n_qubits} qubits")
        epsilon = config.qdrift_eps
        n_rot = None if epsilon is not None else config.qdrift_n
        sets = evolve_and_measure(
            ham,
            reference,
            config.tau,
            config.steps,
            config.instances,
            config.shots,
            n_rotations=n_rot,
            epsilon=epsilon,
            p_dep=config.p_dep,
            seed=config.seed,
        )
        _say(config, f"simulated {len(sets)} time steps x {config.instances} instances x {config.shots} shots")
    write_measurement_dir(sets, os.path.join(outdir, "measurements"))
    for k in range(1, len(sets) + 1):
        note(f"measurements/step_{k:03d}.txt")

    if config.collate_steps:
        sets = [collate(sets)]

    resume_state = None
    if config.resume_from:
        resume_state = ckpt.load_checkpoint(config.resume_from, store)
        _say(config, f"resumed from {config.resume_from} at pass {resume_state.counter}")

    def on_step(state: SubspaceState):
        if config.checkpoint_path:
            ckpt.save_checkpoint(config.checkpoint_path, state)
        _say(config, f"pass {state.counter}: dim={state.dimension} energy={state.energy:.10f}")

    state = run_qsci(
        sets,
        config.sampler_config(),
        store,
        sector,
        resume=resume_state,
        max_outer_steps=config.max_outer,
        on_step=on_step,
    )
    write_trace_csv(state, os.path.join(outdir, "trace.csv"))
    note("trace.csv")
    write_timings_csv(state, os.path.join(outdir, "timings.csv"))
    note("timings.csv")

    pt2 = epstein_nesbet_pt2(state, store)
    points = extrapolation_points(state, store)
    extrap = None
    if len({x for x, _ in points}) >= 2:
        fit = extrapolate_pt2(points)
        extrap = {
            "intercept": fit.intercept,
            "slope": fit.slope,
            "r_squared": fit.r_squared,
            "n_points": fit.n_points,
        }

    result = {
        "sector": list(sector),
        "norb": store.norb,
        "sector_dimension": sector_dimension(store.norb, *sector),
        "e_hf": e_hf,
        "e_qsci": state.energy,
        "e_pt2": pt2.correction,
        "e_qsci_pt2": state.energy + pt2.correction,
        "pt2_externals": pt2.n_external,
        "pt2_intruders": pt2.intruders,
        "dim": state.dimension,
        "converged": state.delta <= config.delta_conv,
        "passes": state.counter,
        "extrapolation": extrap,
        "baselines": {},
    }

    baselines = {}
    e_fci = None
    if config.run_fci:
        try:
            fci = fci_solve(store, sector)
            e_fci = fci.energy
            baselines["fci"] = {"dim": len(fci.dets), "energy": fci.energy}
        except CapabilityError as err:
            baselines["fci"] = {"error": str(err)}
    if config.run_hci:
        hci = hci_run(store, sector, config.hci_delta)
        baselines["hci"] = {"dim": len(hci.dets), "energy": hci.energy,
                            "trace": hci.trace}
    if config.run_cipsi:
        cap = min(config.d_max, sector_dimension(store.norb, *sector))
        cip = cipsi_run(store, sector, config.cipsi_select, cap)
        baselines["cipsi"] = {"dim": len(cip.dets), "energy": cip.energy,
                              "trace": cip.trace, "intruders": cip.intruders}
    result["baselines"] = baselines

    if baselines and e_fci is not None:
        qsci_trace = [(rec.dim, rec.energy) for rec in state.trace if rec.phase in ("init", "expand")]
        rows = [("qsci", state.dimension, state.energy, dim_at_threshold(qsci_trace, e_fci))]
        if "hci" in baselines and "trace" in baselines["hci"]:
            rows.append(("hci", baselines["hci"]["dim"], baselines["hci"]["energy"],
                         dim_at_threshold(baselines["hci"]["trace"], e_fci)))
        if "cipsi" in baselines and "trace" in baselines["cipsi"]:
            rows.append(("cipsi", baselines["cipsi"]["dim"], baselines["cipsi"]["energy"],
                         dim_at_threshold(baselines["cipsi"]["trace"], e_fci)))
        with open(os.path.join(outdir, "compactness.csv"), "w", encoding="ascii", newline="\n") as handle:
            handle.write("method,dim_final,energy_final,dim_at_1mha\n")
            for method, dim, energy, dim_acc in rows:
                acc = "" if dim_acc is None else str(dim_acc)
                handle.write(f"{method},{dim},{energy!r},{acc}\n")
        note("compactness.csv")

    _write_json(result, os.path.join(outdir, "result.json"))
    note("result.json")
    return result


def read_points_file(path) -> list[tuple[str, str]]:
    """PEC points file: one `tag fcidump-path` pair per non-comment line."""
    points = []
    with open(path, "r", encoding="ascii") as handle:
        for ln, line in enumerate(handle, start=1):
            line = line.strip()
            if not line or line.startswith("#"):
                continue
            parts = line.split()
            if len(parts) != 2:
                raise ValueError(f"{path}: line {ln}: expected 'tag path', got {line!r}")
            points.append((parts[0], parts[1]))
    if not points:
        raise ValueError(f"{path}: no scan points found")
    return points


_CURVE_COLUMNS = [
    "tag", "e_hf", "e_qsci", "e_pt2", "e_qsci_pt2", "e_extrap",
    "e_fci", "e_hci", "e_cipsi", "dim",
]


def pec_scan(template: RunConfig, points: list[tuple[str, str]], outdir) -> dict:
    """Run the pipeline per geometry; emit curve.csv (failed points leave gaps)."""
    os.makedirs(outdir, exist_ok=True)
    rows = []
    failures = {}
    for tag, fcidump in points:
        sub = replace(
            template,
            fcidump=fcidump,
            outdir=os.path.join(outdir, f"point_{tag}"),
            checkpoint_path=None,
            resume_from=None,
        )
        row = {"tag": tag}
        try:
            result = run_pipeline(sub)
        except (QsciError, OSError, ValueError) as err:
            failures[tag] = f"{type(err).__name__}: {err}"
            rows.append(row)
            continue
        row.update(
            e_hf=result["e_hf"],
            e_qsci=result["e_qsci"],
            e_pt2=result["e_pt2"],
            e_qsci_pt2=result["e_qsci_pt2"],
            dim=result["dim"],
        )
        if result["extrapolation"]:
            row["e_extrap"] = result["extrapolation"]["intercept"]
        for method in ("fci", "hci", "cipsi"):
            entry = result["baselines"].get(method)
            if entry and "energy" in entry:
                row[f"e_{method}"] = entry["energy"]
        rows.append(row)

    curve_path = os.path.join(outdir, "curve.csv")
    with open(curve_path, "w", encoding="ascii", newline="\n") as handle:
        handle.write(",".join(_CURVE_COLUMNS) + "\n")
        for row in rows:
            cells = []
            for col in _CURVE_COLUMNS:
                value = row.get(col, "")
                cells.append(repr(value) if isinstance(value, float) else str(value))
            handle.write(",".join(cells) + "\n")
    _write_json(
        {"complete": not failures, "points": [tag for tag, _ in points], "failures": failures},
        os.path.join(outdir, "MANIFEST.json"),
    )
    return {"rows": rows, "failures": failures, "curve": curve_path}
