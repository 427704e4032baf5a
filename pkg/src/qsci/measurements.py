"""Plain-text measurement files.

One file per evolution time: a header line
``# time=<float> shots=<int> nqubits=<int>`` followed by one bitstring
per line (0/1 characters, alpha block then beta block).  The format is
the hardware-data ingestion point; simulated and externally produced
sets are interchangeable.  Round trips are lossless.
"""

from __future__ import annotations

import os
import re

from .evolution_sim import MeasurementSet

_HEADER = re.compile(r"#\s*time=(?P<time>\S+)\s+shots=(?P<shots>\d+)\s+nqubits=(?P<nq>\d+)\s*$")


def write_measurements(ms: MeasurementSet, path) -> None:
    with open(path, "w", encoding="ascii") as handle:
        handle.write(f"# time={ms.time!r} shots={ms.n_shots} nqubits={ms.n_qubits}\n")
        for b in ms.bitstrings:
            handle.write(b + "\n")


def read_measurements(path) -> MeasurementSet:
    with open(path, "r", encoding="ascii") as handle:
        lines = handle.read().splitlines()
    if not lines:
        raise ValueError(f"{path}: empty measurement file")
    match = _HEADER.match(lines[0])
    if not match:
        raise ValueError(f"{path}: line 1: malformed header {lines[0]!r}")
    time = float(match.group("time"))
    shots = int(match.group("shots"))
    n_qubits = int(match.group("nq"))
    bitstrings = []
    for ln, line in enumerate(lines[1:], start=2):
        line = line.strip()
        if not line:
            continue
        if len(line) != n_qubits or set(line) - {"0", "1"}:
            raise ValueError(f"{path}: line {ln}: expected a {n_qubits}-character 0/1 string, got {line!r}")
        bitstrings.append(line)
    if len(bitstrings) != shots:
        raise ValueError(f"{path}: header promises {shots} shots, found {len(bitstrings)}")
    return MeasurementSet(time, bitstrings, n_qubits)


def step_filename(step: int) -> str:
    return f"step_{step:03d}.txt"


def write_measurement_dir(sets: list[MeasurementSet], directory) -> list[str]:
    os.makedirs(directory, exist_ok=True)
    paths = []
    for k, ms in enumerate(sets, start=1):
        path = os.path.join(directory, step_filename(k))
        write_measurements(ms, path)
        paths.append(path)
    return paths


def read_measurement_dir(directory) -> list[MeasurementSet]:
    names = sorted(n for n in os.listdir(directory) if n.startswith("step_") and n.endswith(".txt"))
    if not names:
        raise ValueError(f"no step_*.txt measurement files in {directory}")
    return [read_measurements(os.path.join(directory, n)) for n in names]


def collate(sets: list[MeasurementSet]) -> MeasurementSet:
    """Pool every step's shots into one set (tagged with the final time)."""
    pooled: list[str] = []
    for ms in sets:
        pooled.extend(ms.bitstrings)
    return MeasurementSet(sets[-1].time, pooled, sets[0].n_qubits)
