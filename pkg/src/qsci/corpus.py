"""Access to the bundled molecular-integral corpus."""

from __future__ import annotations

from importlib import resources


def corpus_path(name: str):
    """Filesystem path of a bundled FCIDUMP (e.g. ``h2_sto3g.fcidump``)."""
    path = resources.files("qsci").joinpath("data", name)
    if not path.is_file():
        available = sorted(p.name for p in resources.files("qsci").joinpath("data").iterdir())
        raise FileNotFoundError(f"{name!r} not in corpus; available: {available}")
    return path


def corpus_names() -> list[str]:
    data = resources.files("qsci").joinpath("data")
    return sorted(p.name for p in data.iterdir() if p.name.endswith(".fcidump"))
