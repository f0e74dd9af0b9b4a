"""Engine backend selection.

The compiled extension is preferred when it imported cleanly; otherwise the
pure-Python engine stands in.  Both produce bit-identical counters for the
same configuration and seed.
"""

from __future__ import annotations

try:
    from . import _core

    HAVE_COMPILED = True
except ImportError:  # extension not built; pure Python fallback
    _core = None
    HAVE_COMPILED = False

from .rng import RngStream
from .sweep import PythonEngine

_KIND_CODE = {"mt19937": 0, "lfg": 1}
_PAIRING_CODE = {"single": 0, "xy": 1}


def backend_name(backend: str = "auto") -> str:
    if backend == "auto":
        return "compiled" if HAVE_COMPILED else "python"
    if backend in ("compiled", "python"):
        return backend
    raise ValueError(f"unknown backend: {backend!r}")


def available_backends() -> tuple:
    return ("compiled", "python") if HAVE_COMPILED else ("python",)


def make_engine(L: int, kind: str = "mt19937", seed: int = 0, shard: int = 0,
                pairing: str = "single", decimation: int = 2, backend: str = "auto"):
    """A sweep engine for an LxL lattice with its own seeded word stream."""
    if kind not in _KIND_CODE:
        raise ValueError(f"unknown rng kind: {kind!r}")
    resolved = backend_name(backend)
    stream = RngStream(kind, seed, shard, pairing, decimation)
    if resolved == "python":
        return PythonEngine(L, stream)
    if not HAVE_COMPILED:
        raise RuntimeError("compiled backend requested but the extension is not built")
    state0, pos0 = stream.primary.getstate()
    if stream.pair is not None:
        state1, pos1 = stream.pair.getstate()
    else:
        state1, pos1 = None, 0
    return _core.Engine(L, _KIND_CODE[kind], _PAIRING_CODE[pairing],
                        decimation, state0, pos0, state1, pos1)
