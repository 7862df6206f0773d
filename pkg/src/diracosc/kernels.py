"""Backend selection for the hot loops.

The compiled extension is used when it was built; set ``DIRACOSC_PURE=1`` to
force the numpy fallback.  Both backends share one call signature.
``DIRACOSC_WORKERS`` sets the thread count for chunked sweeps (default 1);
results never depend on it.
"""

import os

from . import _kernels_py

BACKEND = "python"
_impl = _kernels_py

if os.environ.get("DIRACOSC_PURE", "") not in ("1", "true", "yes"):
    try:
        from . import _kernels as _impl  # type: ignore[no-redef]

        BACKEND = "cython"
    except ImportError:
        _impl = _kernels_py

sector_series = _impl.sector_series
grid_amplitudes = _impl.grid_amplitudes
radial_table = _kernels_py.radial_table
legendre_table = _kernels_py.legendre_table


def workers() -> int:
    try:
        n = int(os.environ.get("DIRACOSC_WORKERS", "1"))
    except ValueError:
        return 1
    return max(1, n)


def chunked_map(fn, n: int, chunk: int):
    """Apply ``fn(slice)`` over [0, n) in chunks, threaded, results in order."""
    slices = [slice(i, min(n, i + chunk)) for i in range(0, n, chunk)]
    nw = workers()
    if nw == 1 or len(slices) == 1:
        return [fn(s) for s in slices]
    from concurrent.futures import ThreadPoolExecutor

    with ThreadPoolExecutor(nw) as ex:
        return list(ex.map(fn, slices))
