"""Worker-thread configuration.

Every numerical path in the package is sequential by construction
(stencil kernels compiled without parallel loops, reductions through a
fixed-shape tree, single-worker transforms), so results are bit-identical
at any configured thread count.  The knob below still exists so callers
can pin the compiled-kernel thread pool; the determinism criterion is
verified end to end against it.
"""

from __future__ import annotations

import numba


def set_thread_count(requested: int) -> int:
    """Clamp to the available pool and apply; returns the effective count."""
    if requested < 1:
        raise ValueError("thread count must be at least 1")
    avail = numba.config.NUMBA_NUM_THREADS
    effective = max(1, min(requested, avail))
    numba.set_num_threads(effective)
    return effective
