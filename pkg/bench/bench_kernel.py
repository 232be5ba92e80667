"""Compiled kernel vs pure-Python fallback on batched model evaluation.

    python3 bench/bench_kernel.py [--rows 20000] [--repeat 3]

Each case evaluates every row of a ``(K, |U|)`` exogenous matrix, half of
the rows with one endogenous variable forced.  Both kernels get identical
inputs and their outputs are checked for equality before timing is reported.
"""

import argparse
import timeit

import numpy as np

from causeway import _kernel_py
from causeway.provenance import compile_model
from causeway.workspace import Workspace

try:
    from causeway import _kernel
except ImportError:
    _kernel = None


def batch(model, rows, rng):
    prog = model.program
    regs = np.zeros((rows, prog.width), dtype=np.int32)
    n = len(model.domain.elements)
    if len(prog.exo_idx):
        regs[:, prog.exo_idx] = rng.integers(0, n, size=(rows, len(prog.exo_idx)))
    forced = np.full((rows, prog.width), -1, dtype=np.int32)
    endo = [prog.index[v] for v in model.endogenous]
    pick = rng.choice(endo, size=rows // 2)
    forced[np.arange(rows // 2), pick] = rng.integers(0, n, size=rows // 2)
    return regs, forced


def time_kernel(impl, prog, regs, forced, repeat):
    out = regs.copy()

    def once():
        out[:] = regs
        impl.run(prog, out, forced)

    best = min(timeit.repeat(once, number=1, repeat=repeat))
    return best, out


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--rows", type=int, default=20000)
    ap.add_argument("--repeat", type=int, default=3)
    args = ap.parse_args()
    if _kernel is None:
        raise SystemExit("compiled kernel not built; run `pip install -e . --no-build-isolation` first")

    ws = Workspace.load()
    cases = {name: ws.models[name] for name in ("cake", "divzero", "pow", "chain")}
    cases["cake.json"] = compile_model(*ws.interpreted("cake"))
    rng = np.random.default_rng(0)

    print(f"{'model':<12}{'rows':>8}{'cython ms':>12}{'python ms':>12}{'speedup':>10}")
    for name, model in cases.items():
        regs, forced = batch(model, args.rows, rng)
        fast, a = time_kernel(_kernel, model.program, regs, forced, args.repeat)
        slow, b = time_kernel(_kernel_py, model.program, regs, forced, args.repeat)
        assert np.array_equal(a, b), name
        print(f"{name:<12}{args.rows:>8}{fast * 1e3:>12.2f}{slow * 1e3:>12.1f}{slow / fast:>9.0f}x")


if __name__ == "__main__":
    main()
