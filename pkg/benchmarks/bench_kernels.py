"""Compare the numba kernels against their numpy twins.

    python3 benchmarks/bench_kernels.py            # micro + end-to-end
    python3 benchmarks/bench_kernels.py --quick

Micro timings call both variants in one process (the numba ones after a
warm-up call, so compilation is excluded). The end-to-end rows run a
universe build in fresh interpreters with and without
RECAPTURE_DISABLE_NUMBA, so they include numba's compile cost.
"""

from __future__ import annotations

import os
import subprocess
import sys
import time

import click
import numpy as np

from recapture import _kernels


def best_of(fn, repeat: int) -> float:
    times = []
    for _ in range(repeat):
        t0 = time.perf_counter()
        fn()
        times.append(time.perf_counter() - t0)
    return min(times)


def micro_cases(rng: np.random.Generator, scale: int):
    n, width = 400 * scale, 16
    table = rng.integers(0, 3, size=(3, 3)).astype(np.int8)
    vecs = rng.integers(0, 3, size=(n, width)).astype(np.int8)
    yield "compose_binary", (table, vecs, vecs)

    worlds = 24
    succ = np.array([[w + k if w + k < worlds else w for k in range(4)] for w in range(worlds)], dtype=np.int64)
    x = rng.random((n, worlds)) < 0.5
    yield "forcing_imp", (x, x, succ)

    states = rng.integers(0, 1 << 62, size=(n, 4), dtype=np.uint64)
    succs = rng.integers(0, 1 << 62, size=(2 * n, 4), dtype=np.uint64) | states[np.arange(2 * n) % n]
    yield "mask_valid", (states, succs)


END_TO_END = """
import time
from recapture import _kernels
from recapture.quotient import MatrixAlgebra, Universe
from recapture.engines.matrix import CLASSICAL
from recapture.syntax import CORE, Bounds
t0 = time.perf_counter()
u = Universe(CORE, Bounds({atoms}, 3, 0), MatrixAlgebra(CLASSICAL, {atoms_list}))
print(_kernels.USING_NUMBA, u.total, time.perf_counter() - t0)
"""


def end_to_end(atoms: int, disable: bool) -> tuple[str, int, float]:
    env = dict(os.environ)
    env.pop("RECAPTURE_DISABLE_NUMBA", None)
    if disable:
        env["RECAPTURE_DISABLE_NUMBA"] = "1"
    names = ["p", "q", "r"][:atoms]
    code = END_TO_END.format(atoms=atoms, atoms_list=repr(names))
    out = subprocess.run([sys.executable, "-c", code], env=env, check=True, capture_output=True, text=True)
    flag, total, secs = out.stdout.split()
    return ("numba" if flag == "True" else "numpy"), int(total), float(secs)


@click.command()
@click.option("--quick", is_flag=True, help="Smaller inputs, fewer repeats.")
@click.option("--repeat", default=5, show_default=True)
def main(quick: bool, repeat: int) -> None:
    impls = _kernels.implementations()
    if "numba" not in impls:
        click.echo("numba unavailable (or disabled); only numpy timings follow")
    rng = np.random.default_rng(0)
    scale = 1 if quick else 3
    click.echo(f"{'kernel':<16}{'numpy ms':>12}{'numba ms':>12}{'speedup':>10}")
    for name, args in micro_cases(rng, scale):
        ref = impls["numpy"][name](*args)
        t_np = best_of(lambda: impls["numpy"][name](*args), repeat)
        if "numba" in impls:
            fast = impls["numba"][name]
            assert np.array_equal(fast(*args), ref), name
            t_nb = best_of(lambda: fast(*args), repeat)
            click.echo(f"{name:<16}{t_np * 1e3:>12.2f}{t_nb * 1e3:>12.2f}{t_np / t_nb:>9.1f}x")
        else:
            click.echo(f"{name:<16}{t_np * 1e3:>12.2f}{'-':>12}{'-':>10}")

    atoms = 1 if quick else 2
    click.echo(f"\nuniverse build, core signature, atoms<={atoms}, depth<=3 (fresh process, compile included)")
    for disable in (True, False):
        impl, total, secs = end_to_end(atoms, disable)
        click.echo(f"  {impl:<6} {total:>16,} formulas  {secs:8.2f} s")


if __name__ == "__main__":
    main()
