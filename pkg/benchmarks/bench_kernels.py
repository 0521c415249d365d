"""Compare the numba kernels with the numpy / plain Python fallbacks.

Kernel timings run in this process (both versions are importable when numba
is enabled). End-to-end timings run one subprocess per backend, since the
backend is fixed at import time by LOOPCOND_NO_NUMBA.

    python3 benchmarks/bench_kernels.py [--repeat N]
"""
import argparse
import json
import os
import subprocess
import sys
import timeit

import numpy as np

END_TO_END = r"""
import json
from loopcond import _kernels
from loopcond.core import FiniteAlgebra, parse_condition
from loopcond.gadgets import build_q_gadget
from loopcond.hom import make_clique
from loopcond.indicator import build_indicator, generate_closure

# an idempotent ternary operation on 3 elements whose free algebra on the
# commutativity indicator has 135 elements
T = [0, 0, 0, 0, 0, 2, 2, 1, 0, 0, 0, 1, 1, 1, 0, 0, 2, 2, 0, 0, 1, 1, 2, 1, 1, 1, 2]
A = FiniteAlgebra(3, (("t", 3, T),))
inst = build_indicator(A, parse_condition("f(x,y) = f(y,x)"))

def closure():
    assert len(generate_closure(A, inst)) == 135

K5, K6 = make_clique(5, 2), make_clique(6, 2)
out = {"backend": _kernels.backend(), "first closure (incl. compile)": _time(closure)}
out["closure"] = min(_time(closure) for _ in range(REPEAT))
build_q_gadget(K5, 4)
out["q gadget of K_6, k=5"] = min(_time(lambda: build_q_gadget(K6, 5)) for _ in range(REPEAT))
print(json.dumps(out))
"""

TIMER = "import time\ndef _time(f):\n    t = time.perf_counter(); f(); return time.perf_counter() - t\n"


def best_of(fn, repeat):
    return min(timeit.repeat(fn, number=1, repeat=repeat))


def kernel_rows(repeat):
    from loopcond import _kernels as K

    if K.apply_op_numba is None:
        print("numba disabled; kernel comparison skipped", file=sys.stderr)
        return []
    rng = np.random.default_rng(0)
    size, arity, width, n, batch = 3, 3, 24, 4000, 200_000
    table = rng.integers(0, size, size ** arity).astype(np.uint8)
    vals = rng.integers(0, size, (n, width)).astype(np.uint8)
    idx = rng.integers(0, n, (batch, arity)).astype(np.int64)
    rows = rng.integers(0, 4, (batch, 32)).astype(np.uint8)

    # the backtracking search: 5 pairwise adjacent points in K_8
    d, m, nx = 8, 2, 5
    mask = np.array([int(a != b) for a in range(d) for b in range(d)], dtype=np.uint8)
    cons, ptr = [], [0, 0]
    for t in range(nx):
        cons += [(s, t) for s in range(t)]
        ptr.append(len(cons))
    cons = np.array(cons, dtype=np.int64).reshape(-1, 2)
    ptr = np.array(ptr, dtype=np.int64)
    fixed = np.zeros(1, dtype=np.int64)

    def search(f):
        xs = np.zeros(nx, dtype=np.int64)
        for _ in range(200):
            f(mask, d, m, nx, cons, ptr, fixed, xs)

    assert np.array_equal(K.apply_op_numba(table, size, vals, idx), K.apply_op_numpy(table, size, vals, idx))
    assert np.array_equal(K.pack_keys_numba(rows, 2), K.pack_keys_numpy(rows, 2))
    search(K.search_xs_numba)
    return [
        ("apply_op (200k x 24 cells)", best_of(lambda: K.apply_op_numba(table, size, vals, idx), repeat),
         best_of(lambda: K.apply_op_numpy(table, size, vals, idx), repeat)),
        ("pack_keys (200k x 32 cells)", best_of(lambda: K.pack_keys_numba(rows, 2), repeat),
         best_of(lambda: K.pack_keys_numpy(rows, 2), repeat)),
        ("search_xs (K_5 in K_8, x200)", best_of(lambda: search(K.search_xs_numba), repeat),
         best_of(lambda: search(K.search_xs_python), repeat)),
    ]


def end_to_end(no_numba, repeat):
    env = dict(os.environ)
    env.pop("LOOPCOND_NO_NUMBA", None)
    if no_numba:
        env["LOOPCOND_NO_NUMBA"] = "1"
    code = TIMER + f"REPEAT = {repeat}\n" + END_TO_END
    out = subprocess.run([sys.executable, "-c", code], env=env, capture_output=True, text=True, check=True)
    return json.loads(out.stdout)


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeat", type=int, default=5)
    args = ap.parse_args(argv)

    print(f"{'kernel':32} {'numba':>10} {'fallback':>10} {'speedup':>8}")
    for name, fast, slow in kernel_rows(args.repeat):
        print(f"{name:32} {fast * 1e3:9.2f}ms {slow * 1e3:9.2f}ms {slow / fast:7.1f}x")

    jit, ref = end_to_end(False, args.repeat), end_to_end(True, args.repeat)
    print()
    print(f"{'end to end':32} {jit.pop('backend'):>10} {ref.pop('backend'):>10} {'speedup':>8}")
    for key in jit:
        print(f"{key:32} {jit[key] * 1e3:9.1f}ms {ref[key] * 1e3:9.1f}ms {ref[key] / jit[key]:7.1f}x")


if __name__ == "__main__":
    main()
