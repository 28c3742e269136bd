"""Compare the numba and numpy backends of the hot kernels.

Run ``python3 benchmarks/bench_kernels.py``. Each case runs once to warm up
(numba compilation or cache load) and then reports the best of ``--repeat``
timed runs per backend, plus a check that both backends agree.
"""

from __future__ import annotations

import argparse
import time
from importlib import resources

import numpy as np

from filmfolio._accel import NUMBA_AVAILABLE
from filmfolio.ingestion import load_instance
from filmfolio.madm import BestWorstPreference, MCMCConfig, sample_bbwm
from filmfolio.optimizer import Instance, Project, solve_scalarized


def random_instance(n: int, seed: int) -> Instance:
    rng = np.random.default_rng(seed)
    cost = rng.integers(1_000_000, 50_000_000, n)
    revenue = (cost * rng.uniform(0.3, 4.0, n)).astype(np.int64)
    pref = rng.dirichlet(np.ones(n))
    projects = tuple(Project(i + 1, f"p{i + 1}", int(revenue[i]), int(cost[i]), float(pref[i])) for i in range(n))
    return Instance(projects, int(cost.sum() // 3))


def best_of(fn, repeat: int) -> tuple[float, object]:
    out = fn()
    times = []
    for _ in range(repeat):
        t = time.perf_counter()
        out = fn()
        times.append(time.perf_counter() - t)
    return min(times), out


def bench_solver(label: str, inst: Instance, repeat: int) -> None:
    res = {}
    for backend in ("numba", "numpy"):
        res[backend] = best_of(lambda: solve_scalarized(inst, 0.5, method="enumerate", backend=backend), repeat)
    agree = res["numba"][1].selected_ids == res["numpy"][1].selected_ids
    report(f"solve w=0.5 {label} (n={inst.n})", res["numba"][0], res["numpy"][0], agree)


def bench_bbwm(experts: int, repeat: int) -> None:
    rng = np.random.default_rng(experts)
    prefs = []
    for e in range(experts):
        x, y, z = sorted(rng.integers(2, 10, 3).tolist())
        a_best = (1, x, y, z)
        a_worst = (z, *rng.integers(1, z + 1, 2).tolist(), 1)
        prefs.append(BestWorstPreference(f"e{e}", 0, 3, a_best, a_worst))
    cfg = MCMCConfig(seed=1)
    res = {b: best_of(lambda: sample_bbwm(prefs, cfg, backend=b), repeat) for b in ("numba", "numpy")}
    agree = bool(np.allclose(res["numba"][1].agg_samples, res["numpy"][1].agg_samples, atol=1e-9))
    report(f"bbwm K={experts} n=4 ({cfg.chains}x{cfg.iterations})", res["numba"][0], res["numpy"][0], agree)


def report(name: str, t_numba: float, t_numpy: float, agree: bool) -> None:
    print(f"{name:<40} numba {t_numba * 1e3:10.2f} ms   numpy {t_numpy * 1e3:10.2f} ms   "
          f"speedup {t_numpy / t_numba:6.1f}x   agree={agree}")


def main(argv=None) -> int:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeat", type=int, default=3)
    ap.add_argument("--sizes", type=int, nargs="*", default=[16, 20, 22])
    args = ap.parse_args(argv)
    if not NUMBA_AVAILABLE:
        print("numba unavailable or disabled; nothing to compare")
        return 1
    tp3 = load_instance(resources.files("filmfolio").joinpath("data/test_problem_3.json"))
    bench_solver("test problem 3", tp3, args.repeat)
    for n in args.sizes:
        bench_solver("random", random_instance(n, n), args.repeat)
    for k in (1, 5):
        bench_bbwm(k, args.repeat)
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
