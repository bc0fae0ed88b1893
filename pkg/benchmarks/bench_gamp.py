#!/usr/bin/env python3
"""Benchmark the message-passing estimator: compiled kernel vs pure numpy.

Builds realistic sensing instances (random beam subsets on the full 32x16
beamspace grid, random pilot phases, sparse channel) at several measurement
depths, then times full estimator calls with a fixed iteration budget on
each backend.  The first compiled call is reported separately so the JIT
cost is visible.

    python3 benchmarks/bench_gamp.py
    python3 benchmarks/bench_gamp.py --slots 16 64 128 --iterations 40 --repeats 5
    SWIFT_SIM_NO_NUMBA=1 python3 benchmarks/bench_gamp.py   # numpy only
"""
import argparse
import time

import numpy as np

from swift_sim import (
    HAS_NUMBA,
    MeasurementLedger,
    PilotConfig,
    backend_name,
    build_codebook,
    draw_channel,
    gamp_estimate,
    rng_fork,
    select_beams,
    simulate_measurement,
)
from swift_sim.gamp import GampConfig, GampPrior
from swift_sim.measurement import BeamSelection, draw_pilot_phases


def build_instance(slots, seed, n_bs=32, n_ue=16, r_bs=8, r_ue=4):
    """Measurement ledger after `slots` random-beam slots on one channel."""
    f_bs, w_ue = build_codebook(n_bs), build_codebook(n_ue)
    pilot = PilotConfig(power=1.0, noise_power=1e-3)
    rng = rng_fork(seed, 0)
    ch = draw_channel(3.0, 1.0, f_bs, w_ue, rng, on_grid=True)
    led = MeasurementLedger(n_bs=n_bs, n_ue=n_ue, capacity_rows=slots * r_ue)
    for _ in range(slots):
        sel = BeamSelection(
            bs_indices=select_beams(np.ones(n_bs), r_bs, rng),
            ue_indices=select_beams(np.ones(n_ue), r_ue, rng),
        )
        pilots = draw_pilot_phases(r_bs, rng)
        y = simulate_measurement(ch.H, sel, pilot, f_bs, w_ue, rng, pilots=pilots)
        led.append(sel, pilots, y)
    prior = GampPrior(rho=3.0 / (n_bs * n_ue), slab=float(n_bs * n_ue))
    scale = np.sqrt(pilot.power / r_bs)
    return led.stacked_y, led.stacked_A, prior, pilot.noise_power, scale


def time_backend(instance, backend, cfg, repeats):
    """Best-of-`repeats` seconds for one full estimator call."""
    y, A, prior, noise, scale = instance
    best = np.inf
    for _ in range(repeats):
        t0 = time.perf_counter()
        res = gamp_estimate(y, A, prior, noise, scale=scale, cfg=cfg, backend=backend)
        best = min(best, time.perf_counter() - t0)
    assert res.iterations == cfg.max_iterations  # tol=0: fixed work per call
    return best


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--slots", type=int, nargs="+", default=[16, 32, 64, 128],
                    help="measurement depths to benchmark (slots of 4 rows each)")
    ap.add_argument("--iterations", type=int, default=40,
                    help="fixed iteration budget per call")
    ap.add_argument("--repeats", type=int, default=5,
                    help="timed calls per cell; the best is reported")
    ap.add_argument("--seed", type=int, default=1)
    args = ap.parse_args()

    cfg = GampConfig(max_iterations=args.iterations, tol=0.0)
    backends = ["numpy"] + (["numba"] if HAS_NUMBA else [])
    print(f"active backend: {backend_name()}   (numba available: {HAS_NUMBA})")
    print(f"iterations per call: {args.iterations}, repeats per cell: {args.repeats}")

    if HAS_NUMBA:
        inst = build_instance(args.slots[0], args.seed)
        t0 = time.perf_counter()
        gamp_estimate(inst[0], inst[1], inst[2], inst[3], scale=inst[4],
                      cfg=GampConfig(max_iterations=1, tol=0.0), backend="numba")
        print(f"jit compile (first compiled call): {time.perf_counter() - t0:.2f}s")

    header = f"{'rows':>6} {'cols':>6} {'nnz':>7}"
    for b in backends:
        header += f" {b + ' ms':>10}"
    if len(backends) == 2:
        header += f" {'speedup':>8}"
    print()
    print(header)
    print("-" * len(header))
    for slots in args.slots:
        inst = build_instance(slots, args.seed)
        rows, cols = inst[1].shape
        nnz = int(np.count_nonzero(inst[1]))
        times = {b: time_backend(inst, b, cfg, args.repeats) for b in backends}
        line = f"{rows:>6} {cols:>6} {nnz:>7}"
        for b in backends:
            line += f" {1e3 * times[b]:>10.2f}"
        if len(backends) == 2:
            line += f" {times['numpy'] / times['numba']:>7.1f}x"
        print(line)


if __name__ == "__main__":
    main()
