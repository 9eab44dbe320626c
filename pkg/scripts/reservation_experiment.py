"""Measure what reservations buy a hybrid workload on a contended device.

Runs the canonical scenario (one long batch job arriving just before a
hybrid loop of three quantum bursts) with and without reservation windows,
then sweeps randomized variants and reports the busy-fraction deltas.
"""
import argparse
import random

from ministack.scheduling.des import (
    BurstChain,
    OneShot,
    Window,
    busy_fraction,
    hybrid_reservation_workload,
    simulate,
)


def print_timeline(title: str, segments) -> None:
    print(f"  {title}:")
    for seg in segments:
        print(f"    {seg.job_id:12s} {seg.session_id:8s} "
              f"{seg.start:7.2f} -> {seg.end:7.2f}")


def canonical() -> None:
    workloads, windows = hybrid_reservation_workload()
    reserved = simulate(workloads, reservations=windows)
    baseline = simulate(workloads)
    print("canonical scenario")
    print_timeline("with reservations", reserved)
    print_timeline("without", baseline)
    rf, bf = busy_fraction(reserved, windows), busy_fraction(baseline, windows)
    print(f"  busy fraction in windows: reserved={rf:.3f} baseline={bf:.3f}\n")


def random_scenario(rng: random.Random) -> tuple[list, list[Window]]:
    bursts = rng.randint(2, 5)
    burst_s = rng.uniform(0.2, 1.0)
    gap_s = rng.uniform(0.5, 2.0)
    start = rng.uniform(5.0, 15.0)
    windows = []
    t = start
    for _ in range(bursts):
        windows.append(Window(t, t + burst_s, "hybrid"))
        t += burst_s + gap_s
    workloads = [
        BurstChain(first_arrival=start, burst_s=burst_s, gap_s=gap_s,
                   count=bursts, session_id="hybrid"),
    ]
    for k in range(rng.randint(1, 4)):
        workloads.append(OneShot(
            arrival=rng.uniform(0.0, t), duration=rng.uniform(0.3, 2.5),
            session_id="batch", job_id=f"batch-{k}"))
    return workloads, windows


def sweep(trials: int, seed: int) -> None:
    rng = random.Random(seed)
    worse = 0
    min_delta = float("inf")
    for _ in range(trials):
        workloads, windows = random_scenario(rng)
        rf = busy_fraction(simulate(workloads, reservations=windows), windows)
        bf = busy_fraction(simulate(workloads), windows)
        delta = rf - bf
        min_delta = min(min_delta, delta)
        if delta < -1e-12:
            worse += 1
    print(f"randomized sweep: {trials} scenarios, seed {seed}")
    print(f"  reservations worse than baseline: {worse}")
    print(f"  minimum busy-fraction delta:      {min_delta:+.3f}")


def main() -> None:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--trials", type=int, default=200)
    parser.add_argument("--seed", type=int, default=7)
    args = parser.parse_args()
    canonical()
    sweep(args.trials, args.seed)


if __name__ == "__main__":
    main()
