"""Timing comparison of the jit-compiled kernels against their pure
numpy twins.

Run:

    python benchmarks/bench_kernels.py [--repeat 9] [--window 18]

Each kernel pair computes the identical arrays (bitwise for the
pattern kernels), so the table is purely about speed. When numba is
unavailable or disabled via FOLNER_ENTROPY_DISABLE_NUMBA=1 the script
still runs and says so.
"""

import argparse
import time

import numpy as np

from folner_entropy import _kernels as k


def best_of(fn, repeat):
    times = []
    for _ in range(repeat):
        t0 = time.perf_counter()
        fn()
        times.append(time.perf_counter() - t0)
    return min(times)


def main() -> None:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--repeat", type=int, default=9)
    parser.add_argument(
        "--window",
        type=int,
        default=18,
        help="pattern window length (2^window patterns for binary alphabets)",
    )
    args = parser.parse_args()

    n = args.window
    log_cell = np.log(np.array([0.5, 0.25, 0.25]))
    pi = np.array([2 / 3, 1 / 3])
    P = np.array([[0.9, 0.1], [0.2, 0.8]])
    log_pi = np.log(pi)
    log_P = np.log(P)
    # gapped window: stride-2 sites, exercising the transfer products
    offsets = np.arange(0, 2 * (n // 2), 2, dtype=np.int64)
    probs = np.random.default_rng(0).dirichlet(np.ones(1 << n))
    logprobs = np.log(probs)

    cases = [
        (
            f"iid_pattern_logprobs (3^{n // 2} patterns)",
            lambda: k.iid_pattern_logprobs_np(log_cell, n // 2),
            lambda: k.iid_pattern_logprobs(log_cell, n // 2),
        ),
        (
            f"markov_interval_logprobs (2^{n} patterns)",
            lambda: k.markov_interval_logprobs_np(log_pi, log_P, n),
            lambda: k.markov_interval_logprobs(log_pi, log_P, n),
        ),
        (
            f"markov_window_probs ({len(offsets)} gapped sites)",
            lambda: k.markov_window_probs_np(pi, P, offsets),
            lambda: k.markov_window_probs(pi, P, offsets),
        ),
        (
            f"entropy_from_probs (2^{n} values)",
            lambda: k.entropy_from_probs_np(probs),
            lambda: k.entropy_from_probs(probs),
        ),
        (
            f"entropy_from_logprobs (2^{n} values)",
            lambda: k.entropy_from_logprobs_np(logprobs),
            lambda: k.entropy_from_logprobs(logprobs),
        ),
    ]

    if k.HAS_NUMBA:
        backend = "numba jit"
        for _, _, jit in cases:
            jit()  # compile outside the timed region
    else:
        reason = "disabled by env flag" if k.NUMBA_DISABLED else "not installed"
        backend = f"numpy fallback (numba {reason})"

    print(f"selected backend: {backend}")
    header = f"{'kernel':<44} {'numpy':>10} {'selected':>10} {'speedup':>8}"
    print(header)
    print("-" * len(header))
    for name, np_fn, sel_fn in cases:
        t_np = best_of(np_fn, args.repeat)
        t_sel = best_of(sel_fn, args.repeat)
        ratio = t_np / t_sel if t_sel > 0 else float("inf")
        print(f"{name:<44} {t_np * 1e3:>8.2f}ms {t_sel * 1e3:>8.2f}ms {ratio:>7.2f}x")


if __name__ == "__main__":
    main()
