"""Acceptance gate: one test per release criterion, each named and
reported on its own line (run with ``pytest -v tests/test_acceptance.py``).

Every numeric target is pinned against an oracle computed here from
first principles (closed-form entropies, stationary chain formulas,
set arithmetic), never against the library's own value.
"""

import itertools
import json
import math
import subprocess
import sys
import time

import numpy as np
import pytest

from folner_entropy import (
    FolnerSequence,
    FolnerSubset,
    SubAlgebraSpec,
    SymbolPartition,
    bernoulli_shift,
    conditional_block_entropy,
    decompose_entropy,
    entropy_rate,
    invariance_defect,
    markov_shift,
    mixture,
    sweep_disintegration,
    sweep_identities,
    verify_rate_inequalities,
    verify_subadditive_hypotheses,
    window_entropy_phi,
)

LOG2 = math.log(2.0)
PI = np.array([2 / 3, 1 / 3])
P = np.array([[0.9, 0.1], [0.2, 0.8]])
H_PI = float(-(PI * np.log(PI)).sum())  # 0.6365141682948128
H_STEP = float(-(PI[:, None] * P * np.log(P)).sum())  # 0.38352279010702806


def h_of(probs) -> float:
    p = np.asarray(probs, dtype=np.float64)
    p = p[p > 0]
    return float(-(p * np.log(p)).sum())


def _pass(n: int, msg: str) -> None:
    print(f"[criterion {n:02d}] PASS: {msg}")


def test_criterion_01_bernoulli_rate_constancy():
    t0 = time.monotonic()
    b1 = bernoulli_shift([0.5, 0.5])
    trace1, rep1 = entropy_rate(b1, sequence=FolnerSequence(1, (1, 2, 3, 4, 5, 6)))
    for e in trace1.entries:
        assert abs(e.rate - LOG2) <= 1e-9
    b2 = bernoulli_shift([0.5, 0.5], d=2)
    trace2, rep2 = entropy_rate(b2, sequence=FolnerSequence(2, (1, 2, 3, 4)))
    for e in trace2.entries:
        assert abs(e.rate - LOG2) <= 1e-9
    assert trace2.entries[-1].F_size == 16  # enumeration at 2^16
    elapsed = time.monotonic() - t0
    assert elapsed < 5.0
    _pass(1, f"10 box rates all log 2 within 1e-9 ({elapsed:.2f}s)")


def test_criterion_02_markov_closed_form():
    t0 = time.monotonic()
    mk = markov_shift(PI, P)
    for n in range(1, 13):
        H = conditional_block_entropy(mk, None, FolnerSubset.interval(0, n))
        assert abs(H - (H_PI + (n - 1) * H_STEP)) <= 1e-9
    _, rep = entropy_rate(mk, sequence=FolnerSequence(1, tuple(range(1, 11))))
    assert abs(rep.estimate - 0.383523) <= 2.6e-2
    elapsed = time.monotonic() - t0
    assert elapsed < 10.0
    _pass(
        2,
        f"blocks match H(pi)+(n-1)H(P|pi) for n<=12; rate(10)="
        f"{rep.estimate:.6f} within 2.6e-2 of 0.383523 ({elapsed:.2f}s)",
    )


def test_criterion_03_infimum_identity():
    b1 = bernoulli_shift([0.5, 0.5])
    trace, rep = entropy_rate(b1, sequence=FolnerSequence(1, (1, 2, 3, 4, 5, 6)))
    assert rep.converged
    assert rep.estimate == min(trace.rates())
    b2 = bernoulli_shift([0.5, 0.5], d=2)
    trace2, rep2 = entropy_rate(b2, sequence=FolnerSequence(2, (1, 2, 3, 4)))
    assert rep2.converged
    assert rep2.estimate == min(trace2.rates())
    mk = markov_shift(PI, P)
    trace3, rep3 = entropy_rate(mk, sequence=FolnerSequence(1, tuple(range(1, 11))))
    assert rep3.estimate == min(trace3.rates())
    rates = trace3.rates()
    assert all(a >= b for a, b in zip(rates, rates[1:]))
    _pass(3, "estimates equal min of trace rates exactly; Markov rates non-increasing")


def test_criterion_04_strong_subadditivity_exhaustive():
    t0 = time.monotonic()
    mk = markov_shift(PI, P)
    phi = window_entropy_phi(mk)
    report = verify_subadditive_hypotheses(phi, FolnerSubset.box(1, 8), exhaustive=True)
    assert report.exhaustive
    assert report.min_slack["strong_subadditivity"] >= -1e-9
    assert report.violation_count.get("strong_subadditivity", 0) == 0
    # exhaustive means every ordered pair of the 2^8 subsets
    assert report.checked["strong_subadditivity"] == 4**8
    elapsed = time.monotonic() - t0
    assert elapsed < 60.0
    _pass(
        4,
        f"SSA over all {4**8} window pairs, min slack "
        f"{report.min_slack['strong_subadditivity']:.2e} ({elapsed:.2f}s)",
    )


def test_criterion_05_identity_suite_500():
    t0 = time.monotonic()
    report = sweep_identities(trials=500, seed=0, max_atoms=10)
    assert report.ok
    for name in (
        "join_subadditivity",
        "conditioning_monotone",
        "partition_monotone",
        "chain_rule",
        "refining_chain",
    ):
        assert report.stats[name].min_slack >= -1e-9, name
    for name in ("translation_invariance", "pmp_invariance"):
        assert report.stats[name].min_slack >= -1e-12, name
    elapsed = time.monotonic() - t0
    assert elapsed < 10.0
    checked = sum(s.checked for s in report.stats.values())
    _pass(5, f"500 spaces, {checked} identity checks, zero violations ({elapsed:.2f}s)")


def test_criterion_06_disintegration_1000():
    t0 = time.monotonic()
    report = sweep_disintegration(trials=1000, seed=0, max_atoms=10)
    assert report.ok
    assert report.stats["reconstruction"].min_slack >= -1e-12
    assert report.stats["mass_function_integral"].min_slack >= -1e-12
    elapsed = time.monotonic() - t0
    assert elapsed < 5.0
    _pass(
        6,
        f"1000 triples: reconstruction and m-function integrals within 1e-12 "
        f"({elapsed:.2f}s)",
    )


def test_criterion_07_rate_inequalities():
    t0 = time.monotonic()
    seq = FolnerSequence(1, tuple(range(1, 18)))
    systems = {
        "bernoulli(.9,.1)": bernoulli_shift([0.9, 0.1]),
        "markov": markov_shift(PI, P),
    }
    conditionings = {
        "trivial": None,
        "factor:identity": SubAlgebraSpec.symbol_factor({0: 0, 1: 1}),
        "factor:lumped": SubAlgebraSpec.symbol_factor({0: 0, 1: 0}),
    }
    for sys_name, system in systems.items():
        alpha = SymbolPartition.full(system.alphabet)
        beta = SymbolPartition.trivial(system.alphabet)
        for c_name, C in conditionings.items():
            report = verify_rate_inequalities(
                system, alpha, beta, C=C, sequence=seq, tol=1e-6
            )
            assert report.ok, (sys_name, c_name)
            assert all(report.converged.values()), (sys_name, c_name)
            assert all(c.status == "ok" for c in report.checks), (sys_name, c_name)
    # item (1) on the Markov system, trivial conditioning: h(alpha) <= H(alpha)
    mk_report = verify_rate_inequalities(
        systems["markov"],
        SymbolPartition.full((0, 1)),
        SymbolPartition.trivial((0, 1)),
        sequence=seq,
        tol=1e-6,
    )
    assert abs(mk_report.estimates["H_alpha"] - 0.636514) <= 1e-6
    assert mk_report.estimates["h_alpha"] >= 0.383523 - 1e-6
    assert mk_report.estimates["h_alpha"] <= mk_report.estimates["H_alpha"]
    elapsed = time.monotonic() - t0
    assert elapsed < 30.0
    _pass(
        7,
        f"rate inequalities ok on 2 systems x 3 conditionings; Markov "
        f"h={mk_report.estimates['h_alpha']:.6f} <= H={mk_report.estimates['H_alpha']:.6f} "
        f"({elapsed:.2f}s)",
    )


def test_criterion_08_mixture_decomposition():
    t0 = time.monotonic()
    mx = mixture(
        [bernoulli_shift([0.5, 0.5]), bernoulli_shift([0.9, 0.1])], [0.3, 0.7]
    )
    seq = FolnerSequence(1, (1, 2, 4, 8, 16, 32, 64, 128, 256, 512, 1024))
    rhs = 0.3 * LOG2 + 0.7 * h_of([0.9, 0.1])  # 0.4355022355419973
    h_tags = h_of([0.3, 0.7])
    trace, rep = entropy_rate(mx, sequence=seq)
    for e in trace.entries:
        assert abs(e.rate - rhs) <= h_tags / e.F_size + 1e-9
        if e.F_size >= 1024:
            assert abs(e.rate - rhs) <= 1e-3
    result = decompose_entropy(mx, sequence=seq)
    assert abs(result.rhs - rhs) <= 1e-9
    assert result.gap <= 1e-3
    assert result.certified
    elapsed = time.monotonic() - t0
    assert elapsed < 60.0
    _pass(
        8,
        f"mixture rates within H(.3,.7)/|F| of {rhs:.6f} at every n; "
        f"decomposition gap {result.gap:.2e} <= 1e-3 ({elapsed:.2f}s)",
    )


def test_criterion_09_folner_defect_closed_form():
    for d in (1, 2):
        for s in range(1, 65):
            F = FolnerSubset.box(d, s)
            for k in (1, -1, 2, 5, s, -(s + 1)):
                for axis in range(d):
                    g = tuple(k if i == axis else 0 for i in range(d))
                    expect = 2 * min(abs(k), s) / s
                    assert invariance_defect(F, g) == expect, (d, s, k, axis)
    _pass(9, "defect equals 2*min(|k|,s)/s exactly for d in {1,2}, s <= 64")


def test_criterion_10_determinism(tmp_path):
    cfg = {
        "schema": 1,
        "system": {"kind": "markov", "pi": [2 / 3, 1 / 3], "P": [[0.9, 0.1], [0.2, 0.8]]},
        "schedule": {"sides": list(range(1, 11))},
    }
    cfg_path = tmp_path / "rate.json.in"
    cfg_path.write_text(json.dumps(cfg))
    verify_cfg = {"schema": 1, "suite": "identities"}
    verify_path = tmp_path / "verify.json.in"
    verify_path.write_text(json.dumps(verify_cfg))

    def run(verb, config, out):
        out.mkdir()
        r = subprocess.run(
            [
                sys.executable,
                "-m",
                "folner_entropy.cli",
                verb,
                "--config",
                str(config),
                "--out",
                str(out),
                "--trials",
                "100",
                "--seed",
                "7",
            ],
            capture_output=True,
            text=True,
            timeout=120,
        )
        assert r.returncode == 0, r.stdout + r.stderr
        return r.stdout

    out_a = run("rate", cfg_path, tmp_path / "rate_a")
    out_b = run("rate", cfg_path, tmp_path / "rate_b")
    assert out_a == out_b
    assert (tmp_path / "rate_a/rate.json").read_bytes() == (
        tmp_path / "rate_b/rate.json"
    ).read_bytes()
    assert (tmp_path / "rate_a/rate.csv").read_bytes() == (
        tmp_path / "rate_b/rate.csv"
    ).read_bytes()
    v_a = run("verify", verify_path, tmp_path / "verify_a")
    v_b = run("verify", verify_path, tmp_path / "verify_b")
    assert v_a == v_b
    assert (tmp_path / "verify_a/verify.json").read_bytes() == (
        tmp_path / "verify_b/verify.json"
    ).read_bytes()
    _pass(10, "repeated CLI runs byte-identical (rate and seeded verify)")
