"""Seeded randomized sweeps over the identity and inequality layers.

Instances are drawn from a single seeded generator so every sweep is
reproducible; reports aggregate worst slacks and violation counts per
property. Measure-preserving permutations are built with masses
constant along cycles, so preservation holds bit-exactly rather than
within a tolerance.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from .decomposition import conditional_mass_function
from .engine import verify_chain_exhaustion, verify_entropy_identities
from .groups import FolnerSubset
from .spaces import (
    FiniteProbabilitySpace,
    Partition,
    disintegrate,
    join,
)
from .systems import DEFAULT_PATTERN_CAP, FinitePMPAction

# ---------------------------------------------------------------------------
# instance generators
# ---------------------------------------------------------------------------


def random_space(rng: np.random.Generator, max_atoms: int = 10, allow_zero: bool = True) -> FiniteProbabilitySpace:
    """A random space with 2..max_atoms atoms; may include zero-mass atoms."""
    n = int(rng.integers(2, max_atoms + 1))
    w = rng.random(n)
    if allow_zero and n >= 3 and rng.random() < 0.3:
        k = int(rng.integers(1, max(2, n // 3) + 1))
        w[rng.choice(n, size=k, replace=False)] = 0.0
    if w.sum() <= 0.0:
        w[0] = 1.0
    return FiniteProbabilitySpace(range(n), w / w.sum())


def random_partition(rng: np.random.Generator, space: FiniteProbabilitySpace) -> Partition:
    n = len(space)
    k = int(rng.integers(1, n + 1))
    return Partition.from_labels(space, rng.integers(0, k, size=n))


def random_permutation_instance(rng: np.random.Generator, max_atoms: int = 10):
    """A space together with a permutation preserving it bit-exactly.

    Masses are assigned per cycle of the permutation (one shared float
    per cycle), so ``masses[perm[j]] == masses[j]`` holds as an exact
    float identity, which the action constructor requires.
    """
    n = int(rng.integers(2, max_atoms + 1))
    perm = [int(x) for x in rng.permutation(n)]
    seen = [False] * n
    cycles = []
    for s in range(n):
        if seen[s]:
            continue
        cyc = [s]
        seen[s] = True
        j = perm[s]
        while j != s:
            cyc.append(j)
            seen[j] = True
            j = perm[j]
        cycles.append(cyc)
    w = rng.random(len(cycles))
    total = float(sum(len(c) * wi for c, wi in zip(cycles, w)))
    masses = np.empty(n)
    for cyc, wi in zip(cycles, w):
        masses[cyc] = float(wi) / total
    space = FiniteProbabilitySpace(range(n), masses)
    return space, tuple(perm)


# ---------------------------------------------------------------------------
# sweep reports
# ---------------------------------------------------------------------------


@dataclass
class PropertyStats:
    """Aggregated results for one named property across a sweep."""

    name: str
    tolerance: float
    checked: int = 0
    violations: int = 0
    min_slack: float = float("inf")

    def record(self, slack: float) -> None:
        self.checked += 1
        self.min_slack = min(self.min_slack, slack)
        if slack < -self.tolerance:
            self.violations += 1

    @property
    def ok(self) -> bool:
        return self.violations == 0


@dataclass
class SweepReport:
    """Per-property statistics for one randomized sweep."""

    trials: int
    seed: int
    stats: dict = field(default_factory=dict)

    def stat(self, name: str, tolerance: float) -> PropertyStats:
        if name not in self.stats:
            self.stats[name] = PropertyStats(name, tolerance)
        return self.stats[name]

    @property
    def ok(self) -> bool:
        return all(s.ok for s in self.stats.values())


# ---------------------------------------------------------------------------
# sweeps
# ---------------------------------------------------------------------------


def sweep_identities(
    trials: int = 500,
    seed: int = 0,
    max_atoms: int = 10,
    tolerance: float = 1e-9,
    equality_tolerance: float = 1e-12,
) -> SweepReport:
    """The conditional-entropy identities on seeded random triples.

    Each trial draws a cycle-weighted space with an exactly
    measure-preserving permutation, uses it both as a one-generator
    action (translation invariance) and as a raw map (invariance under
    measure isomorphisms), and checks all identities on a random
    partition triple.
    """
    rng = np.random.default_rng(seed)
    report = SweepReport(trials, seed)
    for _ in range(trials):
        space, perm = random_permutation_instance(rng, max_atoms)
        action = FinitePMPAction(space, [perm])
        alpha = random_partition(rng, space)
        beta = random_partition(rng, space)
        gamma = random_partition(rng, space)
        inverse = tuple(int(x) for x in np.argsort(np.asarray(perm)))
        result = verify_entropy_identities(
            space,
            alpha,
            beta,
            gamma,
            action=action,
            pmp_map=inverse,
            tolerance=tolerance,
            equality_tolerance=equality_tolerance,
        )
        for check in result.checks:
            report.stat(check.name, check.tol).record(check.slack)
    return report


def sweep_disintegration(
    trials: int = 1000,
    seed: int = 0,
    max_atoms: int = 10,
    tolerance: float = 1e-12,
) -> SweepReport:
    """Reconstruction through fibers and the conditional mass function.

    Each trial checks that re-integrating a random atom subset through
    the disintegration reproduces its mass, and that -log of the
    conditional mass function integrates to H(alpha | cond).
    """
    rng = np.random.default_rng(seed)
    report = SweepReport(trials, seed)
    for _ in range(trials):
        space = random_space(rng, max_atoms)
        alpha = random_partition(rng, space)
        cond = random_partition(rng, space)
        dis = disintegrate(space, cond)
        pick = rng.random(len(space)) < 0.5
        subset = [a for a, take in zip(space.atom_ids, pick) if take]
        gap = abs(dis.reconstruct(subset) - space.mass_of(subset))
        report.stat("reconstruction", tolerance).record(-gap)
        mf = conditional_mass_function(space, alpha, cond)
        report.stat("mass_function_integral", tolerance).record(-mf.integral_gap)
    return report


def sweep_exhaustion(
    trials: int = 200,
    seed: int = 0,
    max_atoms: int = 10,
    tolerance: float = 1e-12,
) -> SweepReport:
    """Monotone decay of H(xi | alpha_n v C) along random refining chains.

    Chains are cumulative joins of random partitions, capped with the
    point partition so the final conditional entropy must vanish.
    """
    rng = np.random.default_rng(seed)
    report = SweepReport(trials, seed)
    for _ in range(trials):
        space = random_space(rng, max_atoms)
        xi = random_partition(rng, space)
        cond = random_partition(rng, space) if rng.random() < 0.5 else None
        chain = []
        cur = random_partition(rng, space)
        chain.append(cur)
        for _ in range(int(rng.integers(1, 4))):
            cur = join(cur, random_partition(rng, space))
            chain.append(cur)
        chain.append(join(cur, Partition.points(space)))
        result = verify_chain_exhaustion(space, chain, xi, cond, tolerance)
        report.stat("chain_monotone", tolerance).record(result.min_step_slack)
        report.stat("chain_vanishes", tolerance).record(-abs(result.values[-1]))
    return report


# ---------------------------------------------------------------------------
# window set functions for the subadditivity hypotheses
# ---------------------------------------------------------------------------


def phi_cardinality(F: FolnerSubset) -> float:
    """phi(F) = |F|: satisfies every hypothesis with equality slack 0."""
    return float(len(F))


def phi_neg_card_squared(F: FolnerSubset) -> float:
    """phi(F) = -|F|^2: monotonicity fails, a designed counterexample."""
    return -float(len(F)) ** 2


def window_entropy_phi(
    system,
    alpha=None,
    C=None,
    cap: int = DEFAULT_PATTERN_CAP,
) -> Callable[[FolnerSubset], float]:
    """phi(F) = H(alpha^F | C) for a given system, as a window set function."""
    from .engine import conditional_block_entropy

    def phi(F: FolnerSubset) -> float:
        return conditional_block_entropy(system, alpha, F, C, None, cap)

    return phi
