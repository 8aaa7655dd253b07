"""Ergodic decomposition checks: fixed partitions, components, and the
decomposition of the entropy rate into a weighted component average.

Finite actions decompose over their orbit partition (every component
rate is exactly zero, so the identity holds with both sides 0.0).
Mixtures decompose along their tag partition once each component is
certified ergodic; the tag entropy contributes nothing to the rate, so
the mixture rate is the weighted average of the component rates.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional

from .engine import ConvergenceReport, RateTrace, entropy_rate
from .groups import FolnerSequence
from .spaces import (
    FiniteProbabilitySpace,
    Partition,
    SpaceMismatchError,
    conditional_entropy,
    disintegrate,
    restrict,
    same_space,
)
from .systems import (
    DEFAULT_PATTERN_CAP,
    FinitePMPAction,
    IncompatibleSubAlgebraError,
    MixtureSystem,
    ShiftSystem,
    SubAlgebraSpec,
    _mixture_alphas,
    is_ergodic_model,
)


def fixed_partition_witness(system: FinitePMPAction, C: Partition) -> Optional[dict]:
    """First (generator, block) pair a candidate fixed partition fails on.

    Returns None when every block is invariant under every generator,
    otherwise a witness dict naming the offending generator index and
    the block that moves.
    """
    if not isinstance(C, Partition):
        raise TypeError("finite systems need a space partition")
    if not same_space(C.space, system.space):
        raise SpaceMismatchError("space mismatch")
    idx = system.space.index
    for gi, g in enumerate(system.generators):
        for block in C.blocks:
            image = {g[idx(a)] for a in block}
            if image != {idx(a) for a in block}:
                return {"generator": gi, "block": list(block)}
    return None


def is_fixed_partition(system, C) -> bool:
    """Whether every block of ``C`` is invariant as a set under the action.

    For a finite action ``C`` is a partition of its space and each
    generator must map each block onto itself. For a mixture ``C`` is a
    grouping of component indices; any valid grouping is fixed because
    each component measure is shift-invariant.
    """
    if isinstance(system, FinitePMPAction):
        return fixed_partition_witness(system, C) is None
    if isinstance(system, MixtureSystem):
        groups = tuple(tuple(int(i) for i in grp) for grp in C)
        seen = sorted(i for grp in groups for i in grp)
        if seen != list(range(len(system.components))):
            raise ValueError("grouping must partition the component indices")
        return True
    raise TypeError("unsupported system kind")


def orbit_partition(system: FinitePMPAction) -> Partition:
    """Finest fixed partition: the orbits of the generated group."""
    n = len(system.space)
    parent = list(range(n))

    def find(x: int) -> int:
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    for g in system.generators:
        for j in range(n):
            a, b = find(j), find(g[j])
            if a != b:
                parent[a] = b
    groups: dict = {}
    ids = system.space.atom_ids
    for j in range(n):
        groups.setdefault(find(j), []).append(ids[j])
    return Partition(system.space, groups.values())


@dataclass(frozen=True)
class ErgodicComponents:
    """The ergodic decomposition of a system.

    ``kind`` is "orbit" (finite action; ``partition`` holds the orbit
    partition) or "tags" (mixture; ``groups`` holds singleton component
    index groups). ``certified`` records whether every component was
    positively certified ergodic, not merely constructed.
    """

    kind: str
    certified: bool
    partition: Optional[Partition] = None
    groups: Optional[tuple] = None


def _finite_component_ergodic(action: FinitePMPAction) -> bool:
    orbits = orbit_partition(action)
    positive = [
        b for b in orbits.blocks if action.space.mass_of(b) > 0.0
    ]
    return len(positive) <= 1


def ergodic_components(system) -> ErgodicComponents:
    """Compute the system's ergodic components.

    Finite actions: the orbit partition (each positive-mass orbit is an
    ergodic component by transitivity). Mixtures: one component per
    tag, certified when each component measure is itself ergodic
    (full-support product measures; irreducible aperiodic chains;
    single-orbit finite actions).
    """
    if isinstance(system, FinitePMPAction):
        return ErgodicComponents("orbit", True, partition=orbit_partition(system))
    if isinstance(system, MixtureSystem):
        certified = True
        for comp in system.components:
            if isinstance(comp, ShiftSystem):
                certified = certified and is_ergodic_model(comp)
            elif isinstance(comp, FinitePMPAction):
                certified = certified and _finite_component_ergodic(comp)
            else:
                certified = False
        return ErgodicComponents("tags", certified, groups=system.tag_grouping())
    raise TypeError("unsupported system kind")


def restrict_action(system: FinitePMPAction, fiber: FiniteProbabilitySpace) -> FinitePMPAction:
    """The action induced on one invariant block's fiber space.

    ``fiber`` must come from disintegrating over a fixed partition, so
    each generator maps the block onto itself; masses on the fiber are
    the original ones divided by one common block mass, hence preserved
    bit-exactly.
    """
    idx_in_space = [system.space.index(a) for a in fiber.atom_ids]
    pos = {j: p for p, j in enumerate(idx_in_space)}
    gens = []
    for g in system.generators:
        try:
            gens.append(tuple(pos[g[j]] for j in idx_in_space))
        except KeyError:
            raise ValueError("block is not invariant under the action") from None
    return FinitePMPAction(fiber, gens)


@dataclass(frozen=True)
class ComponentResult:
    """One ergodic component's contribution to the decomposition."""

    label: str
    weight: float
    estimate: float
    converged: bool


@dataclass
class DecompositionResult:
    """Both sides of the rate decomposition over ergodic components.

    ``lhs`` is the whole system's rate estimate, ``rhs`` the weighted
    average of component estimates, ``gap`` their absolute difference.
    """

    lhs: float
    rhs: float
    gap: float
    components: list
    lhs_trace: RateTrace
    lhs_report: ConvergenceReport
    certified: bool


def decompose_entropy(
    system,
    beta=None,
    alpha=None,
    C=None,
    sequence: FolnerSequence = None,
    n_max: Optional[int] = None,
    tol: float = 1e-3,
    cap: int = DEFAULT_PATTERN_CAP,
) -> DecompositionResult:
    """Verify h(system) = weighted sum of rates over the blocks of ``beta``.

    ``beta`` must be fixed under the action (finite: a partition whose
    blocks the generators map onto themselves; mixture: a grouping of
    component indices); it defaults to the ergodic components. The left
    side is the whole system's rate estimate; the right side restricts
    the system, the partition, and any fixed conditioning partition to
    each positive-mass block and averages the component estimates with
    the block masses. Mixtures accept trivial or shared symbol-factor
    conditioning, passed through to every component.
    """
    comps = ergodic_components(system)
    spec = C if isinstance(C, SubAlgebraSpec) or C is None else None
    if C is not None and spec is None:
        raise TypeError("conditioning must be a SubAlgebraSpec or None")
    lhs_trace, lhs_report = entropy_rate(system, alpha, spec, sequence, n_max, tol, cap)
    results = []
    if isinstance(system, FinitePMPAction):
        if beta is None:
            beta = comps.partition
        witness = fixed_partition_witness(system, beta)
        if witness is not None:
            raise ValueError(
                f"partition is not fixed: generator {witness['generator']}"
                f" moves block {tuple(witness['block'])}"
            )
        if alpha is None:
            alpha = Partition.points(system.space)
        cond_part = None
        if spec is not None and spec.kind == "invariant_partition":
            if fixed_partition_witness(system, spec.partition) is not None:
                raise IncompatibleSubAlgebraError("conditioning partition is not fixed")
            cond_part = spec.partition
        elif spec is not None and spec.kind != "trivial":
            raise IncompatibleSubAlgebraError("incompatible sub-algebra")
        dis = disintegrate(system.space, beta)
        for bi, block in enumerate(beta.blocks):
            mB = system.space.mass_of(block)
            if mB <= 0.0:
                continue
            fiber = dis.conditional(bi)
            sub = restrict_action(system, fiber)
            sub_alpha = restrict(alpha, block, fiber)
            sub_C = None
            if cond_part is not None:
                # a fixed conditioning partition restricts to a fixed one
                sub_C = SubAlgebraSpec.invariant_partition(restrict(cond_part, block, fiber))
            _, rep = entropy_rate(sub, sub_alpha, sub_C, sequence, n_max, tol, cap)
            results.append(ComponentResult(f"block:{bi}", mB, rep.estimate, rep.converged))
    elif isinstance(system, MixtureSystem):
        if spec is not None and spec.kind not in ("trivial", "symbol_factor"):
            raise IncompatibleSubAlgebraError("incompatible sub-algebra")
        groups = system.tag_grouping() if beta is None else tuple(
            tuple(int(i) for i in grp) for grp in beta
        )
        is_fixed_partition(system, groups)  # raises unless a valid grouping
        alphas = _mixture_alphas(system, alpha)
        weights = system.weights
        for grp in groups:
            wG = float(sum(float(weights[i]) for i in grp))
            if len(grp) == 1:
                i = grp[0]
                sub, sub_alpha = system.components[i], alphas[i]
            else:
                from .systems import mixture as _mixture

                sub = _mixture(
                    [system.components[i] for i in grp],
                    [float(weights[i]) / wG for i in grp],
                )
                sub_alpha = [alphas[i] for i in grp]
            _, rep = entropy_rate(sub, sub_alpha, spec, sequence, n_max, tol, cap)
            label = "component:" + ",".join(str(i) for i in grp)
            results.append(ComponentResult(label, wG, rep.estimate, rep.converged))
    else:
        raise TypeError("unsupported system kind")
    rhs = sum(r.weight * r.estimate for r in results)
    return DecompositionResult(
        lhs=lhs_report.estimate,
        rhs=rhs,
        gap=abs(lhs_report.estimate - rhs),
        components=results,
        lhs_trace=lhs_trace,
        lhs_report=lhs_report,
        certified=comps.certified,
    )


@dataclass(frozen=True)
class MassFunctionResult:
    """The conditional mass function m and its entropy integral check.

    ``values[x]`` is the conditional measure, given the block of
    ``cond`` through x, of the block of ``alpha`` through x. Atoms in
    zero-mass conditioning blocks carry no conditional measure and are
    listed in ``excluded``. ``integral_gap`` is
    |H(alpha | cond) + sum_x mu(x) log m(x)|, which vanishes
    identically in exact arithmetic.
    """

    values: dict
    excluded: tuple
    integral_gap: float


def conditional_mass_function(
    space: FiniteProbabilitySpace, alpha: Partition, cond: Partition
) -> MassFunctionResult:
    """Pointwise conditional masses m(x) = mu(A_x | C_x) and the check
    that -log m integrates to the conditional entropy."""
    for p in (alpha, cond):
        if not same_space(p.space, space):
            raise SpaceMismatchError("space mismatch")
    values: dict = {}
    excluded = []
    integral = 0.0
    for x in space.atom_ids:
        cb = cond.block_of(x)
        mC = space.mass_of(cb)
        if mC <= 0.0:
            excluded.append(x)
            continue
        ab = set(alpha.block_of(x))
        inter = [a for a in cb if a in ab]
        m = space.mass_of(inter) / mC
        values[x] = m
        mx = space.mass(x)
        if mx > 0.0:
            integral += mx * math.log(m)
    gap = abs(conditional_entropy(alpha, cond) + integral)
    return MassFunctionResult(values, tuple(excluded), gap)
