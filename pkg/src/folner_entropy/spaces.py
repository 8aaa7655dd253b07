"""Finite probability spaces, measurable partitions, and exact entropy algebra.

Everything here is desk-scale and exact: spaces are ordered finite atom
lists with float64 masses, partitions are block families kept in a
canonical order, and the entropy operations implement the positive-mass
conventions (0 log 0 = 0, zero-mass fibers skipped) directly.
"""

from __future__ import annotations

from typing import Hashable, Iterable, Mapping, Sequence

import numpy as np

from ._kernels import entropy_from_probs

MASS_TOL = 1e-12

AtomId = Hashable


class SpaceMismatchError(ValueError):
    """Raised when an operation mixes partitions over different spaces."""


class DegenerateFiberError(ValueError):
    """Raised when a zero-mass block is used where a fiber is required."""


class FiniteProbabilitySpace:
    """An ordered finite set of atoms with nonnegative masses summing to 1.

    Parameters
    ----------
    atom_ids : sequence of hashables
        Distinct atom identifiers. Their order fixes the canonical atom
        order used everywhere else (block ordering, label arrays).
    masses : sequence of float
        Nonnegative masses, same length, summing to 1 within 1e-12.
        Zero-mass atoms are allowed; entropy conventions skip them.
    """

    __slots__ = ("atom_ids", "masses", "_index")

    def __init__(self, atom_ids: Sequence[AtomId], masses: Sequence[float]):
        atom_ids = tuple(atom_ids)
        arr = np.array(masses, dtype=np.float64)
        if arr.ndim != 1 or arr.shape[0] != len(atom_ids):
            raise ValueError("atom ids and masses must align")
        if len(atom_ids) == 0:
            raise ValueError("empty space")
        if len(set(atom_ids)) != len(atom_ids):
            raise ValueError("duplicate atom ids")
        if np.any(arr < 0.0):
            raise ValueError("negative mass")
        if abs(float(arr.sum()) - 1.0) > MASS_TOL:
            raise ValueError("masses must sum to 1")
        arr.flags.writeable = False
        self.atom_ids = atom_ids
        self.masses = arr
        self._index = {a: i for i, a in enumerate(atom_ids)}

    @classmethod
    def uniform(cls, atoms) -> "FiniteProbabilitySpace":
        """Uniform space over ``atoms`` (an id sequence, or a count)."""
        ids = tuple(range(atoms)) if isinstance(atoms, int) else tuple(atoms)
        n = len(ids)
        return cls(ids, np.full(n, 1.0 / n))

    def __len__(self) -> int:
        return len(self.atom_ids)

    def __repr__(self) -> str:
        return f"FiniteProbabilitySpace({len(self)} atoms)"

    def index(self, atom: AtomId) -> int:
        try:
            return self._index[atom]
        except KeyError:
            raise ValueError("unknown atom") from None

    def mass(self, atom: AtomId) -> float:
        return float(self.masses[self.index(atom)])

    def mass_of(self, atoms: Iterable[AtomId]) -> float:
        """Mass of an atom subset. All subset masses go through here so
        block masses, quotient masses, and reconstruction sums share one
        summation (numpy pairwise over the subset's index array)."""
        idx = [self.index(a) for a in atoms]
        if not idx:
            return 0.0
        return float(self.masses[idx].sum())


def same_space(a: FiniteProbabilitySpace, b: FiniteProbabilitySpace) -> bool:
    """Structural equality: identical atom order and bit-identical masses."""
    return a is b or (a.atom_ids == b.atom_ids and np.array_equal(a.masses, b.masses))


def _require_same_space(alpha: "Partition", beta: "Partition") -> None:
    if not same_space(alpha.space, beta.space):
        raise SpaceMismatchError("space mismatch")


class Partition:
    """Measurable partition of a finite space into disjoint covering blocks.

    Blocks are stored in a canonical order: atoms within a block follow
    the space's atom order, and blocks are ordered by their smallest
    contained atom. Equal partitions therefore compare and hash equal
    regardless of how their blocks were listed.
    """

    __slots__ = ("space", "blocks", "_labels")

    def __init__(self, space: FiniteProbabilitySpace, blocks: Iterable[Iterable[AtomId]]):
        seen: set[int] = set()
        canon = []
        for raw in blocks:
            idx = sorted(space.index(a) for a in raw)
            if not idx:
                raise ValueError("empty block")
            if seen.intersection(idx):
                raise ValueError("blocks overlap")
            seen.update(idx)
            canon.append(idx)
        if len(seen) != len(space):
            raise ValueError("blocks must cover the space")
        canon.sort(key=lambda idx: idx[0])
        labels = np.empty(len(space), dtype=np.int64)
        for j, idx in enumerate(canon):
            for i in idx:
                labels[i] = j
        labels.flags.writeable = False
        self.space = space
        self.blocks = tuple(tuple(space.atom_ids[i] for i in idx) for idx in canon)
        self._labels = labels

    @classmethod
    def points(cls, space: FiniteProbabilitySpace) -> "Partition":
        """The partition into single atoms."""
        return cls(space, [[a] for a in space.atom_ids])

    @classmethod
    def trivial(cls, space: FiniteProbabilitySpace) -> "Partition":
        """The one-block partition {X}."""
        return cls(space, [space.atom_ids])

    @classmethod
    def from_labels(cls, space: FiniteProbabilitySpace, labels: Sequence[int]) -> "Partition":
        """Partition grouping atoms by equal labels (aligned with atom order)."""
        if len(labels) != len(space):
            raise ValueError("labels must align with atoms")
        groups: dict = {}
        for a, lab in zip(space.atom_ids, labels):
            groups.setdefault(lab, []).append(a)
        return cls(space, groups.values())

    @property
    def n_blocks(self) -> int:
        return len(self.blocks)

    def __len__(self) -> int:
        return len(self.blocks)

    def __iter__(self):
        return iter(self.blocks)

    def __repr__(self) -> str:
        return f"Partition({self.n_blocks} blocks / {len(self.space)} atoms)"

    def __eq__(self, other) -> bool:
        if not isinstance(other, Partition):
            return NotImplemented
        return same_space(self.space, other.space) and self.blocks == other.blocks

    def __hash__(self) -> int:
        return hash(self.blocks)

    def block_index(self, atom: AtomId) -> int:
        return int(self._labels[self.space.index(atom)])

    def block_of(self, atom: AtomId) -> tuple:
        return self.blocks[self.block_index(atom)]

    def block_masses(self) -> np.ndarray:
        return np.array([self.space.mass_of(b) for b in self.blocks])

    def labels(self) -> np.ndarray:
        """Block index per atom, aligned with the space's atom order."""
        return self._labels


def join_all(partitions: Sequence[Partition]) -> Partition:
    """Common refinement of several partitions of one space."""
    if not partitions:
        raise ValueError("empty partition list")
    first = partitions[0]
    for p in partitions[1:]:
        _require_same_space(first, p)
    if len(partitions) == 1:
        return first
    space = first.space
    label_rows = [p._labels for p in partitions]
    groups: dict = {}
    for i, a in enumerate(space.atom_ids):
        key = tuple(int(row[i]) for row in label_rows)
        groups.setdefault(key, []).append(a)
    return Partition(space, groups.values())


def join(alpha: Partition, beta: Partition) -> Partition:
    """Join (common refinement): all nonempty pairwise block intersections."""
    return join_all([alpha, beta])


def is_coarser(alpha: Partition, beta: Partition) -> bool:
    """True iff ``alpha`` is coarser than ``beta`` up to zero-mass atoms.

    Every block of ``beta`` must have its positive-mass atoms inside a
    single block of ``alpha``; zero-mass atoms never separate blocks.
    """
    _require_same_space(alpha, beta)
    space = alpha.space
    la = alpha._labels
    for B in beta.blocks:
        owner = -1
        for a in B:
            i = space.index(a)
            if space.masses[i] <= 0.0:
                continue
            if owner < 0:
                owner = int(la[i])
            elif int(la[i]) != owner:
                return False
    return True


def entropy(alpha: Partition) -> float:
    """Partition entropy -sum mu(A) log mu(A) in nats over positive-mass blocks.

    On a finite space the sum is always finite; the float return type
    keeps an infinite value representable for non-finite extensions.
    """
    return entropy_from_probs(alpha.block_masses())


def conditional_entropy(alpha: Partition, beta: Partition) -> float:
    """Mean conditional entropy sum_B mu(B) * H_{mu_B}(alpha traced on B).

    Computed fiberwise, exactly as defined: for each positive-mass block
    B of ``beta``, the trace masses of ``alpha`` on B are normalized by
    mu(B) and fed to the plain entropy sum. Zero-mass blocks carry no
    fiber and are skipped.
    """
    _require_same_space(alpha, beta)
    space = alpha.space
    la = alpha._labels
    total = 0.0
    for B in beta.blocks:
        mB = space.mass_of(B)
        if mB <= 0.0:
            continue
        traces: dict = {}
        for a in B:
            traces.setdefault(int(la[space.index(a)]), []).append(a)
        tm = np.array([space.mass_of(t) for t in traces.values()])
        total += mB * entropy_from_probs(tm / mB)
    return total


class FactorSpace:
    """Quotient of a space by a partition: one atom per block.

    Quotient atom ids are the canonical block indices 0..k-1; the
    projection maps each base atom to its block index. Quotient masses
    are the block masses under the same summation as everywhere else,
    so reconstruction identities hold to float precision.
    """

    __slots__ = ("base", "partition", "quotient", "projection")

    def __init__(self, base: FiniteProbabilitySpace, partition: Partition):
        if not same_space(base, partition.space):
            raise SpaceMismatchError("space mismatch")
        self.base = base
        self.partition = partition
        self.quotient = FiniteProbabilitySpace(
            range(partition.n_blocks), partition.block_masses()
        )
        self.projection = {a: partition.block_index(a) for a in base.atom_ids}

    def project(self, atom: AtomId) -> int:
        return self.projection[atom]


def factor_space(space: FiniteProbabilitySpace, alpha: Partition) -> FactorSpace:
    """Quotient space of ``space`` by ``alpha`` with its projection map."""
    return FactorSpace(space, alpha)


class Disintegration:
    """Canonical disintegration of a space over a partition.

    Holds one conditional (fiber) space per positive-mass block: the
    base masses restricted to the block and normalized by its mass.
    Zero-mass blocks have no fiber. ``reconstruct`` re-integrates any
    atom subset through the fibers.
    """

    __slots__ = ("space", "partition", "factor", "conditional_spaces")

    def __init__(self, space: FiniteProbabilitySpace, partition: Partition):
        if not same_space(space, partition.space):
            raise SpaceMismatchError("space mismatch")
        self.space = space
        self.partition = partition
        self.factor = FactorSpace(space, partition)
        fibers: dict[int, FiniteProbabilitySpace] = {}
        for bi, block in enumerate(partition.blocks):
            mB = space.mass_of(block)
            if mB <= 0.0:
                continue
            masses = np.array([space.mass(a) for a in block]) / mB
            fibers[bi] = FiniteProbabilitySpace(block, masses)
        self.conditional_spaces = fibers

    def conditional(self, block_index: int) -> FiniteProbabilitySpace:
        try:
            return self.conditional_spaces[block_index]
        except KeyError:
            raise DegenerateFiberError("degenerate fiber") from None

    def reconstruct(self, atoms: Iterable[AtomId]) -> float:
        """Mass of an atom subset re-integrated over the fibers:
        sum_A mu_alpha(A) * mu_A(C intersect A)."""
        wanted = set(atoms)
        qmasses = self.factor.quotient.masses
        total = 0.0
        for bi, fiber in self.conditional_spaces.items():
            inter = [a for a in self.partition.blocks[bi] if a in wanted]
            total += float(qmasses[bi]) * fiber.mass_of(inter)
        return total


def disintegrate(space: FiniteProbabilitySpace, alpha: Partition) -> Disintegration:
    """Canonical disintegration of ``space`` over the blocks of ``alpha``."""
    return Disintegration(space, alpha)


def restrict(alpha: Partition, block: Iterable[AtomId], conditional: FiniteProbabilitySpace) -> Partition:
    """Trace of ``alpha`` on one positive-mass block, as a partition of its fiber.

    ``conditional`` must be the fiber space over exactly this block
    (from ``disintegrate``); the result's blocks are the nonempty
    intersections of ``alpha``'s blocks with the block.
    """
    block = tuple(block)
    if not block:
        raise ValueError("empty set")
    if set(block) != set(conditional.atom_ids):
        raise SpaceMismatchError("space mismatch")
    if alpha.space.mass_of(block) <= 0.0:
        raise DegenerateFiberError("degenerate fiber")
    la = alpha._labels
    groups: dict = {}
    for a in block:
        groups.setdefault(int(la[alpha.space.index(a)]), []).append(a)
    return Partition(conditional, groups.values())
