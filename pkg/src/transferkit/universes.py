"""Universes of real representations, their realizable stabilizers, and the
induced transfer systems.

A universe is a subset of irreducible descriptors, each implicitly present
with countably infinite multiplicity, always containing the trivial line.
For cyclic groups the descriptors are the trivial line, the sign line (even
order), and the rotation planes; other groups supply explicit fixed-dimension
tables.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import FrozenSet, Iterable, Optional, Sequence

from .groups import Group, SubgroupLattice
from .transfers import TransferSystem, join as transfer_join


class DescriptorMismatch(ValueError):
    pass


@dataclass(frozen=True)
class Irreducible:
    """A representation descriptor with computable fixed-point dimensions.

    kind: 'trivial' | 'sign' | 'rotation' (cyclic groups) | 'table'.
    ``k`` is the rotation speed; ``dims`` maps subgroup index -> fixed dimension.
    """

    kind: str
    k: int = 0
    name: str = ""
    dims: Optional[tuple[tuple[int, int], ...]] = None

    def label(self) -> str:
        if self.kind == "rotation":
            return f"V({self.k})"
        return self.name or self.kind

    def __repr__(self) -> str:
        return f"Irreducible({self.label()})"


def _cyclic_subgroup_order(lattice: SubgroupLattice, sub_index: int) -> int:
    return lattice.subgroups[sub_index].size


def _check_cyclic(group: Group) -> int:
    n = group.order
    for a in group.elements():
        x, order = a, 1
        while x != group.identity:
            x = group.table[x][a]
            order += 1
        if order == n:
            return n
    raise DescriptorMismatch(f"{group.name} is not cyclic; supply a dims table")


def fixed_dim(v: Irreducible, lattice: SubgroupLattice, sub_index: int) -> int:
    """Dimension of the fixed subspace of the given subgroup."""
    if v.kind == "table":
        table = dict(v.dims or ())
        if sub_index not in table:
            raise DescriptorMismatch(f"no fixed dimension recorded for subgroup {sub_index}")
        return table[sub_index]
    if v.kind == "trivial":
        return 1
    n = _check_cyclic(lattice.group)
    m = _cyclic_subgroup_order(lattice, sub_index)
    if v.kind == "sign":
        if n % 2:
            raise DescriptorMismatch("sign representation needs even order")
        return 1 if (n // m) % 2 == 0 else 0
    if v.kind == "rotation":
        if not 0 <= v.k <= n // 2:
            raise DescriptorMismatch(f"rotation speed {v.k} out of range for order {n}")
        return 2 if v.k % m == 0 else 0
    raise DescriptorMismatch(f"unknown descriptor kind {v.kind!r}")


def validate_irreducible(v: Irreducible, lattice: SubgroupLattice) -> None:
    """Fixed dimensions must be monotone: K <= H forces dim V^K >= dim V^H."""
    n = len(lattice)
    for k in range(n):
        for h in range(n):
            if lattice.leq[k][h]:
                if fixed_dim(v, lattice, k) < fixed_dim(v, lattice, h):
                    raise DescriptorMismatch(
                        f"{v.label()} has non-monotone fixed dimensions at ({k},{h})")


TRIVIAL = Irreducible("trivial")


@dataclass(frozen=True)
class Universe:
    lattice: SubgroupLattice
    irreducibles: FrozenSet[Irreducible]

    def __post_init__(self):
        if TRIVIAL not in self.irreducibles:
            raise ValueError("every universe contains the trivial representation")
        for v in self.irreducibles:
            validate_irreducible(v, self.lattice)

    def labels(self) -> list[str]:
        return sorted(v.label() for v in self.irreducibles)

    def __le__(self, other: "Universe") -> bool:
        return self.irreducibles <= other.irreducibles

    def __repr__(self) -> str:
        return f"Universe({'+'.join(self.labels())})"


def make_universe(lattice: SubgroupLattice, irreducibles: Iterable[Irreducible]) -> Universe:
    return Universe(lattice, frozenset(irreducibles) | {TRIVIAL})


def nontrivial_irreducibles(lattice: SubgroupLattice) -> list[Irreducible]:
    """The nontrivial real irreducibles of a cyclic group, in canonical order."""
    n = _check_cyclic(lattice.group)
    out = []
    if n % 2 == 0 and n > 1:
        out.append(Irreducible("sign"))
    out.extend(Irreducible("rotation", k) for k in range(1, (n + 1) // 2))
    return out


def _realizable_in(v: Irreducible, lattice: SubgroupLattice, k: int, h: int) -> bool:
    """Whether some point of V has stabilizer exactly K inside H.

    Over the reals a fixed subspace is never covered by finitely many proper
    subspaces, so K is hit exactly when dim V^K beats every minimal overgroup.
    """
    dk = fixed_dim(v, lattice, k)
    return all(dk > fixed_dim(v, lattice, l) for l in lattice.minimal_overgroups(k, h))


def realizable_stabilizers(u: Universe, h: int) -> frozenset[int]:
    """Stabilizers of points of res_H U: single-irreducible hits, H itself,
    closed under pairwise intersection (a tuple's stabilizer is the meet)."""
    lat = u.lattice
    below = lat.subgroups_below(h)
    hits = {h}
    for v in u.irreducibles:
        for k in below:
            if _realizable_in(v, lat, k, h):
                hits.add(k)
    changed = True
    while changed:
        changed = False
        for a in list(hits):
            for b in list(hits):
                m = lat.meet(a, b)
                if m not in hits:
                    hits.add(m)
                    changed = True
    return frozenset(hits)


def universe_transfer_system(u: Universe) -> TransferSystem:
    """K -> H exactly when the orbit H/K embeds into the restricted universe,
    i.e. when K is a realizable stabilizer over H. Always disk-like."""
    lat = u.lattice
    pairs = []
    for h in range(len(lat)):
        for k in realizable_stabilizers(u, h):
            if k != h:
                pairs.append((k, h))
    from .transfers import from_pairs
    return from_pairs(lat, pairs)


def is_compatible(u: Universe, ix) -> bool:
    """Universe/indexing compatibility: equal admissible-orbit families at the top."""
    from .transfers import is_disklike
    from .families import NotDiskLike
    if not is_disklike(ix.source):
        raise NotDiskLike("compatibility is defined against disk-like systems")
    lat = u.lattice
    top = lat.top
    admitted = {k for k in range(len(lat)) if ix.source.contains(k, top)}
    return realizable_stabilizers(u, top) == admitted


@dataclass
class UniverseLatticeReport:
    dimension: int
    universes: list[Universe]
    systems: list[TransferSystem]
    order_preserved: bool
    join_preserved: bool
    extremes_preserved: bool
    noninjectivity_witness: Optional[tuple[int, int]]


def universe_lattice(lattice: SubgroupLattice) -> UniverseLatticeReport:
    """The cube of universes of a cyclic group and its map to transfer systems.

    Nodes are subsets of the nontrivial irreducibles; the report confirms
    order/join/extreme preservation and looks for a non-injectivity witness.
    """
    irr = nontrivial_irreducibles(lattice)
    subsets = []
    for bits in range(1 << len(irr)):
        chosen = [irr[i] for i in range(len(irr)) if (bits >> i) & 1]
        subsets.append(make_universe(lattice, chosen))
    systems = [universe_transfer_system(u) for u in subsets]
    order_ok = all(systems[i].mask & ~systems[j].mask == 0
                   for i in range(len(subsets)) for j in range(len(subsets))
                   if subsets[i] <= subsets[j])
    join_ok = True
    index_of = {frozenset(u.irreducibles): i for i, u in enumerate(subsets)}
    for i in range(len(subsets)):
        for j in range(len(subsets)):
            u_join = index_of[subsets[i].irreducibles | subsets[j].irreducibles]
            if systems[u_join].mask != transfer_join(systems[i], systems[j]).mask:
                join_ok = False
    bottom = index_of[frozenset({TRIVIAL})]
    top = index_of[frozenset(irr) | {TRIVIAL}]
    from .transfers import trivial_system, complete_system
    extremes_ok = (systems[bottom].mask == trivial_system(lattice).mask
                   and systems[top].mask == complete_system(lattice).mask)
    witness = None
    seen: dict[int, int] = {}
    for i, t in enumerate(systems):
        if t.mask in seen:
            witness = (seen[t.mask], i)
            break
        seen[t.mask] = i
    return UniverseLatticeReport(len(irr), subsets, systems, order_ok, join_ok,
                                 extremes_ok, witness)


def universe_from_json(payload: dict, lattice: SubgroupLattice) -> Universe:
    """{"irreducibles": ["trivial","V(1)","sign"]} or {"tables": {name: {sub: dim}}}."""
    irreducibles: list[Irreducible] = []
    for label in payload.get("irreducibles", []):
        label = label.strip()
        if label == "trivial":
            irreducibles.append(TRIVIAL)
        elif label == "sign":
            irreducibles.append(Irreducible("sign"))
        elif label.startswith("V(") and label.endswith(")"):
            irreducibles.append(Irreducible("rotation", int(label[2:-1])))
        else:
            raise DescriptorMismatch(f"unknown irreducible label {label!r}")
    for name, dims in payload.get("tables", {}).items():
        table = tuple(sorted((int(k), int(v)) for k, v in dims.items()))
        irreducibles.append(Irreducible("table", name=name, dims=table))
    return make_universe(lattice, irreducibles)
