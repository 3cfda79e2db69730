"""Conjugation-closed families of subgroups and their interplay with transfer systems.

A based family contains the full group. Disk-like transfer systems inject into
based families by taking top-level transfer sources; families in that image
are called transfer-like.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import FrozenSet, Iterable, Optional

from .groups import SubgroupLattice
from .transfers import TransferSystem, is_disklike, rubin_complete


class NotDiskLike(ValueError):
    pass


@dataclass(frozen=True)
class Family:
    lattice: SubgroupLattice
    members: FrozenSet[int]
    based: bool = True

    def __post_init__(self):
        lat = self.lattice
        for m in self.members:
            for a in lat.group.elements():
                if lat.conjugate(m, a) not in self.members:
                    raise ValueError(f"family is not conjugation-closed at subgroup {m}")
        if self.based and lat.top not in self.members:
            raise ValueError("a based family must contain the full group")

    def sorted_members(self) -> list[int]:
        return sorted(self.members)

    def __le__(self, other: "Family") -> bool:
        return self.members <= other.members

    def __repr__(self) -> str:
        return f"Family({sorted(self.members)})"


def generated_family(lattice: SubgroupLattice, subgroups: Iterable[int]) -> Family:
    """Close under conjugation and add the base point."""
    members = {lattice.top}
    for s in subgroups:
        for a in lattice.group.elements():
            members.add(lattice.conjugate(s, a))
    return Family(lattice, frozenset(members))


def phi(t: TransferSystem, strict: bool = True) -> Family:
    """Top-level transfer sources {K : K -> G} as a based family.

    Injective and order/meet/join preserving on disk-like systems only; strict
    mode rejects other input, permissive mode accepts it with no guarantees.
    """
    if strict and not is_disklike(t):
        raise NotDiskLike("the top-source family only classifies disk-like systems")
    return Family(t.lattice, frozenset(t.top_sources()))


def transfer_like_family(lattice: SubgroupLattice, subgroups: Iterable[int]) -> Family:
    """The family of top sources of the transfer system generated by A -> G."""
    top = lattice.top
    t = rubin_complete(lattice, [(s, top) for s in subgroups if s != top])
    return phi(t)


def family_to_transfer(f: Family) -> TransferSystem:
    """The transfer system generated by transfers F -> G."""
    top = f.lattice.top
    return rubin_complete(f.lattice, [(s, top) for s in f.members if s != top])


def is_transfer_like(f: Family) -> tuple[bool, FrozenSet[int]]:
    """Whether f is the top-source family of a disk-like system.

    Returns (verdict, excess) where excess lists members the regenerated
    family has beyond f (the witness when the verdict is False).
    """
    if not f.based:
        raise ValueError("transfer-likeness is a property of based families")
    regenerated = phi(family_to_transfer(f))
    return regenerated.members == f.members, regenerated.members - f.members


def restrict_family(f: Family, h: int) -> Family:
    """F_H = {K <= H : some K' in F meets H exactly in K}, a family over H.

    Membership is expressed in the subgroup lattice of H as a group in its
    own right. Meaningful for transfer-like f; callers may pass any family.
    """
    lat = f.lattice
    hg = lat.subgroup_group(h)
    hlat = hg.lattice()
    members = set()
    for kp in f.members:
        inter = lat.subgroups[lat.meet(kp, h)]
        local_mask = 0
        for p in inter.members():
            local_mask |= 1 << hg.local_of_parent[p]
        members.add(hlat.index_of_mask[local_mask])
    return Family(hlat, frozenset(members))


def family_meet(f1: Family, f2: Family) -> Family:
    if f1.lattice is not f2.lattice:
        raise ValueError("families live on different lattices")
    return Family(f1.lattice, f1.members & f2.members, based=f1.based and f2.based)


def family_join(f1: Family, f2: Family) -> Family:
    if f1.lattice is not f2.lattice:
        raise ValueError("families live on different lattices")
    return Family(f1.lattice, f1.members | f2.members, based=f1.based or f2.based)


def all_based_families(lattice: SubgroupLattice) -> list[Family]:
    """Every based family, enumerated over unions of conjugacy classes."""
    classes = [c for c in lattice.conjugacy_classes if lattice.top not in c]
    out = []
    for bits in range(1 << len(classes)):
        members = {lattice.top}
        for i, cls in enumerate(classes):
            if (bits >> i) & 1:
                members.update(cls)
        out.append(Family(lattice, frozenset(members)))
    out.sort(key=lambda f: (len(f.members), f.sorted_members()))
    return out


def family_hasse_dot(lattice: SubgroupLattice, highlight_transfer_like: bool = True) -> str:
    """DOT rendering of the based-family lattice with transfer-like nodes filled."""
    families = all_based_families(lattice)
    lines = ["digraph families {", "  rankdir=BT;"]
    for i, f in enumerate(families):
        label = "{" + ",".join(str(m) for m in f.sorted_members()) + "}"
        style = ""
        if highlight_transfer_like and is_transfer_like(f)[0]:
            style = ", style=filled, fillcolor=lightblue"
        lines.append(f'  n{i} [label="{label}"{style}];')
    for i, low in enumerate(families):
        for j, high in enumerate(families):
            if i == j or not low <= high:
                continue
            if not any(k != i and k != j and low <= families[k] and families[k] <= high
                       for k in range(len(families))):
                lines.append(f"  n{i} -> n{j};")
    lines.append("}")
    return "\n".join(lines) + "\n"
