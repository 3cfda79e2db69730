"""Finite (based) G-sets as a size n plus an action homomorphism into Sym(n).

Points are 0-indexed; based sets reserve point 0 as the G-fixed basepoint.
Orbit and coset representatives are always chosen minimal, so every
construction here is deterministic.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Iterable, Optional, Sequence

from .groups import Group, Subgroup, SubgroupGroup, SubgroupLattice


class ActionError(ValueError):
    pass


class BasednessMismatch(ValueError):
    pass


class GSet:
    """A finite G-set: ``action[g]`` is the permutation a point index is sent through."""

    def __init__(self, group: Group, size: int, action: Sequence[Sequence[int]],
                 based: bool = False, check: bool = True):
        self.group = group
        self.size = size
        self.action = tuple(tuple(p) for p in action)
        self.based = based
        if check:
            self._validate()

    def _validate(self) -> None:
        g = self.group
        if len(self.action) != g.order:
            raise ActionError("action table must cover every group element")
        for a, perm in enumerate(self.action):
            if sorted(perm) != list(range(self.size)):
                raise ActionError(f"action of element {a} is not a permutation")
        if self.action[g.identity] != tuple(range(self.size)):
            raise ActionError("identity element must act as the identity")
        for a in g.elements():
            for b in g.elements():
                ab = g.table[a][b]
                if any(self.action[ab][i] != self.action[a][self.action[b][i]]
                       for i in range(self.size)):
                    raise ActionError(f"action is not a homomorphism at ({a},{b})")
        if self.based:
            if self.size == 0:
                raise ActionError("a based set needs a basepoint")
            if any(self.action[a][0] != 0 for a in g.elements()):
                raise ActionError("basepoint 0 must be G-fixed")

    def apply(self, a: int, point: int) -> int:
        return self.action[a][point]

    def stabilizer_mask(self, point: int) -> int:
        mask = 0
        for a in self.group.elements():
            if self.action[a][point] == point:
                mask |= 1 << a
        return mask

    def __repr__(self) -> str:
        tag = "based " if self.based else ""
        return f"GSet({tag}{self.group.name}, size={self.size})"

    def to_json(self) -> dict:
        return {"group": self.group.name, "size": self.size, "based": self.based,
                "action": {str(a): list(p) for a, p in enumerate(self.action)}}


@dataclass(frozen=True)
class OrbitType:
    """Multiset of stabilizer conjugacy classes, by class-representative index."""

    classes: tuple[int, ...]  # sorted, with multiplicity
    based: bool

    def __len__(self) -> int:
        return len(self.classes)


@dataclass
class OrbitDecomposition:
    orbits: list[list[int]]          # point partition, each orbit sorted
    stabilizers: list[int]           # subgroup index of the minimal point's stabilizer
    orbit_type: OrbitType


def orbit_decompose(x: GSet) -> OrbitDecomposition:
    """Partition points into orbits; stabilizers are taken at each minimal point."""
    lat = x.group.lattice()
    seen = [False] * x.size
    orbits = []
    stabs = []
    for p in range(x.size):
        if seen[p]:
            continue
        orbit = sorted({x.action[a][p] for a in x.group.elements()})
        for q in orbit:
            seen[q] = True
        orbits.append(orbit)
        stabs.append(lat.index_of_mask[x.stabilizer_mask(orbit[0])])
    classes = []
    for i, s in enumerate(stabs):
        if x.based and orbits[i] == [0]:
            continue
        cls = lat.conjugacy_classes[lat.class_of[s]]
        classes.append(cls[0])
    return OrbitDecomposition(orbits, stabs, OrbitType(tuple(sorted(classes)), x.based))


def isotropy(x: GSet):
    """The isotropy family: all point stabilizers (conjugation-closed by construction)."""
    from .families import Family
    lat = x.group.lattice()
    members = {lat.index_of_mask[x.stabilizer_mask(p)] for p in range(x.size)}
    return Family(lat, frozenset(members), based=x.based)


# ---------------------------------------------------------------------------
# Constructions

def trivial_gset(group: Group, n: int, based: bool = False) -> GSet:
    return GSet(group, n, [tuple(range(n))] * group.order, based=based, check=False)


def _left_cosets(group: Group, member_elems: list[int]) -> tuple[list[int], dict[int, int]]:
    """Minimal representatives of left cosets gH, plus element -> coset index."""
    coset_of = {}
    reps = []
    for g in group.elements():
        if g in coset_of:
            continue
        coset = sorted(group.table[g][h] for h in member_elems)
        rep = coset[0]
        idx = len(reps)
        reps.append(rep)
        for u in coset:
            coset_of[u] = idx
    return reps, coset_of


def orbit_gset(group: Group, h: Subgroup, based: bool = False) -> GSet:
    """The orbit G/H on minimal coset representatives (plus a basepoint if based)."""
    reps, coset_of = _left_cosets(group, h.members())
    n = len(reps)
    offset = 1 if based else 0
    action = []
    for a in group.elements():
        perm = list(range(n + offset))
        for i, r in enumerate(reps):
            perm[i + offset] = coset_of[group.table[a][r]] + offset
        action.append(tuple(perm))
    return GSet(group, n + offset, action, based=based, check=False)


def from_orbit_classes(group: Group, stab_indices: Iterable[int], based: bool = False) -> GSet:
    """Disjoint union of orbits G/K over the given stabilizer subgroup indices."""
    lat = group.lattice()
    parts = [orbit_gset(group, lat.subgroups[k]) for k in stab_indices]
    out = trivial_gset(group, 1, based=True) if based else trivial_gset(group, 0)
    for p in parts:
        out = wedge(out, _add_basepoint(p)) if based else coproduct(out, p)
    return out


def _add_basepoint(x: GSet) -> GSet:
    action = [tuple([0] + [p + 1 for p in perm]) for perm in x.action]
    return GSet(x.group, x.size + 1, action, based=True, check=False)


def coproduct(x: GSet, y: GSet) -> GSet:
    if x.group is not y.group:
        raise ActionError("coproduct needs a common group")
    if x.based or y.based:
        raise BasednessMismatch("coproduct is for unbased sets; use wedge")
    action = [tuple(list(px) + [q + x.size for q in py])
              for px, py in zip(x.action, y.action)]
    return GSet(x.group, x.size + y.size, action, check=False)


def product(x: GSet, y: GSet) -> GSet:
    """Cartesian product with row-major point indexing (i, j) -> i*|y| + j."""
    if x.group is not y.group:
        raise ActionError("product needs a common group")
    if x.based or y.based:
        raise BasednessMismatch("product is for unbased sets; use smash")
    action = []
    for px, py in zip(x.action, y.action):
        action.append(tuple(px[i] * y.size + py[j]
                            for i in range(x.size) for j in range(y.size)))
    return GSet(x.group, x.size * y.size, action, check=False)


def wedge(x: GSet, y: GSet) -> GSet:
    if not (x.based and y.based):
        raise BasednessMismatch("wedge needs based sets")
    n = x.size - 1
    action = [tuple(list(px) + [y_to((py[q]), n) for q in range(1, y.size)])
              for px, py in zip(x.action, y.action)]
    return GSet(x.group, x.size + y.size - 1, action, based=True, check=False)


def y_to(q: int, n: int) -> int:
    return 0 if q == 0 else q + n


def smash(x: GSet, y: GSet) -> GSet:
    """Smash product: nonbase pairs, indexed 1 + (i-1)*(|y|-1) + (j-1)."""
    if not (x.based and y.based):
        raise BasednessMismatch("smash needs based sets")
    nx, ny = x.size - 1, y.size - 1
    action = []
    for px, py in zip(x.action, y.action):
        perm = [0]
        for i in range(1, x.size):
            for j in range(1, y.size):
                perm.append(1 + (px[i] - 1) * ny + (py[j] - 1))
        action.append(tuple(perm))
    return GSet(x.group, nx * ny + 1, action, based=True, check=False)


# ---------------------------------------------------------------------------
# Restriction, induction, coinduction

def _translate_to(ambient: Group, sub: Group) -> dict[int, int]:
    """Map element indices of ``sub`` into ``ambient`` via parent-element identity."""
    def parent_elem(g: Group, i: int) -> int:
        return g.embed[i] if isinstance(g, SubgroupGroup) else i

    amb_local = {parent_elem(ambient, i): i for i in ambient.elements()}
    out = {}
    for i in sub.elements():
        p = parent_elem(sub, i)
        if p not in amb_local:
            raise ActionError("subgroup elements do not lie in the ambient group")
        out[i] = amb_local[p]
    return out


def restrict(x: GSet, h: Subgroup) -> GSet:
    """The same points with the action restricted to the subgroup h of x.group."""
    lat = x.group.lattice()
    hg = lat.subgroup_group(h.index)
    action = [x.action[hg.embed[i]] for i in hg.elements()]
    return GSet(hg, x.size, action, based=x.based, check=False)


def induce(x: GSet, ambient: Group) -> GSet:
    """Balanced product: points (coset rep, x-point) indexed i*|x| + p."""
    into = _translate_to(ambient, x.group)
    back = {v: k for k, v in into.items()}
    members = sorted(into.values())
    reps, coset_of = _left_cosets(ambient, members)
    m = len(reps)
    action = []
    for a in ambient.elements():
        perm = []
        for i in range(m):
            u = ambient.table[a][reps[i]]
            j = coset_of[u]
            h_local = back[ambient.table[ambient.inv[reps[j]]][u]]
            hp = x.action[h_local]
            perm.extend(j * x.size + hp[p] for p in range(x.size))
        action.append(tuple(perm))
    return GSet(ambient, m * x.size, action, check=False)


def coinduce(x: GSet, ambient: Group) -> GSet:
    """H-equivariant maps ambient -> x, acting by right translation of the argument."""
    into = _translate_to(ambient, x.group)
    back = {v: k for k, v in into.items()}
    members = sorted(into.values())
    # right cosets Hg with minimal representatives
    coset_of = {}
    reps = []
    for g in ambient.elements():
        if g in coset_of:
            continue
        coset = sorted(ambient.table[h][g] for h in members)
        idx = len(reps)
        reps.append(coset[0])
        for u in coset:
            coset_of[u] = idx
    m = len(reps)
    size = x.size ** m
    def decode(idx: int) -> list[int]:
        vals = []
        for _ in range(m):
            vals.append(idx % x.size)
            idx //= x.size
        return vals

    def encode(vals: Sequence[int]) -> int:
        out = 0
        for v in reversed(vals):
            out = out * x.size + v
        return out

    action = []
    for a in ambient.elements():
        perm = []
        for idx in range(size):
            vals = decode(idx)
            new = []
            for i in range(m):
                u = ambient.table[reps[i]][a]  # evaluate at rep_i * a
                j = coset_of[u]
                h_local = back[ambient.table[u][ambient.inv[reps[j]]]]
                new.append(x.action[h_local][vals[j]])
            perm.append(encode(new))
        action.append(tuple(perm))
    return GSet(ambient, size, action, check=False)


def conjugate_gset(x: GSet, a: int, lattice: SubgroupLattice) -> GSet:
    """View an H-set as an aHa^-1-set along the conjugation isomorphism.

    ``x.group`` must be a subgroup-group of ``lattice``; ``a`` is a parent element.
    """
    hg = x.group
    if not isinstance(hg, SubgroupGroup) or hg.lattice_ref is not lattice:
        raise ActionError("conjugation needs a subgroup-group of the given lattice")
    g = lattice.group
    target = lattice.subgroup_group(lattice.conjugate(hg.subgroup_index, a))
    action = []
    for i in target.elements():
        back = g.table[g.table[g.inv[a]][target.embed[i]]][a]  # a^-1 * t * a
        action.append(x.action[hg.local_of_parent[back]])
    return GSet(target, x.size, action, based=x.based, check=False)


# ---------------------------------------------------------------------------
# Isomorphism testing and the double coset formula

def iso_test(x: GSet, y: GSet) -> tuple[bool, Optional[list[int]]]:
    """Equivariant-isomorphism test via orbit types, with an explicit witness.

    Returns (verdict, witness) where witness[i] is the image of point i.
    """
    if x.group is not y.group or x.based != y.based:
        return False, None
    if x.size != y.size:
        return False, None
    dx = orbit_decompose(x)
    dy = orbit_decompose(y)
    if dx.orbit_type != dy.orbit_type:
        return False, None
    lat = x.group.lattice()
    by_class: dict[int, list[int]] = {}
    for j, orbit in enumerate(dy.orbits):
        by_class.setdefault(lat.class_of[dy.stabilizers[j]], []).append(j)
    witness = [-1] * x.size
    for i, orbit in enumerate(dx.orbits):
        j = by_class[lat.class_of[dx.stabilizers[i]]].pop(0)
        x0 = orbit[0]
        kx = dx.stabilizers[i]
        y0 = dy.orbits[j][0]
        y1 = None
        for a in x.group.elements():
            cand = y.action[a][y0]
            if lat.index_of_mask[y.stabilizer_mask(cand)] == kx:
                y1 = cand
                break
        for a in x.group.elements():
            witness[x.action[a][x0]] = y.action[a][y1]
    return True, witness


def double_coset_decompose(lattice: SubgroupLattice, h: Subgroup, k: Subgroup) -> GSet:
    """The H-set ⊔_{a in H\\G/K} H/(H ∩ aKa^-1) built from double cosets."""
    from .groups import double_cosets
    hg = lattice.subgroup_group(h.index)
    hlat = hg.lattice()
    parts = []
    for dc in double_cosets(lattice.group, h, k):
        inter = lattice.subgroups[dc.intersection]
        local_mask = 0
        for p in inter.members():
            local_mask |= 1 << hg.local_of_parent[p]
        parts.append(orbit_gset(hg, hlat.subgroups[hlat.index_of_mask[local_mask]]))
    out = trivial_gset(hg, 0)
    for part in parts:
        out = coproduct(out, part)
    return out


def equivariant_maps(x: GSet, y: GSet, based: bool = False) -> list[tuple[int, ...]]:
    """Brute-force enumeration of (based) equivariant maps x -> y."""
    if x.group is not y.group:
        raise ActionError("hom enumeration needs a common group")
    maps = []
    total = y.size ** x.size
    for idx in range(total):
        f = []
        v = idx
        for _ in range(x.size):
            f.append(v % y.size)
            v //= y.size
        if based and (x.size and f[0] != 0):
            continue
        if all(f[x.action[a][p]] == y.action[a][f[p]]
               for a in x.group.elements() for p in range(x.size)):
            maps.append(tuple(f))
    return maps
