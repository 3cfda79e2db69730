"""Product-of-fixed-points functor on based G-sets for a finite abelian G-group.

The value on a based set with n nonbase points is the set of n-tuples; a based
map phi pushes a tuple forward by summing over fibers, with empty fibers going
to zero. On a twisted based G-set the tuple space carries the twisted action
g.(x_1,..,x_n) = (g x_{s^{-1}(1)},..,g x_{s^{-1}(n)}).
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Iterable, Optional, Sequence

from ..groups import Group, SubgroupLattice, double_cosets
from ..gsets import GSet


class AbelianGGroup:
    """A finite abelian group with a G-action by additive automorphisms."""

    def __init__(self, group: Group, add: Sequence[Sequence[int]],
                 action: Sequence[Sequence[int]], name: str = "M"):
        self.group = group
        self.size = len(add)
        self.add = tuple(tuple(r) for r in add)
        self.action = tuple(tuple(p) for p in action)
        self.name = name
        self.zero = self._validate()

    def _validate(self) -> int:
        zero = None
        for e in range(self.size):
            if all(self.add[e][x] == x for x in range(self.size)):
                zero = e
                break
        if zero is None:
            raise ValueError("no additive zero")
        for a in range(self.size):
            for b in range(self.size):
                if self.add[a][b] != self.add[b][a]:
                    raise ValueError(f"addition is not commutative at ({a},{b})")
                for c in range(self.size):
                    if self.add[self.add[a][b]][c] != self.add[a][self.add[b][c]]:
                        raise ValueError(f"addition is not associative at ({a},{b},{c})")
            if not any(self.add[a][b] == zero for b in range(self.size)):
                raise ValueError(f"element {a} has no negative")
        g = self.group
        if len(self.action) != g.order:
            raise ValueError("action table must cover the whole group")
        for a in g.elements():
            perm = self.action[a]
            if sorted(perm) != list(range(self.size)):
                raise ValueError(f"group element {a} does not act bijectively")
            if perm[zero] != zero:
                raise ValueError(f"group element {a} moves zero")
            for x in range(self.size):
                for y in range(self.size):
                    if perm[self.add[x][y]] != self.add[perm[x]][perm[y]]:
                        raise ValueError(f"element {a} is not additive at ({x},{y})")
        for a in g.elements():
            for b in g.elements():
                ab = g.table[a][b]
                if any(self.action[ab][x] != self.action[a][self.action[b][x]]
                       for x in range(self.size)):
                    raise ValueError(f"action is not a homomorphism at ({a},{b})")
        return zero

    def act(self, a: int, x: int) -> int:
        return self.action[a][x]

    def plus(self, x: int, y: int) -> int:
        return self.add[x][y]

    def sum(self, xs: Iterable[int]) -> int:
        out = self.zero
        for x in xs:
            out = self.add[out][x]
        return out

    def fixed_points(self, sub_members: Sequence[int]) -> list[int]:
        return [x for x in range(self.size)
                if all(self.action[a][x] == x for a in sub_members)]

    def __repr__(self) -> str:
        return f"AbelianGGroup({self.name}, |M|={self.size}, G={self.group.name})"


def make_abelian_g_group(group: Group, modulus: int,
                         unit_images: Optional[Sequence[int]] = None) -> AbelianGGroup:
    """Z/modulus with each group element acting by multiplication by a unit."""
    add = [[(x + y) % modulus for y in range(modulus)] for x in range(modulus)]
    if unit_images is None:
        unit_images = [1] * group.order
    action = [tuple((u * x) % modulus for x in range(modulus)) for u in unit_images]
    return AbelianGGroup(group, add, action, name=f"Z/{modulus}")


def cyclic_module_actions(group: Group, modulus: int) -> list[AbelianGGroup]:
    """Every G-action on Z/modulus by units, found by brute-force hom search."""
    units = [u for u in range(1, modulus) if _gcd(u, modulus) == 1] or [1]
    homs = []

    def rec(assigned: dict[int, int], frontier: list[int]):
        if len(assigned) == group.order:
            homs.append([assigned[a] for a in group.elements()])
            return
        a = min(x for x in group.elements() if x not in assigned)
        for u in units:
            trial = dict(assigned)
            trial[a] = u
            if _consistent(group, trial, modulus):
                grown = _propagate(group, trial, modulus)
                if grown is not None:
                    rec(grown, [])

    rec({group.identity: 1}, [])
    unique = sorted({tuple(h) for h in homs})
    return [make_abelian_g_group(group, modulus, imgs) for imgs in unique]


def _gcd(a: int, b: int) -> int:
    while b:
        a, b = b, a % b
    return a


def _consistent(group: Group, partial: dict[int, int], modulus: int) -> bool:
    for a in partial:
        for b in partial:
            ab = group.table[a][b]
            if ab in partial and partial[ab] != (partial[a] * partial[b]) % modulus:
                return False
    return True


def _propagate(group: Group, partial: dict[int, int], modulus: int) -> Optional[dict[int, int]]:
    out = dict(partial)
    changed = True
    while changed:
        changed = False
        for a in list(out):
            for b in list(out):
                ab = group.table[a][b]
                val = (out[a] * out[b]) % modulus
                if ab not in out:
                    out[ab] = val
                    changed = True
                elif out[ab] != val:
                    return None
    return out


# ---------------------------------------------------------------------------
# Tuple spaces

@dataclass
class XMSpace:
    """All n-tuples over M with the twisted G-action of a based G-set."""

    module: AbelianGGroup
    gset: GSet
    n: int
    action: tuple[tuple[int, ...], ...]

    @property
    def size(self) -> int:
        return self.module.size ** self.n

    def decode(self, idx: int) -> list[int]:
        vals = []
        for _ in range(self.n):
            vals.append(idx % self.module.size)
            idx //= self.module.size
        return vals

    def encode(self, vals: Sequence[int]) -> int:
        out = 0
        for v in reversed(vals):
            out = out * self.module.size + v
        return out


def build_XM(module: AbelianGGroup, t: GSet) -> XMSpace:
    """Evaluate the functor on a based G-set via the twisted-tuple formula."""
    if not t.based:
        raise ValueError("based input required")
    if t.group is not module.group:
        raise ValueError("module and G-set act through different groups")
    n = t.size - 1
    size = module.size ** n
    m = module.size

    def decode(idx: int) -> list[int]:
        vals = []
        for _ in range(n):
            vals.append(idx % m)
            idx //= m
        return vals

    action = []
    for a in module.group.elements():
        inv = module.group.inv[a]
        perm = []
        for idx in range(size):
            vals = decode(idx)
            # g._s(x_1..x_n)_i = g * x_{s(g)^{-1}(i)}
            new = [module.action[a][vals[t.action[inv][i] - 1]] for i in range(1, t.size)]
            out = 0
            for v in reversed(new):
                out = out * m + v
            perm.append(out)
        action.append(tuple(perm))
    return XMSpace(module, t, n, tuple(action))


def induced_map(module: AbelianGGroup, phi: Sequence[int], src: XMSpace,
                tgt: XMSpace) -> Callable[[int], int]:
    """Fiber-sum pushforward of a based map phi (phi[j] is the image of point j+1)."""
    fibers = [[] for _ in range(tgt.n)]
    for j, img in enumerate(phi):
        if img != 0:
            fibers[img - 1].append(j)

    def push(idx: int) -> int:
        vals = src.decode(idx)
        return tgt.encode([module.sum(vals[j] for j in fibers[i]) for i in range(tgt.n)])

    return push


def segal_bijection_check(module: AbelianGGroup, t: GSet) -> bool:
    """The per-point projection map onto the space of based maps T -> M.

    Both sides are computed from their own defining formulas: the twisted
    tuple action on the left, the conjugation action on maps on the right.
    The projections assemble to the identity on indices, so the check is that
    the two independently computed action tables agree, pointwise.
    """
    xm = build_XM(module, t)
    g = module.group
    m = module.size
    # right side: based maps T -> M with (a.f)(x) = a f(a^-1 x)
    for a in g.elements():
        inv = g.inv[a]
        for idx in range(xm.size):
            f = xm.decode(idx)
            conj = [module.action[a][f[t.action[inv][i] - 1]] for i in range(1, t.size)]
            if xm.encode(conj) != xm.action[a][idx]:
                return False
    # the projection components are the coordinate maps
    for i in range(1, t.size):
        phi = [0] * (t.size - 1)
        phi[i - 1] = 1
        push = induced_map(module, phi, xm, XMSpace(module, t, 1, ()))
        for idx in range(xm.size):
            if push(idx) != xm.decode(idx)[i - 1]:
                return False
    return True


def twisted_power_comparison(module: AbelianGGroup, t: GSet) -> bool:
    """Compare the twisted action with the functor-then-twist route.

    Route one evaluates on the twisted G-set directly; route two evaluates on
    the trivial set and twists by acting through the induced permutation maps:
    g._s x = (value of the permutation map of s(g)) applied to the diagonal g x.
    """
    xm = build_XM(module, t)
    g = module.group
    n = xm.n
    for a in g.elements():
        perm = [t.action[a][i] - 1 for i in range(1, t.size)]  # s(g) on 0-based slots
        phi = [0] * n
        for j in range(n):
            phi[j] = perm[j] + 1
        trivial = XMSpace(module, t, n, ())
        push = induced_map(module, phi, trivial, trivial)
        for idx in range(xm.size):
            diag = xm.encode([module.action[a][v] for v in xm.decode(idx)])
            if push(diag) != xm.action[a][idx]:
                return False
    return True


# ---------------------------------------------------------------------------
# Transfer maps and the double coset identity

def _coset_reps(group: Group, h_members: list[int], k_members: list[int],
                reverse: bool = False) -> list[int]:
    """Minimal (or maximal) representatives of the cosets rK inside H."""
    seen = set()
    reps = []
    for r in (reversed(h_members) if reverse else h_members):
        if r in seen:
            continue
        coset = {group.table[r][k] for k in k_members}
        seen |= coset
        reps.append(r)
    return reps


def transfer_map(module: AbelianGGroup, k: int, h: int) -> Callable[[int], int]:
    """Sum over coset translates: x -> r_1 x + ... + r_n x for reps of H/K.

    Defined on K-fixed points, where the value is H-fixed and independent of
    the representative choice; both facts are asserted on every call site.
    """
    lat = module.group.lattice()
    h_members = lat.subgroups[h].members()
    k_members = lat.subgroups[k].members()
    reps = _coset_reps(module.group, h_members, k_members)

    def t(x: int) -> int:
        return module.sum(module.action[r][x] for r in reps)

    return t


def transfer_map_alt(module: AbelianGGroup, k: int, h: int) -> Callable[[int], int]:
    """Same sum computed from the other canonical representative choice."""
    lat = module.group.lattice()
    h_members = lat.subgroups[h].members()
    k_members = lat.subgroups[k].members()
    reps = _coset_reps(module.group, h_members, k_members, reverse=True)

    def t(x: int) -> int:
        return module.sum(module.action[r][x] for r in reps)

    return t


def _double_cosets_within(lat: SubgroupLattice, h: int, l: int, k: int):
    """Double cosets L\\H/K for L, K <= H, with parent-level data."""
    group = lat.group
    h_members = lat.subgroups[h].members()
    l_members = lat.subgroups[l].members()
    k_members = lat.subgroups[k].members()
    seen = set()
    out = []
    for a in h_members:
        if a in seen:
            continue
        coset = {group.table[x][group.table[a][y]] for x in l_members for y in k_members}
        seen |= coset
        inter = lat.meet(l, lat.conjugate(k, a))
        out.append((a, inter))
    return out


def verify_semi_mackey(module: AbelianGGroup, ix) -> dict:
    """Elementwise transfer data check over every pair of the source system.

    For each transfer K -> H: images of K-fixed points are H-fixed, the two
    representative choices agree, and for every L <= H the restriction of the
    transfer decomposes as the double-coset sum of conjugated transfers.
    """
    lat = module.group.lattice()
    source = ix.source if hasattr(ix, "source") else ix
    checked = []
    failures = []
    for (k, h) in source.strict_pairs() + [(i, i) for i in range(len(lat))]:
        t = transfer_map(module, k, h)
        t_alt = transfer_map_alt(module, k, h)
        k_fixed = module.fixed_points(lat.subgroups[k].members())
        h_fixed = set(module.fixed_points(lat.subgroups[h].members()))
        for x in k_fixed:
            if t(x) not in h_fixed:
                failures.append({"kind": "image-not-fixed", "pair": [k, h], "x": x})
            if t(x) != t_alt(x):
                failures.append({"kind": "rep-dependence", "pair": [k, h], "x": x})
        for l in lat.subgroups_below(h):
            parts = _double_cosets_within(lat, h, l, k)
            for x in k_fixed:
                lhs = t(x)
                rhs = module.zero
                for (a, inter) in parts:
                    ta = transfer_map(module, inter, l)
                    rhs = module.plus(rhs, ta(module.action[a][x]))
                if lhs != rhs:
                    failures.append({"kind": "double-coset", "pair": [k, h],
                                     "L": l, "x": x, "lhs": lhs, "rhs": rhs})
        checked.append([k, h])
    return {"pairs_checked": checked, "failures": failures,
            "status": "pass" if not failures else "fail"}
