"""The fan of the crepant resolution of V/K and the dual complex of its central fiber.

Vectors are stored scaled by ``N = 2g + 1``: the integer vector ``v`` stands for
``v / N`` in R^3, so the lattice N becomes ``M = N Z^3 + Z (1, 1, N - 2)``.
"""
from __future__ import annotations

import itertools
import math
from collections import deque
from dataclasses import dataclass, field
from fractions import Fraction

from .exact_algebra import AlgebraError


def det3(a, b, c) -> int:
    return (a[0] * (b[1] * c[2] - b[2] * c[1])
            - a[1] * (b[0] * c[2] - b[2] * c[0])
            + a[2] * (b[0] * c[1] - b[1] * c[0]))


def cross(a, b):
    return (a[1] * b[2] - a[2] * b[1], a[2] * b[0] - a[0] * b[2], a[0] * b[1] - a[1] * b[0])


def dot(a, b):
    return sum(x * y for x, y in zip(a, b))


@dataclass(frozen=True)
class QuotientLattice:
    genus: int

    @property
    def N(self):
        return 2 * self.genus + 1

    def basis(self):
        """Integer basis of the scaled lattice M (rows)."""
        N = self.N
        return ((1, 1, N - 2), (0, N, 0), (0, 0, N))

    def covolume(self) -> int:
        return abs(det3(*self.basis()))

    def index_of_integer_lattice(self) -> int:
        return self.N ** 3 // self.covolume()

    def coordinates(self, v):
        """Coordinates of a scaled vector in the basis, or None if v is not in M."""
        N = self.N
        a = Fraction(v[0])
        b = (Fraction(v[1]) - a) / N
        c = (Fraction(v[2]) - a * (N - 2)) / N
        if any(x.denominator != 1 for x in (a, b, c)):
            return None
        return (int(a), int(b), int(c))

    def contains(self, v) -> bool:
        return self.coordinates(v) is not None

    def is_primitive(self, v) -> bool:
        c = self.coordinates(v)
        return c is not None and math.gcd(*c) == 1


@dataclass
class Fan:
    genus: int
    rays: list                      # scaled integer vectors
    cones: list                     # triples of ray indices
    labels: list = field(default_factory=list)

    @property
    def N(self):
        return 2 * self.genus + 1

    def faces(self):
        out = set()
        for c in self.cones:
            for r in range(1, 4):
                out.update(tuple(sorted(f)) for f in itertools.combinations(c, r))
        return sorted(out, key=lambda f: (len(f), f))

    def ray_real(self, i):
        return tuple(Fraction(x, self.N) for x in self.rays[i])

    def to_json(self):
        return {
            "genus": self.genus,
            "scale": self.N,
            "rays": [list(r) for r in self.rays],
            "cones": [list(c) for c in self.cones],
            "labels": list(self.labels),
        }


def fan_rays(genus: int):
    N = 2 * genus + 1
    return [(k, k, N - 2 * k) for k in range(genus + 1)] + [(N, 0, 0), (0, N, 0)]


def build_fan(genus: int, check: bool = True) -> Fan:
    if genus < 2:
        raise AlgebraError("genus must be at least 2")
    N = 2 * genus + 1
    rays = fan_rays(genus)
    ix = {r: i for i, r in enumerate(rays)}
    e1, e2 = (N, 0, 0), (0, N, 0)
    cones, labels = [], []
    for k in range(genus):
        a, b = (k, k, N - 2 * k), (k + 1, k + 1, N - 2 - 2 * k)
        cones.append((ix[a], ix[b], ix[e1]))
        labels.append(f"A{k}")
    for k in range(genus):
        a, b = (k, k, N - 2 * k), (k + 1, k + 1, N - 2 - 2 * k)
        cones.append((ix[a], ix[b], ix[e2]))
        labels.append(f"B{k}")
    cones.append((ix[(genus, genus, 1)], ix[e1], ix[e2]))
    labels.append("C")
    fan = Fan(genus, rays, cones, labels)
    if check:
        ok, why = fan_validity(fan)
        if not ok:
            raise AlgebraError(f"invalid fan: {why}")
    return fan


def octant_fan(genus: int) -> Fan:
    N = 2 * genus + 1
    return Fan(genus, [(N, 0, 0), (0, N, 0), (0, 0, N)], [(0, 1, 2)], ["octant"])


# --------------------------------------------------------------------------- checks


def _in_open_cone2(v, a, b) -> bool:
    """v in the relative interior of cone(a, b) (a, b independent)."""
    n = cross(a, b)
    if dot(n, v) != 0:
        return False
    # v = s a + t b with s, t > 0
    s_num = dot(cross(v, b), n)
    t_num = dot(cross(a, v), n)
    den = dot(n, n)
    return s_num * den > 0 and t_num * den > 0


def _separated(c1, c2) -> bool:
    """Some facet plane of either cone has one cone weakly on each side."""
    for own, other in ((c1, c2), (c2, c1)):
        for i in range(3):
            a, b, opp = own[i], own[(i + 1) % 3], own[(i + 2) % 3]
            n = cross(a, b)
            if dot(n, opp) < 0:
                n = tuple(-x for x in n)
            if all(dot(n, v) <= 0 for v in other):
                return True
    return False


def fan_validity(fan: Fan):
    """Pairwise intersections of maximal cones are common faces."""
    R = fan.rays
    if len(set(R)) != len(R):
        return False, "repeated ray"
    for c in fan.cones:
        if len(c) != 3 or any(not 0 <= i < len(R) for i in c):
            return False, f"bad cone {c}"
        if det3(*(R[i] for i in c)) == 0:
            return False, f"degenerate cone {c}"
    for c1, c2 in itertools.combinations(fan.cones, 2):
        if not _separated([R[i] for i in c1], [R[i] for i in c2]):
            return False, f"overlapping cones {c1} {c2}"
    for c in fan.cones:
        for i, j in itertools.combinations(c, 2):
            for k in range(len(R)):
                if k not in (i, j) and _in_open_cone2(R[k], R[i], R[j]):
                    return False, f"ray {k} inside face {(i, j)}"
    return True, ""


def smoothness_check(fan: Fan, lattice: QuotientLattice | None = None) -> list:
    """Per maximal cone: its generators are a basis of the lattice (index 1)."""
    lattice = lattice or QuotientLattice(fan.genus)
    vol = lattice.covolume()
    out = []
    for c in fan.cones:
        d = abs(det3(*(fan.rays[i] for i in c)))
        prim = all(lattice.is_primitive(fan.rays[i]) for i in c)
        out.append({"cone": list(c), "index": Fraction(d, vol), "unimodular": prim and d == vol})
    return out


def crepancy_check(fan: Fan) -> list:
    """Per ray: its primitive generator lies on x + y + z = 1."""
    return [{"ray": list(r), "sum": Fraction(sum(r), fan.N), "crepant": sum(r) == fan.N} for r in fan.rays]


def support_check(fan: Fan, grid: int = 12) -> dict:
    """Volume count, grid coverage of the slice x+y+z=1, and face pairing."""
    N = fan.N
    R = fan.rays
    vol = sum(abs(det3(*(R[i] for i in c))) for c in fan.cones)
    volume_ok = vol == N ** 3 and all(all(x >= 0 for x in r) for r in R)
    missed = []
    for a in range(grid + 1):
        for b in range(grid + 1 - a):
            p = (a, b, grid - a - b)
            if not any(_in_closed_cone(p, [R[i] for i in c]) for c in fan.cones):
                missed.append(p)
    edges: dict = {}
    for c in fan.cones:
        for e in itertools.combinations(sorted(c), 2):
            edges[e] = edges.get(e, 0) + 1
    pairing = True
    for (i, j), cnt in edges.items():
        on_boundary = any(R[i][k] == 0 and R[j][k] == 0 for k in range(3))
        if cnt != (1 if on_boundary else 2):
            pairing = False
    return {"volume": volume_ok, "grid": not missed, "missed": missed, "face_pairing": pairing,
            "pass": volume_ok and not missed and pairing}


def _in_closed_cone(p, gens) -> bool:
    d = det3(*gens)
    if d == 0:
        return False
    # Cramer: p = sum l_i g_i, all l_i >= 0
    for i in range(3):
        g = list(gens)
        g[i] = p
        if det3(*g) * d < 0:
            return False
    return True


# --------------------------------------------------------------------------- central fiber


def component_table(genus: int) -> list:
    if genus < 2:
        raise AlgebraError("genus must be at least 2")
    rows = []
    for k in range(1, genus):
        rows.append((f"H{k}", f"F_{2 * genus + 1 - 2 * k}"))
    rows.append((f"H{genus}", "P2"))
    rows.append((f"H{genus + 1}", "proper transform"))
    return rows


@dataclass
class ComponentGraph:
    genus: int
    vertices: list
    edges: dict     # name -> (v1, v2)
    faces: dict     # name -> (vertices, edge names)

    @property
    def counts(self):
        return len(self.vertices), len(self.edges), len(self.faces)

    @property
    def euler(self):
        v, e, f = self.counts
        return v - e + f

    def connected(self) -> bool:
        adj = {v: set() for v in self.vertices}
        for a, b in self.edges.values():
            adj[a].add(b)
            adj[b].add(a)
        seen = {self.vertices[0]}
        todo = deque(seen)
        while todo:
            for w in adj[todo.popleft()]:
                if w not in seen:
                    seen.add(w)
                    todo.append(w)
        return len(seen) == len(self.vertices)

    def edges_in_two_faces(self) -> bool:
        cnt = {e: 0 for e in self.edges}
        for _, es in self.faces.values():
            for e in es:
                cnt[e] += 1
        return all(c == 2 for c in cnt.values())

    def links_are_cycles(self) -> bool:
        """The faces and edges around each vertex form one cycle."""
        for v in self.vertices:
            es = [e for e, ends in self.edges.items() if v in ends]
            fs = [f for f, (vs, _) in self.faces.items() if v in vs]
            if not fs:
                return False
            adj = {("e", e): [] for e in es}
            adj.update({("f", f): [] for f in fs})
            for f in fs:
                for e in self.faces[f][1]:
                    if e in es:
                        adj[("f", f)].append(("e", e))
                        adj[("e", e)].append(("f", f))
            if any(len(n) != 2 for n in adj.values()):
                return False
            start = next(iter(adj))
            seen = {start}
            todo = [start]
            while todo:
                for w in adj[todo.pop()]:
                    if w not in seen:
                        seen.add(w)
                        todo.append(w)
            if len(seen) != len(adj):
                return False
        return True

    def is_sphere_like(self) -> bool:
        return self.connected() and self.edges_in_two_faces() and self.links_are_cycles() and self.euler == 2

    def to_json(self):
        return {
            "genus": self.genus,
            "vertices": self.vertices,
            "edges": {k: list(v) for k, v in sorted(self.edges.items())},
            "faces": {k: {"vertices": list(v[0]), "edges": list(v[1])} for k, v in sorted(self.faces.items())},
            "counts": list(self.counts),
            "euler": self.euler,
        }


def dual_complex(genus: int) -> ComponentGraph:
    if genus < 3:
        raise AlgebraError("the dual complex needs genus >= 3")
    g = genus
    H = [f"H{i}" for i in range(1, g + 2)]
    top = H[g]
    edges: dict = {}
    for i in range(1, g):
        edges[f"C{i}"] = (H[i - 1], H[i])

    def side(i, s):
        """Edge of H_i meeting the proper transform that carries triple point s."""
        if i == 1:
            return "D1"
        if i == g:
            return f"D{g}"
        return f"D{i}.{s}"

    edges["D1"] = (H[0], top)
    for i in range(2, g):
        edges[f"D{i}.0"] = (H[i - 1], top)
        edges[f"D{i}.1"] = (H[i - 1], top)
    edges[f"D{g}"] = (H[g - 1], top)
    faces: dict = {}
    for i in range(1, g):
        for s in (0, 1):
            faces[f"T{i}.{s}"] = ((H[i - 1], H[i], top), (f"C{i}", side(i, s), side(i + 1, s)))
    return ComponentGraph(g, H, edges, faces)


def intersection_pattern_ok(genus: int) -> bool:
    """Exceptional components meet only when adjacent."""
    dc = dual_complex(genus)
    for a, b in dc.edges.values():
        if a != f"H{genus + 1}" and b != f"H{genus + 1}":
            if abs(int(a[1:]) - int(b[1:])) != 1:
                return False
    return True


def fan_report(genus: int, grid: int = 12) -> dict:
    fan = build_fan(genus)
    lat = QuotientLattice(genus)
    smooth = smoothness_check(fan, lat)
    crep = crepancy_check(fan)
    sup = support_check(fan, grid)
    rep = {
        "genus": genus,
        "maximal_cones": len(fan.cones),
        "lattice_index": lat.index_of_integer_lattice(),
        "unimodular": all(r["unimodular"] for r in smooth),
        "crepant": all(r["crepant"] for r in crep),
        "support": sup["pass"],
        "components": component_table(genus),
    }
    ok = (rep["maximal_cones"] == 2 * genus + 1 and rep["unimodular"] and rep["crepant"] and rep["support"])
    if genus >= 3:
        dc = dual_complex(genus)
        rep["dual_complex"] = {"counts": list(dc.counts), "euler": dc.euler, "sphere_like": dc.is_sphere_like()}
        ok = ok and dc.counts == (genus + 1, 3 * genus - 3, 2 * (genus - 1)) and dc.euler == 2
    rep["pass"] = ok
    return rep
