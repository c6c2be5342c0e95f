"""Mass assignments: per-vertex probability vectors with exact rational values.

A :class:`MassAssignment` stores each distinct probability vector once as an
integer-weighted measure ``weights / denom``; vertices point at measures.
Equal vectors always share a measure, so ``measure_of[x] == measure_of[y]``
iff ``lambda_x == lambda_y``.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from ._accel import kernels
from .errors import EmptyFolnerSet, InvalidMass, InvalidVertex, NotASubrelation
from .graph import Graph, Metric, as_rational, hop_limit

# int64 kernels are exact while every denominator stays below this
KERNEL_DENOM_LIMIT = 1 << 30


class MassAssignment:
    def __init__(self, n: int, measures, measure_of):
        """``measures``: list of ``(support, weights, denom)``; ``weights=None`` means all ones."""
        canon = {}
        remap = []
        table = []
        for support, weights, denom in measures:
            support, weights, denom = _normalize(n, support, weights, denom)
            key = hash((support.tobytes(), None if weights is None else tuple(weights.tolist())))
            for mid in canon.get(key, ()):
                s2, w2, _ = table[mid]
                if np.array_equal(s2, support) and (
                    (w2 is None and weights is None)
                    or (w2 is not None and weights is not None and np.array_equal(w2, weights))
                ):
                    remap.append(mid)
                    break
            else:
                canon.setdefault(key, []).append(len(table))
                remap.append(len(table))
                table.append((support, weights, denom))
        measure_of = np.asarray(measure_of, dtype=np.int64)
        if measure_of.shape != (n,):
            raise InvalidMass(f"need a measure for each of {n} vertices")
        self.n = n
        self.measure_of = np.asarray(remap, dtype=np.int64)[measure_of] if n else measure_of
        self._pack(table)

    def _pack(self, table):
        sizes = [len(s) for s, _, _ in table]
        wsizes = [0 if w is None else len(w) for _, w, _ in table]
        self.m_indptr = np.zeros(len(sizes) + 1, dtype=np.int64)
        np.cumsum(sizes, out=self.m_indptr[1:])
        self.m_wptr = np.zeros(len(sizes) + 1, dtype=np.int64)
        np.cumsum(wsizes, out=self.m_wptr[1:])
        self.m_support = (np.concatenate([s for s, _, _ in table]) if table
                          else np.zeros(0, dtype=np.int64))
        denoms = [d for _, _, d in table]
        self.max_denom = max(denoms, default=1)
        self.fits_kernels = self.max_denom < KERNEL_DENOM_LIMIT
        wdtype = np.int64 if self.max_denom < (1 << 62) else object
        ws = [w.astype(wdtype) for _, w, _ in table if w is not None]
        self.m_weights = np.concatenate(ws) if ws else np.zeros(0, dtype=wdtype)
        self.m_denom = np.array(denoms, dtype=wdtype)
        # measures become views into the packed arrays
        self.measures = []
        for m in range(len(table)):
            s = self.m_support[self.m_indptr[m]:self.m_indptr[m + 1]]
            lo, hi = self.m_wptr[m], self.m_wptr[m + 1]
            self.measures.append((s, None if lo == hi else self.m_weights[lo:hi], denoms[m]))

    @classmethod
    def from_vectors(cls, n: int, vectors) -> "MassAssignment":
        """Build from ``{x: {y: mass}}`` with masses given as anything rational."""
        measures = []
        for x in range(n):
            if x not in vectors:
                raise InvalidMass(f"no mass vector for vertex {x}")
            vec = {int(y): as_rational(p) for y, p in vectors[x].items()}
            denom = math.lcm(*(p.denominator for p in vec.values())) if vec else 1
            support = sorted(vec)
            weights = [vec[y].numerator * (denom // vec[y].denominator) for y in support]
            measures.append((support, weights, denom))
        return cls(n, measures, np.arange(n))

    def vector(self, x: int) -> dict:
        support, weights, denom = self.measures[self.measure_of[x]]
        if weights is None:
            return dict.fromkeys(support.tolist(), Fraction(1, denom))
        return {y: Fraction(int(w), denom) for y, w in zip(support.tolist(), weights.tolist())}

    def value(self, x: int, y: int) -> Fraction:
        return self.vector(x).get(y, Fraction(0))

    def mass_of(self, x: int, vertices) -> Fraction:
        """``lambda_x`` of a vertex set."""
        vs = set(vertices)
        return sum((p for y, p in self.vector(x).items() if y in vs), Fraction(0))

    def total(self, x: int) -> Fraction:
        return sum(self.vector(x).values(), Fraction(0))

    def l1(self, x: int, y: int) -> Fraction:
        mx, my = int(self.measure_of[x]), int(self.measure_of[y])
        if mx == my:
            return Fraction(0)
        if self.fits_kernels:
            num = kernels.l1_numerator(
                mx, my, self.m_indptr, self.m_support, self.m_wptr, self.m_weights, self.m_denom
            )
            return Fraction(int(num), int(self.m_denom[mx]) * int(self.m_denom[my]))
        vx, vy = self.vector(x), self.vector(y)
        return sum((abs(vx.get(z, 0) - vy.get(z, 0)) for z in vx.keys() | vy.keys()), Fraction(0))

    def check_supported(self, g: Graph):
        """Raise unless every ``lambda_x`` lives on the component of ``x``."""
        if g.n != self.n:
            raise InvalidMass(f"assignment has {self.n} vertices, graph has {g.n}")
        for m, (support, _, _) in enumerate(self.measures):
            users = np.nonzero(self.measure_of == m)[0]
            comps = set(g.component[support].tolist()) | set(g.component[users].tolist())
            if len(comps) > 1:
                raise InvalidMass(f"mass of vertex {int(users[0])} leaves its component")

    def permuted(self, perm) -> "MassAssignment":
        """Relabel vertices: the result gives ``perm[x]`` the mass ``lambda_x`` pushed by ``perm``."""
        perm = list(perm)
        measures = []
        for support, weights, denom in self.measures:
            ws = [1] * len(support) if weights is None else weights.tolist()
            pairs = sorted(zip((perm[s] for s in support.tolist()), ws))
            measures.append(([p for p, _ in pairs], [w for _, w in pairs], denom))
        measure_of = np.empty(self.n, dtype=np.int64)
        measure_of[perm] = self.measure_of
        return MassAssignment(self.n, measures, measure_of)

    def to_json(self) -> dict:
        return {
            str(x): {str(y): _frac_str(p) for y, p in self.vector(x).items()} for x in range(self.n)
        }

    @classmethod
    def from_json(cls, data, n=None) -> "MassAssignment":
        if isinstance(data, (str, bytes)):
            data = json.loads(data)
        vectors = {int(x): {int(y): p for y, p in vec.items()} for x, vec in data.items()}
        return cls.from_vectors(len(vectors) if n is None else n, vectors)


def _normalize(n, support, weights, denom):
    support = np.asarray(support, dtype=np.int64).reshape(-1)
    denom = int(denom)
    if len(support) > 1 and not np.all(support[1:] > support[:-1]):
        raise InvalidMass("support must be strictly increasing")
    if len(support) and (support[0] < 0 or support[-1] >= n):
        raise InvalidMass("support point out of range")
    if weights is not None:
        weights = [int(w) for w in weights]
        if len(weights) != len(support):
            raise InvalidMass("support and weights differ in length")
        if any(w < 0 for w in weights):
            raise InvalidMass("negative mass")
        keep = [i for i, w in enumerate(weights) if w]
        if len(keep) < len(weights):
            support = support[keep]
            weights = [weights[i] for i in keep]
        g = math.gcd(denom, *weights)
        weights = [w // g for w in weights]
        denom //= g
        total = sum(weights)
        weights = None if all(w == 1 for w in weights) else np.array(
            weights, dtype=np.int64 if denom < (1 << 62) else object)
    else:
        total = len(support)
    if denom <= 0 or total != denom:
        raise InvalidMass(f"masses sum to {total}/{denom}, not 1")
    return support, weights, denom


def _frac_str(p: Fraction) -> str:
    return str(p.numerator) if p.denominator == 1 else f"{p.numerator}/{p.denominator}"


@dataclass(frozen=True)
class InvarianceProfile:
    points: tuple  # ((radius, defect), ...)

    def __iter__(self):
        return iter(self.points)

    def as_dict(self):
        return {str(r): _frac_str(e) for r, e in self.points}


@dataclass(frozen=True)
class FiniteAction:
    points: int
    generators: tuple
    labels: tuple = ()

    def __post_init__(self):
        gens = tuple(tuple(int(v) for v in g) for g in self.generators)
        for i, g in enumerate(gens):
            if sorted(g) != list(range(self.points)):
                raise ValueError(f"generator {i} is not a permutation of {self.points} points")
        object.__setattr__(self, "generators", gens)
        if not self.labels:
            object.__setattr__(self, "labels", tuple(f"g{i}" for i in range(len(gens))))

    @classmethod
    def rotation(cls, n: int, *steps: int) -> "FiniteAction":
        """Z/n acting on itself by the given translations."""
        return cls(n, tuple(tuple((x + s) % n for x in range(n)) for s in steps))

    def apply(self, word, x: int) -> int:
        """Act by ``word`` (rightmost letter first); letter ``~i`` is the inverse of generator ``i``."""
        for letter in reversed(word):
            if letter >= 0:
                x = self.generators[letter][x]
            else:
                x = self._inverse(~letter)[x]
        return x

    def _inverse(self, i):
        cache = self.__dict__.setdefault("_inv", {})
        if i not in cache:
            inv = [0] * self.points
            for x, y in enumerate(self.generators[i]):
                inv[y] = x
            cache[i] = tuple(inv)
        return cache[i]

    def to_json(self) -> dict:
        return {"points": self.points, "generators": [list(g) for g in self.generators],
                "labels": list(self.labels)}

    @classmethod
    def from_json(cls, data) -> "FiniteAction":
        if isinstance(data, (str, bytes)):
            data = json.loads(data)
        return cls(data["points"], tuple(data["generators"]), tuple(data.get("labels", ())))


def power_words(generator: int, count: int):
    """Words ``g^0, g^1, ..., g^(count-1)`` for a single generator."""
    return [[generator] * k for k in range(count)]


def uniform_ball_lambda(g: Graph, n: int) -> MassAssignment:
    """``lambda_x`` uniform on the ball ``B(x, n)``."""
    lim = hop_limit(n)
    measures = []
    for x in range(g.n):
        ball, _ = kernels.bounded_bfs(g.indptr, g.indices, x, lim)
        ball.sort()
        measures.append((ball, None, len(ball)))
    return MassAssignment(g.n, measures, np.arange(g.n))


def component_uniform_lambda(g: Graph) -> MassAssignment:
    """``lambda_x`` uniform on the whole component of ``x`` (defect zero)."""
    comps = g.components()
    measure_of = np.empty(g.n, dtype=np.int64)
    measures = []
    for i, comp in enumerate(comps):
        measure_of[comp] = i
        measures.append((comp, None, len(comp)))
    return MassAssignment(g.n, measures, measure_of)


def point_mass_lambda(n: int) -> MassAssignment:
    return MassAssignment(n, [((x,), None, 1) for x in range(n)], np.arange(n))


def schreier_graph(a: FiniteAction, generator_subset=None) -> Graph:
    idx = range(len(a.generators)) if generator_subset is None else generator_subset
    edges = []
    for i in idx:
        if not 0 <= i < len(a.generators):
            raise InvalidVertex(f"no generator {i}")
        gen = a.generators[i]
        edges.extend((x, gen[x]) for x in range(a.points) if gen[x] != x)
    return Graph(a.points, edges)


def folner_lambda(a: FiniteAction, folner_words) -> MassAssignment:
    """``lambda_x(y) = |{w in F : w.x = y}| / |F|`` with ``F`` a list of words."""
    words = [tuple(w) for w in folner_words]
    if not words:
        raise EmptyFolnerSet("Folner set is empty")
    measures = []
    for x in range(a.points):
        counts = {}
        for w in words:
            y = a.apply(w, x)
            counts[y] = counts.get(y, 0) + 1
        support = sorted(counts)
        measures.append((support, [counts[y] for y in support], len(words)))
    return MassAssignment(a.points, measures, np.arange(a.points))


def invariance_defect(m: Metric | Graph, lam: MassAssignment, r) -> Fraction:
    """Max ``||lambda_x - lambda_y||_1`` over same-component pairs with ``0 < d(x, y) < r``."""
    g = m.graph if isinstance(m, Metric) else m
    lim = hop_limit(r, strict=True)
    if lim < 1:
        return Fraction(0)
    # components whose vertices all share one measure contribute zero
    comp_measures = {}
    for c, mid in zip(g.component.tolist(), lam.measure_of.tolist()):
        comp_measures.setdefault(c, set()).add(mid)
    live = [c for c, ms in comp_measures.items() if len(ms) > 1]
    if not live:
        return Fraction(0)
    sources = np.nonzero(np.isin(g.component, live))[0].astype(np.int64)
    if lam.fits_kernels:
        xs, ys, nums, dens = kernels.max_defect(
            g.indptr, g.indices, lim, lam.m_indptr, lam.m_support, lam.m_wptr,
            lam.m_weights, lam.m_denom, lam.measure_of, sources,
        )
        return max((Fraction(int(a), int(b)) for a, b in zip(nums, dens)), default=Fraction(0))
    best = Fraction(0)
    for x in sources.tolist():
        for y in g.distances(x, lim):
            if y > x:
                best = max(best, lam.l1(x, y))
    return best


def invariance_profile(m: Metric | Graph, lam: MassAssignment, radii) -> InvarianceProfile:
    return InvarianceProfile(tuple((r, invariance_defect(m, lam, r)) for r in radii))


def transfer_lambda(lam: MassAssignment, coarse, fine, enumeration=None) -> MassAssignment:
    """Push a mass assignment for a coarse relation down to a finer one.

    ``coarse`` and ``fine`` give a class label per vertex; every fine class
    must sit inside a coarse class.  ``enumeration(z)`` lists the coarse class
    of ``z`` in the order used to pick representatives; by default the class
    in increasing vertex order.  The result satisfies
    ``lambda'_x(y) = sum of lambda_x(z) over z whose representative for x is y``,
    the representative being the first vertex of ``enumeration(z)`` in the
    fine class of ``x``.
    """
    coarse = [int(c) for c in coarse]
    fine = [int(c) for c in fine]
    n = lam.n
    if len(coarse) != n or len(fine) != n:
        raise NotASubrelation("labels must cover every vertex")
    fine_to_coarse = {}
    for v in range(n):
        if fine_to_coarse.setdefault(fine[v], coarse[v]) != coarse[v]:
            raise NotASubrelation(f"fine class {fine[v]} meets two coarse classes")
    classes = {}
    for v in range(n):
        classes.setdefault(coarse[v], []).append(v)
    if enumeration is None:
        enumeration = lambda z: classes[coarse[z]]

    rep_cache = {}

    def rep(x, z):
        key = (fine[x], z)
        if key not in rep_cache:
            for w in enumeration(z):
                if fine[w] == fine[x]:
                    rep_cache[key] = w
                    break
            else:
                raise NotASubrelation(f"enumeration of {z} never meets the class of {x}")
        return rep_cache[key]

    measures = []
    for x in range(n):
        support, weights, denom = lam.measures[lam.measure_of[x]]
        pushed = {}
        for i, z in enumerate(support.tolist()):
            if coarse[z] != coarse[x]:
                raise InvalidMass(f"lambda_{x} charges {z} outside its class")
            y = rep(x, z)
            pushed[y] = pushed.get(y, 0) + (1 if weights is None else int(weights[i]))
        ys = sorted(pushed)
        measures.append((ys, [pushed[y] for y in ys], denom))
    return MassAssignment(n, measures, np.arange(n))
