"""Correlators of ``R.omega`` by the stable-graph sum.

For a graph every half-edge carries a psi power.  A vertex of genus ``h``
integrates

    sum_m 1/m!  omega_{h, n+m}(x_1, ..., x_n, T_{p_1}, ..., T_{p_m})
                * int prod psi^{k_i} p_{m*}(prod psi^{p_j})

which, for a TQFT, is ``eps(x_1 ... x_n . Y)`` with ``Y`` an algebra element
depending only on ``h`` and the multiset of ``k_i`` (see
:meth:`Engine.vertex_element`).  Legs feed ``R_s v`` at power ``s + a``; edges
feed the edge kernel.  A graph is contracted by cutting the edges outside a
spanning tree (summing over a basis index) and folding the tree from the
leaves to a root; each fold carries one vector per psi power of the parent
half-edge, so psi distributions are never enumerated globally.
"""

from __future__ import annotations

import logging
import random
from collections import deque
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from fractions import Fraction
from itertools import product
from typing import Callable, Sequence

import gmpy2

from .errors import NonSymplectic, check_stable
from .frobenius import FrobeniusData, RMatrix, edge_kernel, unit_translation
from .graphs import StableGraph, automorphism_count, enumerate_stable_graphs
from .intersection import integrate_pushforward

log = logging.getLogger(__name__)

__all__ = ["Insertion", "Engine", "reconstruct_correlator", "cohft_axiom_suite"]


@dataclass(frozen=True)
class Insertion:
    """A vector of V (coordinates) with an extra psi power at its marking."""

    vector: tuple
    psi: int = 0

    def __post_init__(self):
        object.__setattr__(self, "vector", tuple(self.vector))
        if self.psi < 0:
            raise ValueError("psi exponent must be non-negative")


def _multisets(total: int, smallest: int, largest: int):
    """Non-decreasing tuples of integers ``>= smallest`` with ``sum(p - 1) == total``."""
    if total == 0:
        yield ()
        return
    for p in range(smallest, largest + 1):
        if p - 1 > total:
            break
        for rest in _multisets(total - (p - 1), p, largest):
            yield (p,) + rest


def _mult_factor(ps: tuple) -> Fraction:
    # ordered tuples / m! == 1 / prod(multiplicity!)
    den = 1
    run = 1
    for i in range(1, len(ps) + 1):
        if i < len(ps) and ps[i] == ps[i - 1]:
            run += 1
        else:
            for r in range(2, run + 1):
                den *= r
            run = 1
    return Fraction(1, den)


def _is_rational(x) -> bool:
    return isinstance(x, (int, Fraction))


def _nonzero(vec) -> bool:
    return any(x != 0 for x in vec)


class Engine:
    """Evaluates correlators of the CohFT ``R.omega`` for one theory.

    ``R`` must be known through ``z^D`` where ``D = 3g - 3 + n`` of the
    largest request; a higher order changes nothing.  Rational theories are
    evaluated with gmpy2 rationals internally; other coefficient rings (for
    instance truncated series) go through their own arithmetic.
    """

    def __init__(self, frobenius: FrobeniusData, rmatrix: RMatrix, *, check: bool = True):
        if rmatrix.dim != frobenius.dim:
            raise ValueError("R-matrix and Frobenius data have different dimensions")
        if check:
            frobenius.check()
            if not rmatrix.is_symplectic(frobenius.eta):
                raise NonSymplectic("R(z) eta^{-1} R(-z)^T != eta^{-1}")
        self.F = frobenius
        self.R = rmatrix
        self.order = rmatrix.order
        d = self.dim = frobenius.dim
        self.rational = all(_is_rational(x) for m in rmatrix.coeffs for row in m for x in row)
        conv = self._conv = gmpy2.mpq if self.rational else _identity

        kernel = edge_kernel(rmatrix, frobenius.eta)
        self.kernel = kernel
        sc = frobenius.structure_constants
        self._sc = [
            [tuple((l, conv(x)) for l, x in enumerate(sc[i][j]) if x != 0) for j in range(d)] for i in range(d)
        ]
        self._counit = [conv(frobenius.counit(frobenius.basis_vector(i))) for i in range(d)]
        self._T = {k: [conv(x) for x in v] for k, v in unit_translation(rmatrix, frobenius.unit_vector).items()}
        self._handle = [conv(x) for x in frobenius.handle]
        self._unit = [conv(x) for x in frobenius.unit_vector]
        self._rsparse = [self._sparse(m) for m in rmatrix.coeffs]

        eta = frobenius.eta
        down = {}  # child on side 1, parent on side 0: Delta eta
        up = {}  # child on side 0, parent on side 1: Delta^T eta
        self._loop = {}
        self._rows = {}
        for (k, l), delta in kernel.coeffs.items():
            if not any(_nonzero(row) for row in delta):
                continue
            down[(k, l)] = self._sparse(
                [[sum((delta[a][c] * eta[c][b] for c in range(d)), Fraction(0)) for b in range(d)] for a in range(d)]
            )
            up[(k, l)] = self._sparse(
                [[sum((delta[c][a] * eta[c][b] for c in range(d)), Fraction(0)) for b in range(d)] for a in range(d)]
            )
            self._rows[(k, l)] = [(mu, [conv(x) for x in delta[mu]]) for mu in range(d) if _nonzero(delta[mu])]
            h = [conv(0)] * d
            for mu in range(d):
                for nu in range(d):
                    if delta[mu][nu] != 0:
                        c = conv(delta[mu][nu])
                        for m, x in self._sc[mu][nu]:
                            h[m] = h[m] + c * x
            if _nonzero(h):
                self._loop[(k, l)] = h
        self._down_by_child = _index(down, 1)
        self._up_by_child = _index(up, 0)
        self._vertex_cache: dict = {}

    def _sparse(self, mat):
        return tuple(tuple((j, self._conv(x)) for j, x in enumerate(row) if x != 0) for row in mat)

    # -- algebra ----------------------------------------------------------
    def _prod(self, u, v):
        sc = self._sc
        out = [0] * self.dim
        for i, ui in enumerate(u):
            if ui == 0:
                continue
            row = sc[i]
            for j, vj in enumerate(v):
                if vj == 0:
                    continue
                uv = ui * vj
                for l, x in row[j]:
                    out[l] = out[l] + uv * x
        return out

    def _eps(self, u):
        acc = 0
        for x, c in zip(u, self._counit):
            if x != 0 and c != 0:
                acc = acc + x * c
        return acc

    @staticmethod
    def _apply(sparse, v):
        out = []
        for row in sparse:
            acc = 0
            for j, x in row:
                if v[j] != 0:
                    acc = acc + x * v[j]
            out.append(acc)
        return out

    # -- vertex ------------------------------------------------------------
    def vertex_element(self, genus: int, ks: tuple[int, ...]):
        """Algebra element ``Y`` with vertex value ``eps(x_1 ... x_n . Y)``.

        ``ks`` is the sorted tuple of psi powers on the vertex half-edges;
        ``None`` stands for zero.
        """
        key = (genus, ks)
        if key in self._vertex_cache:
            return self._vertex_cache[key]
        dim = 3 * genus - 3 + len(ks)
        free = dim - sum(ks)
        acc = None
        if free >= 0:
            base = self._unit
            for _ in range(genus):
                base = self._prod(base, self._handle)
            largest = max(self._T, default=1)
            for ps in _multisets(free, 2, largest):
                if any(p not in self._T for p in ps):
                    continue
                coeff = integrate_pushforward(genus, ks, ps)
                if coeff == 0:
                    continue
                elt = base
                for p in ps:
                    elt = self._prod(elt, self._T[p])
                c = self._conv(coeff * _mult_factor(ps))
                term = [c * x for x in elt]
                acc = term if acc is None else [a + b for a, b in zip(acc, term)]
        if acc is not None and not _nonzero(acc):
            acc = None
        self._vertex_cache[key] = acc
        return acc

    # -- graphs ------------------------------------------------------------
    def _leg_options(self, vector, psi: int, cap: int):
        opts = []
        for s in range(0, min(cap - psi, self.order) + 1):
            vec = self._apply(self._rsparse[s], vector)
            if _nonzero(vec):
                opts.append((s + psi, vec))
        return opts

    def graph_contribution(self, graph: StableGraph, insertions: Sequence[Insertion]):
        """Sum over psi powers and basis indices for one graph, without ``1/|Aut|``."""
        nv = graph.num_vertices
        dims = [3 * g - 3 + n for g, n in zip(graph.genera, graph.valences)]
        for i, ins in enumerate(insertions):
            if ins.psi > dims[graph.legs[i]]:
                return 0
        vectors = [[self._conv(x) for x in ins.vector] for ins in insertions]

        adj: dict[int, list] = {v: [] for v in range(nv)}
        loops = [0] * nv
        for idx, (a, b) in enumerate(graph.edges):
            if a == b:
                loops[a] += 1
            else:
                adj[a].append((idx, b))
                adj[b].append((idx, a))
        parent: dict[int, tuple[int, int]] = {}
        order = [0]
        queue = deque([0])
        tree_edges = set()
        while queue:
            v = queue.popleft()
            for idx, w in adj[v]:
                if w != 0 and w not in parent:
                    parent[w] = (v, idx)
                    tree_edges.add(idx)
                    order.append(w)
                    queue.append(w)
        cut = [idx for idx, (a, b) in enumerate(graph.edges) if a != b and idx not in tree_edges]

        leg_slots: dict[int, list] = {v: [] for v in range(nv)}
        for i, ins in enumerate(insertions):
            v = graph.legs[i]
            opts = self._leg_options(vectors[i], ins.psi, dims[v])
            if not opts:
                return 0
            leg_slots[v].append(opts)

        cut_choices = []
        for idx in cut:
            a, b = graph.edges[idx]
            choices = []
            for (k, l), rows in self._rows.items():
                if k <= dims[a] and l <= dims[b]:
                    for mu, row in rows:
                        choices.append((a, k, mu, b, l, row))
            cut_choices.append(choices)

        total = 0
        basis = [[self._conv(int(i == j)) for j in range(self.dim)] for i in range(self.dim)]
        for combo in product(*cut_choices):
            fixed: dict[int, list] = {v: [] for v in range(nv)}
            used = [0] * nv
            for a, k, mu, b, l, row in combo:
                fixed[a].append((k, basis[mu]))
                fixed[b].append((l, row))
                used[a] += k
                used[b] += l
            if any(u > d for u, d in zip(used, dims)):
                continue
            total = total + self._fold_tree(graph, dims, order, parent, loops, leg_slots, fixed)
        return total

    def _fold_tree(self, graph, dims, order, parent, loops, leg_slots, fixed):
        incoming: dict[int, list] = {v: [] for v in range(graph.num_vertices)}
        result = 0
        for v in reversed(order):
            cap = dims[v]
            slots = list(leg_slots[v])
            slots.extend([opt] for opt in fixed[v])
            slots.extend(list(child.items()) for child in incoming[v])
            loop_opts = [((k, l), h) for (k, l), h in self._loop.items() if k + l <= cap]
            slots.extend(loop_opts for _ in range(loops[v]))
            if v not in parent:
                for ks, vec in self._slot_products(slots, cap):
                    Y = self.vertex_element(graph.genera[v], tuple(sorted(ks)))
                    if Y is not None:
                        result = result + self._eps(Y if vec is None else self._prod(Y, vec))
                continue
            p, idx = parent[v]
            transfers = self._up_by_child if graph.edges[idx][0] == v else self._down_by_child
            out: dict[int, list] = {}
            for kp in range(cap + 1):
                moves = [(l, M) for l, M in transfers.get(kp, ()) if l <= dims[p]]
                if not moves:
                    continue
                for ks, vec in self._slot_products(slots, cap - kp):
                    Y = self.vertex_element(graph.genera[v], tuple(sorted(ks + [kp])))
                    if Y is None:
                        continue
                    A = Y if vec is None else self._prod(Y, vec)
                    for l, M in moves:
                        w = self._apply(M, A)
                        if l in out:
                            out[l] = [x + y for x, y in zip(out[l], w)]
                        else:
                            out[l] = w
            out = {l: w for l, w in out.items() if _nonzero(w)}
            if not out:
                return 0
            incoming[p].append(out)
        return result

    def _slot_products(self, slots, cap: int):
        """Yield (powers, product vector or None) over slot options within capacity."""
        prod_ = self._prod

        def rec(i, cap, ks, vec):
            if i == len(slots):
                yield ks, vec
                return
            for key, v in slots[i]:
                if isinstance(key, tuple):
                    need = key[0] + key[1]
                    new_ks = ks + [key[0], key[1]]
                else:
                    need = key
                    new_ks = ks + [key]
                if need > cap:
                    continue
                nvec = v if vec is None else prod_(vec, v)
                if _nonzero(nvec):
                    yield from rec(i + 1, cap - need, new_ks, nvec)

        yield from rec(0, cap, [], None)

    # -- public ------------------------------------------------------------
    def correlator(self, g: int, insertions: Sequence, *, graphs: Sequence[StableGraph] | None = None, jobs: int = 1):
        """``int_{M_{g,n}} (R.omega)_{g,n}(v_1, ..., v_n) prod psi_i^{a_i}``."""
        insertions = [ins if isinstance(ins, Insertion) else Insertion(*ins) for ins in insertions]
        n = len(insertions)
        check_stable(g, n)
        for ins in insertions:
            if len(ins.vector) != self.dim:
                raise ValueError("insertion vector has the wrong dimension")
        D = 3 * g - 3 + n
        if sum(ins.psi for ins in insertions) > D:
            return self._out(0)
        if self.order < D:
            raise ValueError(f"R-matrix known to order {self.order}, need {D}")
        if graphs is None:
            graphs = enumerate_stable_graphs(g, n)
        else:
            for gr in graphs:
                if not gr.is_valid(g, n):
                    raise ValueError(f"not a stable graph of type ({g}, {n}): {gr}")
        if jobs > 1 and len(graphs) > 1:
            chunks = [list(graphs[i::jobs]) for i in range(jobs)]
            with ProcessPoolExecutor(max_workers=jobs) as pool:
                parts = list(pool.map(_chunk_sum, [(self, c, insertions) for c in chunks]))
            total = 0
            for part in parts:
                total = total + part
        else:
            total = _chunk_sum((self, graphs, insertions))
        return self._out(total)

    def _out(self, value):
        if self.rational:
            value = gmpy2.mpq(value)
            return Fraction(int(value.numerator), int(value.denominator))
        if _is_rational(value):
            return Fraction(value)
        return value


def _identity(x):
    return x


def _index(transfers: dict, child_side: int) -> dict:
    """Group ``{(k, l): M}`` by the child's power: ``{k_child: [(k_parent, M)]}``."""
    out: dict[int, list] = {}
    for (k, l), M in sorted(transfers.items()):
        child, par = (k, l) if child_side == 0 else (l, k)
        out.setdefault(child, []).append((par, M))
    return out


def _chunk_sum(args):
    engine, graphs, insertions = args
    total = 0
    for gr in graphs:
        c = engine.graph_contribution(gr, insertions)
        if c != 0:
            total = total + c * engine._conv(Fraction(1, automorphism_count(gr)))
    return total


_engines: dict = {}


def reconstruct_correlator(frobenius: FrobeniusData, rmatrix: RMatrix, g: int, insertions, **kw):
    """One-shot evaluation; engines are cached per (Frobenius data, R-matrix) pair."""
    key = (id(frobenius), id(rmatrix))
    eng = _engines.get(key)
    if eng is None or eng.F is not frobenius or eng.R is not rmatrix:
        eng = Engine(frobenius, rmatrix)
        _engines[key] = eng
    return eng.correlator(g, insertions, **kw)


# ---------------------------------------------------------------------------
# axiom suite


def _random_exponents(rng: random.Random, n: int, total: int) -> list[int]:
    exps = [0] * n
    for _ in range(total):
        exps[rng.randrange(n)] += 1
    return exps


def cohft_axiom_suite(
    engine: Engine,
    max_genus: int,
    max_legs: int,
    *,
    samples: int = 1,
    seed: int = 0,
    progress: Callable[[str], None] | None = None,
) -> dict:
    """String, dilaton and symmetry identities on reconstructed correlators.

    ``max_legs`` bounds the number of markings of the larger correlator in
    each identity.  Insertions are random small integer vectors with random
    psi exponents, drawn from a seeded generator.  Sample 0 puts the full
    dimension in psi exponents; later samples draw the psi degree at random.
    """
    d = engine.dim
    unit = engine.F.unit_vector
    records = []

    def corr(g, ins):
        return engine.correlator(g, [Insertion(v, a) for v, a in ins])

    for g in range(max_genus + 1):
        for N in range(1, max_legs + 1):
            n = N - 1
            if 2 * g - 2 + n <= 0:
                continue
            low = 3 * g - 3 + n
            for s in range(samples):
                rng = random.Random(f"{seed}:{g}:{N}:{s}")
                vecs = []
                for _ in range(n):
                    v = [rng.randint(-2, 2) for _ in range(d)]
                    if not any(v):
                        v[rng.randrange(d)] = 1
                    vecs.append(tuple(Fraction(x) for x in v))
                if progress:
                    progress(f"suite g={g} n={N} sample={s}")

                # the first sample saturates the dimension so R = Id theories are not vacuous
                total = low if s == 0 else rng.randint(0, low)
                exps = _random_exponents(rng, n, total) if n else []
                base = list(zip(vecs, exps))
                lhs = corr(g, base + [(unit, 1)])
                rhs = (2 * g - 2 + n) * corr(g, base)
                records.append(_record("dilaton", g, N, base, lhs, rhs))

                if n:
                    exps = _random_exponents(rng, n, low + 1 if s == 0 else rng.randint(1, low + 1))
                    base = list(zip(vecs, exps))
                    lhs = corr(g, base + [(unit, 0)])
                    rhs = 0
                    for j in range(n):
                        if exps[j] >= 1:
                            lowered = list(base)
                            lowered[j] = (vecs[j], exps[j] - 1)
                            rhs = rhs + corr(g, lowered)
                    records.append(_record("string", g, N, base, lhs, rhs))

                if N >= 2:
                    full = base + [(unit, 0)]
                    perm = list(range(N))
                    rng.shuffle(perm)
                    lhs = corr(g, full)
                    rhs = corr(g, [full[i] for i in perm])
                    records.append(_record("symmetry", g, N, full, lhs, rhs))
    return {"pass": all(r["pass"] for r in records), "instances": records}


def _record(kind, g, N, insertions, lhs, rhs) -> dict:
    return {
        "identity": kind,
        "g": g,
        "n": N,
        "insertions": [([str(x) for x in v], a) for v, a in insertions],
        "lhs": lhs,
        "rhs": rhs,
        "nonzero": lhs != 0 or rhs != 0,
        "pass": lhs == rhs,
    }
