"""End-to-end acceptance checks, one test per criterion.

Each test prints a single ``ACCEPTANCE <n> PASS|FAIL`` line (collected again
in the terminal summary) and fails if its check fails or takes 60 s or more.
"""

import json
import math
import time
from fractions import Fraction
from itertools import product

from cohft import cli
from cohft.frobenius import RMatrix, hodge_rmatrix, trivial_theory
from cohft.graphs import automorphism_count, enumerate_stable_graphs
from cohft.hilbert import (
    c_coefficient,
    is_self_adjoint,
    md_matrix,
    partitions,
    semisimplicity_witness,
    three_point_series,
)
from cohft.intersection import kappa_psi_correlator, psi_correlator
from cohft.arith import RationalFunction
from cohft.reconstruction import Engine, Insertion, cohft_axiom_suite
from cohft.rspin import (
    degree,
    euler_commutation_check,
    idempotent_check_float,
    rspin_rmatrix,
    rspin_topological_exact,
    rspin_topological_float,
    shifted_theory,
    sl2_invariant_dim,
    witten_integral,
)
from cohft.verlinde import (
    fusion_data,
    level1_even_rank_check,
    verlinde_correlator,
    verlinde_rank,
    verlinde_rmatrix_at_one,
)
from oracles import brute_force_aut, compositions, invariants_by_characters

BUDGET = 60.0
RESULTS: list[str] = []


def _finish(number, title, failures, start):
    elapsed = time.perf_counter() - start
    ok = not failures and elapsed < BUDGET
    line = f"ACCEPTANCE {number} {'PASS' if ok else 'FAIL'}: {title} ({elapsed:.1f}s)"
    if failures:
        line += f" -- {len(failures)} failure(s), first: {failures[0]}"
    elif elapsed >= BUDGET:
        line += f" -- over the {BUDGET:.0f}s budget"
    RESULTS.append(line)
    print(line)
    assert ok, line


def test_1_rspin_genus0_values():
    start = time.perf_counter()
    failures = []
    for r in range(2, 9):
        for a in product(range(r - 1), repeat=3):
            expected = 1 if sum(a) == r - 2 else 0
            got = witten_integral(r, 0, a)
            if got != expected:
                failures.append((r, a, got, expected))
    for r in range(3, 9):
        got = witten_integral(r, 0, (1, 1, r - 2, r - 2))
        if got != Fraction(1, r):
            failures.append((r, "four-point", got))
    _finish(1, "r-spin genus-0 three- and four-point values, r <= 8", failures, start)


def test_2_rspin_genus0_closed_formula():
    start = time.perf_counter()
    failures = []
    checked = 0
    for r in range(2, 7):
        for n in range(3, 7):
            for a in product(range(r - 1), repeat=n):
                if degree(r, 0, a) != n - 3:
                    continue
                dual = [r - 2 - x for x in a]
                inv = sl2_invariant_dim(dual)
                if inv != invariants_by_characters(dual):
                    failures.append((r, a, "invariant oracle disagrees"))
                expected = Fraction(math.factorial(n - 3), r ** (n - 3)) * inv
                got = witten_integral(r, 0, a)
                checked += 1
                if got != expected:
                    failures.append((r, a, got, expected))
    if not checked:
        failures.append("no instance satisfies the degree condition")
    _finish(2, f"genus-0 top-degree formula on {checked} instances, r <= 6, n <= 6", failures, start)


def test_3_hodge():
    start = time.perf_counter()
    failures = []
    eng = Engine(trivial_theory(), hodge_rmatrix(8))
    one = (Fraction(1),)
    # kappa_1 = 12 lambda_1 - delta_irr + psi on M_{1,1}, int delta_irr = 1/2
    oracle = (kappa_psi_correlator(1, [0], [1]) + Fraction(1, 2) - psi_correlator(1, [1])) / 12
    got = eng.correlator(1, [Insertion(one, 0)])
    if not (got == oracle == Fraction(1, 24)):
        failures.append(("lambda_1", got, oracle))
    for g, nmax in ((0, 5), (1, 4), (2, 3)):
        for n in range(nmax + 1):
            if 2 * g - 2 + n <= 0:
                continue
            dim = 3 * g - 3 + n
            # psi degree below dim - g forces a lambda class of degree above g
            for total in range(0, dim - g):
                for exps in compositions(total, n):
                    val = eng.correlator(g, [Insertion(one, b) for b in exps])
                    if val != 0:
                        failures.append((g, exps, val))
    _finish(3, "Hodge lambda_1 = 1/24 and degree vanishing for g <= 2", failures, start)


def test_4_topological_cross_validation():
    start = time.perf_counter()
    failures = []
    count = 0
    for r in range(2, 9):
        for g in range(4):
            for n in range(6):
                if 2 * g - 2 + n <= 0:
                    continue
                for a in product(range(r - 1), repeat=n):
                    exact = float(rspin_topological_exact(r, g, a))
                    approx = rspin_topological_float(r, g, a)
                    count += 1
                    # relative 1e-9; exact zeros are compared absolutely
                    if abs(exact - approx) > 1e-9 * max(abs(exact), 1.0):
                        failures.append((r, g, a, exact, approx))
        rep = idempotent_check_float(r, 1e-9)
        if not rep["pass"]:
            failures.append(rep)
    _finish(4, f"exact vs sine closed form on {count} instances, idempotents r <= 8", failures, start)


def _b_direct(r, a, m):
    num = 1
    for i in range(1, m + 1):
        num *= ((2 * i - 1) * r - 2 * (a + 1)) * ((2 * i - 1) * r + 2 * (a + 1))
    return Fraction(num, math.factorial(m)) * Fraction(-1, 16 * r * r) ** m


def test_5_rmatrix_structure():
    start = time.perf_counter()
    failures = []
    for r in range(2, 9):
        if not rspin_rmatrix(r, 6).is_symplectic(shifted_theory(r).eta):
            failures.append((r, "symplectic"))
    for r in range(2, 7):
        rep = euler_commutation_check(r, 6)
        if not rep["pass"]:
            failures.append((r, "euler", rep["failures"]))
    R2 = rspin_rmatrix(2, 6)
    if any(R2[k] != [[Fraction(int(k == 0))]] for k in range(7)):
        failures.append("r=2 is not the identity")

    def be(r, a, k):
        return _b_direct(r, a, k) if k % 2 == 0 else Fraction(0)

    def bo(r, a, k):
        return _b_direct(r, a, k) if k % 2 == 1 else Fraction(0)

    R3, R4 = rspin_rmatrix(3, 3), rspin_rmatrix(4, 3)
    for k in range(4):
        printed3 = [[be(3, 0, k), bo(3, 1, k)], [bo(3, 0, k), be(3, 1, k)]]
        printed4 = [
            [be(4, 0, k), 0, bo(4, 2, k)],
            [0, Fraction(int(k == 0)), 0],
            [bo(4, 0, k), 0, be(4, 2, k)],
        ]
        if R3[k] != printed3:
            failures.append((3, k, R3[k], printed3))
        if R4[k] != printed4:
            failures.append((4, k, R4[k], printed4))
    _finish(5, "R-matrix symplectic (r <= 8), Euler recursion (r <= 6), r = 2, 3, 4 forms", failures, start)


def test_6_verlinde_ranks():
    start = time.perf_counter()
    failures = []
    for g in range(4):
        for n in range(0, 7, 2):
            if 2 * g - 2 + n <= 0:
                continue
            if verlinde_rank(1, g, [1] * n) != 2**g:
                failures.append(("even rank", g, n))
            if not level1_even_rank_check(g, n)["pass"]:
                failures.append(("even graphs", g, n))
    for level in (1, 2):
        d = level + 1
        for g in range(3):
            for n in range(5):
                if 2 * g - 2 + n <= 0:
                    continue
                for w in product(range(d), repeat=n):
                    rank = verlinde_rank(level, g, w)
                    if g >= 1:
                        loop = sum(verlinde_rank(level, g - 1, w + (m, m)) for m in range(d))
                        if loop != rank:
                            failures.append(("nonseparating", level, g, w))
                    for g1 in range(g + 1):
                        for k in range(n + 1):
                            if 2 * g1 - 1 + k <= 0 or 2 * (g - g1) - 1 + n - k <= 0:
                                continue
                            split = sum(
                                verlinde_rank(level, g1, w[:k] + (m,)) * verlinde_rank(level, g - g1, w[k:] + (m,))
                                for m in range(d)
                            )
                            if split != rank:
                                failures.append(("separating", level, g, w, g1, k))
    for level in (1, 2, 3):
        for w in product(range(level + 1), repeat=3):
            for method in ("graded", "series"):
                val = verlinde_correlator(level, 0, list(w), method=method)
                if val[0] != verlinde_rank(level, 0, w):
                    failures.append(("t = 0", level, w, method))
    _finish(6, "Verlinde level-1 even ranks, rank gluing, t = 0 on M_{0,3}", failures, start)


def test_7_cohft_axioms():
    start = time.perf_counter()
    failures = []
    order = 8
    theories = {
        "trivial": (trivial_theory(), RMatrix.identity(1, order)),
        "hodge": (trivial_theory(), hodge_rmatrix(order)),
    }
    for r in range(2, 6):
        theories[f"rspin r={r}"] = (shifted_theory(r), rspin_rmatrix(r, order))
    for level in (1, 2):
        theories[f"verlinde level={level}"] = (fusion_data(level), verlinde_rmatrix_at_one(level, order))
    for name, (F, R) in theories.items():
        rep = cohft_axiom_suite(Engine(F, R), 2, 4, samples=2)
        bad = [x for x in rep["instances"] if not x["pass"]]
        failures.extend((name, x["identity"], x["g"], x["n"]) for x in bad)
        for kind in ("string", "dilaton"):
            if not any(x["nonzero"] for x in rep["instances"] if x["identity"] == kind):
                failures.append((name, kind, "no nonzero instance"))
    _finish(7, "string and dilaton on all shipped theories, g <= 2, n <= 4", failures, start)


def test_8_hilbert_scheme():
    start = time.perf_counter()
    failures = []
    for m in range(1, 7):
        if not is_self_adjoint(m):
            failures.append(("self-adjoint", m))
    if any(v != 0 for row in md_matrix(1) for v in row):
        failures.append("m = 1 operator is not zero")
    t1, t2, q = RationalFunction.gens()
    M = md_matrix(2)
    expected = [[(t1 + t2) * (2 * c_coefficient(2) - c_coefficient(1)), RationalFunction(-1)], [t1 * t2, RationalFunction(0)]]
    if [list(r) for r in M] != expected:
        failures.append(("m = 2 matrix", M))
    for m in range(2, 5):
        if semisimplicity_witness(m) == 0:
            failures.append(("discriminant", m))
    for m in range(1, 7):
        for mu in partitions(m):
            for nu in partitions(m):
                f = three_point_series(mu, nu)
                if not isinstance(f, RationalFunction) or not f.is_regular_at(q=0):
                    failures.append(("regular at q = 0", mu, nu))
    _finish(8, "M_D self-adjoint m <= 6, m = 1, 2 matrices, discriminant m <= 4, regular 3-point series", failures, start)


def test_9_enumeration(capsys):
    start = time.perf_counter()
    failures = []
    for (g, n), count in {(0, 3): 1, (0, 4): 4, (1, 1): 2, (2, 0): 7}.items():
        outs = set()
        for jobs in (1, 2):
            code = cli.run(["graphs", "--genus", str(g), "--legs", str(n), "--jobs", str(jobs)])
            out = capsys.readouterr().out
            outs.add(out)
            if code != 0 or json.loads(out)["count"] != count:
                failures.append((g, n, jobs, out[:60]))
        if len(outs) != 1:
            failures.append((g, n, "output depends on --jobs"))
    checked = 0
    for g, n in [(0, 3), (0, 4), (0, 5), (0, 6), (1, 1), (1, 2), (1, 3), (1, 4), (2, 0), (2, 1), (2, 2), (3, 0)]:
        for gr in enumerate_stable_graphs(g, n):
            if gr.num_vertices <= 4:
                checked += 1
                if automorphism_count(gr) != brute_force_aut(gr):
                    failures.append(("aut", gr))
    with capsys.disabled():
        _finish(9, f"graph counts, --jobs independence, {checked} automorphism groups by brute force", failures, start)
