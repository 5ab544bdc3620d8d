"""Benchmark suites behind ``latdist bench``; each returns a list of table rows."""
from __future__ import annotations

import random
from fractions import Fraction

from .errors import ViolationFound
from .exactmat import condition_number
from .gadgets import luk_tracy, random_integer_basis
from .lattice import LatticeHandle, transference_check
from .reduce import eta_sq
from .seysen import reduced_basis_pipeline, seysen_reduce_basis, seysen_zeta_table


def luktracy_growth(n_min: int = 2, n_max: int = 20, pipeline_max: int = 12) -> list[dict]:
    rows, prev = [], None
    for n in range(n_min, n_max + 1):
        B = luk_tracy(n)
        kap = condition_number(B)
        sey = seysen_reduce_basis(B)
        k_sey = condition_number(sey.basis)
        row = {"n": n, "kappa": kap, "ratio": kap / prev if prev else None,
               "kappa_seysen": k_sey, "factor": kap / k_sey, "eta_sq": eta_sq(B),
               "kappa_pipeline": None}
        if n <= pipeline_max:
            row["kappa_pipeline"] = condition_number(reduced_basis_pipeline(B).basis)
        rows.append(row)
        prev = kap
    return rows


def seysen_zeta(n_min: int, n_max: int, trials: int, seed: int) -> list[dict]:
    dims = [n for n in (2, 3, 4, 6, 8, 12, 16, 24, 32) if n_min <= n <= n_max]
    return seysen_zeta_table(dims, trials, seed)


def transference(n_min: int, n_max: int, trials: int, seed: int,
                 entry_bound: int = 5) -> list[dict]:
    rng = random.Random(seed)
    rows = []
    for n in range(n_min, n_max + 1):
        bad, lo, hi = 0, None, None
        for _ in range(trials):
            B, _ = random_integer_basis(n, entry_bound, rng)
            L = LatticeHandle(B)
            try:
                rep = transference_check(L)
                prods = rep.products_sq
            except ViolationFound:
                bad += 1
                continue
            lo = min(prods) if lo is None else min(lo, min(prods))
            hi = max(prods) if hi is None else max(hi, max(prods))
        rows.append({"n": n, "trials": trials, "violations": bad,
                     "min_product_sq": lo, "max_product_sq_over_n2": hi / (n * n) if hi else None})
    return rows


def sandwich(n_min: int, n_max: int, trials: int, seed: int, entry_bound: int = 5) -> list[dict]:
    from .distortion import distortion_upper_bound_check, ldp_solve
    rng = random.Random(seed)
    rows = []
    for n in range(n_min, n_max + 1):
        bad, worst = 0, 1.0
        for _ in range(trials):
            B1, _ = random_integer_basis(n, entry_bound, rng)
            B2, _ = random_integer_basis(n, entry_bound, rng)
            cert = ldp_solve(B1, B2)
            if not distortion_upper_bound_check(cert):
                bad += 1
            worst = max(worst, cert.gap_factor)
        rows.append({"n": n, "trials": trials, "violations": bad, "max_gap_factor": worst})
    return rows


def _cell(v) -> str:
    if v is None:
        return "-"
    if isinstance(v, float):
        return f"{v:.6g}"
    if isinstance(v, Fraction):
        return f"{float(v):.6g}" if v.denominator != 1 else str(v.numerator)
    return str(v)


def format_table(rows: list[dict]) -> str:
    if not rows:
        return "(empty)\n"
    cols = list(rows[0])
    cells = [[_cell(r.get(c)) for c in cols] for r in rows]
    width = [max(len(c), *(len(row[i]) for row in cells)) for i, c in enumerate(cols)]
    lines = ["  ".join(c.rjust(w) for c, w in zip(cols, width))]
    lines += ["  ".join(x.rjust(w) for x, w in zip(row, width)) for row in cells]
    return "\n".join(lines) + "\n"
