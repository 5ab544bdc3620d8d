"""``latdist`` command line front end."""
from __future__ import annotations

import argparse
import os
import sys
import time
from fractions import Fraction
from pathlib import Path

from . import __version__
from .errors import BudgetExceeded, LatdistError, RankDeficient
from .exactmat import RatMatrix, condition_number
from .io import (ParseError, atomic_write, dumps, file_sha256, load_matrix, parse_rat,
                 save_matrix, to_jsonable)

EXIT_OK, EXIT_FAIL, EXIT_BUDGET, EXIT_INPUT = 0, 1, 2, 3
BUDGET_ENV = "LATDIST_BUDGET_NODES"

ALGOS = ("size", "lll", "hkz", "slide", "seysen", "pipeline")


class UsageError(ValueError):
    pass


def _rat_arg(s: str) -> Fraction:
    try:
        return parse_rat(s)
    except ParseError as exc:
        raise argparse.ArgumentTypeError(str(exc)) from exc


def _vector_arg(s: str) -> tuple:
    return tuple(_rat_arg(tok) for tok in s.replace(",", " ").split())


def _gamma_arg(s: str):
    """Integers and p/q stay exact; anything else is read as a float."""
    try:
        return parse_rat(s)
    except ParseError:
        return float(s)


def _need_seed(args) -> int:
    if args.seed is None:
        raise UsageError("this command is randomized: pass --seed explicitly")
    return args.seed


# -- commands -----------------------------------------------------------------

def _measure(B: RatMatrix) -> dict:
    from .reduce import eta
    from .seysen import s_condition
    out = {"eta": eta(B), "S": s_condition(B)}
    if B.is_square:
        out["kappa"] = condition_number(B)
    return out


def cmd_reduce(args, ctx) -> dict:
    from . import reduce as red
    from .seysen import reduced_basis_pipeline, s_prime, seysen_reduce_basis
    B, label = ctx.load(args.input)
    algo = args.algo
    if algo == "size":
        R = red.size_reduce(B)
    elif algo == "lll":
        R = red.lll(B, args.delta if args.delta is not None else red.DEFAULT_DELTA)
    elif algo == "hkz":
        R = red.hkz(B)
    elif algo == "slide":
        k = args.k if args.k is not None else 2
        R = red.pad_and_slide(B, k, eps=args.eps) if B.cols % k else \
            red.slide_reduce(B, red.SlideParams(k, args.eps))
    elif algo == "seysen":
        R = seysen_reduce_basis(B)
    else:
        R = reduced_basis_pipeline(B, args.k, eps=args.eps)
    ok = red.check_certificate(R)
    before, after = _measure(B), _measure(R.basis)
    res = {"kind": R.kind, "params": R.params, "certificate": ok,
           "before": before, "after": after, "basis": R.basis, "transform": R.transform}
    if R.kind in ("seysen", "pipeline"):
        from .exactmat import dr_decompose
        res["after"]["S_prime_R"] = s_prime(dr_decompose(R.basis).r_prime)
    if args.basis_out:
        save_matrix(args.basis_out, R.basis, label=f"{label or 'input'}:{algo}")
        res["basis_file"] = str(args.basis_out)
    ctx.trace.update(algo=algo, k=args.k, eps=args.eps, delta=args.delta)
    return res


def cmd_distortion(args, ctx) -> dict:
    from .distortion import certificate_is_consistent, ldp_solve, verify_mapping
    B1, _ = ctx.load(args.input1)
    B2, _ = ctx.load(args.input2)
    cert = ldp_solve(B1, B2, args.k, with_lower=args.with_lower, eps=args.eps)
    if not (verify_mapping(cert.mapping_T, B1, B2) and certificate_is_consistent(cert)):
        raise LatdistError("mapping failed verification")  # pragma: no cover
    ctx.trace.update(k=args.k, with_lower=args.with_lower)
    return _cert_dict(cert)


def _cert_dict(cert) -> dict:
    return {"T": cert.mapping_T, "witness": cert.unimodular_witness,
            "kappa": cert.upper_bound, "lower_bound_sq": cert.lower_bound_sq,
            "lower_bound": cert.lower_bound, "gap_factor": cert.gap_factor,
            "m12_sq": cert.m12_sq, "m21_sq": cert.m21_sq, "note": cert.note,
            "verified": True}


def cmd_decide(args, ctx) -> dict:
    from .distortion import gap_decide
    B1, _ = ctx.load(args.input1)
    B2, _ = ctx.load(args.input2)
    if args.c is None or args.gamma is None:
        raise UsageError("decide needs --c and --gamma")
    if args.c < 1 or float(args.gamma) < 1:
        raise UsageError("decide needs c >= 1 and gamma >= 1")
    dec = gap_decide(B1, B2, args.c, args.gamma, args.k)
    ctx.trace.update(c=args.c, gamma=args.gamma, k=args.k)
    return {"verdict": dec.verdict, "reason": dec.reason, "evidence": _cert_dict(dec.evidence)}


def cmd_gadget(args, ctx) -> dict:
    from . import gadgets as gd
    from .lattice import LatticeHandle
    out_dir = Path(args.out_dir) if args.out_dir else None
    files = []

    def emit(name, B, label):
        if out_dir is not None:
            path = out_dir / name
            save_matrix(path, B, label)
            files.append(str(path))

    kind = args.kind
    n = args.n
    if kind == "luktracy":
        n = n or 20
        B = gd.luk_tracy(n)
        emit(f"luktracy_{n}.json", B, f"luk-tracy n={n}")
        ctx.trace.update(kind=kind, n=n)
        return {"files": files, "basis": B, "kappa": condition_number(B)}
    if kind == "random":
        seed = _need_seed(args)
        n = n or 4
        L = gd.random_integer_lattice(n, args.entry_bound, seed)
        emit(f"random_n{n}_seed{seed}.json", L.basis, f"random n={n} seed={seed}")
        ctx.trace.update(kind=kind, n=n, entry_bound=args.entry_bound, seed=seed)
        return {"files": files, "basis": L.basis, "resamples": L.resamples}
    if args.input:
        B, _ = ctx.load(args.input)
    else:
        B = RatMatrix.identity(n or 2)
    gamma = args.gamma if args.gamma is not None else 1
    d = args.d if args.d is not None else Fraction(1)
    if kind == "cvp2ldp":
        t = args.target if args.target is not None else (Fraction(0),) * B.rows
        inst = gd.CvpAlphaInstance(LatticeHandle(B), t, d * d, gamma, 1 / float(gamma))
        g = gd.build_ldp_gadget(inst, center_target=args.center)
        emit("ldp_L1.json", g.L1.basis, "cvp2ldp L1")
        emit("ldp_L2.json", g.L2.basis, "cvp2ldp L2")
        ctx.trace.update(kind=kind, **g.trace)
        return {"files": files, "r": g.r, "c": g.c, "L1": g.L1.basis, "L2": g.L2.basis}
    if kind == "svp2cvp":
        batch = gd.build_svp_to_cvp_batch(LatticeHandle(B), d, gamma)
        insts = []
        for inst in batch.instances:
            i, j = inst.label
            name = f"svp2cvp_i{i + 1}_j{j}.json"
            if out_dir is not None:
                payload = {"n": inst.lattice.dim, "rows": inst.lattice.ambient,
                           "basis": inst.lattice.basis, "target": inst.target,
                           "d_sq": inst.d_sq, "label": f"i={i + 1} j={j}"}
                atomic_write(out_dir / name, dumps(payload))
                files.append(str(out_dir / name))
            insts.append({"i": i + 1, "j": j, "target": inst.target})
        ctx.trace.update(kind=kind, **batch.trace)
        return {"files": files, "p": batch.p, "count": len(batch.instances), "instances": insts}
    raise UsageError(f"unknown gadget kind {kind!r}")  # pragma: no cover


def cmd_oracle(args, ctx) -> dict:
    from . import lattice as lt
    B, _ = ctx.load(args.input)
    L = lt.LatticeHandle(B)
    q = args.query
    ctx.trace.update(query=q)
    if q == "svp":
        v, nsq = lt.shortest_vector(L)
        return {"vector": v, "norm_sq": nsq}
    if q == "cvp":
        if args.target is None:
            raise UsageError("cvp needs --target")
        v, dsq = lt.closest_vector(L, args.target)
        return {"vector": v, "dist_sq": dsq}
    if q == "minima":
        sm = L.minima()
        return {"lambda_sq": sm.lambda_sq, "witnesses": sm.witnesses, "coefficients": sm.coefficients}
    if q == "dual":
        return {"dual": lt.dual_basis(L)}
    if q == "member":
        if args.target is None:
            raise UsageError("member needs --target")
        return {"member": lt.is_member(L, args.target)}
    rep = lt.transference_check(L)
    return {"lambda_sq": rep.lambda_sq, "dual_lambda_sq": rep.dual_lambda_sq,
            "products_sq": rep.products_sq, "ok": rep.ok}


def cmd_bench(args, ctx) -> dict:
    from . import bench
    suite = args.suite
    if suite == "luktracy-growth":
        rows = bench.luktracy_growth(args.n_min or 2, args.n_max or 20,
                                     pipeline_max=args.pipeline_max)
    elif suite == "seysen-zeta":
        rows = bench.seysen_zeta(args.n_min or 2, args.n_max or 16, args.trials or 20,
                                 _need_seed(args))
    elif suite == "transference":
        rows = bench.transference(args.n_min or 2, args.n_max or 5, args.trials or 100,
                                  _need_seed(args))
    else:
        rows = bench.sandwich(args.n_min or 2, args.n_max or 4, args.trials or 50,
                              _need_seed(args))
    ctx.trace.update(suite=suite, n_min=args.n_min, n_max=args.n_max, trials=args.trials,
                     seed=args.seed)
    ctx.table = bench.format_table(rows)
    return {"table": rows}


# -- plumbing -----------------------------------------------------------------

class _Context:
    def __init__(self):
        self.inputs = {}
        self.trace = {}
        self.table = None

    def load(self, path):
        B, label = load_matrix(path)
        self.inputs[str(path)] = file_sha256(path)
        return B, label


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--budget-nodes", type=int, default=None,
                        help="enumeration node cap (default: $LATDIST_BUDGET_NODES or 10^7)")
    common.add_argument("--out", type=Path, default=None, help="write the JSON report here")
    common.add_argument("--seed", type=int, default=None)
    common.add_argument("--k", type=int, default=None, help="block size")
    common.add_argument("--eps", type=_rat_arg, default=None, help="DSVP slack (rational)")
    common.add_argument("--delta", type=_rat_arg, default=None, help="LLL parameter (rational)")
    common.add_argument("--gamma", type=_gamma_arg, default=None)
    common.add_argument("--c", type=_rat_arg, default=None, help="distortion threshold (rational)")

    p = argparse.ArgumentParser(prog="latdist", description=__doc__)
    p.add_argument("--version", action="version", version=f"latdist {__version__}")
    sub = p.add_subparsers(dest="command", required=True)

    r = sub.add_parser("reduce", parents=[common], help="reduce a basis")
    r.add_argument("input")
    r.add_argument("--algo", choices=ALGOS, default="lll")
    r.add_argument("--basis-out", type=Path, default=None)

    d = sub.add_parser("distortion", parents=[common], help="distortion mapping and bounds")
    d.add_argument("input1")
    d.add_argument("input2")
    d.add_argument("--with-lower", action="store_true", help="also compute the exact M*M bound")

    c = sub.add_parser("decide", parents=[common], help="GapLDP decision")
    c.add_argument("input1")
    c.add_argument("input2")

    g = sub.add_parser("gadget", parents=[common], help="build reduction gadgets and families")
    g.add_argument("kind", choices=("cvp2ldp", "svp2cvp", "luktracy", "random"))
    g.add_argument("--n", type=int, default=None)
    g.add_argument("--d", type=_rat_arg, default=None)
    g.add_argument("--input", default=None, help="lattice file (cvp2ldp, svp2cvp)")
    g.add_argument("--target", type=_vector_arg, default=None)
    g.add_argument("--center", action="store_true", help="shift the target by its closest vector")
    g.add_argument("--entry-bound", type=int, default=5)
    g.add_argument("--out-dir", type=Path, default=None)

    o = sub.add_parser("oracle", parents=[common], help="exact SVP/CVP/minima oracles")
    o.add_argument("query", choices=("svp", "cvp", "minima", "dual", "member", "transference"))
    o.add_argument("input")
    o.add_argument("--target", type=_vector_arg, default=None)

    b = sub.add_parser("bench", parents=[common], help="benchmark tables")
    b.add_argument("suite", choices=("luktracy-growth", "seysen-zeta", "transference", "sandwich"))
    b.add_argument("--n-min", type=int, default=None)
    b.add_argument("--n-max", type=int, default=None)
    b.add_argument("--trials", type=int, default=None)
    b.add_argument("--pipeline-max", type=int, default=12,
                   help="largest n for the pipeline column of luktracy-growth")
    return p


COMMANDS = {"reduce": cmd_reduce, "distortion": cmd_distortion, "decide": cmd_decide,
            "gadget": cmd_gadget, "oracle": cmd_oracle, "bench": cmd_bench}


def main(argv=None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_INPUT if exc.code else EXIT_OK
    saved = os.environ.get(BUDGET_ENV)
    if args.budget_nodes is not None:
        os.environ[BUDGET_ENV] = str(args.budget_nodes)
    try:
        return _run(args, argv)
    finally:
        if saved is None:
            os.environ.pop(BUDGET_ENV, None)
        else:
            os.environ[BUDGET_ENV] = saved


def _run(args, argv) -> int:
    ctx = _Context()
    t0 = time.perf_counter()
    try:
        results = COMMANDS[args.command](args, ctx)
    except BudgetExceeded as exc:
        print(f"latdist: {exc}", file=sys.stderr)
        return EXIT_BUDGET
    except (ParseError, RankDeficient, UsageError, OSError) as exc:
        print(f"latdist: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except (ValueError, TypeError) as exc:
        print(f"latdist: invalid parameters: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except LatdistError as exc:
        print(f"latdist: {exc}", file=sys.stderr)
        return EXIT_FAIL
    report = {"version": __version__, "command": ["latdist", *argv],
              "inputs": ctx.inputs, "trace": ctx.trace, "results": results,
              "timing": {"seconds": time.perf_counter() - t0}}
    text = dumps(to_jsonable(report))
    if args.out:
        atomic_write(args.out, text)
    if ctx.table is not None:
        sys.stdout.write(ctx.table)
    elif not args.out:
        sys.stdout.write(text)
    return EXIT_OK


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
