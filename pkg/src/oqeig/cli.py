"""Command-line driver: estimate quotients, solve for eigenpairs, compare
iterations, and run the named verification suites.

Subcommands
-----------
estimate   print rq/oq/disc and the quotient function over a mu grid (CSV)
solve      descent phase + quotient iteration, JSON run record
compare    classical Rayleigh iteration vs the quotient iterations (CSV)
check      named verification suite (``appendix-b``)

Exit codes for ``solve``: 0 converged and self-adjointness check passed,
2 iteration did not converge (partial record still written), 3 the pencil
failed the self-adjointness check.
"""

import argparse
import json
import sys
import time

import numpy as np

from . import ingest
from .errors import NonConvergence, OqeigError
from .cayley import cayley_norm_identity, cayley_transform, distance_principle
from .descent import (
    DeflationSet,
    DescentConfig,
    preconditioned_descent,
    refine_shift_descent,
)
from .iterations import (
    IterationConfig,
    optimal_quotient_iteration,
    rayleigh_quotient_iteration,
    sigma2,
    smallest_pd_iteration,
)
from .linalg import InnerProduct, Pencil, cholesky_spd, lu_factorize
from .midpoint import midpoint_refine, random_rq_midpoint, shift_invert_reformulate
from .quotients import (
    check_self_adjoint,
    image_disc,
    quotient_function,
    quotient_limits,
)

_GENERATORS = {
    "kungfood": ingest.gen_kungfood,
    "forward-shift": ingest.gen_forward_shift,
    "fd-laplacian": ingest.gen_fd_laplacian,
    "two-bound-states": ingest.gen_two_bound_states,
    "random-selfadjoint": None,  # handled specially (spectrum argument)
}


def _parse_gen(spec):
    """NAME[:key=val,key=val] -> (name, params dict)."""
    name, _, rest = spec.partition(":")
    params = {}
    if rest:
        for item in rest.split(","):
            key, _, val = item.partition("=")
            if not val:
                raise ValueError("bad generator parameter %r" % item)
            params[key] = val
    return name, params


def _make_bundle(gen_spec):
    name, params = _parse_gen(gen_spec)
    if name == "kungfood":
        return ingest.gen_kungfood()
    if name == "forward-shift":
        return ingest.gen_forward_shift(int(params.get("n", 5)))
    if name == "fd-laplacian":
        return ingest.gen_fd_laplacian(int(params.get("n", 2000)))
    if name == "two-bound-states":
        gap = {}
        for key in ("lambda1", "lambda2", "band_gap", "band_top"):
            if key in params:
                gap[key] = float(params[key])
        return ingest.gen_two_bound_states(n=int(params.get("n", 60)),
                                           gap_params=gap or None,
                                           seed=int(params.get("seed", 0)))
    if name == "random-selfadjoint":
        n = int(params.get("n", 20))
        lo = float(params.get("lo", 1.0))
        hi = float(params.get("hi", 10.0))
        seed = int(params.get("seed", 0))
        return ingest.gen_random_selfadjoint(
            seed, n, np.linspace(lo, hi, n),
            p_mode=params.get("p_mode", "random"),
            n_mode=params.get("n_mode", "random"))
    raise ValueError("unknown generator %r (choose from %s)"
                     % (name, ", ".join(sorted(_GENERATORS))))


def _resolve_problem(args):
    """Returns (bundle-or-None, pencil, inner_product, p_recipe)."""
    if args.gen:
        bundle = _make_bundle(args.gen)
        pencil = bundle.pencil
    elif args.m:
        m = ingest.read_matrix_market(args.m)
        n_mat = ingest.read_matrix_market(args.n) if args.n else np.eye(
            m.shape[0])
        bundle = None
        pencil = Pencil(m, n_mat)
    else:
        raise ValueError("either --gen or --m is required")
    recipe = args.p
    if recipe is None:
        if bundle is not None:
            return bundle, pencil, bundle.inner_product, bundle.p_recipe
        recipe = "identity"
    if recipe == "identity":
        p = InnerProduct.identity(pencil.n)
    elif recipe == "inv-m":
        p = InnerProduct(kind="inverse", n=pencil.n,
                         factor=cholesky_spd(pencil.M))
    elif recipe == "inv-n":
        p = InnerProduct(kind="inverse", n=pencil.n,
                         factor=cholesky_spd(pencil.N))
    elif recipe.startswith("file="):
        p = InnerProduct.from_matrix(ingest.read_matrix_market(recipe[5:]))
    else:
        raise ValueError("unknown P recipe %r" % recipe)
    return bundle, pencil, p, recipe


def _trial_vector(args, bundle, pencil, p):
    if bundle is not None and "trial_vector" in bundle.facts:
        x = np.asarray(bundle.facts["trial_vector"], dtype=np.complex128)
        return x / p.norm(x)
    if args.seed is None:
        raise ValueError("--seed is mandatory when a random vector is drawn")
    rng = np.random.default_rng(args.seed)
    x = rng.standard_normal(pencil.n) + 1j * rng.standard_normal(pencil.n)
    return x / p.norm(x)


def _precond_operator(name, pencil, mu):
    if name in (None, "identity"):
        return None
    if name == "inv-m":
        return cholesky_spd(pencil.M)
    if name == "shifted":
        return lu_factorize(pencil.M - mu * pencil.N)
    raise ValueError("unknown preconditioner %r" % name)


def _complexpair(z):
    z = complex(z)
    return [z.real, z.imag]


def _iteration_record(log):
    return {
        "method": log.method,
        "mu": log.mu,
        "converged": log.converged,
        "iterations": log.iterations,
        "eigenvalue": _complexpair(log.eigenvalue),
        "rq_final": _complexpair(log.rq_final) if log.rq_final is not None
        else None,
        "sigma2_final": log.sigma2_final,
        "steps": [
            {
                "k": s.k,
                "shift": _complexpair(s.shift),
                "sigma2": s.sigma2,
                "quotient_estimate": _complexpair(s.quotient_estimate),
                "solve_near_singular": s.solve_near_singular,
            }
            for s in log.steps
        ],
    }


def _descent_record(log):
    return {
        "stationary": log.stationary,
        "steps": [
            {
                "k": s.k,
                "objective": s.objective,
                "rq_at_x": _complexpair(s.rq_at_x),
                "rq_at_zx": _complexpair(s.rq_at_zx),
            }
            for s in log.steps
        ],
    }


def _eigenpair_record(pencil, p, log, reform=None):
    x = log.x
    lam = complex(log.eigenvalue)
    if reform is not None:
        lam = complex(reform.map_back(lam))
    center, radius = image_disc(pencil, p, x)
    s2 = sigma2(p, pencil.M @ x, pencil.N @ x)
    return {
        "eigenvalue": _complexpair(lam),
        "sigma2": s2,
        "disc_center": _complexpair(center),
        "disc_radius": radius,
        "inclusion_interval": [center.real - radius, center.real + radius],
        "vector": [[v.real, v.imag] for v in x],
    }


def _solve_one(pencil, p, args, x0, target, deflation=None):
    """Descent phase then iteration phase; returns (records, logs)."""
    t0 = time.perf_counter()
    records = {}
    mu_descent = args.descent_mu
    reform = None
    if target.startswith("nearest="):
        zeta = float(target.split("=", 1)[1])
        reform = shift_invert_reformulate(pencil, zeta)
        if mu_descent is None:
            mu_descent = zeta
    elif mu_descent is None:
        mu_descent = 0.0

    x = x0
    if args.descent_steps > 0:
        cfg = DescentConfig(mu=mu_descent,
                            preconditioner=_precond_operator(
                                args.precond, pencil, mu_descent),
                            max_steps=args.descent_steps)
        x, dlog = preconditioned_descent(pencil, p, cfg, x, deflation)
        records["descent"] = _descent_record(dlog)
    t1 = time.perf_counter()

    itcfg = IterationConfig(epsilon=args.eps, max_iters=args.max_iters)
    work_pencil = pencil
    if target == "smallest":
        method = smallest_pd_iteration
    elif target == "largest-psd":
        method = optimal_quotient_iteration
        if args.mu == "auto-psd":
            itcfg.mu = midpoint_refine(pencil, p, x).alpha / 2.0
        else:
            itcfg.mu = _resolve_mu(args.mu, pencil, p, args.seed)
    else:  # nearest=zeta, iterate the shift-inverted pencil
        method = optimal_quotient_iteration
        work_pencil = reform.transformed
        itcfg.mu = _resolve_mu(args.mu, work_pencil, p, args.seed)
    try:
        log = method(work_pencil, p, x, itcfg)
    except NonConvergence as exc:
        records["iteration"] = _iteration_record(exc.result)
        records["eigenpair"] = _eigenpair_record(pencil, p, exc.result,
                                                 reform)
        records["timings"] = {"descent_s": t1 - t0,
                              "iteration_s": time.perf_counter() - t1}
        return records, exc.result, reform, False
    records["iteration"] = _iteration_record(log)
    records["eigenpair"] = _eigenpair_record(pencil, p, log, reform)
    records["timings"] = {"descent_s": t1 - t0,
                          "iteration_s": time.perf_counter() - t1}
    return records, log, reform, True


def _resolve_mu(mu_arg, pencil, p, seed):
    if mu_arg is None:
        raise ValueError("--mu is required for this target "
                         "(VALUE, auto-random:K or auto-psd)")
    if isinstance(mu_arg, str) and mu_arg.startswith("auto-random"):
        if seed is None:
            raise ValueError("--seed is mandatory with --mu auto-random")
        _, _, k = mu_arg.partition(":")
        return random_rq_midpoint(pencil, p, int(k or 8), seed=seed)
    if mu_arg == "auto-psd":
        raise ValueError("auto-psd needs a starting vector context")
    return float(mu_arg)


def cmd_estimate(args):
    bundle, pencil, p, recipe = _resolve_problem(args)
    x = _trial_vector(args, bundle, pencil, p)
    center, radius = image_disc(pencil, p, x)
    check = check_self_adjoint(pencil, p)
    rq = center
    lines = []
    lines.append("# rq=%s oq_abs=%s disc_center=%s disc_radius=%s "
                 "self_adjoint=%s"
                 % (repr(rq.real), repr(abs(rq) if radius == 0 else
                                        float(np.hypot(abs(rq), radius))),
                    repr(center.real), repr(radius), check.passed))
    if not check.passed:
        lines.append("# warning: self-adjointness residual %g; the disc "
                     "carries no inclusion guarantee" % check.residual)
    if args.mu_grid:
        lo, hi, count = args.mu_grid.split(":")
        grid = np.linspace(float(lo), float(hi), int(count))
    else:
        span = max(4.0 * radius, 1.0)
        grid = np.linspace(rq.real - span, rq.real + span, 41)
    lines.append("mu,qf,monotone_ok")
    guard = 1e-12 * (1.0 + abs(rq))
    prev = {"left": None, "right": None}
    for mu in grid:
        if abs(mu - rq) <= guard:
            left, right, _ = quotient_limits(pencil, p, x)
            lines.append("%s,%s,gap-left" % (repr(float(mu)),
                                             repr(left.real)))
            lines.append("%s,%s,gap-right" % (repr(float(mu)),
                                              repr(right.real)))
            continue
        side = "left" if mu < rq.real else "right"
        val = quotient_function(pencil, p, x, mu).real
        ok = prev[side] is None or val >= prev[side] - 1e-10 * (1 + abs(val))
        prev[side] = val
        lines.append("%s,%s,%s" % (repr(float(mu)), repr(val),
                                   "true" if ok else "false"))
    out = "\n".join(lines) + "\n"
    if args.csv:
        with open(args.csv, "w", encoding="ascii") as fh:
            fh.write(out)
    else:
        sys.stdout.write(out)
    return 0


def cmd_solve(args):
    bundle, pencil, p, recipe = _resolve_problem(args)
    record = {
        "schema_version": 1,
        "runspec": {
            "gen": args.gen,
            "m": args.m,
            "n": args.n,
            "p": recipe,
            "target": args.target,
            "mu": args.mu,
            "descent_steps": args.descent_steps,
            "precond": args.precond,
            "eps": args.eps,
            "seed": args.seed,
            "deflate_after_first": args.deflate_after_first,
        },
    }
    check = check_self_adjoint(pencil, p)
    record["self_adjoint"] = {"residual": check.residual,
                              "passed": check.passed}
    if not check.passed:
        _write_json(args.out, record)
        print("self-adjointness check failed: residual %g" % check.residual,
              file=sys.stderr)
        return 3
    x0 = _trial_vector(args, bundle, pencil, p)
    runs = []
    ok_all = True
    recs, log, reform, ok = _solve_one(pencil, p, args, x0, args.target)
    runs.append(recs)
    ok_all &= ok
    if ok and args.deflate_after_first:
        lam1 = complex(log.eigenvalue)
        if reform is not None:
            lam1 = complex(reform.map_back(lam1))
        deflation = DeflationSet(pencil, p, mu=0.0)
        deflation.add(log.x)
        if args.second_mu is not None:
            mu2 = args.second_mu
        else:
            mu2 = lam1.real + 0.05 * (1.0 + abs(lam1.real))
        if args.seed is None:
            raise ValueError("--seed is mandatory with --deflate-after-first")
        rng = np.random.default_rng(args.seed + 1)
        x1 = rng.standard_normal(pencil.n) + 1j * rng.standard_normal(
            pencil.n)
        x1 = x1 / p.norm(x1)
        t2 = time.perf_counter()
        x2, dlogs = refine_shift_descent(pencil, p, x1, mu2, deflation,
                                         first_steps=max(args.descent_steps,
                                                         8))
        itcfg2 = IterationConfig(epsilon=args.eps, max_iters=args.max_iters,
                                 mu=_resolve_mu(args.mu or "auto-random:8",
                                                pencil, p, args.seed))
        recs2 = {"descent": [_descent_record(d) for d in dlogs]}
        try:
            log2 = optimal_quotient_iteration(pencil, p, x2, itcfg2)
            ok2 = True
        except NonConvergence as exc:
            log2 = exc.result
            ok2 = False
        recs2["iteration"] = _iteration_record(log2)
        recs2["eigenpair"] = _eigenpair_record(pencil, p, log2)
        recs2["timings"] = {"second_run_s": time.perf_counter() - t2}
        runs.append(recs2)
        ok_all &= ok2
    record["runs"] = runs
    record["eigenvalues"] = [r["eigenpair"]["eigenvalue"] for r in runs]
    _write_json(args.out, record)
    return 0 if ok_all else 2


def _write_json(path, record):
    text = json.dumps(record, sort_keys=True, indent=1)
    if path:
        with open(path, "w", encoding="ascii") as fh:
            fh.write(text + "\n")
    else:
        sys.stdout.write(text + "\n")


def cmd_compare(args):
    if args.seed is None:
        raise ValueError("--seed is required for compare")
    rows = ["instance,method,converged,iterations,eigenvalue,sigma2_final"]
    iter_counts = {}
    rng = np.random.default_rng(args.seed)
    for inst in range(args.instances):
        if args.gen:
            bundle = _make_bundle(args.gen)
        else:
            n = args.n_dim
            bundle = ingest.gen_random_selfadjoint(
                args.seed + inst, n, np.linspace(1.0, 10.0, n))
        pencil, p = bundle.pencil, bundle.inner_product
        x0 = rng.standard_normal(pencil.n) + 1j * rng.standard_normal(
            pencil.n)
        x0 = x0 / p.norm(x0)
        if args.descent_steps > 0:
            cfg = DescentConfig(mu=0.0, preconditioner=None,
                                max_steps=args.descent_steps)
            x0, _ = preconditioned_descent(pencil, p, cfg, x0)
        mu_mid = random_rq_midpoint(pencil, p, 8, seed=args.seed + inst)
        methods = [
            ("rayleigh", rayleigh_quotient_iteration, None),
            ("optimal_quotient", optimal_quotient_iteration, mu_mid),
            ("smallest_pd", smallest_pd_iteration, None),
        ]
        for name, fn, mu in methods:
            cfg = IterationConfig(epsilon=args.eps, max_iters=args.max_iters,
                                  mu=mu)
            try:
                log = fn(pencil, p, x0, cfg)
                iter_counts.setdefault(inst, {})[name] = log.iterations
                rows.append("%d,%s,true,%d,%s,%s"
                            % (inst, name, log.iterations,
                               repr(complex(log.eigenvalue).real),
                               repr(log.sigma2_final)))
            except (NonConvergence, OqeigError) as exc:
                log = getattr(exc, "result", None)
                iters = log.iterations if log is not None else -1
                rows.append("%d,%s,false,%d,," % (inst, name, iters))
    wins = sum(1 for counts in iter_counts.values()
               if "optimal_quotient" in counts and "rayleigh" in counts
               and counts["optimal_quotient"] <= counts["rayleigh"])
    rows.append("# optimal_quotient <= rayleigh iterations in %d/%d instances"
                % (wins, args.instances))
    out = "\n".join(rows) + "\n"
    if args.csv:
        with open(args.csv, "w", encoding="ascii") as fh:
            fh.write(out)
    else:
        sys.stdout.write(out)
    return 0


def cmd_check(args):
    if args.suite != "appendix-b":
        raise ValueError("unknown suite %r (available: appendix-b)" % args.suite)
    failures = 0
    rng_seeds = range(args.instances)
    for seed in rng_seeds:
        n = 6 + (seed % 3) * 4
        bundle = ingest.gen_random_selfadjoint(
            1000 + seed, n, np.linspace(-3.0, 5.0, n))
        pencil, p = bundle.pencil, bundle.inner_product
        lhs, rhs = cayley_norm_identity(pencil, p)
        ok_norm = abs(lhs - rhs) <= 1e-6 * max(1.0, abs(rhs))
        s = float(np.random.default_rng(seed).uniform(-4.0, 6.0))
        inf_val, dist = distance_principle(pencil, p, s)
        ok_dist = abs(inf_val - dist) <= 1e-8 * max(1.0, dist)
        data = cayley_transform(pencil, p)
        x = np.random.default_rng(seed + 1).standard_normal(n)
        ok_unitary = abs(p.norm(data.u @ x) - p.norm(x)) <= 1e-8 * p.norm(x)
        for name, ok in (("cayley-norm-identity", ok_norm),
                         ("distance-principle", ok_dist),
                         ("cayley-unitary", ok_unitary)):
            print("%s seed=%d %s" % ("PASS" if ok else "FAIL", seed, name))
            failures += 0 if ok else 1
    return 0 if failures == 0 else 1


def build_parser():
    parser = argparse.ArgumentParser(
        prog="oqeig",
        description="Quotient-function eigenvalue estimation and iteration")
    sub = parser.add_subparsers(dest="command", required=True)

    def add_problem_args(sp):
        sp.add_argument("--m", help="Matrix Market file for M")
        sp.add_argument("--n", help="Matrix Market file for N (default: I)")
        sp.add_argument("--gen", help="generator NAME[:k=v,...] instead of files")
        sp.add_argument("--p", help="identity|inv-m|inv-n|file=PATH "
                                    "(default: generator recommendation)")
        sp.add_argument("--seed", type=int, default=None)

    sp = sub.add_parser("estimate", help="quotient family over a mu grid")
    add_problem_args(sp)
    sp.add_argument("--mu-grid", help="LO:HI:COUNT (default: around the disc)")
    sp.add_argument("--csv", help="write CSV here instead of stdout")
    sp.set_defaults(func=cmd_estimate)

    sp = sub.add_parser("solve", help="descent + quotient iteration")
    add_problem_args(sp)
    sp.add_argument("--target", default="smallest",
                    help="smallest|largest-psd|nearest=ZETA")
    sp.add_argument("--mu", default=None,
                    help="VALUE|auto-random:K|auto-psd (iteration midpoint)")
    sp.add_argument("--descent-mu", type=float, default=None,
                    help="shift used by the descent objective")
    sp.add_argument("--descent-steps", type=int, default=3)
    sp.add_argument("--precond", default="identity",
                    help="identity|inv-m|shifted")
    sp.add_argument("--eps", type=float, default=1e-10)
    sp.add_argument("--max-iters", type=int, default=50)
    sp.add_argument("--deflate-after-first", action="store_true",
                    help="deflate the first eigenvector and solve again")
    sp.add_argument("--second-mu", type=float, default=None,
                    help="descent shift for the deflated second run")
    sp.add_argument("--out", help="write the JSON run record here")
    sp.set_defaults(func=cmd_solve)

    sp = sub.add_parser("compare", help="iteration shoot-out (CSV)")
    add_problem_args(sp)
    sp.add_argument("--instances", type=int, default=10)
    sp.add_argument("--n-dim", type=int, default=16)
    sp.add_argument("--descent-steps", type=int, default=0)
    sp.add_argument("--eps", type=float, default=1e-10)
    sp.add_argument("--max-iters", type=int, default=50)
    sp.add_argument("--csv", help="write CSV here instead of stdout")
    sp.set_defaults(func=cmd_compare)

    sp = sub.add_parser("check", help="named verification suite")
    sp.add_argument("suite", help="appendix-b")
    sp.add_argument("--instances", type=int, default=5)
    sp.set_defaults(func=cmd_check)
    return parser


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (OqeigError, ValueError, OSError) as exc:
        print("error: %s" % exc, file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
