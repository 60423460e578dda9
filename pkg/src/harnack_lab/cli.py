"""Command line interface.

Exit codes: 0 when every asserted check passes, 1 when a check fails,
2 for usage or configuration errors.
"""

import argparse
import json
import sys

import numpy as np

from . import checks, cones, dynamics, flows, harnack, report, soliton, tensors
from .geometry import DiffConfig, StepUnderflowError

EXIT_OK, EXIT_FAIL, EXIT_CONFIG = 0, 1, 2


def _floats(values):
    out = []
    for v in values:
        out.extend(float(p) for p in str(v).split(",") if p)
    return out


def _int_range(text):
    """``"3..6"`` or ``"3,4,6"``."""
    if ".." in text:
        lo, hi = text.split("..")
        return list(range(int(lo), int(hi) + 1))
    return [int(p) for p in text.split(",") if p]


def _point(args, model):
    if args.x is None:
        return np.zeros(model.n)
    x = _floats(args.x)
    if len(x) != model.n:
        raise report.ConfigError(f"--x needs {model.n} coordinates, got {len(x)}")
    return np.array(x)


def _diff(args):
    return DiffConfig(step=args.fd_step, levels=args.richardson_levels)


def _read_form(path, dim):
    with open(path) as fh:
        doc = json.load(fh)
    M = tensors.form_from_json(doc)
    if tensors.dim_from_form_size(M.shape[0]) != dim:
        raise report.ConfigError(f"{path} holds a form of dimension {doc.get('dim')}, expected {dim}")
    return M


# -- subcommands -----------------------------------------------------------


def cmd_models(args):
    if args.action == "list":
        rows = [m.params() for m in flows.catalog()]
        return rows, True
    models = [flows.get_model(args.model)] if args.model else flows.catalog()
    rows = []
    for m in models:
        r = flows.validate_evolution(m, seed=args.seed, points=args.points, config=_diff(args))
        rows.append({"model": m.label, "passed": r["passed"], "worst": r["worst"], "tolerances": r["tolerances"]})
    return rows, all(r["passed"] for r in rows)


def cmd_soliton_defect(args):
    model = flows.get_model(args.model)
    Ns = _floats(args.N)
    rows = [checks.defect_scaling(model, t, Ns, seed=args.seed, points=args.points) for t in _floats(args.t)]
    return rows, all(r["passed"] for r in rows)


def cmd_appendix_a(args):
    models = [flows.get_model(args.model)] if args.model else flows.catalog()
    config = _diff(args) if args.fd_step_set else None
    rows = [
        checks.appendix_a(m, N, points=args.points, seed=args.seed, config=config)
        for m in models
        for N in _floats(args.N)
    ]
    return rows, all(r["passed"] for r in rows)


def cmd_limit_check(args):
    model = flows.get_model(args.model)
    x = _point(args, model)
    rows = []
    for t in _floats(args.t):
        pkg = soliton.limit_package(model, x, t, _diff(args))
        row = {"name": "limit_package", **pkg.to_json()}
        Ns = _floats(args.N)
        seq = soliton.limit_sequence(model, x, t, Ns)
        row["N"] = Ns
        row["distances"] = seq
        row["slope"] = soliton.loglog_slope(Ns, seq) if all(v > 0 for v in seq) else None
        row["passed"] = row["slope"] is None or abs(row["slope"] + 1) <= checks.DEFAULT_TOLERANCES["slope"]
        rows.append(row)
    return rows, all(r["passed"] for r in rows)


def cmd_evolution(args):
    models = [flows.get_model(args.model)] if args.model else flows.catalog()
    config = _diff(args)
    rows = []
    for m in models:
        rng = np.random.default_rng([args.seed, 0xE0])
        xs, ts = m.sample_points(rng, args.points)
        if args.eq == "rmeq":
            vals = [dynamics.ricci_flow_curvature_residual(m, x, t, config=config) for x, t in zip(xs, ts)]
            tol = checks.DEFAULT_TOLERANCES["rmeq"]
        else:
            vals = [soliton.mainformula_residual(m, x, t, config=config) for x, t in zip(xs, ts)]
            tol = checks.DEFAULT_TOLERANCES["mainformula"]
        rows.append({"eq": args.eq, "model": m.label, "residuals": vals, "max": max(vals), "tolerance": tol, "passed": max(vals) < tol})
    return rows, all(r["passed"] for r in rows)


def cmd_cone(args):
    spec = cones.ConeSpec(args.dim, args.k)
    if args.cone_action == "membership":
        M = _read_form(args.input, args.dim)
        v = cones.membership(M, spec, tol=args.tol, seed=args.seed, restarts=args.restarts)
        return [v.to_json()], True
    b = cones.boundary_sample(spec, seed=args.seed)
    return [b.to_json()], True


def cmd_harnack(args):
    model = flows.get_model(args.model)
    x = _point(args, model)
    rows = []
    for t in _floats(args.t):
        tv = harnack.trace_harnack(model, x, t)
        mv = harnack.matrix_harnack(model, x, t)
        row = {"model": model.label, "t": t, "x": x, "trace": tv.to_json(), "matrix": mv.to_json()}
        m = model.n + 1
        ks = [args.k] if args.k else range(1, m // 2 + 1)
        verdicts = [harnack.ck_harnack(model, x, t, k, seed=args.seed, restarts=args.restarts) for k in ks]
        row["ck"] = [v.to_json() for v in verdicts]
        row["passed"] = all(v.label != "violated" for v in verdicts)
        rows.append(row)
    return rows, all(r["passed"] for r in rows)


def cmd_wilking(args):
    dims = _int_range(args.dims)
    ks = tuple(_int_range(args.k_list)) + (None,)
    rows = cones.wilking_suite(dims, ks, samples=args.samples, seed=args.seed, f_samples=args.f_samples)
    summary = cones.summarize_suite(rows)
    ok = summary["q_all_ok"] and summary["mainstep_all_ok"] and summary["f_all_ok"]
    if args.csv:
        return rows, ok
    return [{"summary": summary, "rows": rows}], ok


def cmd_ode(args):
    M0 = _read_form(args.input, args.dim)
    traj = dynamics.integrate_ode(M0, np.eye(args.dim), args.duration, args.step)
    doc = traj.to_json()
    drift_ok = doc["max_bianchi_drift"] < 1e-10 * max(args.duration, 1.0)
    return [doc], drift_ok


def cmd_report(args):
    cfg = report.load_config(args.config) if args.config else report.validate_config({})
    if args.checks is not None:
        cfg["checks"] = args.checks
        cfg = report.validate_config({k: v for k, v in cfg.items()})
    doc = report.run_report(cfg, diff_config=_diff(args) if args.fd_step_set else None)
    if args.csv:
        return doc["results"], doc["passed"]
    return doc, doc["passed"]


# -- parser ----------------------------------------------------------------


class _StepAction(argparse.Action):
    def __call__(self, parser, namespace, values, option_string=None):
        setattr(namespace, self.dest, values)
        namespace.fd_step_set = True


def build_parser():
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--fd-step", type=float, default=DiffConfig.step, action=_StepAction, help="relative finite-difference step")
    common.add_argument("--richardson-levels", type=int, default=DiffConfig.levels, action=_StepAction)
    common.add_argument("--csv", action="store_true", help="emit a flat CSV table instead of JSON")
    common.add_argument("--out", help="write output to this file instead of stdout")
    common.add_argument("--seed", type=int, default=0)
    common.set_defaults(fd_step_set=False)

    p = argparse.ArgumentParser(prog="harnack-lab", description=__doc__.splitlines()[0])
    sub = p.add_subparsers(dest="command", required=True)

    s = sub.add_parser("models", parents=[common], help="list or validate the flow models")
    s.add_argument("action", choices=["list", "validate"])
    s.add_argument("--model")
    s.add_argument("--points", type=int, default=20)
    s.set_defaults(func=cmd_models)

    s = sub.add_parser("soliton-defect", parents=[common], help="|E_N| scaling with N")
    s.add_argument("--model", required=True)
    s.add_argument("--N", nargs="+", default=["1e3,1e4,1e5,1e6"])
    s.add_argument("--t", nargs="+", required=True)
    s.add_argument("--points", type=int, default=5)
    s.set_defaults(func=cmd_soliton_defect)

    s = sub.add_parser("appendix-a-check", parents=[common], help="closed forms against finite differences")
    s.add_argument("--model")
    s.add_argument("--N", nargs="+", default=["1e4"])
    s.add_argument("--points", type=int, default=20)
    s.set_defaults(func=cmd_appendix_a)

    s = sub.add_parser("limit-check", parents=[common], help="N -> infinity limits at a point")
    s.add_argument("--model", required=True)
    s.add_argument("--t", nargs="+", required=True)
    s.add_argument("--x", nargs="+")
    s.add_argument("--N", nargs="+", default=["1e3,1e4,1e5,1e6"])
    s.set_defaults(func=cmd_limit_check)

    s = sub.add_parser("evolution-residual", parents=[common], help="curvature evolution residuals")
    s.add_argument("--eq", choices=["rmeq", "mainformula"], required=True)
    s.add_argument("--model")
    s.add_argument("--points", type=int, default=10)
    s.set_defaults(func=cmd_evolution)

    s = sub.add_parser("cone", help="rank-bounded cone tools")
    s.add_argument("--dim", type=int, required=True)
    s.add_argument("--k", type=int, required=True)
    csub = s.add_subparsers(dest="cone_action", required=True)
    c = csub.add_parser("membership", parents=[common])
    c.add_argument("--input", required=True, help="curvature form JSON")
    c.add_argument("--restarts", type=int, default=64)
    c.add_argument("--tol", type=float)
    csub.add_parser("boundary-sample", parents=[common])
    s.set_defaults(func=cmd_cone)

    s = sub.add_parser("harnack", parents=[common], help="Harnack verdicts at a point")
    s.add_argument("--model", required=True)
    s.add_argument("--t", nargs="+", required=True)
    s.add_argument("--x", nargs="+")
    s.add_argument("--k", type=int)
    s.add_argument("--restarts", type=int, default=64)
    s.set_defaults(func=cmd_harnack)

    s = sub.add_parser("wilking-suite", parents=[common], help="boundary statistics for cone invariance")
    s.add_argument("--dims", default="3..6")
    s.add_argument("--k-list", default="1,2")
    s.add_argument("--samples", type=int, default=200)
    s.add_argument("--f-samples", type=int, default=100)
    s.set_defaults(func=cmd_wilking)

    s = sub.add_parser("ode-run", parents=[common], help="integrate dR/dt = Q(R)")
    s.add_argument("--dim", type=int, required=True)
    s.add_argument("--input", required=True)
    s.add_argument("--duration", type=float, required=True)
    s.add_argument("--step", type=float, required=True)
    s.set_defaults(func=cmd_ode)

    s = sub.add_parser("report", parents=[common], help="run a configured verification suite")
    s.add_argument("--config", help="JSON run configuration")
    s.add_argument("--checks", nargs="*", choices=report.CHECK_NAMES)
    s.set_defaults(func=cmd_report)
    return p


def _emit(payload, args):
    if args.csv:
        rows = payload if isinstance(payload, list) else [payload]
        text = report.rows_to_csv(rows)
    else:
        text = report.dumps(payload) + "\n"
    if args.out:
        with open(args.out, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        report.thread_count()
        payload, ok = args.func(args)
    except (
        report.ConfigError,
        flows.ModelRangeError,
        soliton.SolitonRangeError,
        StepUnderflowError,
        tensors.CurvatureSymmetryError,
        KeyError,
        ValueError,
        OSError,
    ) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    _emit(payload, args)
    return EXIT_OK if ok else EXIT_FAIL


if __name__ == "__main__":
    sys.exit(main())
