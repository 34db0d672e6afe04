"""Command-line entry point: ``indepforge <command> --in instance.json``.

Exit codes: 0 when a verdict was computed (including "false" and failed
preconditions), 1 on invalid input, 2 when a size cap is hit, 3 when a
theorem-side identity is refuted.
"""

from __future__ import annotations

import argparse
import os
import sys
import tempfile
import time
from concurrent.futures import ProcessPoolExecutor
from pathlib import Path

import numpy as np

from . import __version__
from .algebra import DEFAULT_MAX_DIM, complete_intersection_data
from .algmatrix import DEFAULT_MAX_DET, determinant
from .errors import (CapExceeded, HypothesisFailed, IndepForgeError, NoSolution, PreconditionFailed,
                     TheoremFalsified, ValidationError)
from .freeness import (balanced_search, certify_balanced, certify_desmit, certify_max_independent,
                       certify_special_fiber, certify_strong_independence_freeness, lower_bound_check)
from .independence import census, is_independent, is_strongly_independent, relation_submodule
from .instance import Instance, dumps, load_instance
from .koszul import DEFAULT_MAX_SEQ, build_koszul, dual_cohomology_dims, independence_via_koszul
from .linkage import TransitionMatrix, fitting_ideal, solve_transition, verify_liaison
from .module import algebra_as_module, freeness_oracle, restrict_scalars, torsion_ratio
from .testkit import KINDS, GeneratorConfig, generate_instance

COMMANDS = ("edim", "ci-test", "indep", "strong-indep", "relations", "koszul-homology", "koszul-indep",
            "liaison", "fitting", "torsion-ratio", "certify", "census", "oracle-free")
ROUTES = {"strong": "strong-indep", "strong-indep": "strong-indep", "max-indep-square": "max-indep-square",
          "balanced": "balanced", "special-fiber": "special-fiber", "desmit": "desmit"}

EXIT_OK, EXIT_INVALID, EXIT_CAP, EXIT_FALSIFIED = 0, 1, 2, 3


class Caps:
    def __init__(self, max_dim=DEFAULT_MAX_DIM, max_seq=DEFAULT_MAX_SEQ, max_det=DEFAULT_MAX_DET):
        self.max_dim, self.max_seq, self.max_det = max_dim, max_seq, max_det


# -- helpers ----------------------------------------------------------------

def _vec(F, v) -> list[str]:
    return [F.to_str(c) for c in np.asarray(v)]


def _module(inst: Instance, cmd: dict):
    name = cmd.get("module")
    if name is None:
        if len(inst.modules) == 1:
            name = next(iter(inst.modules))
        else:
            raise ValidationError("command needs a 'module'", "/command/module")
    if name not in inst.modules:
        raise ValidationError(f"unknown module {name!r}", "/command/module")
    return name, inst.modules[name]


def _ring(inst: Instance, cmd: dict):
    name = cmd.get("ring")
    if name is None:
        if "module" in cmd or (not inst.rings and inst.modules):
            mname, M = _module(inst, cmd)
            return inst.ring_of(mname), M.A
        if len(inst.rings) == 1:
            name = next(iter(inst.rings))
        else:
            raise ValidationError("command needs a 'ring'", "/command/ring")
    if name not in inst.rings:
        raise ValidationError(f"unknown ring {name!r}", "/command/ring")
    return name, inst.rings[name]


def _morphism(inst: Instance, cmd: dict):
    return inst.morphisms[_morphism_name(inst, cmd)]


def _morphism_name(inst: Instance, cmd: dict) -> str:
    name = cmd.get("morphism")
    if name is None:
        if len(inst.morphisms) == 1:
            name = next(iter(inst.morphisms))
        else:
            raise ValidationError("command needs a 'morphism'", "/command/morphism")
    if name not in inst.morphisms:
        raise ValidationError(f"unknown morphism {name!r}", "/command/morphism")
    return name


def _elements(inst: Instance, ring: str, cmd: dict, key: str, required: bool = True):
    if key not in cmd:
        if required:
            raise ValidationError(f"command needs '{key}'", f"/command/{key}")
        return None
    return [inst.element(ring, s, f"/command/{key}/{i}") for i, s in enumerate(cmd[key])]


def _module_ring(inst: Instance, cmd: dict):
    mname, M = _module(inst, cmd)
    return mname, M, inst.ring_of(mname)


def _seq_check(xs, caps: Caps):
    if len(xs) > caps.max_seq:
        raise CapExceeded(f"sequence of length {len(xs)} exceeds cap {caps.max_seq}")


# -- commands ------------------------------------------------------------------

def cmd_edim(inst, cmd, caps, seed):
    name, A = _ring(inst, cmd)
    return {"ring": name, "dim": A.dim, "edim": A.edim(), "nilpotency": A.nilpotency(),
            "basis": [A.format(A.basis_element(i)) for i in range(A.dim)]}


def cmd_ci_test(inst, cmd, caps, seed):
    name, A = _ring(inst, cmd)
    B = A
    if "ideal" in cmd:
        gens = _elements(inst, name, cmd, "ideal")
        B, _ = A.quotient(A.ideal(gens))
    data = complete_intersection_data(B)
    return {"ring": name, "complete_intersection": data["relations"] == data["edim"], **data}


def cmd_indep(inst, cmd, caps, seed):
    mname, M, ring = _module_ring(inst, cmd)
    xs = _elements(inst, ring, cmd, "sequence")
    _seq_check(xs, caps)
    rep = is_independent(xs, M)
    out = {"module": mname, "verdict": rep.verdict, "relations_dim": rep.relations.dim,
           "image_dim": rep.image.dim}
    if rep.witness is not None:
        out["witness"] = {"coordinates": [_vec(M.F, m) for m in rep.witness],
                          "lifts": [M.format(m) for m in rep.witness]}
    return out


def cmd_strong_indep(inst, cmd, caps, seed):
    mname, M, ring = _module_ring(inst, cmd)
    A = M.A
    gens = _elements(inst, ring, cmd, "ideal")
    rep = is_strongly_independent(A.ideal(gens), M)
    out = {"module": mname, "verdict": rep.verdict, "checked_powers": rep.checked_powers,
           "failing_power": rep.failing_power}
    if rep.witness is not None:
        out["witness"] = {"coordinates": [_vec(M.F, m) for m in rep.witness],
                          "lifts": [M.format(m) for m in rep.witness]}
    return out


def cmd_relations(inst, cmd, caps, seed):
    mname, M, ring = _module_ring(inst, cmd)
    A = M.A
    I = A.ideal(_elements(inst, ring, cmd, "ideal"))
    R = relation_submodule(I, M)
    IM = M.ideal_times(I)
    gens = R.minimal_generators()
    return {"module": mname, "dim": R.dim, "mu": len(gens), "contained_in_IM": R.issubset(IM),
            "generators": [M.format(g) for g in gens],
            "coordinates": [_vec(M.F, g) for g in gens]}


def _module_or_ring(inst, cmd):
    if "module" in cmd or (inst.modules and "ring" not in cmd):
        mname, M, ring = _module_ring(inst, cmd)
        return mname, M, ring
    ring, A = _ring(inst, cmd)
    return None, algebra_as_module(A), ring


def cmd_koszul_homology(inst, cmd, caps, seed):
    mname, M, ring = _module_or_ring(inst, cmd)
    xs = _elements(inst, ring, cmd, "sequence")
    _seq_check(xs, caps)
    K = build_koszul(M.A, xs, max_seq=caps.max_seq)
    KM = K.with_coefficients(M)
    if not KM.check_square_zero():
        raise TheoremFalsified("Koszul differential does not square to zero")
    return {"module": mname, "length": len(xs), "homology": KM.homology_dims(),
            "dual_cohomology": dual_cohomology_dims(K, M),
            "ranks": [K.rank(l) for l in range(len(xs) + 1)]}


def cmd_koszul_indep(inst, cmd, caps, seed):
    mname, M, ring = _module_ring(inst, cmd)
    xs = _elements(inst, ring, cmd, "sequence")
    _seq_check(xs, caps)
    kz = independence_via_koszul(M.A, xs, M, max_seq=caps.max_seq)
    direct = is_independent(xs, M).verdict
    if kz.verdict != direct:
        raise TheoremFalsified("Koszul and direct independence tests disagree")
    out = {"module": mname, "verdict": kz.verdict, "kernel_dim": kz.kernel_dim, "direct_verdict": direct}
    if kz.witness is not None:
        out["witness"] = {"coordinates": [_vec(M.F, m) for m in kz.witness],
                          "lifts": [M.format(m) for m in kz.witness]}
    return out


def cmd_liaison(inst, cmd, caps, seed):
    mname, M, ring = _module_ring(inst, cmd)
    A = M.A
    xs, us = _elements(inst, ring, cmd, "x"), _elements(inst, ring, cmd, "u")
    _seq_check(xs, caps)
    T = None
    if "W" in cmd:
        W = [[inst.element(ring, s, f"/command/W/{i}/{j}") for j, s in enumerate(row)]
             for i, row in enumerate(cmd["W"])]
        if len(W) != len(xs) or any(len(r) != len(xs) for r in W):
            raise ValidationError("W must be square of the sequence length", "/command/W")
        T = TransitionMatrix(A, xs, us, W, determinant(A, W, caps.max_det))
    rep = verify_liaison(A, M, xs, us, W=T, max_det=caps.max_det)
    if not rep.all_hold:
        names = ", ".join(c.name for c in rep.failures())
        raise TheoremFalsified(f"liaison identities failed: {names}")
    return {"module": mname, "all_hold": rep.all_hold, "W": rep.transition.format(),
            "delta": A.format(rep.transition.delta), "part3_applicable": rep.part3_applicable,
            "part4_applicable": rep.part4_applicable, "part4_route": rep.part4_route,
            "checks": [{"name": c.name, "holds": c.holds, **({"detail": c.detail} if c.detail else {})}
                       for c in rep.checks]}


def cmd_fitting(inst, cmd, caps, seed):
    ring, A = _ring(inst, cmd)
    xs, us = _elements(inst, ring, cmd, "x"), _elements(inst, ring, cmd, "u")
    _seq_check(xs, caps)
    Abar, fit, Q = fitting_ideal(A, xs, us)
    T = solve_transition(A, xs, us, caps.max_det)
    dbar = Abar.ideal([A.F.matmul(Q, T.delta)])
    return {"ring": ring, "quotient_dim": Abar.dim, "fitting_dim": fit.dim,
            "fitting_generators": [Abar.format(g) for g in fit.minimal_generators()],
            "delta": A.format(T.delta), "equals_delta_ideal": fit == dbar}


def cmd_torsion_ratio(inst, cmd, caps, seed):
    mname, M, _ = _module_ring(inst, cmd)
    if "morphism" in cmd:
        M = restrict_scalars(_morphism(inst, cmd), M)
    t = torsion_ratio(M)
    out = {"module": mname, "torsion_ratio": str(t), "zero_module": t.zero_module}
    if not t.zero_module:
        out["mu_kernel"], out["mu"] = t.numerator, t.denominator
    return out


def cmd_certify(inst, cmd, caps, seed):
    route = ROUTES.get(cmd.get("route", "strong"))
    if route is None:
        raise ValidationError(f"unknown route {cmd.get('route')!r}", "/command/route")
    mname, M, ring = _module_ring(inst, cmd)
    if route in ("strong-indep", "max-indep-square"):
        I = M.A.ideal(_elements(inst, ring, cmd, "ideal")) if "ideal" in cmd else M.A.maximal_ideal()
        fn = certify_strong_independence_freeness if route == "strong-indep" else certify_max_independent
        cert = fn(M, I)
    elif route == "balanced":
        phi = _morphism(inst, cmd)
        src = inst.morphism_specs[_morphism_name(inst, cmd)]["source"]
        if "delta" in cmd and "order" in cmd:
            cert = certify_balanced(phi, M, cmd["delta"], _elements(inst, src, cmd, "order"))
        else:
            cert = balanced_search(phi, M, seed=seed)
    elif route == "special-fiber":
        phi = _morphism(inst, cmd)
        variant = cmd.get("variant", "square-zero")
        order = None
        if variant == "kernel-intersection":
            src = inst.morphism_specs[_morphism_name(inst, cmd)]["source"]
            order = _elements(inst, src, cmd, "order")
        cert = certify_special_fiber(phi, M, variant=variant, delta=cmd.get("delta"), order=order)
    else:
        cert = certify_desmit(_morphism(inst, cmd), M)
    out = {"module": mname, "certified": True, **cert.to_dict()}
    if route in ("balanced", "special-fiber", "desmit") and M.dim:
        out["lower_bound"] = lower_bound_check(_morphism(inst, cmd), M)
    return out


def cmd_census(inst, cmd, caps, seed):
    mname, M, _ = _module_ring(inst, cmd)
    res = census(M.A, M, cmd.get("length", M.A.edim() + 1), mode=cmd.get("mode", "exhaustive"), seed=seed)
    return {"module": mname, "mode": res.mode, "exhaustive": res.exhaustive,
            "max_independent": res.max_independent, "max_strongly_independent": res.max_strong,
            "edim": M.A.edim(),
            "rows": [{"length": r.length, "ideals": r.ideals, "independent": r.independent,
                      "strongly_independent": r.strongly_independent, "witness": r.witness,
                      "strong_witness": r.strong_witness,
                      "h1_range": list(r.h1_range) if r.h1_range else None} for r in res.rows]}


def cmd_oracle_free(inst, cmd, caps, seed):
    mname, M, _ = _module_ring(inst, cmd)
    if "morphism" in cmd:
        M = restrict_scalars(_morphism(inst, cmd), M)
    free = freeness_oracle(M)
    return {"module": mname, "free": free, "dim": M.dim, "mu": M.mu(), "ring_dim": M.A.dim,
            "rank": M.mu() if free else None}


HANDLERS = {
    "edim": cmd_edim, "ci-test": cmd_ci_test, "indep": cmd_indep, "strong-indep": cmd_strong_indep,
    "relations": cmd_relations, "koszul-homology": cmd_koszul_homology, "koszul-indep": cmd_koszul_indep,
    "liaison": cmd_liaison, "fitting": cmd_fitting, "torsion-ratio": cmd_torsion_ratio,
    "certify": cmd_certify, "census": cmd_census, "oracle-free": cmd_oracle_free,
}


def run_command(inst: Instance, cmd: dict, caps: Caps | None = None, seed: int = 0) -> tuple[dict, int]:
    """Dispatch one command; returns ``(report, exit_code)``."""
    caps = caps or Caps()
    name = cmd.get("name")
    report: dict = {"command": cmd, "tool": f"indepforge {__version__}"}
    try:
        if name not in HANDLERS:
            raise ValidationError(f"unknown command {name!r}", "/command/name")
        report["result"] = HANDLERS[name](inst, cmd, caps, seed)
        report["status"] = "ok"
        code = EXIT_OK
    except HypothesisFailed as exc:
        report["status"] = "hypothesis-failed"
        report["reason"] = str(exc)
        if exc.certificate is not None:
            report["result"] = {"certified": False, **exc.certificate.to_dict()}
        code = EXIT_OK
    except (PreconditionFailed, NoSolution) as exc:
        report["status"] = "precondition-failed"
        report["reason"] = str(exc)
        code = EXIT_OK
    except TheoremFalsified as exc:
        report["status"] = "theorem-falsified"
        report["reason"] = f"{type(exc).__name__}: {exc}"
        code = EXIT_FALSIFIED
    except CapExceeded as exc:
        report["status"] = "cap-exceeded"
        report["reason"] = str(exc)
        code = EXIT_CAP
    except IndepForgeError as exc:
        report["status"] = "invalid"
        report["reason"] = f"{type(exc).__name__}: {exc}"
        if getattr(exc, "pointer", ""):
            report["pointer"] = exc.pointer
        code = EXIT_INVALID
    report["exit_code"] = code
    return report, code


# -- driver ------------------------------------------------------------------

def _command_from_args(args, doc_cmd: dict | None) -> dict:
    # parameters from the instance are kept; the command name follows the CLI
    cmd = dict(doc_cmd or {})
    cmd["name"] = args.command
    for key in ("module", "ring", "morphism", "delta", "length", "mode", "variant"):
        val = getattr(args, key)
        if val is not None:
            cmd[key] = val
    for key in ("sequence", "ideal", "x", "u", "order"):
        val = getattr(args, key)
        if val is not None:
            cmd[key] = val
    if args.route is not None:
        cmd["route"] = args.route
    return cmd


def process(path: str, args) -> tuple[dict, int]:
    caps = Caps(args.max_dim, args.max_seq, args.max_det)
    start = time.perf_counter()
    try:
        inst = load_instance(path, max_dim=caps.max_dim)
    except CapExceeded as exc:
        return {"instance": path, "status": "cap-exceeded", "reason": str(exc), "exit_code": EXIT_CAP}, EXIT_CAP
    except (IndepForgeError, OSError, ValueError) as exc:
        rep = {"instance": path, "status": "invalid", "reason": f"{type(exc).__name__}: {exc}",
               "exit_code": EXIT_INVALID}
        if getattr(exc, "pointer", ""):
            rep["pointer"] = exc.pointer
        return rep, EXIT_INVALID
    cmd = _command_from_args(args, inst.command)
    report, code = run_command(inst, cmd, caps, seed=args.seed)
    report = {"instance": path, "seed": args.seed, **report}
    if args.timing:
        report["timing_seconds"] = round(time.perf_counter() - start, 4)
    return report, code


def write_atomic(path: Path, text: str) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=f".{path.name}.", suffix=".tmp")
    try:
        with os.fdopen(fd, "w", encoding="utf-8") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def _batch_one(item):
    path, out_dir, args = item
    report, code = process(str(path), args)
    target = Path(out_dir) / (Path(path).stem + ".report.json")
    write_atomic(target, dumps(report))
    return str(path), code


def run_batch(args) -> int:
    src = Path(args.batch)
    files = sorted(src.glob("*.json"))
    out_dir = Path(args.out) if args.out else src / "reports"
    worst = EXIT_OK
    jobs = [(f, out_dir, args) for f in files]
    with ProcessPoolExecutor(max_workers=args.workers) as pool:
        for path, code in pool.map(_batch_one, jobs):
            print(f"{path}: exit {code}")
            worst = max(worst, code)
    return worst


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="indepforge",
                                description="Independence, liaison and freeness checks over finite local algebras.")
    p.add_argument("--version", action="version", version=f"indepforge {__version__}")
    p.add_argument("command", choices=COMMANDS + ("generate",))
    p.add_argument("--in", dest="input", help="instance file, or bundled:NAME")
    p.add_argument("--out", help="report file (batch mode: report directory)")
    p.add_argument("--batch", help="process every *.json in this directory")
    p.add_argument("--workers", type=int, default=None, help="batch worker processes")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--route", choices=sorted(ROUTES))
    p.add_argument("--max-dim", type=int, default=DEFAULT_MAX_DIM)
    p.add_argument("--max-seq", type=int, default=DEFAULT_MAX_SEQ)
    p.add_argument("--max-det", type=int, default=DEFAULT_MAX_DET)
    p.add_argument("--timing", action="store_true", help="include wall-clock time in the report")
    g = p.add_argument_group("command parameters (override the instance's command block)")
    g.add_argument("--module")
    g.add_argument("--ring")
    g.add_argument("--morphism")
    g.add_argument("--sequence", nargs="+")
    g.add_argument("--ideal", nargs="+")
    g.add_argument("--x", nargs="+")
    g.add_argument("--u", nargs="+")
    g.add_argument("--order", nargs="+")
    g.add_argument("--delta", type=int)
    g.add_argument("--length", type=int)
    g.add_argument("--mode", choices=["exhaustive", "greedy"])
    g.add_argument("--variant", choices=["square-zero", "kernel-intersection"])
    gen = p.add_argument_group("generate")
    gen.add_argument("--kind", choices=KINDS, help="instance kind for 'generate'")
    gen.add_argument("--field", default="GF(101)")
    gen.add_argument("--gen-max-dim", type=int, default=40)
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    if args.command == "generate":
        if not args.kind:
            print("generate needs --kind", file=sys.stderr)
            return EXIT_INVALID
        try:
            doc = generate_instance(GeneratorConfig(seed=args.seed, field=args.field,
                                                    max_dim=args.gen_max_dim), args.kind)
        except CapExceeded as exc:
            print(f"cap exceeded: {exc}", file=sys.stderr)
            return EXIT_CAP
        text = dumps(doc)
        if args.out:
            write_atomic(Path(args.out), text)
        else:
            sys.stdout.write(text)
        return EXIT_OK
    if args.batch:
        return run_batch(args)
    if not args.input:
        print("missing --in (or --batch)", file=sys.stderr)
        return EXIT_INVALID
    report, code = process(args.input, args)
    text = dumps(report)
    if args.out:
        write_atomic(Path(args.out), text)
    else:
        sys.stdout.write(text)
    return code


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
