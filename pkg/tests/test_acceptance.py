"""Acceptance criteria 1-12.  Every test prints one PASS/FAIL line before asserting."""

from __future__ import annotations

import random
from fractions import Fraction

import pytest

from indepforge import (AlgebraMorphism, algebra_as_module, base_change, certify_balanced, certify_desmit,
                        certify_max_independent, check_generation_shift, construct_homotopy, freeness_oracle,
                        independence_via_koszul, is_complete_intersection, is_independent,
                        is_strongly_independent, lower_bound_check, quotient_ideal_module, restrict_scalars,
                        ring, torsion_ratio, verify_liaison)
from indepforge.cli import main
from indepforge.errors import Disagreement, HypothesisFailed, TheoremFalsified
from indepforge.freeness import balanced_search
from indepforge.instance import dumps, parse_instance
from indepforge.koszul import verify_homotopy
from indepforge.module import quotient_module
from indepforge.testkit import (KINDS, GeneratorConfig, gen_flat_finite, generate_instance, homotopy_case,
                                instance_stream)


@pytest.fixture
def verdict(capsys):
    def emit(number: int, ok: bool, detail: str):
        with capsys.disabled():
            print(f"\n[criterion {number:2d}] {'PASS' if ok else 'FAIL'}: {detail}")
        assert ok, detail
    return emit


def quadric_objects():
    A = ring("GF(101)", ["x", "y", "z"], [], 2)
    B = ring("GF(101)", ["u", "v"], [], 4)
    phi = AlgebraMorphism(A, B, ["u^2", "u*v", "v^2"])
    return A, B, phi


def test_criterion_01_quadric_example(verdict):
    A, B, phi = quadric_objects()
    BA = restrict_scalars(phi, algebra_as_module(B))
    mu, t, gap = BA.mu(), torsion_ratio(BA).value, A.edim() - B.edim()
    ok = mu == 3 and t == Fraction(2, 3) and gap == 1
    verdict(1, ok, f"mu_A(B)={mu}, t_A(B)={t}, edim(A)-edim(B)={gap} (exact)")


def test_criterion_02_second_example(verdict):
    A, B, phi = quadric_objects()
    Bp = quotient_ideal_module(B, B.ideal(["v^3"]))
    t = torsion_ratio(restrict_scalars(phi, Bp)).value
    Bq, _ = B.quotient(B.ideal(["v^3"]))
    phiq = AlgebraMorphism(A, Bq, ["u^2", "u*v", "v^2"])
    fiber, _ = Bq.quotient(Bq.ideal([phiq(g) for g in A.maximal_ideal().minimal_generators()]))
    ci = is_complete_intersection(fiber)
    verdict(2, t == 1 and ci is False, f"t_A(B')={t}, B'/m_A B' complete intersection: {ci}")


def test_criterion_03_truncated_line(verdict):
    A = ring("GF(101)", ["x"], [], 8)
    M = algebra_as_module(A)
    s4 = is_strongly_independent(A.ideal(["x^4"]), M)
    s3 = is_strongly_independent(A.ideal(["x^3"]), M)
    i3 = is_independent(["x^3"], M)
    ok = s4.verdict and not s3.verdict and s3.failing_power == 2 and i3.verdict
    verdict(3, ok, f"strong(x^4)={s4.verdict}, strong(x^3)={s3.verdict} at power {s3.failing_power}, "
                   f"indep(x^3)={i3.verdict}")


def test_criterion_04_koszul_equivalence(verdict):
    disagreements = independent = 0
    for seed in range(1, 201):
        kind = "independent-pair" if seed % 3 == 0 else "random-module"
        _, doc, inst = next(instance_stream(kind, [seed]))
        A, M = inst.rings["A"], inst.modules["M"]
        rng = random.Random(seed)
        if kind == "independent-pair":
            xs = [A.element(s) for s in doc["command"]["sequence"]]
        elif seed % 3 == 1:
            gens = A.maximal_ideal().minimal_generators()
            xs = rng.sample(gens, rng.randint(1, len(gens)))
        else:
            xs = [A.random_element(rng, in_max=True) for _ in range(rng.randint(1, 3))]
        a = is_independent(xs, M).verdict
        b = independence_via_koszul(A, xs, M).verdict
        disagreements += a != b
        independent += a
    verdict(4, disagreements == 0,
            f"200 instances, {independent} independent, {disagreements} disagreements")


def test_criterion_05_liaison(verdict):
    failures, part3, part4 = [], 0, 0
    for seed, doc, inst in instance_stream("liaison", range(1, 101)):
        A, M = inst.rings["A"], inst.modules["M"]
        cmd = doc["command"]
        xs = [A.element(s) for s in cmd["x"]]
        us = [A.element(s) for s in cmd["u"]]
        rep = verify_liaison(A, M, xs, us)
        names = rep.by_name()
        if not rep.all_hold or not rep.part4_applicable or "(4) Delta not in J_x" not in names:
            failures.append(seed)
        part3 += rep.part3_applicable
        part4 += rep.part4_applicable
    verdict(5, not failures, f"100 instances, (3)-route applicable on {part3}, (4) on {part4}, "
                             f"failures {failures}")


def test_criterion_06_homotopy(verdict):
    bad, nonzero = [], 0
    for seed in range(1, 51):
        A, Kx, target, phi = homotopy_case(seed)
        H = construct_homotopy(Kx, target, phi)
        if not verify_homotopy(Kx, target, phi, H)["ok"]:
            bad.append(seed)
        nonzero += not H.zero
    verdict(6, not bad, f"50 instances ({nonzero} with nonzero h), psi inside J_x M in every degree; "
                        f"failures {bad}")


def test_criterion_07_freeness_criterion(verdict):
    checked, bad = 0, []
    for seed, doc, inst in instance_stream("independent-pair", range(1, 51)):
        A, M = inst.rings["A"], inst.modules["M"]
        xs = [A.element(s) for s in doc["command"]["sequence"]]
        candidates = [xs, [A.power(x, 2) for x in xs]]
        for ys in candidates:
            I = A.ideal(ys)
            if I.mu() != A.edim() or not is_independent(I.minimal_generators(), M).verdict:
                continue
            cert = certify_max_independent(M, I)
            Abar, _ = A.quotient(I)
            A2, M2 = base_change(M, I * I)
            ok = is_complete_intersection(Abar) and freeness_oracle(M2) and all(c.holds for c in cert.conclusions)
            if not ok:
                bad.append(seed)
            checked += 1
    verdict(7, checked >= 50 and not bad,
            f"{checked} independent ideals with mu(I)=edim(A) over 50 seeds: A/I CI and M/I^2M free; "
            f"failures {bad}")


def test_criterion_08_balanced(verdict):
    A = ring("GF(101)", ["x", "y"], [], 2)
    B = ring("GF(101)", ["u"], [], 4)
    phi = AlgebraMorphism(A, B, ["u^2", "u^3"])
    cert = certify_balanced(phi, algebra_as_module(B), 1, ["y", "x"])
    chain = cert.witnesses["equality_chain"]
    worked = cert.free and {str(v) for v in chain.values()} == {"1"}
    issued = mismatch = 0
    for seed, doc, inst in instance_stream("balanced", range(1, 51)):
        phi, M = inst.morphisms["phi"], inst.modules["M"]
        try:
            c = balanced_search(phi, M, seed=seed)
        except HypothesisFailed:
            continue
        issued += 1
        mismatch += c.free != freeness_oracle(M)
    verdict(8, worked and mismatch == 0,
            f"worked instance chain {chain}; 50 constructed instances, {issued} certified, "
            f"{mismatch} oracle mismatches")


def test_criterion_09_desmit(verdict):
    bad = []
    for seed in range(1, 26):
        cfg = GeneratorConfig(seed=seed)
        doc = gen_flat_finite(cfg, linear_term=True)
        inst = parse_instance(doc, max_dim=4 * cfg.max_dim)
        phi, M = inst.morphisms["phi"], inst.modules["M"]
        A, B = phi.source, phi.target
        if A.edim() < B.edim() or not freeness_oracle(restrict_scalars(phi, M)):
            bad.append((seed, "hypotheses"))
            continue
        cert = certify_desmit(phi, M)
        if not (cert.free and freeness_oracle(M) and A.edim() == B.edim()):
            bad.append(seed)
    verdict(9, not bad, f"25 flat-finite instances certified free over B with equal edims; failures {bad}")


def _square_zero_pair(seed):
    """A module over a square-zero algebra and a submodule inside m_A M."""
    _, doc, inst = next(instance_stream("square-zero", [seed]))
    phi = inst.morphisms["phi"]
    rng = random.Random(seed)
    M = restrict_scalars(phi, inst.modules["M"])
    if seed % 2:
        # a non-free quotient of the restricted module
        M = quotient_module(M, M.span([M.act(phi.source.random_element(rng, in_max=True), M.basis_vector(0))]))
    mM = M.max_times()
    elems = []
    for _ in range(rng.randint(0, 2)):
        v = M.zero()
        for row in mM.rows:
            v = M.F.reduce(v + M.F.random_scalar(rng) * row)
        elems.append(v)
    return M, M.span(elems) if elems else M.zero_submodule()


def test_criterion_10_torsion_laws(verdict):
    base_bad, quot_bad, low_bad = [], [], []
    for seed in range(1, 201):
        _, doc, inst = next(instance_stream("random-module", [seed]))
        A, M = inst.rings["A"], inst.modules["M"]
        rng = random.Random(seed)
        I = A.ideal([A.random_element(rng, in_max=True) for _ in range(rng.randint(1, 2))])
        if I.is_proper():
            _, Mbar = base_change(M, I)
            if torsion_ratio(Mbar).value > torsion_ratio(M).value:
                base_bad.append(seed)
        Msq, N = _square_zero_pair(seed)
        if torsion_ratio(quotient_module(Msq, N)).value < torsion_ratio(Msq).value:
            quot_bad.append(seed)
        kind = ("balanced", "square-zero", "flat-finite-morphism")[seed % 3]
        _, doc, inst = next(instance_stream(kind, [seed]))
        phi, MB = inst.morphisms["phi"], inst.modules["M"]
        try:
            if not lower_bound_check(phi, MB)["holds"]:
                low_bad.append(seed)
        except TheoremFalsified:
            low_bad.append(seed)
    family = []
    for n in (1, 2, 3):
        An = ring("GF(101)", ["x", "y"], [], n + 2)
        family.append(torsion_ratio(quotient_ideal_module(An, An.maximal_ideal() ** n)).value)
    ok = not (base_bad or quot_bad or low_bad) and family == [2, 3, 4]
    verdict(10, ok, f"base change {200 - len(base_bad)}/200, square-zero quotient {200 - len(quot_bad)}/200, "
                    f"lower bound {200 - len(low_bad)}/200, truncated family t = {[str(v) for v in family]}")


def test_criterion_11_lemma_equivalence(verdict):
    disagreements, checks = [], 0
    for seed in range(1, 201):
        if seed % 2:
            _, doc, inst = next(instance_stream("random-module", [seed]))
            A, M = inst.rings["A"], inst.modules["M"]
        else:
            _, doc, inst = next(instance_stream("balanced", [seed]))
            phi = inst.morphisms["phi"]
            A, M = phi.source, restrict_scalars(phi, inst.modules["M"])
        xs = A.maximal_ideal().minimal_generators()
        for delta in range(len(xs) + 1):
            try:
                check_generation_shift(M, xs, delta)
            except Disagreement:
                disagreements.append((seed, delta))
            checks += 1
    verdict(11, not disagreements, f"200 instances, {checks} (instance, delta) pairs, "
                                   f"disagreements {disagreements}")


def test_criterion_12_exit_codes_and_determinism(verdict, tmp_path, capsys):
    codes = {}
    nondeterministic = []
    for kind in KINDS:
        for seed in range(1, 101):
            path = tmp_path / f"{kind}-{seed}.json"
            path.write_text(dumps(generate_instance(GeneratorConfig(seed=seed), kind)))
            outs = []
            for run in (1, 2):
                out = tmp_path / f"{kind}-{seed}.{run}.report.json"
                code = main([generate_instance(GeneratorConfig(seed=seed), kind)["command"]["name"],
                             "--in", str(path), "--seed", str(seed), "--out", str(out)])
                codes[code] = codes.get(code, 0) + 1
                outs.append(out.read_bytes())
            if outs[0] != outs[1]:
                nondeterministic.append((kind, seed))
    capsys.readouterr()
    ok = 3 not in codes and not nondeterministic
    verdict(12, ok, f"{sum(codes.values())} CLI runs over {len(KINDS)} kinds x seeds 1-100, exit codes {codes}, "
                    f"non-identical report pairs {len(nondeterministic)}")
