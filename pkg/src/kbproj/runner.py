"""Task execution: dispatch fixture tasks to library calls, collect reports.

Tasks are independent, so they run in a worker pool sized by the
``KBPROJ_WORKERS`` environment variable (default 1); reports always come
back in input order, and their JSON bodies carry no timing, so output is
byte-identical regardless of worker count.
"""

from __future__ import annotations

import json
import os
import time
from concurrent.futures import ThreadPoolExecutor
from typing import Dict, List, Optional, Sequence, Tuple

from .almost import (
    AlmostDerivedReport,
    AlmostQuotientReport,
    SerreAdjointReport,
    almost_derived_ideal,
    almost_quotient,
    contraction_defects,
    serre_adjoint_report,
    verify_contraction,
)
from .derived import check_homological_epi
from .fixture import FixtureError, FixtureFile
from .homcat import ProjComplex, recognize_triangle, verify_triangle_certificate
from .ideals import (
    HomIdeal,
    TrianglePresentation,
    exact_ideal_report,
    ideal_closure,
    ideal_product,
    is_idempotent_ideal,
    telescope_report,
)
from .lifting import (
    lift_chain_map,
    lift_complex,
    verify_complex_lift,
    verify_map_lift,
)
from .reports import Report
from .serialize import (
    complex_lift_cert_from_json,
    complex_lift_cert_to_json,
    map_lift_cert_from_json,
    map_lift_cert_to_json,
    triangle_cert_from_json,
    triangle_cert_to_json,
)

WORKERS_ENV = "KBPROJ_WORKERS"


class TaskError(ValueError):
    """A task that cannot be executed (bad reference, bad arguments)."""


def _same(X: ProjComplex, Y: ProjComplex) -> bool:
    return X.summands == Y.summands and all(
        X.diff_at(n) == Y.diff_at(n) for n in X.degrees())


def _locate(subcat, X: ProjComplex, what: str) -> str:
    for name in subcat.names():
        if _same(subcat.objects[name], X):
            return name
    raise TaskError(f"{what}: object is not in the subcategory window")


def _pair_dims(I: HomIdeal) -> Dict[str, int]:
    return {f"{a} -> {b}": d for (a, b), d in I.dims().items()}


def _window_desc(name: Optional[str], subcat) -> Dict:
    return {"subcat": name, "objects": list(subcat.names())}


def _triangle_presentations(fx: FixtureFile, subcat,
                            names: Sequence[str]) -> List[TrianglePresentation]:
    out = []
    for tn in names:
        if tn not in fx.triangles:
            raise TaskError(f"unknown triangle {tn!r}")
        tri = fx.triangles[tn]
        objs = tri.get("objects")
        if objs:
            na, nb, nc = objs
        else:
            na = _locate(subcat, tri["alpha"].source, f"triangle {tn}")
            nb = _locate(subcat, tri["alpha"].target, f"triangle {tn}")
            nc = _locate(subcat, tri["beta"].target, f"triangle {tn}")
        out.append(TrianglePresentation((na, nb, nc), tri["alpha"],
                                        tri["beta"], tri["gamma"]))
    return out


# -- command handlers ----------------------------------------------------


def _run_check_hepi(fx: FixtureFile, task: Dict) -> Report:
    g = fx.ring_map(task.get("map"), f"task {task['id']}")
    i_max = int(task.get("max_degree", 20))
    rep = check_homological_epi(g, i_max=i_max)
    evidence = {
        "map": task.get("map"),
        "reason": rep.reason,
        "tensor_square_dim": rep.tensor_square_dim,
        "target_dim": rep.target_dim,
        "multiplication_is_iso": rep.mu_is_iso,
        "tor_dims": [rep.tor[i] for i in sorted(rep.tor)],
        "checked_up_to": rep.checked_up_to,
        "resolution_complete": rep.resolution_complete,
    }
    return Report(task["id"], "check-hepi", rep.verdict, evidence)


def _run_lift_map(fx: FixtureFile, task: Dict) -> Report:
    name = task.get("name")
    if name not in fx.lifts:
        raise TaskError(f"unknown lift problem {name!r}")
    prob = fx.lifts[name]
    budget = prob["budget"]
    if "depth" in task:
        budget = type(budget)(max_depth=int(task["depth"]),
                              max_candidates=budget.max_candidates)
    rep = lift_chain_map(prob["functor"], prob["source"], prob["target"],
                         prob["map"], generators=prob["generators"],
                         budget=budget)
    evidence = {
        "problem": name,
        "candidates_tried": rep.candidates_tried,
        "depth_reached": rep.depth_reached,
        "max_depth": budget.max_depth,
    }
    if rep.certificate is not None:
        ok, why = verify_map_lift(prob["functor"], prob["source"],
                                  prob["target"], prob["map"], rep.certificate)
        if not ok:
            raise TaskError(f"lift {name}: produced certificate failed "
                            f"re-verification: {why}")
        evidence["reverified"] = True
        evidence["certificate"] = {
            "kind": "map-lift", "problem": name,
            "payload": map_lift_cert_to_json(rep.certificate),
        }
    return Report(task["id"], "lift-map", rep.verdict, evidence)


def _run_lift_complex(fx: FixtureFile, task: Dict) -> Report:
    name = task.get("name")
    if name not in fx.complex_lifts:
        raise TaskError(f"unknown complex lift problem {name!r}")
    prob = fx.complex_lifts[name]
    budget = prob["budget"]
    if "depth" in task:
        budget = type(budget)(max_depth=int(task["depth"]),
                              max_candidates=budget.max_candidates)
    rep = lift_complex(prob["functor"], prob["target"], prob["stalks"],
                       generators=prob["generators"], budget=budget)
    evidence = {"problem": name, "reason": rep.reason}
    if rep.certificate is not None:
        ok, why = verify_complex_lift(prob["functor"], prob["target"],
                                      rep.certificate)
        if not ok:
            raise TaskError(f"complex lift {name}: produced certificate "
                            f"failed re-verification: {why}")
        evidence["reverified"] = True
        evidence["lift_summands"] = {
            str(n): list(s) for n, s in rep.certificate.lift.summands.items()}
        evidence["certificate"] = {
            "kind": "complex-lift", "problem": name,
            "payload": complex_lift_cert_to_json(rep.certificate),
        }
    return Report(task["id"], "lift-complex", rep.verdict, evidence)


def _run_recognize_triangle(fx: FixtureFile, task: Dict) -> Report:
    name = task.get("name")
    if name not in fx.triangles:
        raise TaskError(f"unknown triangle {name!r}")
    tri = fx.triangles[name]
    verdict = recognize_triangle(tri["alpha"], tri["beta"], tri["gamma"])
    evidence = {"triangle": name, "reason": verdict.reason}
    cert = triangle_cert_to_json(verdict)
    if cert is not None:
        if not verify_triangle_certificate(tri["alpha"], tri["beta"],
                                           tri["gamma"], verdict):
            raise TaskError(f"triangle {name}: certificate failed "
                            f"re-verification")
        evidence["reverified"] = True
        evidence["certificate"] = {
            "kind": "triangle", "problem": name, "payload": cert,
        }
    return Report(task["id"], "recognize-triangle", verdict.verdict, evidence)


def _run_check_ideal(fx: FixtureFile, task: Dict) -> Report:
    name = task.get("name")
    if name not in fx.ideals:
        raise TaskError(f"unknown ideal {name!r}")
    spec = fx.ideals[name]
    subcat = spec["subcat"]
    seeds: Dict[Tuple[str, str], List] = {}
    for gname, g in spec["generators"]:
        a = _locate(subcat, g.source, f"ideal generator {gname}")
        b = _locate(subcat, g.target, f"ideal generator {gname}")
        seeds.setdefault((a, b), []).append(subcat.hom(a, b).class_coords(g))
    I = ideal_closure(subcat, seeds)
    tris = _triangle_presentations(fx, subcat, spec["triangles"])
    rep = exact_ideal_report(I, tris)
    sq_dims = _pair_dims(ideal_product(I, I))
    refuted = (not rep.idempotent or not rep.shift_stable
               or rep.saturated is False)
    verdict = "inconsistent" if refuted else "consistent"
    evidence = {
        "ideal": name,
        "window": _window_desc(spec["subcat_name"], subcat),
        "pair_dims": _pair_dims(I),
        "square_pair_dims": sq_dims,
        "idempotent": rep.idempotent,
        "shift_stable": rep.shift_stable,
        "shift_pairs_checked": [f"{a} -> {b}" for a, b in rep.shift_pairs_checked],
        "saturated": rep.saturated,
        "saturation_checks": [
            {"triangle": list(c.triangle), "target": c.target,
             "applicable": c.applicable, "holds": c.holds}
            for c in rep.saturation_checks
        ],
        "necessary_conditions_refuted": refuted,
    }
    return Report(task["id"], "check-ideal", verdict, evidence)


def _run_telescope(fx: FixtureFile, task: Dict) -> Report:
    F = fx.functor(task.get("functor"), f"task {task['id']}")
    sname = task.get("subcat")
    subcat = fx.subcat(sname, f"task {task['id']}")
    rep = telescope_report(F, subcat)
    verdict = "consistent" if rep.consistent else "inconsistent"
    evidence = {
        "functor": task.get("functor"),
        "window": _window_desc(sname, subcat),
        "annihilator_pair_dims": _pair_dims(rep.annihilator),
        "annihilator_idempotent": is_idempotent_ideal(rep.annihilator),
        "kernel_objects": list(rep.kernel_names),
        "factor_ideal_pair_dims": _pair_dims(rep.factor_ideal),
        "mismatched_pairs": [f"{a} -> {b}" for a, b in rep.mismatches],
    }
    return Report(task["id"], "telescope-report", verdict, evidence)


def _serre_evidence(rep: SerreAdjointReport) -> Dict:
    ev = {
        "idempotent": rep.idempotent,
        "verdict": rep.verdict,
        "checks": [
            {"module": c.module, "perp_module": c.perp_module,
             "coreflection_dims": list(c.coreflection_dims),
             "reflection_dims": list(c.reflection_dims), "ok": c.ok}
            for c in rep.checks
        ],
    }
    if rep.witness is not None:
        w = rep.witness
        ev["witness"] = {
            "extension_dim": w.extension_dim, "sub_dim": w.sub_dim,
            "quotient_dim": w.quotient_dim, "sub_killed": w.sub_killed,
            "quotient_killed": w.quotient_killed,
            "extension_killed": w.extension_killed,
            "exhibits_failure": w.exhibits_failure,
        }
    return ev


def _quotient_evidence(rep: AlmostQuotientReport) -> Dict:
    return {
        "corner_dim": rep.corner.dim,
        "module_dims": dict(rep.module_dims),
        "exactness": [
            {"sequence": c.sequence, "sub_matches_kernel": c.sub_matches_kernel,
             "dims_additive": c.dims_additive}
            for c in rep.exactness
        ],
        "verdict": rep.verdict,
    }


def _derived_evidence(rep: AlmostDerivedReport) -> Dict:
    return {
        "cone_summands": {str(n): list(s)
                          for n, s in rep.cone.summands.items()},
        "ideal_pair_dims": _pair_dims(rep.ideal),
        "idempotent_on_window": rep.idempotent_on_window,
        "window": list(rep.window),
        "tensor_square_dim": rep.tensor_square_dim,
        "projective_right": rep.projective_right,
        "flatness_note": rep.flatness_note,
        "verdict": rep.verdict,
    }


_RANK = {"refuted": 0, "inconclusive": 1, "certified": 2}


def _run_almost(fx: FixtureFile, task: Dict) -> Report:
    name = task.get("name")
    if name not in fx.almost_cases:
        raise TaskError(f"unknown almost case {name!r}")
    case = fx.almost_cases[name]
    alg, ideal = case["algebra"], case["ideal"]
    evidence: Dict = {"case": name, "parts": list(case["include"])}
    verdicts = []
    for part in case["include"]:
        if part == "serre":
            rep = serre_adjoint_report(alg, ideal)
            evidence["serre"] = _serre_evidence(rep)
            verdicts.append(rep.verdict)
        elif part == "quotient":
            if case["idempotent"] is None:
                raise TaskError(f"almost {name}: corner presentation needs "
                                f"an idempotent element")
            rep = almost_quotient(alg, case["idempotent"])
            evidence["quotient"] = _quotient_evidence(rep)
            verdicts.append(rep.verdict)
        elif part == "derived":
            if case["subcat"] is None:
                raise TaskError(f"almost {name}: derived part needs a "
                                f"subcategory window")
            window = None
            if task.get("window") is not None:
                w = int(task["window"])
                window = (-w, w)
            rep = almost_derived_ideal(alg, ideal, case["subcat"],
                                       case["a_witness"],
                                       case["square_witnesses"],
                                       window=window)
            ev = _derived_evidence(rep)
            ev["window_desc"] = _window_desc(case["subcat_name"], case["subcat"])
            evidence["derived"] = ev
            verdicts.append(rep.verdict)
        else:
            raise TaskError(f"almost {name}: unknown part {part!r}")
    overall = min(verdicts, key=lambda v: _RANK[v]) if verdicts else "inconclusive"
    return Report(task["id"], "almost-report", overall, evidence)


def _run_verify_contraction(fx: FixtureFile, task: Dict) -> Report:
    name = task.get("name")
    fxt = fx.contraction(name, f"task {task['id']}")
    defects = contraction_defects(fxt)
    ok = not defects
    evidence = {
        "contraction": name,
        "dims": {str(n): d for n, d in sorted(fxt.dims.items())},
        "defect_degrees": sorted(defects),
    }
    return Report(task["id"], "verify-contraction",
                  "certified" if ok else "refuted", evidence)


def _run_verify_certificate(fx: FixtureFile, task: Dict) -> Report:
    path = task.get("certificate")
    if isinstance(path, dict):
        envelope = path
        label = "<inline>"
    else:
        if not path:
            raise TaskError("verify-certificate needs a certificate file")
        try:
            with open(path, "r", encoding="utf-8") as fh:
                envelope = json.load(fh)
        except (OSError, json.JSONDecodeError) as exc:
            raise TaskError(f"certificate {path}: {exc}") from exc
        label = path
    kind = envelope.get("kind")
    problem = envelope.get("problem")
    payload = envelope.get("payload")
    evidence = {"certificate": label, "kind": kind, "problem": problem}
    try:
        if kind == "map-lift":
            if problem not in fx.lifts:
                raise TaskError(f"unknown lift problem {problem!r}")
            prob = fx.lifts[problem]
            cert = map_lift_cert_from_json(prob["functor"], prob["source"],
                                           prob["target"], payload)
            ok, why = verify_map_lift(prob["functor"], prob["source"],
                                      prob["target"], prob["map"], cert)
        elif kind == "complex-lift":
            if problem not in fx.complex_lifts:
                raise TaskError(f"unknown complex lift problem {problem!r}")
            prob = fx.complex_lifts[problem]
            cert = complex_lift_cert_from_json(prob["functor"],
                                               prob["target"], payload)
            ok, why = verify_complex_lift(prob["functor"], prob["target"],
                                          cert)
        elif kind == "triangle":
            if problem not in fx.triangles:
                raise TaskError(f"unknown triangle {problem!r}")
            tri = fx.triangles[problem]
            verdict = triangle_cert_from_json(tri["alpha"], tri["beta"],
                                              tri["gamma"], payload)
            ok = verify_triangle_certificate(tri["alpha"], tri["beta"],
                                             tri["gamma"], verdict)
            why = "replayed" if ok else "certificate arithmetic failed"
        else:
            raise TaskError(f"certificate kind {kind!r} is not recognized")
    except TaskError:
        raise
    except ValueError as exc:
        # a certificate that cannot be rebuilt against the named problem
        # is refuted, not an execution failure
        ok, why = False, f"certificate does not fit the problem: {exc}"
    evidence["reason"] = why or ("replayed" if ok else "rejected")
    return Report(task["id"], "verify-certificate",
                  "certified" if ok else "refuted", evidence)


_HANDLERS = {
    "check-hepi": _run_check_hepi,
    "lift-map": _run_lift_map,
    "lift-complex": _run_lift_complex,
    "recognize-triangle": _run_recognize_triangle,
    "check-ideal": _run_check_ideal,
    "telescope-report": _run_telescope,
    "almost-report": _run_almost,
    "verify-contraction": _run_verify_contraction,
    "verify-certificate": _run_verify_certificate,
}


def run_task(fx: FixtureFile, task: Dict) -> Report:
    command = task.get("command")
    if command not in _HANDLERS:
        raise TaskError(f"unknown command {command!r}")
    start = time.monotonic()
    report = _HANDLERS[command](fx, task)
    report.elapsed = time.monotonic() - start
    return report


def worker_count() -> int:
    raw = os.environ.get(WORKERS_ENV, "1")
    try:
        n = int(raw)
    except ValueError:
        raise TaskError(f"{WORKERS_ENV} must be an integer, got {raw!r}")
    if n < 1:
        raise TaskError(f"{WORKERS_ENV} must be at least 1")
    return n


def run_tasks(fx: FixtureFile, tasks: Optional[Sequence[Dict]] = None,
              workers: Optional[int] = None) -> List[Report]:
    if tasks is None:
        tasks = fx.tasks
    if workers is None:
        workers = worker_count()
    if workers == 1 or len(tasks) <= 1:
        return [run_task(fx, t) for t in tasks]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        futures = [pool.submit(run_task, fx, t) for t in tasks]
        return [f.result() for f in futures]
