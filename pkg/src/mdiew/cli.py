"""Command-line front end. Reports are JSON on stdout, summaries on stderr."""

from __future__ import annotations

import argparse
import json
import sys
from typing import Sequence

import numpy as np

from . import catalog, qmath, scenario_io, sensitivity
from .chi import compute_chi
from .game import GameScenario, simulate, teleport_effects
from .noise import CERTIFY_MARGIN, NoiseModel, apply_noise, evaluate_criterion
from .scenario_io import SCHEMA_VERSION, ScenarioDocument, ScenarioError
from .witness import WEAK_OPT_TOL, product_minimum, reconstruct, verify_weak_optimality

EXIT_OK, EXIT_INTERNAL, EXIT_INPUT = 0, 1, 2

TOLERANCES = {
    "validation": qmath.TOL,
    "eigenvalue_merge": qmath.MERGE_TOL,
    "weak_optimality": WEAK_OPT_TOL,
    "condition": sensitivity.COND_TOL,
    "floor_zero": sensitivity.FLOOR_TOL,
    "certify_margin": CERTIFY_MARGIN,
}


def _enc(m: np.ndarray) -> list:
    return [[[float(z.real), float(z.imag)] for z in row] for row in np.asarray(m, dtype=complex)]


def _read_document(path: str) -> ScenarioDocument:
    text = sys.stdin.read() if path == "-" else open(path, encoding="utf-8").read()
    return scenario_io.parse(text)


def _report(command: str, body: dict, seed: int | None = None) -> dict:
    out = {"command": command, "schema_version": SCHEMA_VERSION, "tolerances": TOLERANCES}
    if seed is not None:
        out["seed"] = seed
    out.update(body)
    return out


def _say(msg: str) -> None:
    print(msg, file=sys.stderr)


def cmd_reconstruct(args) -> dict:
    doc = _read_document(args.file)
    w = reconstruct(doc.decomposition())
    pm = product_minimum(w, seed=args.seed)
    verdict = verify_weak_optimality(w, pm.value)
    _say(f"lambda_min = {w.lambda_min:.12g}, separable floor = {pm.value:.3g}, "
         f"weakly optimal: {verdict.passed}")
    return _report("reconstruct", {
        "dims": list(w.dims),
        "operator": _enc(w.matrix),
        "lambda_min": w.lambda_min,
        "separable_floor": pm.value,
        "weakly_optimal": verdict.passed,
    }, args.seed)


def cmd_chi(args) -> dict:
    doc = _read_document(args.file)
    c = compute_chi(doc.beta)
    _say(f"chi = {c.value:.12g} at a = {c.argmin_a}, b = {c.argmin_b} ({c.tie_count} optimal assignments)")
    return _report("chi", {
        "value": c.value,
        "argmin_a": list(c.argmin_a),
        "argmin_b": list(c.argmin_b),
        "tie_count": c.tie_count,
    })


def _lab_inputs(doc: ScenarioDocument, d):
    nm = doc.noise_model()
    if nm is not None and nm.has_noise_states:
        return apply_noise(d, nm)
    return d.tau, d.omega


def cmd_simulate(args) -> dict:
    doc = _read_document(args.file)
    if not doc.has_game:
        raise ScenarioError("simulate needs shared_state and both effects")
    d = doc.decomposition()
    tau, omega = _lab_inputs(doc, d)
    table = simulate(GameScenario(d, tau, omega, doc.shared_state, doc.alice_effect, doc.bob_effect))
    _say(f"score = {table.score:.12g}")
    return _report("simulate", {"values": table.values.tolist(), "score": table.score})


def _attack_dict(att: sensitivity.AttackCertificate) -> dict:
    return {
        "epsilon": att.epsilon,
        "achieved_score": att.achieved_score,
        "min_overlap": att.min_overlap,
        "construction_case": att.construction_case,
        "notes": list(att.notes),
        "a_effect": _enc(att.a_effect),
        "b_effect": _enc(att.b_effect),
        "tau": [_enc(t) for t in att.tau],
        "omega": [_enc(w) for w in att.omega],
    }


def cmd_sensitivity(args) -> dict:
    doc = _read_document(args.file)
    d = doc.decomposition()
    comps = doc.separable_components
    if args.separable_components:
        with open(args.separable_components, encoding="utf-8") as fh:
            data = scenario_io.load_json(fh.read())
        if isinstance(data, dict):
            data = data.get("separable_components")
        comps = scenario_io.parse_components(data)
    try:
        cert = sensitivity.certify(d, comps, seed=args.seed)
    except qmath.ValidationError as exc:
        raise ScenarioError(str(exc)) from None
    body: dict = {
        "verdict": cert.verdict,
        "condition": cert.condition,
        "corollary4": sensitivity.check_corollary4(d),
        "witnessing_indices": None if cert.witnessing_indices is None else list(cert.witnessing_indices),
        "attack": None,
    }
    if cert.witnessing_indices is not None and d.tau_labels is not None and d.omega_labels is not None:
        i, j = cert.witnessing_indices
        body["witnessing_labels"] = [d.tau_labels[i], d.omega_labels[j]]
    if cert.a_tilde is not None:
        body["a_tilde"] = _enc(cert.a_tilde)
        body["b_tilde"] = _enc(cert.b_tilde)
    if cert.a_tilde is not None:
        att = sensitivity.construct_attack(d, cert, args.epsilon)
        body["attack"] = _attack_dict(att)
        body["attack_verified"] = sensitivity.verify_attack(d, att)
        _say(f"{cert.verdict}: attack at epsilon = {args.epsilon} scores {att.achieved_score:.6g} "
             f"with min overlap {att.min_overlap:.9g}")
    else:
        _say(cert.verdict)
    return _report("sensitivity", body, args.seed)


def cmd_bound(args) -> dict:
    doc = _read_document(args.file)
    d = doc.decomposition()
    nm = doc.noise_model()
    p_a = args.p_a if args.p_a is not None else (nm.p_a if nm else None)
    p_b = args.p_b if args.p_b is not None else (nm.p_b if nm else None)
    if p_a is None or p_b is None:
        raise ScenarioError("noise: p_a and p_b are required (in the document or via --p-a/--p-b)")
    nm = NoiseModel(p_a, p_b, nm.noise_tau if nm else None, nm.noise_omega if nm else None)
    c = compute_chi(d.beta)
    w = reconstruct(d)
    rep = evaluate_criterion(d, nm, c, w, doc.shared_state, doc.alice_effect, doc.bob_effect)
    score = "not simulated" if rep.score is None else f"{rep.score:.12g}"
    _say(f"score {score} vs bound {rep.bound:.12g}: {rep.verdict}; threshold {rep.threshold:.12g}")
    return _report("bound", {
        "p_a": p_a,
        "p_b": p_b,
        "chi": c.value,
        "lambda_min": w.lambda_min,
        "modified_bound": rep.bound,
        "detection_threshold": rep.threshold,
        "threshold_met": rep.threshold_met,
        "score": rep.score,
        "verdict": rep.verdict,
        "simulated": rep.score is not None,
    })


def catalog_document(name: str, p_a=None, p_b=None, teleport=False, attack=False) -> ScenarioDocument:
    sc = catalog.load(name)
    d = sc.decomposition
    doc = scenario_io.from_decomposition(
        d, name=name, separable_components=[(w, p.copy(), q.copy()) for w, p, q in sc.separable_components]
    )
    if teleport:
        doc.alice_effect, doc.bob_effect = teleport_effects(d.d_a, d.d_b)
        doc.shared_state = qmath.projector(qmath.max_entangled(d.d_a))
        if p_a is None:
            p_a = p_b = 0.0
    if attack:
        if name != "xz_example":
            raise ScenarioError(f"catalog: {name!r} has no attack family")
        minus = qmath.projector(catalog.KET_MINUS)
        doc.alice_effect = np.kron(minus, np.eye(2))
        doc.bob_effect = np.kron(np.eye(2), minus)
        doc.shared_state = qmath.kron(qmath.projector(catalog.KET0), qmath.projector(catalog.KET0))
        noise_tau, noise_omega = catalog.xz_attack_noise()
        doc.noise_tau, doc.noise_omega = list(noise_tau), list(noise_omega)
    if p_a is not None or p_b is not None:
        doc.p_a = 0.0 if p_a is None else p_a
        doc.p_b = 0.0 if p_b is None else p_b
        if teleport and doc.noise_tau is None:
            # Noise states equal to the targets: the lab inputs stay exact.
            doc.noise_tau = [t.copy() for t in d.tau]
            doc.noise_omega = [w.copy() for w in d.omega]
    return doc


def cmd_catalog(args):
    try:
        doc = catalog_document(args.name, args.p_a, args.p_b, args.teleport, args.attack)
    except KeyError as exc:
        raise ScenarioError(f"catalog: {exc.args[0]}") from None
    if args.emit:
        _say(f"emitting scenario document {args.name}")
        return scenario_io.serialize(doc)
    sc = catalog.load(args.name)
    w = reconstruct(sc.decomposition)
    c = compute_chi(sc.decomposition.beta)
    _say(f"{args.name}: {sc.decomposition.shape[0]}x{sc.decomposition.shape[1]} coefficients, "
         f"chi = {c.value:.6g}, lambda_min = {w.lambda_min:.6g}")
    return _report("catalog", {
        "name": args.name,
        "shape": list(sc.decomposition.shape),
        "chi": c.value,
        "lambda_min": w.lambda_min,
        "max_deviation_from_reference": float(np.max(np.abs(w.matrix - sc.operator))),
        "reference_values": {k: {"value": v, "source": src} for k, (v, src) in sc.reference_values.items()},
    })


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="mdiew",
        description="Tools for measurement-device-independent entanglement witnesses",
    )
    parser.add_argument("--seed", type=int, default=0, help="seed for randomized searches")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("reconstruct", help="witness operator, lambda_min, separable floor")
    p.add_argument("file", help="scenario document, or - for stdin")
    p.set_defaults(func=cmd_reconstruct)

    p = sub.add_parser("chi", help="binary separable floor of the coefficient matrix")
    p.add_argument("file")
    p.set_defaults(func=cmd_chi)

    p = sub.add_parser("simulate", help="game correlation table and score")
    p.add_argument("file")
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("sensitivity", help="sensitivity certificate and explicit attack")
    p.add_argument("file")
    p.add_argument("--epsilon", type=float, default=0.01)
    p.add_argument("--separable-components", metavar="FILE")
    p.set_defaults(func=cmd_sensitivity)

    p = sub.add_parser("bound", help="noise-robust bound, detection threshold, verdict")
    p.add_argument("file")
    p.add_argument("--p-a", type=float)
    p.add_argument("--p-b", type=float)
    p.set_defaults(func=cmd_bound)

    p = sub.add_parser("catalog", help="built-in scenarios")
    p.add_argument("name", choices=catalog.NAMES)
    p.add_argument("--emit", action="store_true", help="print the scenario document")
    p.add_argument("--p-a", type=float)
    p.add_argument("--p-b", type=float)
    p.add_argument("--teleport", action="store_true",
                   help="add |Phi+> as shared state with maximally entangled effects")
    p.add_argument("--attack", action="store_true",
                   help="add the XZ attack effects and noise states")
    p.set_defaults(func=cmd_catalog)
    return parser


def run(argv: Sequence[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    if getattr(args, "epsilon", 0.5) is not None and not (0 < getattr(args, "epsilon", 0.5) <= 1):
        _say("error: --epsilon must lie in (0, 1]")
        return EXIT_INPUT
    try:
        out = args.func(args)
    except sensitivity.InconsistencyError as exc:
        _say(f"internal inconsistency: {exc}")
        return EXIT_INTERNAL
    except (ScenarioError, qmath.ValidationError, OSError) as exc:
        _say(f"error: {exc}")
        return EXIT_INPUT
    print(out if isinstance(out, str) else json.dumps(out, indent=1))
    return EXIT_OK


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
