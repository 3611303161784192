"""End-to-end regression over the bundled examples."""

from __future__ import annotations

from . import expr as ex
from .extremal import drift, ensemble_trajectories
from .family import generator_of
from .files import CorpusEntry, corpus_names, load_entry
from .homogeneity import detect_weights, scaling_integral
from .invariance import check_family, check_generator
from .linalg import in_span
from .noether import FirstIntegral, first_integral, gauge_adjust, hamiltonian_generator, verify_symbolic


class EmptyCorpus(ValueError):
    pass


def simulate_integrals(p, integrals, trials: int, seed: int, step: float):
    """Worst drift per integral over one shared seeded ensemble."""
    trajs, blowups = ensemble_trajectories(p, trials, seed, step)
    worst = []
    for c in integrals:
        w = None
        for j, traj in trajs.items():
            rep = drift(traj, c)
            rep.worst_trial = j
            if w is None or rep.relative_drift > w.relative_drift:
                w = rep
        if w is not None:
            w.trials = trials
            w.blowups = len(blowups)
        worst.append(w)
    return worst, blowups


def run_entry(entry: CorpusEntry, *, trials=20, seed=42, step=1e-3, tol=1e-6, directory=None) -> dict:
    p = entry.problem
    stages = {}
    ok = True

    generator = entry.generator
    if entry.family is not None:
        rep = check_family(p, entry.family)
        stages["check_family"] = rep.passed
        ok &= rep.passed
        derived = generator_of(entry.family)
        if generator is None:
            generator = derived
        else:
            same = derived == generator
            stages["family_generator_match"] = same
            ok &= same
    rep = check_generator(p, generator)
    stages["check_generator"] = rep.passed
    ok &= rep.passed

    c = first_integral(p, generator, check=False)
    match = c.value == entry.expected_integral
    stages["integral_matches"] = match
    ok &= match
    residual = verify_symbolic(p, c, generator)
    stages["verify_symbolic"] = residual.is_zero()
    ok &= residual.is_zero()

    if entry.gauge_variant:
        base = load_entry(entry.gauge_variant["base"], directory)
        base_c = first_integral(base.problem, base.generator, check=False)
        adjusted = gauge_adjust(base_c, ex.parse(entry.gauge_variant["delta_f"]))
        same = adjusted.value == c.value
        stages["gauge_adjust_matches"] = same
        ok &= same

    weights_out = None
    if entry.expected_weights is not None:
        basis = detect_weights(p)
        rows = [w.as_vector() for w in basis]
        target = entry.expected_weights.as_vector()
        found = in_span(rows, target, len(target))
        integral_ok = found and scaling_integral(p, entry.expected_weights).value == entry.expected_integral
        stages["weights_found"] = found
        stages["scaling_integral_matches"] = integral_ok
        ok &= found and integral_ok
        weights_out = [w.primitive().to_dict() for w in basis]

    drift_out = None
    if entry.numeric:
        integrals = [FirstIntegral(entry.expected_integral, "user", p)]
        labels = ["integral"]
        if p.is_autonomous():
            integrals.append(first_integral(p, hamiltonian_generator(p), check=False))
            labels.append("minus_hamiltonian")
        worst, blowups = simulate_integrals(p, integrals, trials, seed, step)
        drift_out = {}
        for label, w in zip(labels, worst):
            passed = w is not None and w.relative_drift <= tol
            stages[f"drift_{label}"] = passed
            ok &= passed
            drift_out[label] = None if w is None else w.to_dict()

    out = {
        "name": entry.name,
        "status": "pass" if ok else "fail",
        "stages": stages,
        "first_integral": str(c.value),
        "expected_integral": str(entry.expected_integral),
    }
    if weights_out is not None:
        out["weights"] = weights_out
    if drift_out is not None:
        out["drift"] = drift_out
    return out


def run_corpus(directory=None, **kwargs) -> dict:
    names = corpus_names(directory)
    if not names:
        raise EmptyCorpus("corpus directory contains no entries")
    results = [run_entry(load_entry(n, directory), directory=directory, **kwargs) for n in names]
    passed = sum(r["status"] == "pass" for r in results)
    return {"entries": results, "passed": passed, "total": len(results), "status": "pass" if passed == len(results) else "fail"}
