import argparse
import itertools
import math
import os
import sys
from fractions import Fraction
import numpy as np
from jmnet import __version__
from jmnet._defaults import EXACT_TOL, ROUND_TRIP_TOL, TABLE_TOL, DEFAULT_CONVENTION
from jmnet._helpers import info, error, parse_floats, show_debug
from jmnet.quantum import CONVENTIONS
from jmnet.measurements import (ejm_basis, bell_basis, validate_basis, ejm_partial_blochs,
                                tetrahedron_permutation, schmidt_coefficients, EJM_SCHMIDT, PARTIAL_BLOCH_LENGTH)
from jmnet.network import (triangle_correlation, triangle_stats, cell_classes, chain_correlation,
                           bsm_triangle_reference, CorrelationTable, NetworkScenario, SETTINGS_PRESETS, TRIANGLE)
from jmnet.inequalities import bilocality_value, conditioned_chsh, threshold_report
from jmnet.local_models import (symmetric_q_model, q_model_abc_rate, q_model_table_rows, q_model_optimum,
                                asymmetric_model, evaluate_model)
from jmnet.fitting import FitConfig, fit_3local, DISTANCES
from jmnet.reports import RunReport, FORMATS
from jmnet.exceptions import JMNetError

help_text = """
jmnet Command Line Interface
============================
Computes the correlations of joint measurements in quantum networks and compares them with
classical (n-local) models.

Exit codes: 0 when every check passes, 1 when a check fails, 2 on a usage error.
"""

#: Built-in fit targets. Each maps to a table factory and the distance a 3-local model reaches.
BUILTIN_TARGETS = {
    "bsm-triangle": (lambda convention: bsm_triangle_reference(), 1e-2),
    "ejm-triangle": (lambda convention: triangle_correlation(ejm_basis(convention)), None),
    "asymmetric-model": (lambda convention: evaluate_model(asymmetric_model()), 1e-9),
    "grouped-ejm-triangle": (lambda convention: triangle_correlation(ejm_basis(convention))
                             .group_outcomes([[0, 1], [2, 3]]), 1e-3),
}

#: ``(alpha_2, beta_2, gamma_2) -> (p(a=b), p(a=b=c))`` of the q-model, conditioned on the bits.
Q_MODEL_ROWS = {
    (0, 0, 0): (Fraction(7, 16), Fraction(13, 64)),
    (0, 0, 1): (Fraction(1), Fraction(1, 4)),
    (0, 1, 0): (Fraction(1, 4), Fraction(1, 4)),
    (0, 1, 1): (Fraction(5, 8), Fraction(1, 4)),
    (1, 0, 0): (Fraction(1, 4), Fraction(1, 4)),
    (1, 0, 1): (Fraction(5, 8), Fraction(1, 4)),
    (1, 1, 0): (Fraction(1, 4), Fraction(1, 4)),
    (1, 1, 1): (Fraction(7, 16), Fraction(13, 64)),
}


def _farthest(values, expected):
    return max(values, key=lambda value: abs(value - expected))


def cmd_validate_ejm(args):
    basis = ejm_basis(args.convention)
    basis_report = validate_basis(basis)
    permutation = tetrahedron_permutation(basis)
    report = RunReport("validate-ejm", {"convention": args.convention},
                       {"basis": basis_report.to_dict(), "tetrahedron_permutation": list(permutation),
                        "partial_blochs": [[list(first.as_array()), list(second.as_array())]
                                           for first, second in ejm_partial_blochs(basis)]})
    report.check("orthonormality deviation", 0.0, basis_report.orthonormality_deviation, ROUND_TRIP_TOL)
    report.check("completeness deviation", 0.0, basis_report.completeness_deviation, ROUND_TRIP_TOL)
    for label, ket in zip(basis.outcome_labels, basis.kets):
        first, second = schmidt_coefficients(ket)
        report.check(f"outcome {label} first Schmidt coefficient", EJM_SCHMIDT[0], first, EXACT_TOL)
        report.check(f"outcome {label} second Schmidt coefficient", EJM_SCHMIDT[1], second, EXACT_TOL)
    for label, norms in zip(basis.outcome_labels, basis_report.partial_bloch_norms):
        report.check(f"outcome {label} partial Bloch length", PARTIAL_BLOCH_LENGTH,
                     _farthest(norms, PARTIAL_BLOCH_LENGTH),
                     ROUND_TRIP_TOL)
    report.check("partial Bloch directions cover the tetrahedron", 4,
                 len({index for index in permutation if index is not None}), 0)
    return report


def cmd_triangle(args):
    W = parse_floats(args.visibility)
    basis = ejm_basis(args.convention) if args.measurement == "ejm" else bell_basis()
    table = triangle_correlation(basis, W)
    stats = triangle_stats(table)
    classes = cell_classes(table)
    report = RunReport("triangle", {"measurement": args.measurement, "visibilities": W,
                                    "convention": args.convention},
                       {"stats": stats.to_dict(), "cell_classes": classes}, table=table)
    if args.measurement == "ejm" and all(w == 1.0 for w in W):
        for name, expected in (("all_equal", Fraction(25, 256)), ("two_equal", Fraction(1, 256)),
                               ("all_distinct", Fraction(5, 256))):
            report.check(f"p cells {name}", expected, _farthest(classes[name], expected), EXACT_TOL)
        report.check("p(a=k, b=k)", Fraction(7, 64), _farthest(stats.p_pair_equal_k["AB"], 7 / 64), EXACT_TOL)
        report.check("p(a=b)", Fraction(7, 16), stats.p_ab_equal, EXACT_TOL)
        report.check("p(a=k | b=c=k)", Fraction(25, 28), _farthest(stats.p_conditional_triple, 25 / 28), EXACT_TOL)
        report.check("p(a=b=c)", Fraction(25, 64), stats.p_all_equal, EXACT_TOL)
    return report


def cmd_chain(args):
    W = parse_floats(args.visibility) if args.visibility else [1.0] * args.n
    settings = SETTINGS_PRESETS[args.inequality]
    table = chain_correlation(args.n, W, settings)
    product = float(np.prod(W))
    report = RunReport("chain", {"n": args.n, "visibilities": W, "inequality": args.inequality}, table=table)
    if args.inequality == "chsh":
        results = [conditioned_chsh(table, outcomes, settings)
                   for outcomes in itertools.product(range(4), repeat=args.n - 1)]
        report.results["chsh"] = [result.to_dict() for result in results]
        report.results["value"] = results[0].value
        report.results["violated"] = results[0].violated
        for result in results:
            outcomes = result.settings_used["middle_outcomes"]
            report.check(f"CHSH given middle outcomes {outcomes}", 2 * math.sqrt(2) * product, result.value,
                         TABLE_TOL)
    else:
        result = bilocality_value(table, settings_used={"preset": "bilocal"})
        report.results["bilocality"] = result.to_dict()
        report.results["value"] = result.value
        report.results["violated"] = result.violated
        report.check("sqrt|I| + sqrt|J|", math.sqrt(2 * product), result.value, TABLE_TOL)
    if args.n == 2:
        scenario = "chsh_swap" if args.inequality == "chsh" else "bilocal"
        report.results["thresholds"] = threshold_report(scenario, W[0], W[1]).to_dict()
    return report


def default_model_path(out):
    """``report.json -> report.model.json``; ``None`` when the report goes to stdout."""
    if out is None:
        return None
    return os.path.splitext(out)[0] + ".model.json"


def _q_model_checks(report, q):
    table = evaluate_model(symmetric_q_model(q))
    enumerated = triangle_stats(table).p_all_equal
    report.check(f"p(a=b=c) at q={q}", q_model_abc_rate(q), enumerated, EXACT_TOL)
    return enumerated


def cmd_models(args):
    if args.model == "q-model":
        grid = [args.q] if args.q is not None else [k / 10 for k in range(11)]
        report = RunReport("models q-model", {"q": grid})
        report.results["p_all_equal"] = {str(q): _q_model_checks(report, q) for q in grid}
        if 0.5 in grid:
            report.check("p(a=b=c) at q=1/2", Fraction(61, 256), report.results["p_all_equal"]["0.5"], EXACT_TOL)
        rows = q_model_table_rows(grid[0])
        report.results["rows"] = [row._asdict() for row in rows]
        for row in rows:
            p_ab, p_abc = Q_MODEL_ROWS[row.bits]
            report.check(f"row {row.bits} p(a=b)", p_ab, row.p_ab_equal, EXACT_TOL)
            report.check(f"row {row.bits} p(a=b=c)", p_abc, row.p_all_equal, EXACT_TOL)
        q_best, rate = q_model_optimum()
        report.results["optimum"] = {"q": q_best, "p_all_equal": rate}
        report.check("argmax q", 0.5, q_best, 1e-6)
        report.check("maximum p(a=b=c)", Fraction(61, 256), rate, EXACT_TOL)
        return report

    if args.model == "asymmetric":
        table = evaluate_model(asymmetric_model())
        stats = triangle_stats(table)
        zeros = sum(1 for value in cell_classes(table)["all_distinct"] if value <= EXACT_TOL)
        report = RunReport("models asymmetric", {}, {"stats": stats.to_dict(), "all_distinct_zeros": zeros},
                           table=table)
        report.check("p(a=b=c)", Fraction(1, 2), stats.p_all_equal, EXACT_TOL)
        report.check("p(a=b)", Fraction(1, 2), stats.p_ab_equal, EXACT_TOL)
        report.check("p(a=b=c | a=b)", 1, stats.p_all_equal / stats.p_ab_equal, EXACT_TOL)
        report.check("zero all-distinct cells", 20, zeros, 0)
        return report

    cfg = FitConfig.from_json(args.config) if args.config else FitConfig()
    for name in ("restarts", "max_cardinality", "min_cardinality", "max_iterations", "distance", "n_jobs"):
        if getattr(args, name) is not None:
            setattr(cfg, name, getattr(args, name))
    if args.seed is not None:
        cfg.seed = args.seed
    cfg.min_cardinality = min(cfg.min_cardinality, cfg.max_cardinality)
    if args.target in BUILTIN_TARGETS:
        factory, expected_distance = BUILTIN_TARGETS[args.target]
        target = factory(args.convention)
    else:
        target, expected_distance = CorrelationTable.from_json(args.target), None
    result = fit_3local(target, cfg)
    report = RunReport("models fit", {"target": args.target, "config": cfg.to_dict()},
                       {"distance": result.distance, "converged": result.converged,
                        "best_model": result.model.to_dict(),
                        "trace": [record._asdict() for record in result.trace]})
    if expected_distance is not None and cfg.distance == "total_variation":
        report.check(f"distance to {args.target}", 0.0, result.distance, expected_distance)
    model_out = args.model_out or default_model_path(args.out)
    if model_out:
        result.model.to_json(model_out)
        report.results["model_file"] = os.path.basename(model_out)
        info(f"Best model written to {model_out}")
    return report


def cmd_scenario(args):
    scenario = NetworkScenario.from_json(args.file)
    table = scenario.evaluate()
    results = {"scenario": scenario.to_dict()}
    if scenario.topology == TRIANGLE:
        results["stats"] = triangle_stats(table).to_dict()
    return RunReport("scenario", {"file": os.path.basename(args.file)}, results, table=table)


def _add_common_arguments(parser, defaults=True):
    """
    Adds the options accepted both before and after the subcommand. The subcommand copies use
    ``argparse.SUPPRESS`` so that they only override what was given before the subcommand.
    """
    def default(value):
        return value if defaults else argparse.SUPPRESS

    parser.add_argument("--format", choices=FORMATS, default=default("json"), help="output format (default json)")
    parser.add_argument("--out", default=default(None), help="write the report to this file instead of stdout")
    parser.add_argument("--seed", type=int, default=default(None),
                        help="seed of the random restarts (unsigned 64-bit)")
    parser.add_argument("--convention", choices=CONVENTIONS, default=default(DEFAULT_CONVENTION),
                        help="single-qubit convention of the EJM")
    parser.add_argument("--verbose", action="store_true", default=default(False), help="show debug messages")


def _parser():
    common = argparse.ArgumentParser(add_help=False)
    _add_common_arguments(common, defaults=False)

    parser = argparse.ArgumentParser(prog="jmnet", description=help_text,
                                     formatter_class=argparse.RawDescriptionHelpFormatter)
    parser.add_argument("--version", action="version", version=f"jmnet {__version__}")
    _add_common_arguments(parser)
    commands = parser.add_subparsers(dest="command", required=True)

    validate = commands.add_parser("validate-ejm", parents=[common], help="check the properties of the EJM")
    validate.set_defaults(func=cmd_validate_ejm)

    triangle = commands.add_parser("triangle", parents=[common], help="correlations of the triangle network")
    triangle.add_argument("--measurement", choices=("ejm", "bsm"), default="ejm")
    triangle.add_argument("--visibility", "--w", default="1,1,1", help="three comma separated visibilities")
    triangle.set_defaults(func=cmd_triangle)

    chain = commands.add_parser("chain", parents=[common], help="CHSH or bilocality in a chain of sources")
    chain.add_argument("--n", type=int, default=2, help="number of sources")
    chain.add_argument("--visibility", "--w", default=None, help="one visibility per source")
    chain.add_argument("--inequality", choices=("chsh", "bilocal"), default="bilocal")
    chain.set_defaults(func=cmd_chain)

    models = commands.add_parser("models", parents=[common], help="3-local models of the triangle")
    models.add_argument("model", choices=("q-model", "asymmetric", "fit"))
    models.add_argument("--q", type=float, default=None, help="bias of the q-model (default: grid of 11 points)")
    models.add_argument("--target", default="bsm-triangle",
                        help=f"built-in target ({', '.join(BUILTIN_TARGETS)}) or a table JSON file")
    models.add_argument("--restarts", type=int, default=None)
    models.add_argument("--max-cardinality", dest="max_cardinality", type=int, default=None)
    models.add_argument("--min-cardinality", dest="min_cardinality", type=int, default=None)
    models.add_argument("--max-iterations", dest="max_iterations", type=int, default=None)
    models.add_argument("--distance", choices=DISTANCES, default=None)
    models.add_argument("--jobs", dest="n_jobs", type=int, default=None, help="restarts run at the same time")
    models.add_argument("--config", default=None, help="JSON file with fit settings")
    models.add_argument("--model-out", dest="model_out", default=None,
                        help="write the best model to this file (default: next to --out)")
    models.set_defaults(func=cmd_models)

    scenario = commands.add_parser("scenario", parents=[common], help="evaluate a scenario JSON file")
    scenario.add_argument("file")
    scenario.set_defaults(func=cmd_scenario)
    return parser


def main(argv=None):
    args = _parser().parse_args(argv)
    if args.verbose:
        show_debug(True)
    try:
        report = args.func(args)
        text = report.write(args.out, args.format)
    except (JMNetError, ValueError, OSError) as e:
        error(e)
        return 2
    if args.out is None:
        sys.stdout.write(text if text.endswith("\n") else text + "\n")
    else:
        info(f"Report written to {args.out}")
    return report.exit_code


if __name__ == "__main__":
    sys.exit(main())
