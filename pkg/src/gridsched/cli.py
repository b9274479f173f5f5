"""``gridsched`` command line: load, build, solve or import, check, report, compare."""
from __future__ import annotations

import argparse
import logging
import os
import sys
import time
from dataclasses import dataclass, replace
from datetime import datetime, timezone
from pathlib import Path

from . import analysis, mps
from .analysis import csvout
from .case import Case, CaseError, case_from_file, load_case, validate_case
from .formulation import Formulation, Variant, build
from .scenarios import synthesize_scenarios
from .solver import (INFEASIBLE, TIMEOUT_NO_SOLUTION, SolutionFileError, SolverError,
                     parse_solution_file, solve_mip)

log = logging.getLogger("gridsched")

EXIT_OK = 0
EXIT_INFEASIBLE = 2
EXIT_TIMEOUT = 3
EXIT_CHECK_FAILED = 4
EXIT_CONFIG = 64
EXIT_UNKNOWN_VARIABLE = 65

DEFAULT_GAP = 0.01
DEFAULT_TIME_LIMIT = 2500.0
TOL_INTERNAL = 1e-6
TOL_IMPORTED = 1e-4
BUNDLED_CASES = Path(__file__).resolve().parent / "cases"


class ConfigError(Exception):
    pass


def resolve_case(name: str) -> Path:
    """The path itself, else under ``$GRIDSCHED_CASE_DIR``, else among the bundled cases."""
    path = Path(name)
    if path.is_file():
        return path
    env = os.environ.get("GRIDSCHED_CASE_DIR")
    candidates = [Path(env) / name, Path(env) / path.name] if env else []
    candidates += [BUNDLED_CASES / path.name]
    for cand in candidates:
        if cand.is_file():
            return cand
    raise ConfigError(f"case file {name!r} not found")


@dataclass
class RunConfig:
    case_path: Path
    variant: Variant
    gap: float = DEFAULT_GAP
    time_limit: float = DEFAULT_TIME_LIMIT
    contingencies: object = None
    scenarios: str = "embedded"
    solver: str = "internal"
    solution: Path | None = None
    aliases: Path | None = None
    out: Path = Path("out")
    tie_pnr: bool | None = None
    contingency_limit: str | None = None
    horizon: int | None = None
    scenario_limit: int | None = None
    timings: bool = False
    seed: int | None = None

    def describe(self, case: Case) -> list[str]:
        """Effective settings: flags where given, else the case's options block."""
        opts = case.options
        pick = lambda flag, option: option if flag is None else flag  # noqa: E731
        return [f"case_path: {self.case_path}", f"variant: {self.variant.name}",
                f"gap_target: {self.gap}", f"time_limit_s: {self.time_limit}",
                f"contingencies: {pick(self.contingencies, opts.contingencies)}",
                f"scenarios: {self.scenarios}", f"seed: {self.seed}", f"solver: {self.solver}",
                f"tie_pnr_across_scenarios: {pick(self.tie_pnr, opts.tie_pnr_across_scenarios)}",
                f"contingency_limit: {pick(self.contingency_limit, opts.contingency_limit)}",
                f"theta_cap: {opts.theta_cap}",
                f"horizon: {case.horizon}", f"scenario_count: {case.scenarios.count}"]


def _contingency_arg(text: str | None):
    if text is None or text in ("all_lines", "none"):
        return text
    try:
        return [int(k) for k in text.split(",") if k.strip()]
    except ValueError:
        raise ConfigError(f"--contingencies must be all_lines, none or a comma list of line ids, "
                          f"got {text!r}") from None


def _load(cfg: RunConfig) -> Case:
    case = case_from_file(cfg.case_path)
    spec = cfg.scenarios
    if spec.startswith("csv:"):
        csv_path = Path(spec[4:])
        text = case_text_with_csv(cfg.case_path, csv_path)
        case = load_case(text, base_dir=csv_path.parent)
    elif spec.startswith("synth:"):
        try:
            pen, blocks, seed = spec[6:].split(",")
            pen, blocks, seed = float(pen), int(blocks), int(seed)
        except ValueError:
            raise ConfigError("--scenarios synth:<penetration>,<blocks>,<seed>") from None
        cfg.seed = seed
        try:
            case = replace(case, scenarios=synthesize_scenarios(case, pen, blocks, seed))
        except ValueError as exc:
            raise ConfigError(str(exc)) from None
    elif spec != "embedded":
        raise ConfigError(f"unknown scenario source {spec!r}")
    if cfg.horizon is not None or cfg.scenario_limit is not None:
        try:
            keep = None if cfg.scenario_limit is None else list(range(cfg.scenario_limit))
            if keep is not None and not 1 <= len(keep) <= case.scenarios.count:
                raise ValueError(f"--scenario-limit must lie in 1..{case.scenarios.count}")
            case = case.restricted(cfg.horizon, keep)
        except ValueError as exc:
            raise ConfigError(str(exc)) from None
    return case


def case_text_with_csv(case_path: Path, csv_path: Path) -> str:
    """Case text with the scenario block pointed at another CSV file."""
    import yaml
    doc = yaml.safe_load(Path(case_path).read_text())
    probs = (doc.get("scenarios") or {}).get("probabilities", [1.0])
    doc["scenarios"] = {"probabilities": probs, "csv": csv_path.name}
    return yaml.safe_dump(doc, sort_keys=False)


def _build(case: Case, cfg: RunConfig) -> Formulation:
    try:
        return build(case, cfg.variant, cfg.contingencies, contingency_limit=cfg.contingency_limit,
                     tie_pnr_across_scenarios=cfg.tie_pnr)
    except ValueError as exc:
        raise ConfigError(str(exc)) from None


def _options(cfg: RunConfig) -> dict:
    return {"contingency_limit": cfg.contingency_limit,
            "tie_pnr_across_scenarios": cfg.tie_pnr}


@dataclass
class Outcome:
    code: int
    report: analysis.ScheduleReport | None = None
    gap: float | None = None
    walltime: float | None = None
    fingerprint: str = ""


def run_solve(cfg: RunConfig) -> Outcome:
    case = _load(cfg)
    form = _build(case, cfg)
    cfg.out.mkdir(parents=True, exist_ok=True)
    summary = [f"timestamp: {datetime.now(timezone.utc).isoformat(timespec='seconds')}",
               f"case: {case.name}", f"fingerprint: {case.fingerprint()}"] + cfg.describe(case)
    summary.append(f"contingency_list: {form.contingencies}")
    summary.append(f"columns: {form.model.n_vars}")
    summary.append(f"rows: {form.model.n_rows}")

    if cfg.solver == "export_only":
        mps.export(form.model, cfg.out, "model")
        summary.append("status: exported")
        _summary(cfg.out, summary)
        print(f"wrote {cfg.out / 'model.mps'} and {cfg.out / 'model.aliases'}")
        return Outcome(EXIT_OK, fingerprint=case.fingerprint())

    if cfg.solver == "import":
        if cfg.solution is None:
            raise ConfigError("--solver import needs --solution")
        aliases = _aliases_for(cfg)
        try:
            x = parse_solution_file(Path(cfg.solution).read_text(), form.model, aliases)
        except SolutionFileError as exc:
            print(f"error: {exc}", file=sys.stderr)
            return Outcome(EXIT_UNKNOWN_VARIABLE)
        tol, gap, wall, objective = TOL_IMPORTED, cfg.gap, None, form.model.objective_value(x)
        summary += ["status: imported", f"objective: {objective!r}",
                    f"gap: {gap} (as reported for the external run)"]
    else:
        start = time.perf_counter()
        try:
            res = solve_mip(form.model, gap_target=cfg.gap, time_limit=cfg.time_limit)
        except SolverError as exc:
            print(f"error: {exc}", file=sys.stderr)
            return Outcome(EXIT_INFEASIBLE)
        wall = time.perf_counter() - start
        summary += [f"status: {res.status}", f"objective: {res.objective!r}",
                    f"bound: {res.bound!r}", f"gap: {res.gap!r}",
                    f"nodes: {res.nodes_explored}", f"walltime_s: {wall:.3f}"]
        if res.status == INFEASIBLE:
            _summary(cfg.out, summary)
            print("model is infeasible", file=sys.stderr)
            return Outcome(EXIT_INFEASIBLE)
        if res.status == TIMEOUT_NO_SOLUTION or not res.has_solution:
            _summary(cfg.out, summary)
            print("limit reached without a feasible solution", file=sys.stderr)
            return Outcome(EXIT_TIMEOUT)
        x, tol, gap, objective = res.x, TOL_INTERNAL, res.gap, res.objective

    assignment = analysis.named(form.model, x)
    report = analysis.schedule_report(case, cfg.variant, assignment, tol, cfg.contingencies,
                                      **_options(cfg))
    name = cfg.variant.name
    csvout.write_costs(cfg.out / "costs.csv",
                       [(name, report.costs, gap, wall if cfg.timings else None)])
    csvout.write_curtailment(cfg.out / "curtailment.csv", name, report.curtailment)
    csvout.write_soc(cfg.out / "soc.csv", name, report.ess)
    csvout.write_switching(cfg.out / "switching.csv", name, report.switching)
    csvout.write_violations(cfg.out / "violations.csv", report.violations)
    summary += [f"checker_tolerance: {tol}", f"violations: {len(report.violations)}",
                f"expected_cost: {report.costs['total']!r}",
                f"objective_minus_cost: {objective - report.costs['total']!r}",
                f"avg_curtailment_mw: {report.curtailment.average_mw!r}",
                f"max_nodal_residual: {report.nodal_residual!r}"]
    _summary(cfg.out, summary)
    if report.violations:
        print(f"checker rejected the solution: {len(report.violations)} violation(s), "
              f"first {report.violations[0]}", file=sys.stderr)
        return Outcome(EXIT_CHECK_FAILED, report, gap, wall, case.fingerprint())
    print(f"{name}: cost {report.costs['total']:.2f}, gap {gap:.4g}, "
          f"avg curtailment {report.curtailment.average_mw:.2f} MW")
    return Outcome(EXIT_OK, report, gap, wall, case.fingerprint())


def _aliases_for(cfg: RunConfig):
    path = cfg.aliases
    if path is None:
        beside = Path(cfg.solution).with_name("model.aliases")
        path = beside if beside.is_file() else None
    return mps.read_alias_map(Path(path).read_text()) if path else None


def _summary(out: Path, lines: list[str]):
    (out / "run.summary").write_text("\n".join(lines) + "\n")


def run_check(cfg: RunConfig, tol: float) -> int:
    case = _load(cfg)
    form = _build(case, cfg)
    try:
        x = parse_solution_file(Path(cfg.solution).read_text(), form.model, _aliases_for(cfg))
    except SolutionFileError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_UNKNOWN_VARIABLE
    violations = analysis.check_feasibility(case, cfg.variant, analysis.named(form.model, x), tol,
                                            cfg.contingencies, **_options(cfg))
    cfg.out.mkdir(parents=True, exist_ok=True)
    csvout.write_violations(cfg.out / "violations.csv", violations)
    if violations:
        print(f"{len(violations)} violation(s); first: {violations[0]}")
        return EXIT_CHECK_FAILED
    print("solution satisfies every constraint")
    return EXIT_OK


def run_compare(cfg: RunConfig, variants: list[Variant], solutions: Path | None) -> int:
    if len(variants) < 2:
        raise ConfigError("compare needs at least two variants")
    runs = []
    for v in variants:
        sub = replace(cfg, variant=v, out=cfg.out / v.name.lower())
        if solutions is not None:
            sub.solver, sub.solution = "import", solutions / f"{v.name.lower()}.sol"
            if not sub.solution.is_file():
                raise ConfigError(f"missing solution file {sub.solution}")
        outcome = run_solve(sub)
        if outcome.code != EXIT_OK:
            return outcome.code
        runs.append(analysis.VariantRun(v.name, outcome.report, outcome.gap,
                                        outcome.walltime if cfg.timings else None,
                                        outcome.fingerprint))
    comparison = analysis.compare_variants(runs)
    csvout.write_comparison(cfg.out / "comparison.csv", comparison)
    print(comparison.render())
    return EXIT_OK if comparison.verdict else EXIT_CHECK_FAILED


def cmd_validate(path: Path) -> int:
    try:
        case = case_from_file(path)
    except CaseError as exc:
        print("FAIL")
        for e in exc.errors:
            print(f"  error: {e}")
        return EXIT_CONFIG
    report = validate_case(case)
    print(report.render())
    return EXIT_OK if report.ok else EXIT_CONFIG


def _parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="gridsched", description=__doc__)
    p.add_argument("-v", "--verbose", action="store_true")
    sub = p.add_subparsers(dest="command", required=True)

    def common(sp, variant=True):
        sp.add_argument("case")
        if variant:
            sp.add_argument("--variant", required=True,
                            help="sscuc, sscuc-p, sscuc-c or sscuc-pc")
        sp.add_argument("--contingencies", help="all_lines, none, or comma list of line ids")
        sp.add_argument("--scenarios", default="embedded",
                        help="embedded, csv:<path> or synth:<penetration>,<blocks>,<seed>")
        sp.add_argument("--tie-pnr", action="store_true", default=None,
                        help="one preventive topology shared by all scenarios")
        sp.add_argument("--contingency-limit", choices=["emergency", "normal"])
        sp.add_argument("--horizon", type=int, help="keep only the first N periods")
        sp.add_argument("--scenario-limit", type=int, help="keep only the first N scenarios")
        sp.add_argument("--out", default="out")

    for name in ("solve", "export"):
        sp = sub.add_parser(name)
        common(sp)
        sp.add_argument("--gap", type=float, default=DEFAULT_GAP)
        sp.add_argument("--time-limit", type=float, default=DEFAULT_TIME_LIMIT)
        if name == "solve":
            sp.add_argument("--solver", choices=["internal", "export_only", "import"],
                            default="internal")
            sp.add_argument("--solution", help="solution file for --solver import")
            sp.add_argument("--aliases", help="alias map (default: model.aliases beside it)")
        sp.add_argument("--timings", action="store_true",
                        help="record wall time in costs.csv (breaks byte-identical reruns)")

    sp = sub.add_parser("check")
    common(sp)
    sp.add_argument("solution")
    sp.add_argument("--aliases")
    sp.add_argument("--tol", type=float, default=TOL_IMPORTED)

    sp = sub.add_parser("compare")
    common(sp, variant=False)
    sp.add_argument("--variants", default="sscuc,sscuc-p,sscuc-c,sscuc-pc")
    sp.add_argument("--gap", type=float, default=DEFAULT_GAP)
    sp.add_argument("--time-limit", type=float, default=DEFAULT_TIME_LIMIT)
    sp.add_argument("--solutions", help="directory of <variant>.sol files to import instead")
    sp.add_argument("--timings", action="store_true")

    sp = sub.add_parser("validate")
    sp.add_argument("case")
    return p


def _config(args, variant: Variant) -> RunConfig:
    if getattr(args, "gap", 0.0) < 0:
        raise ConfigError("--gap must be nonnegative")
    if getattr(args, "time_limit", 1.0) <= 0:
        raise ConfigError("--time-limit must be positive")
    return RunConfig(
        case_path=resolve_case(args.case), variant=variant,
        gap=getattr(args, "gap", DEFAULT_GAP),
        time_limit=getattr(args, "time_limit", DEFAULT_TIME_LIMIT),
        contingencies=_contingency_arg(args.contingencies), scenarios=args.scenarios,
        solver=getattr(args, "solver", "internal"),
        solution=Path(args.solution) if getattr(args, "solution", None) else None,
        aliases=Path(args.aliases) if getattr(args, "aliases", None) else None,
        out=Path(args.out), tie_pnr=args.tie_pnr, contingency_limit=args.contingency_limit,
        horizon=args.horizon, scenario_limit=args.scenario_limit,
        timings=getattr(args, "timings", False))


def main(argv=None) -> int:
    parser = _parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_OK if exc.code == 0 else EXIT_CONFIG
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        if args.command == "validate":
            return cmd_validate(resolve_case(args.case))
        if args.command == "compare":
            variants = [Variant.parse(v) for v in args.variants.split(",")]
            cfg = _config(args, variants[0])
            return run_compare(cfg, variants, Path(args.solutions) if args.solutions else None)
        cfg = _config(args, Variant.parse(args.variant))
        if args.command == "export":
            cfg.solver = "export_only"
        if args.command == "check":
            return run_check(cfg, args.tol)
        return run_solve(cfg).code
    except (ConfigError, CaseError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG


if __name__ == "__main__":
    sys.exit(main())
