"""Main orchestrator: executes one RunConfig and writes its artifacts"""

from pathlib import Path
from typing import Dict, List, Optional, Tuple

from src.core.config import Config
from src.core.errors import ConfigError, InvalidSpec
from src.core.logger import log_check_table, log_section, log_stats, log_success, log_warning, setup_logger
from src.models.cone import HalfSpaceCone
from src.models.interpolant import CaseKind, InterpolationPlan
from src.models.mapping import CounterexampleOptions, HalfSpaceHost, RayMapping
from src.models.report import CheckReport
from src.models.run_config import BuildMode, Command, Precision, RunConfig
from src.models.vectors import DualFunctional, FamilyKind, FamilySpec
from src.services.convex_construction import ConvexBuilder
from src.services.data_writer import DataWriter, read_csv
from src.services.divergence import (
    CounterexampleBuilder,
    MappingVerifier,
    expected_gap,
    extend_to_halfspace,
    extension_consistency,
    quotient_trace,
    verify_K_convexity,
)
from src.services.sequence_spaces import LinfDemo
from src.services.spec_loader import SpecLoader, parse_family, parse_probe
from src.utils.run_versioning import RunVersioning
from src.utils.sampling import log_spaced
from src.utils.scalars import get_backend, parse_scalar_list
from src.utils.validation import PlanValidator, run_checks

EXTENSION_SAMPLES = 50


class ForgeOrchestrator:
    """Runs a command, its verification checks, and the artifact writes"""

    def __init__(self, run_config: RunConfig, config: Optional[Config] = None):
        """Initialize orchestrator

        Args:
            run_config: Parsed command-line run
            config: Environment configuration (creates default if None)
        """
        self.config = config or Config()
        self.run_config = run_config
        self.logger = setup_logger("ForgeOrchestrator")
        self.backend = get_backend(run_config.precision.value)
        self.writer = DataWriter(run_config.out_dir)
        self.plan_validator = PlanValidator()
        self.convex_builder = ConvexBuilder()

        if (run_config.precision is Precision.FLOAT64
                and run_config.depth > self.config.float_depth_cap):
            raise ConfigError(
                f"depth {run_config.depth} exceeds the float64 cap {self.config.float_depth_cap}; "
                f"use rational precision"
            )

    def run(self) -> int:
        """Execute the command

        Returns:
            0 when every check passed, 1 otherwise (artifacts are still written)
        """
        rc = self.run_config
        log_section(f"wscforge {rc.command.value}",
                    f"precision={rc.precision.value} depth={rc.depth} seed={rc.seed}")

        handlers = {
            Command.BUILD_CONVEX: self._build_convex,
            Command.COUNTEREXAMPLE: self._counterexample,
            Command.VERIFY: self._verify,
            Command.EXTEND: self._extend,
            Command.DEMO_LINF: self._demo_linf,
        }
        reports = handlers[rc.command]()

        outcome = {r.name: r.passed for r in reports}
        exit_code = 0 if all(outcome.values()) else 1
        self.writer.write_json("checks_report.json", {"checks": [r.to_dict() for r in reports]})
        settings = rc.to_dict()
        if "target_z" in settings and settings["target_z"] is None:
            settings["target_z"] = self.config.target_z
        fingerprint = RunVersioning.fingerprint(settings, {"input": rc.input_path, "plan": rc.plan_path})
        self.writer.write_summary(fingerprint, rc.command.value, outcome, exit_code)

        failed = len(reports) - sum(outcome.values())
        log_check_table(reports)
        log_stats({
            "Checks": len(reports),
            "Passed": len(reports) - failed,
            "Failed": failed,
            "Files written": len(self.writer.files_written),
            "Output directory": str(rc.out_dir),
        }, title="Run summary")
        if failed:
            log_warning(f"{failed} of {len(reports)} checks failed")
        else:
            log_success(f"All {len(reports)} checks passed")
        return exit_code

    # build-convex

    def _build_convex(self) -> List[CheckReport]:
        rc = self.run_config
        if not rc.sequence:
            raise ConfigError("build-convex needs --sequence")
        values = parse_scalar_list(rc.sequence, self.backend)

        if rc.mode is BuildMode.INTEGER_KNOTS:
            result = self.convex_builder.integer_knots(values)
            self.writer.write_json("plan.json", result.to_dict())
            rows = [["k", "m_k", "a_m"]]
            for k, m in enumerate(result.indices, 1):
                rows.append([str(k), str(m), self.backend.format(values[m - 1])])
            self.writer.write_csv("plan.csv", rows)
            return self.convex_builder.reports(result.interpolant)

        if rc.mode is BuildMode.SUP_OF_LINES:
            if not rc.knots:
                raise ConfigError("sup-of-lines mode needs --knots")
            knots = parse_scalar_list(rc.knots, self.backend)
            g = self.convex_builder.sup_of_lines(knots, values)
            self.writer.write_json("plan.json", {"mode": "sup-of-lines", **g.to_dict()})
            return self.convex_builder.reports(g)

        plan = self.convex_builder.plan(
            values,
            self.backend.coerce(rc.target_z or self.config.target_z),
            q_choice=self.backend.coerce(rc.q) if rc.q is not None else None,
            depth=rc.depth,
            expected_case=None if rc.case == "auto" else CaseKind.parse(rc.case),
        )
        self._write_plan(plan, {"mode": "plan"})
        g = self.convex_builder.sup_of_lines(plan.knots_t, plan.values_a)
        return [self._validation_report(plan), *self.convex_builder.reports(g)]

    # counterexample

    def _counterexample_inputs(self) -> Tuple[FamilySpec, DualFunctional, CounterexampleOptions]:
        rc = self.run_config
        overrides = {
            "target_z": rc.target_z,
            "q": rc.q,
            "case": rc.case if rc.case != "auto" else None,
            "depth": rc.depth,
        }
        if rc.input_path is not None:
            return SpecLoader(rc.input_path).load_counterexample(
                rc.depth, self.backend, overrides,
                defaults={"target_z": self.config.target_z, "max_family_depth": rc.max_family_depth},
            )

        family = parse_family(rc.family, rc.depth, self.backend)
        probe = parse_probe(rc.probe, self.backend)
        options = CounterexampleOptions(
            target_z=self.backend.coerce(rc.target_z or self.config.target_z),
            q=self.backend.coerce(rc.q) if rc.q is not None else None,
            depth=rc.depth,
            case=None if rc.case == "auto" else CaseKind.parse(rc.case),
            max_family_depth=rc.max_family_depth,
        )
        return family, probe, options

    def _counterexample(self) -> List[CheckReport]:
        family, probe, options = self._counterexample_inputs()
        cone, mapping = CounterexampleBuilder(family, probe, self.backend).build(options)
        self._write_plan(mapping.plan, {
            "family": family.to_dict(),
            "probe": probe.to_dict(),
            "options": options.to_dict(),
            "cone": cone.to_dict(),
            "precision": self.run_config.precision.value,
        })
        trace = quotient_trace(mapping, cone)
        self.writer.write_csv("quotients.csv", trace.csv_rows())
        return self._mapping_checks(cone, mapping, list(self.run_config.checks))

    def _gap_floor(self, mapping: RayMapping):
        rc = self.run_config
        if rc.gap_floor is not None:
            return self.backend.coerce(rc.gap_floor)
        if mapping.family_ref.kind is FamilyKind.C0_PARTIAL_SUMS:
            return expected_gap(mapping)
        return self.backend.coerce(self.config.gap_floor)

    def _mapping_checks(self, cone: HalfSpaceCone, mapping: RayMapping,
                        selected: List[str]) -> List[CheckReport]:
        rc = self.run_config
        verifier = MappingVerifier(mapping, cone)
        reports = run_checks(verifier.checks(selected, rc.trials, rc.seed, self._gap_floor(mapping)))
        reports.insert(0, self._validation_report(mapping.plan))
        if verifier.convexity is not None:
            self.writer.write_json("convexity_report.json", verifier.convexity.to_dict())
        return reports

    def _validation_report(self, plan: InterpolationPlan) -> CheckReport:
        validation = self.plan_validator.validate_plan(plan)
        report = CheckReport(name="plan_valid", checked=1, details={"warnings": validation["warnings"]})
        for issue in validation["issues"]:
            report.record(issue=issue)
        return report

    def _write_plan(self, plan: InterpolationPlan, extra: Dict):
        self.writer.write_json("plan.json", {**extra, "plan": plan.to_dict()})
        self.writer.write_csv("plan.csv", plan.csv_rows())
        self.logger.info(f"Plan {plan.case}: indices {list(plan.sub_indices)}")

    # verify

    def _verify(self) -> List[CheckReport]:
        rc = self.run_config
        if rc.plan_path is None:
            raise ConfigError("verify needs --plan")
        bundle = SpecLoader(rc.plan_path).load()
        if "plan" not in bundle:
            raise InvalidSpec(f"{rc.plan_path} holds no plan")
        stored = InterpolationPlan.from_dict(bundle["plan"], self.backend)
        reports = [self._validation_report(stored)]

        if "family" not in bundle or "probe" not in bundle:
            g = self.convex_builder.sup_of_lines(stored.knots_t, stored.values_a)
            reports.extend(self.convex_builder.reports(g))
            reports.extend(self._csv_roundtrip(stored, None))
            return sorted(reports, key=lambda r: r.name)

        family = parse_family(bundle["family"], stored.depth, self.backend)
        probe = parse_probe(bundle["probe"], self.backend)
        options = CounterexampleOptions.from_dict(bundle.get("options"), self.backend)
        cone, mapping = CounterexampleBuilder(family, probe, self.backend).build(options)

        match = CheckReport(name="plan_match", checked=1)
        if mapping.plan.to_dict() != stored.to_dict():
            match.record(reason="rebuilt plan differs from the stored plan")
        reports.append(match)
        reports.extend(self._mapping_checks(cone, mapping, list(rc.checks))[1:])
        reports.extend(self._csv_roundtrip(stored, (cone, mapping)))
        return sorted(reports, key=lambda r: r.name)

    def _csv_roundtrip(self, plan: InterpolationPlan,
                       built: Optional[Tuple[HalfSpaceCone, RayMapping]]) -> List[CheckReport]:
        """Re-read plan.csv and quotients.csv next to the plan and compare with the rebuild"""
        folder = Path(self.run_config.plan_path).parent
        report = CheckReport(name="csv_roundtrip")

        plan_csv = folder / "plan.csv"
        if plan_csv.exists():
            for k, row in enumerate(read_csv(plan_csv)):
                report.checked += 1
                if k >= plan.depth or (
                    int(row["m_k"]) != plan.sub_indices[k]
                    or self.backend.coerce(row["t_k"]) != plan.knots_t[k]
                    or self.backend.coerce(row["a_k"]) != plan.values_a[k]
                ):
                    report.record(file="plan.csv", row=k + 1)

        quotients_csv = folder / "quotients.csv"
        if quotients_csv.exists() and built is not None:
            trace = quotient_trace(built[1], built[0])
            for k, row in enumerate(read_csv(quotients_csv)):
                report.checked += 1
                if k >= len(trace) or (
                    self.backend.coerce(row["t_k"]) != trace.ts[k]
                    or self.backend.coerce(row["scalarized"]) != trace.scalarized[k]
                ):
                    report.record(file="quotients.csv", row=k + 1)

        if report.checked == 0:
            report.details["note"] = "no CSV artifacts next to the plan"
        return [report]

    # extend

    def _extend(self) -> List[CheckReport]:
        rc = self.run_config
        family, probe, options = self._counterexample_inputs()
        cone, mapping = CounterexampleBuilder(family, probe, self.backend).build(options)
        if rc.direction:
            h = tuple(parse_scalar_list(rc.direction, self.backend))
            host = HalfSpaceHost(rc.dimension, h)
        else:
            host = HalfSpaceHost.axis(rc.dimension, self.backend)
        extended = extend_to_halfspace(mapping, host)

        # second-smallest knot keeps float rounding of <t h, h> above the covered range
        ts = log_spaced(mapping.knots_t[-2], 2 * mapping.knots_t[0], EXTENSION_SAMPLES, self.backend)
        consistency = extension_consistency(extended, ts, rc.seed)
        convexity = verify_K_convexity(extended, cone, rc.trials, rc.seed)

        self._write_plan(mapping.plan, {"host": host.to_dict(), "probe": probe.to_dict()})
        self.writer.write_json("extension_report.json", {
            "host": host.to_dict(),
            "consistency": consistency.to_dict(),
            "convexity": convexity.to_dict(),
        })
        return sorted([consistency, *convexity.checks], key=lambda r: r.name)

    # demo-linf

    def _demo_linf(self) -> List[CheckReport]:
        rc = self.run_config
        demo = LinfDemo(rc.n_max, self.backend)
        gaps = demo.gaps()
        rows = [["n", "gap"]] + [[str(n), self.backend.format(g)] for n, g in enumerate(gaps, 1)]
        self.writer.write_csv("linf_demo.csv", rows)

        gap_report = demo.gap_report(gaps)
        order_report = demo.order_report()
        self.writer.write_json("linf_report.json", {
            "n_max": rc.n_max,
            "checks": [gap_report.to_dict(), order_report.to_dict()],
        })
        return [gap_report, order_report]
