"""Validation utilities for plans and concurrent verification checks"""

from concurrent.futures import ThreadPoolExecutor, as_completed
from typing import Any, Callable, Dict, List

from src.core.errors import ForgeError
from src.core.logger import setup_logger
from src.models.interpolant import CaseKind, InterpolationPlan
from src.models.report import CheckReport
from src.utils.scalars import backend_of


class PlanValidator:
    """Validate a loaded or freshly built interpolation plan"""

    def __init__(self):
        self.logger = setup_logger(self.__class__.__name__)

    def validate_plan(self, plan: InterpolationPlan) -> Dict[str, Any]:
        """Validate the structure of a plan

        Args:
            plan: Plan to validate

        Returns:
            Validation results dictionary
        """
        results = {
            "is_valid": True,
            "issues": [],
            "warnings": []
        }

        lengths = {len(plan.sub_indices), len(plan.knots_t), len(plan.values_a)}
        if len(lengths) != 1:
            results["is_valid"] = False
            results["issues"].append("indices, knots and values differ in length")
            return results

        if plan.depth < 2:
            results["is_valid"] = False
            results["issues"].append(f"Plan has {plan.depth} knots; need at least 2")
            return results

        # Knots must be positive and strictly decreasing
        if any(t <= 0 for t in plan.knots_t):
            results["is_valid"] = False
            results["issues"].append("Non-positive knot")
        if any(plan.knots_t[i + 1] >= plan.knots_t[i] for i in range(plan.depth - 1)):
            results["is_valid"] = False
            results["issues"].append("Knots are not strictly decreasing")

        # Family indices strictly increasing
        if any(plan.sub_indices[i + 1] <= plan.sub_indices[i] for i in range(plan.depth - 1)):
            results["is_valid"] = False
            results["issues"].append("Indices are not strictly increasing")

        q = plan.case.q
        z = plan.limit_z
        if plan.case.kind is CaseKind.NONINC_HIGH and not q > z:
            results["is_valid"] = False
            results["issues"].append(f"NonincHigh needs q > z, got q={q}, z={z}")
        if plan.case.kind is CaseKind.INCR_LOW and not 0 < q < z:
            results["is_valid"] = False
            results["issues"].append(f"IncrLow needs 0 < q < z, got q={q}, z={z}")

        # Values must follow t_k and the case's node factor
        if plan.selected_values and len(plan.selected_values) == plan.depth:
            backend = backend_of(plan.knots_t[0])
            kappa = plan.case.node_factor()
            for k, (t, a, z_k) in enumerate(zip(plan.knots_t, plan.values_a, plan.selected_values), 1):
                if not backend.equal(a, kappa * t * z_k):
                    results["is_valid"] = False
                    results["issues"].append(f"a_{k} does not equal kappa * t_{k} * z_{k}")
                    break
        else:
            results["warnings"].append("No selected values recorded; closed forms not checked")

        if not plan.constant and len(plan.thresholds) != plan.depth - 2:
            results["warnings"].append(
                f"{len(plan.thresholds)} thresholds recorded for {plan.depth} knots"
            )

        if not results["is_valid"]:
            self.logger.debug(f"Invalid plan: {results['issues']}")
        return results


def run_checks(checks: Dict[str, Callable[[], CheckReport]], max_workers: int = 4) -> List[CheckReport]:
    """Run independent checks in parallel

    A check that raises is reported as failed rather than aborting the
    others.

    Args:
        checks: check name -> zero-argument callable returning a CheckReport
        max_workers: Maximum number of parallel workers

    Returns:
        Reports sorted by check name
    """
    logger = setup_logger("CheckRunner")
    reports = []

    with ThreadPoolExecutor(max_workers=max_workers) as executor:
        future_to_name = {executor.submit(fn): name for name, fn in checks.items()}

        for future in as_completed(future_to_name):
            name = future_to_name[future]
            try:
                result = future.result()
                reports.extend(result if isinstance(result, list) else [result])
            except Exception as e:
                # unexpected errors get a traceback; the remaining checks still run
                logger.error(f"Check {name} raised {e.__class__.__name__}: {e}",
                             exc_info=not isinstance(e, ForgeError))
                report = CheckReport(name=name)
                report.record(error=e.__class__.__name__, message=str(e))
                reports.append(report)

    reports.sort(key=lambda r: r.name)
    failed = [r.name for r in reports if not r.passed]
    if failed:
        logger.warning(f"Failed checks: {', '.join(failed)}")
    return reports
