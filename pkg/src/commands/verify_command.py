"""Verify Command - Run the structure and closed-form check suites for an instance"""

import asyncio
import logging
from typing import Any, Dict, List, Tuple

from pydantic import ValidationError

from src.lie.csdp_core import (
    ACTION_PAIR_CHECKS,
    STRUCTURE_CHECKS,
    ActionPair,
    Check,
    check_rng,
    left_factor,
    right_factor,
)
from src.lie.instances import CLOSED_FORM_CHECKS, make_instance
from src.models.schemas import CheckResult, RunReport, Tolerances, VerifyRequest
from .base_command import EXIT_CHECKS_FAILED, EXIT_OK, EXIT_USAGE, BaseCommand

logger = logging.getLogger(__name__)


class VerifyCommand(BaseCommand):
    """
    Verification command that:
    - Builds the requested instance
    - Runs action-pair laws on the instance and on its two semi-direct factors
    - Runs group, bracket, adjoint, duality and factor-sum checks
    - Compares closed-form operators against the generic ones
    - Reports one line per check, sorted by name
    """

    def __init__(self, tolerances: Tolerances = Tolerances()):
        super().__init__(
            name="verify",
            description="Verifies the algebraic structure of a centered semi-direct product"
        )
        self.tolerances = tolerances

    async def process(self, request: Dict[str, Any]) -> Dict[str, Any]:
        """
        Process a verification request

        Args:
            request: Contains instance, n, seed and samples

        Returns:
            Response with the report, its rendering and the exit code
        """
        request_id = request.get("request_id", "VERIFY_REQUEST")

        try:
            params = VerifyRequest.model_validate(
                {key: value for key, value in request.items() if key != "request_id"}
            )
        except ValidationError as e:
            logger.error(f"[{request_id}] Invalid verify request: {str(e)}")
            return self.failure(request_id, e, "Invalid verify flags", EXIT_USAGE)

        try:
            act = make_instance(params.instance, params.n)
            tasks = self._plan(act)
            logger.info(f"[{request_id}] Running {len(tasks)} checks on {act.name}({act.n})")

            results = await asyncio.gather(*[
                asyncio.to_thread(self._evaluate, target, check, label, params.seed, index, params.samples)
                for index, (target, check, label) in enumerate(tasks)
            ])
            report = RunReport(
                subject=f"{act.name}({act.n})",
                checks=sorted(results, key=lambda result: result.name),
            )

            self.log_action("verify_instance", {
                "request_id": request_id,
                "instance": act.name,
                "n": act.n,
                "checks": len(report.checks),
                "failures": [check.name for check in report.failures()],
            })

            return {
                "request_id": request_id,
                "success": report.passed,
                "report": report,
                "output": report.render(),
                "message": "All checks passed" if report.passed else "Some checks failed",
                "exit_code": EXIT_OK if report.passed else EXIT_CHECKS_FAILED,
            }

        except Exception as e:
            logger.error(f"[{request_id}] Verify Command error: {str(e)}")
            return self.failure(request_id, e, "Failed to run verification", EXIT_USAGE)

    def _plan(self, act: ActionPair) -> List[Tuple[ActionPair, Check, str]]:
        tasks = [(act, check, check.name) for check in ACTION_PAIR_CHECKS + STRUCTURE_CHECKS + CLOSED_FORM_CHECKS]
        for factor, prefix in ((left_factor(act), "left_factor"), (right_factor(act), "right_factor")):
            tasks += [(factor, check, f"{prefix}.{check.name}") for check in ACTION_PAIR_CHECKS]
        return tasks

    def _evaluate(
        self,
        act: ActionPair,
        check: Check,
        label: str,
        seed: int,
        index: int,
        samples: int,
    ) -> CheckResult:
        result = check.evaluate(act, check_rng(seed, index), samples, self.tolerances)
        return result.model_copy(update={"name": label})
