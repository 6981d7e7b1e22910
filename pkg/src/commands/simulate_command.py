"""Simulate Command - Integrate an Euler-Poincaré flow and write its trajectory as CSV"""

import logging
import os
import tempfile
from pathlib import Path
from typing import Any, Dict

from pydantic import ValidationError

from src.lie.dynamics import integrate
from src.lie.errors import CsdpError, SingularMatrixError
from src.models.schemas import ConfigDoc, Tolerances
from src.models.trajectory import Trajectory
from .base_command import EXIT_OK, EXIT_SINGULAR, EXIT_USAGE, BaseCommand

logger = logging.getLogger(__name__)


def write_trajectory_csv(trajectory: Trajectory, output: Path) -> None:
    """Write to a temporary file next to `output`, then rename it into place"""
    output.parent.mkdir(parents=True, exist_ok=True)
    handle = tempfile.NamedTemporaryFile(
        mode="w", newline="", encoding="utf-8", dir=output.parent, prefix=f".{output.name}.", delete=False
    )
    try:
        with handle:
            trajectory.write_csv(handle)
        # temporary files are created 0600; give the result the usual umask-based mode
        umask = os.umask(0)
        os.umask(umask)
        os.chmod(handle.name, 0o666 & ~umask)
        os.replace(handle.name, output)
    except BaseException:
        Path(handle.name).unlink(missing_ok=True)
        raise


def summary_line(trajectory: Trajectory) -> str:
    return (
        f"final_time={trajectory.samples[-1].time:.17g} "
        f"max_energy_drift={trajectory.max_energy_drift():.17g} "
        f"max_noether_residual={trajectory.max_noether_residual():.17g}"
    )


class SimulateCommand(BaseCommand):
    """
    Simulation command that:
    - Loads and validates a JSON configuration
    - Integrates the requested Euler-Poincaré flow with RK4
    - Writes the trajectory CSV atomically
    - Summarizes final time, energy drift and Noether residual
    """

    def __init__(self, tolerances: Tolerances = Tolerances()):
        super().__init__(
            name="simulate",
            description="Integrates Euler-Poincaré dynamics and writes trajectory CSV"
        )
        self.tolerances = tolerances

    async def process(self, request: Dict[str, Any]) -> Dict[str, Any]:
        """
        Process a simulation request

        Args:
            request: Contains config_path

        Returns:
            Response with the output path, summary line and exit code
        """
        request_id = request.get("request_id", "SIMULATE_REQUEST")
        config_path = Path(request.get("config_path", ""))

        try:
            config = ConfigDoc.model_validate_json(config_path.read_text(encoding="utf-8"))
        except (OSError, ValidationError) as e:
            logger.error(f"[{request_id}] Cannot load config {config_path}: {str(e)}")
            return self.failure(request_id, e, f"Invalid or missing config: {config_path}", EXIT_USAGE)

        logger.info(
            f"[{request_id}] Simulating {config.instance.value}({config.n}) {config.orientation.value} "
            f"h={config.integrator.h} steps={config.integrator.steps}"
        )

        try:
            trajectory = integrate(config, self.tolerances)
        except SingularMatrixError as e:
            logger.error(f"[{request_id}] Singular reconstruction at step {e.step}: {str(e)}")
            response = self.failure(request_id, e, f"Singular reconstruction at step {e.step}", EXIT_SINGULAR)
            response["step"] = e.step
            return response
        except (CsdpError, ValueError) as e:
            logger.error(f"[{request_id}] Invalid simulation setup: {str(e)}")
            return self.failure(request_id, e, "Invalid simulation setup", EXIT_USAGE)

        try:
            output = Path(config.output)
            write_trajectory_csv(trajectory, output)
        except OSError as e:
            logger.error(f"[{request_id}] Cannot write {config.output}: {str(e)}")
            return self.failure(request_id, e, f"Cannot write output: {config.output}", EXIT_USAGE)

        summary = summary_line(trajectory)
        self.log_action("simulate", {
            "request_id": request_id,
            "instance": config.instance.value,
            "n": config.n,
            "orientation": config.orientation.value,
            "samples": len(trajectory.samples),
            "output": str(output),
        })

        return {
            "request_id": request_id,
            "success": True,
            "trajectory": trajectory,
            "output_path": str(output),
            "output": summary,
            "message": "Simulation complete",
            "exit_code": EXIT_OK,
        }
