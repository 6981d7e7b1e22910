"""Orchestrator - Routes CLI requests to the appropriate command processor"""

import logging
from typing import Any, Dict
from datetime import datetime, timezone

from src.models.schemas import Tolerances
from .base_command import EXIT_USAGE, BaseCommand
from .jet_command import JetCommand
from .simulate_command import SimulateCommand
from .verify_command import VerifyCommand

logger = logging.getLogger(__name__)


class Orchestrator(BaseCommand):
    """
    Master dispatcher that:
    - Assigns a request id to every invocation
    - Routes the request to the verify, simulate or jet-compose processor
    - Converts unknown commands and unexpected errors into usage failures
    """

    def __init__(self, tolerances: Tolerances = Tolerances()):
        super().__init__(
            name="Orchestrator",
            description="Routes requests to command processors"
        )
        self.commands: Dict[str, BaseCommand] = {
            "verify": VerifyCommand(tolerances),
            "simulate": SimulateCommand(tolerances),
            "jet-compose": JetCommand(),
        }
        self.request_id_counter = 0

    async def process(self, request: Dict[str, Any]) -> Dict[str, Any]:
        """
        Process incoming request by routing to its command

        Args:
            request: Dictionary with a `command` key plus the command's own fields

        Returns:
            The command's response dictionary, always carrying `exit_code`
        """
        self.request_id_counter += 1
        command = request.get("command", "unknown")
        request_id = request.get("request_id") or (
            f"{command}_{datetime.now(timezone.utc).strftime('%Y%m%dT%H%M%S')}_{self.request_id_counter}"
        )

        logger.info(f"[{request_id}] Orchestrator processing command: {command}")

        handler = self.commands.get(command)
        if not handler:
            logger.warning(f"[{request_id}] Unknown command: {command}")
            return {
                "request_id": request_id,
                "success": False,
                "error": f"Unknown command: {command}",
                "supported_commands": list(self.commands.keys()),
                "exit_code": EXIT_USAGE,
            }

        try:
            payload = {key: value for key, value in request.items() if key != "command"}
            response = await handler.process({**payload, "request_id": request_id})

            self.log_action("route_request", {
                "request_id": request_id,
                "command": command,
                "success": response.get("success", False),
                "exit_code": response.get("exit_code"),
            })

            return response

        except Exception as e:
            logger.error(f"[{request_id}] Orchestrator error: {str(e)}")
            return self.failure(request_id, e, "Failed to process request", EXIT_USAGE)
