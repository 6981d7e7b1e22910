"""Base command class for all CLI command processors"""

from abc import ABC, abstractmethod
from typing import Any, Dict, List
from datetime import datetime, timezone
import logging

logger = logging.getLogger(__name__)

# Exit codes shared by every command
EXIT_OK = 0
EXIT_CHECKS_FAILED = 1
EXIT_USAGE = 2
EXIT_SINGULAR = 3


class BaseCommand(ABC):
    """Abstract base class for all command processors"""

    def __init__(self, name: str, description: str):
        self.name = name
        self.description = description
        self.created_at = datetime.now(timezone.utc)
        self.audit_trail: List[Dict[str, Any]] = []

    @abstractmethod
    async def process(self, request: Dict[str, Any]) -> Dict[str, Any]:
        """Process a request and return a response carrying `success` and `exit_code`"""
        pass

    def log_action(self, action: str, details: Dict[str, Any]) -> Dict[str, Any]:
        """Log a command action for the audit trail"""
        log_entry = {
            "timestamp": datetime.now(timezone.utc).isoformat(),
            "command": self.name,
            "action": action,
            "request_id": details.get("request_id"),
            "details": details,
        }
        self.audit_trail.append(log_entry)
        logger.info(f"Command Action: {log_entry}")
        return log_entry

    def get_audit_trail(self) -> List[Dict[str, Any]]:
        """Get the actions logged by this command so far"""
        return list(self.audit_trail)

    def failure(self, request_id: str, error: Exception, message: str, exit_code: int) -> Dict[str, Any]:
        """Uniform failure response"""
        return {
            "request_id": request_id,
            "success": False,
            "error": str(error),
            "message": message,
            "exit_code": exit_code,
        }
