"""Jet Compose Command - Compose two 2-jets, optionally against the polynomial oracle"""

import json
import logging
from pathlib import Path
from typing import Any, Dict

from pydantic import ValidationError

from src.lie.errors import CsdpError
from src.lie.jets import jet_compose, polymap_compose_truncate, polymap_jet
from src.models.jet import Jet2, PolyMap2
from src.models.schemas import JetDocument
from .base_command import EXIT_OK, EXIT_USAGE, BaseCommand

logger = logging.getLogger(__name__)


def load_jet(path: Path) -> Jet2:
    return Jet2.from_document(JetDocument.model_validate_json(path.read_text(encoding="utf-8")))


def oracle_deviation(left: Jet2, right: Jet2, composed: Jet2) -> float:
    """Max deviation between the jet law and the truncated composition of the quadratic maps"""
    p = PolyMap2(linear=left.A1, quadratic=left.A2)
    q = PolyMap2(linear=right.A1, quadratic=right.A2)
    return composed.distance(polymap_jet(polymap_compose_truncate(p, q)))


class JetCommand(BaseCommand):
    """
    Jet composition command that:
    - Reads two Jet2 JSON documents
    - Composes them with the 2-jet chain rule
    - Optionally checks the result against exact polynomial composition
    """

    def __init__(self):
        super().__init__(
            name="jet-compose",
            description="Composes 2-jets at a fixed point"
        )

    async def process(self, request: Dict[str, Any]) -> Dict[str, Any]:
        """
        Process a jet composition request

        Args:
            request: Contains left_path, right_path and oracle flag

        Returns:
            Response with the composed jet as JSON and the exit code
        """
        request_id = request.get("request_id", "JET_REQUEST")

        try:
            left = load_jet(Path(request.get("left_path", "")))
            right = load_jet(Path(request.get("right_path", "")))
            composed = jet_compose(left, right)
        except (OSError, ValidationError, CsdpError, ValueError) as e:
            logger.error(f"[{request_id}] Jet Command error: {str(e)}")
            return self.failure(request_id, e, "Malformed or incompatible jet documents", EXIT_USAGE)

        payload = composed.to_document().model_dump()
        if request.get("oracle", False):
            payload["oracle_max_deviation"] = oracle_deviation(left, right, composed)
            logger.info(f"[{request_id}] Oracle deviation {payload['oracle_max_deviation']:.3e}")

        self.log_action("jet_compose", {
            "request_id": request_id,
            "n": composed.n,
            "oracle": "oracle_max_deviation" in payload,
        })

        return {
            "request_id": request_id,
            "success": True,
            "jet": composed,
            "output": json.dumps(payload),
            "message": "Jets composed",
            "exit_code": EXIT_OK,
        }
