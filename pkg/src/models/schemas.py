"""Pydantic schemas for configuration, requests and reports"""

from enum import Enum
from typing import List, Optional

from pydantic import BaseModel, ConfigDict, Field, field_validator, model_validator


class InstanceKind(str, Enum):
    GLMAT = "glmat"
    GLT12 = "glt12"
    GLT12_SYM = "glt12_sym"


class Orientation(str, Enum):
    RIGHT = "right"
    LEFT = "left"
    ADVECTED = "advected"


class Tolerances(BaseModel):
    """Absolute tolerances shared by every identity check"""
    model_config = ConfigDict(frozen=True)

    exact_tol: float = Field(1e-10, gt=0)
    fd_tol: float = Field(1e-5, gt=0)
    fd_step: float = Field(1e-5, gt=0)
    sing_tol: float = Field(1e-12, gt=0)

    @model_validator(mode="after")
    def _ordered(self) -> "Tolerances":
        if not self.exact_tol < self.fd_tol:
            raise ValueError("exact_tol must be smaller than fd_tol")
        return self


class CheckResult(BaseModel):
    """Outcome of a single numerical check"""
    name: str
    max_violation: float
    tolerance: float
    passed: bool

    @classmethod
    def from_violation(cls, name: str, violation: float, tolerance: float) -> "CheckResult":
        return cls(
            name=name,
            max_violation=float(violation),
            tolerance=tolerance,
            passed=bool(violation <= tolerance),
        )


class RunReport(BaseModel):
    """Aggregated verification report; passes iff every check passes"""
    subject: str
    checks: List[CheckResult] = Field(default_factory=list)

    @property
    def passed(self) -> bool:
        return all(check.passed for check in self.checks)

    def failures(self) -> List[CheckResult]:
        return [check for check in self.checks if not check.passed]

    def render(self) -> str:
        lines = []
        for check in sorted(self.checks, key=lambda c: c.name):
            status = "PASS" if check.passed else "FAIL"
            lines.append(
                f"{status}  {check.name:<32} max={check.max_violation:.3e}  tol={check.tolerance:.1e}"
            )
        overall = "PASS" if self.passed else "FAIL"
        passed = len(self.checks) - len(self.failures())
        lines.append(f"{overall}  {self.subject}: {passed}/{len(self.checks)} checks passed")
        return "\n".join(lines)


class VerifyRequest(BaseModel):
    """Flags of the `verify` command"""
    instance: InstanceKind = InstanceKind.GLMAT
    n: int = Field(2, ge=1, le=16)
    seed: int = 0
    samples: int = Field(20, ge=1)


class LagrangianSpec(BaseModel):
    """Diagonal quadratic Lagrangian weights; empty lists mean unit weights"""
    weights_g: List[float] = Field(default_factory=list)
    weights_v: List[float] = Field(default_factory=list)

    @field_validator("weights_g", "weights_v")
    @classmethod
    def _positive(cls, weights: List[float]) -> List[float]:
        if any(not w > 0 for w in weights):
            raise ValueError("Lagrangian weights must be positive")
        return weights


class InitialSpec(BaseModel):
    """Initial algebra coordinates (gl(n) basis then V basis) and advected parameter"""
    xi: Optional[List[float]] = None
    v0: Optional[List[float]] = None


class IntegratorSpec(BaseModel):
    """Fixed-step RK4 settings"""
    h: float = Field(..., gt=0)
    steps: int = Field(..., ge=1)
    t0: float = 0.0


class ConfigDoc(BaseModel):
    """Simulation configuration read by the `simulate` command"""
    instance: InstanceKind
    n: int = Field(..., ge=1, le=16)
    orientation: Orientation = Orientation.RIGHT
    lagrangian: LagrangianSpec = Field(default_factory=LagrangianSpec)
    initial: InitialSpec = Field(default_factory=InitialSpec)
    integrator: IntegratorSpec
    seed: int = 0
    output: str

    model_config = ConfigDict(
        json_schema_extra={
            "example": {
                "instance": "glmat",
                "n": 2,
                "orientation": "right",
                "lagrangian": {"weights_g": [1, 1, 1, 1], "weights_v": [1, 1, 1, 1]},
                "initial": {"xi": [0.1, 0.5, -0.3, 0.2, 0.0, 0.4, 0.1, -0.2]},
                "integrator": {"h": 0.01, "steps": 100},
                "seed": 0,
                "output": "run.csv",
            }
        }
    )


class JetDocument(BaseModel):
    """JSON encoding of a 2-jet: nested arrays for A1 (n x n) and A2 (n x n x n)"""
    A1: List[List[float]]
    A2: List[List[List[float]]]

    @model_validator(mode="after")
    def _square(self) -> "JetDocument":
        n = len(self.A1)
        if n == 0 or any(len(row) != n for row in self.A1):
            raise ValueError("A1 must be a non-empty square matrix")
        if len(self.A2) != n or any(
            len(row) != n or any(len(col) != n for col in row) for row in self.A2
        ):
            raise ValueError(f"A2 must have shape ({n}, {n}, {n})")
        return self
