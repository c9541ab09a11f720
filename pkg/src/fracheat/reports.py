"""Check results shared by the verifier and the exponent comparisons."""

from __future__ import annotations

from dataclasses import dataclass, field

from .artifacts import plain


@dataclass
class CheckReport:
    """Outcome of one numerical check.

    ``fitted_constant`` is the best constant over the parameter grid and
    ``stability_ratio`` the max/min of the per-decade constants; ``passed``
    implies no violations and a ratio within ``cap``.
    """

    check_name: str
    parameter_grid: dict
    fitted_constant: float
    stability_ratio: float | None
    violations: int
    passed: bool
    tolerance: float
    cap: float | None = None
    applicable: bool = True
    details: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.passed:
            if self.violations:
                raise ValueError(f"{self.check_name}: passed with {self.violations} violations")
            if self.cap is not None and not (self.stability_ratio is not None
                                             and self.stability_ratio <= self.cap):
                raise ValueError(f"{self.check_name}: passed with stability ratio above cap")

    @property
    def status(self) -> str:
        if not self.applicable:
            return "N/A"
        return "PASS" if self.passed else "FAIL"

    def to_record(self) -> dict:
        return plain({
            "check_name": self.check_name,
            "parameter_grid": self.parameter_grid,
            "fitted_constant": self.fitted_constant,
            "stability_ratio": self.stability_ratio,
            "violations": self.violations,
            "passed": self.passed,
            "status": self.status,
            "tolerance": self.tolerance,
            "cap": self.cap,
            "applicable": self.applicable,
            "details": self.details,
        })

    def summary_line(self) -> str:
        ratio = "-" if self.stability_ratio is None else f"{self.stability_ratio:.4g}"
        return f"{self.check_name:<24} C={self.fitted_constant:<12.6g} ratio={ratio:<10} {self.status}"
