"""Verification reports shared by the model checkers."""
from __future__ import annotations

from dataclasses import dataclass, field


class BudgetError(RuntimeError):
    """An exhaustive sweep would exceed its configured budget."""


DEFAULT_BUDGET = 1 << 16


def check_budget(size: int, budget: int | None, what: str) -> None:
    if budget is not None and size > budget:
        raise BudgetError(f"{what}: {size} cases exceed the budget of {budget}")


@dataclass(frozen=True, order=True)
class Violation:
    condition: str
    witness: tuple[str, ...]
    detail: str = ""

    def __str__(self) -> str:
        w = ", ".join(self.witness)
        return f"{self.condition} at ({w})" + (f": {self.detail}" if self.detail else "")


@dataclass
class Report:
    violations: list[Violation] = field(default_factory=list)
    checked: dict[str, int] = field(default_factory=dict)
    notes: list[str] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.violations

    def count(self, condition: str, n: int = 1) -> None:
        self.checked[condition] = self.checked.get(condition, 0) + n

    def fail(self, condition: str, *witness: str, detail: str = "") -> None:
        self.violations.append(Violation(condition, tuple(witness), detail))

    def merge(self, other: "Report") -> "Report":
        self.violations += other.violations
        for k, v in other.checked.items():
            self.count(k, v)
        self.notes += other.notes
        return self

    def conditions_failed(self) -> set[str]:
        return {v.condition for v in self.violations}

    def finish(self) -> "Report":
        self.violations = sorted(set(self.violations))
        return self

    def to_json(self) -> dict:
        return {
            "ok": self.ok,
            "violations": [
                {"condition": v.condition, "witness": list(v.witness), "detail": v.detail}
                for v in sorted(self.violations)
            ],
            "checked": dict(sorted(self.checked.items())),
            "notes": list(self.notes),
        }

    def __str__(self) -> str:
        head = "ok" if self.ok else f"{len(self.violations)} violation(s)"
        counts = ", ".join(f"{k}: {v}" for k, v in sorted(self.checked.items()))
        lines = [f"{head} [{counts}]"] + [f"  {v}" for v in sorted(self.violations)]
        lines += [f"  note: {n}" for n in self.notes]
        return "\n".join(lines)
