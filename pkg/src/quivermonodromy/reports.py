"""Pass/fail reports shared by the relation checkers."""

from __future__ import annotations

from dataclasses import asdict, dataclass, field


@dataclass
class CheckItem:
    name: str
    defect: float
    passed: bool
    detail: str = ""


@dataclass
class Report:
    title: str
    tol: float
    items: list[CheckItem] = field(default_factory=list)
    data: dict = field(default_factory=dict)  # matrices etc. for callers; not serialized

    def add(self, name: str, defect: float, detail: str = "", tol: float | None = None) -> CheckItem:
        item = CheckItem(name, float(defect), bool(defect <= (self.tol if tol is None else tol)), detail)
        self.items.append(item)
        return item

    @property
    def passed(self) -> bool:
        return all(i.passed for i in self.items)

    @property
    def failures(self) -> list[CheckItem]:
        return [i for i in self.items if not i.passed]

    @property
    def max_defect(self) -> float:
        return max((i.defect for i in self.items), default=0.0)

    def item(self, name: str) -> CheckItem:
        for i in self.items:
            if i.name == name:
                return i
        raise KeyError(name)

    def to_dict(self) -> dict:
        return {"title": self.title, "tol": self.tol, "passed": self.passed, "items": [asdict(i) for i in self.items]}

    def to_text(self) -> str:
        lines = [f"{self.title}: {'PASS' if self.passed else 'FAIL'} (tol {self.tol:g})"]
        for i in self.items:
            flag = "ok  " if i.passed else "FAIL"
            extra = f"  {i.detail}" if i.detail else ""
            lines.append(f"  [{flag}] {i.name}: defect {i.defect:.3e}{extra}")
        return "\n".join(lines)
