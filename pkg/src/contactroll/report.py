"""Residual records and reports shared by all checking modules."""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass, field


@dataclass(frozen=True)
class ResidualRecord:
    check_id: str
    point: tuple
    residual: float
    scale: float
    rel: float
    tol: float

    @property
    def passed(self) -> bool:
        return math.isfinite(self.rel) and self.rel < self.tol

    def to_dict(self) -> dict:
        d = asdict(self)
        d["point"] = [float(p) for p in self.point]
        for k in ("residual", "scale", "rel"):
            if not math.isfinite(d[k]):
                d[k] = None  # JSON has no nan/inf
        d["passed"] = self.passed
        return d


@dataclass
class ResidualReport:
    records: list = field(default_factory=list)

    def add(self, check_id: str, point, residual: float, scale: float, rel: float, tol: float):
        self.records.append(
            ResidualRecord(check_id, tuple(float(p) for p in point), float(residual), float(scale), float(rel), float(tol))
        )

    def add_triplet(self, check_id: str, point, triplet, tol: float):
        a, s, r = triplet
        self.add(check_id, point, a, s, r, tol)

    def extend(self, other: "ResidualReport"):
        self.records.extend(other.records)

    def __iter__(self):
        return iter(self.records)

    def __len__(self):
        return len(self.records)

    def by_id(self, check_id: str) -> list:
        return [r for r in self.records if r.check_id == check_id]

    def ids(self) -> list:
        return sorted({r.check_id for r in self.records})

    @property
    def all_passed(self) -> bool:
        return all(r.passed for r in self.records)

    @property
    def max_rel(self) -> float:
        """Largest relative residual; inf if any record could not be evaluated."""
        rels = [r.rel for r in self.records]
        if any(not math.isfinite(r) for r in rels):
            return math.inf
        return max(rels, default=0.0)

    def max_rel_of(self, prefix: str) -> float:
        sub = ResidualReport([r for r in self.records if r.check_id.startswith(prefix)])
        return sub.max_rel

    def sorted(self) -> "ResidualReport":
        return ResidualReport(sorted(self.records, key=lambda r: (r.check_id, r.point)))

    def summary(self) -> dict:
        return {
            "total": len(self.records),
            "passed": sum(r.passed for r in self.records),
            "max_rel_residual": self.max_rel if math.isfinite(self.max_rel) else None,
        }

    def to_dict(self, config_echo: dict | None = None) -> dict:
        return {
            "config_echo": config_echo or {},
            "records": [r.to_dict() for r in self.sorted()],
            "summary": self.summary(),
        }


def ratio_residual(value, terms) -> tuple[float, float, float]:
    """``|value| / sum |terms|`` for a scalar expression given by its additive terms."""
    a = abs(complex(value))
    s = sum(abs(complex(t)) for t in terms)
    return a, s, (a / s if s > 0 else a)
