"""Structured results for identity and inequality evaluations."""

from dataclasses import dataclass, field

REL_SLACK = 1e-9
SLACK_FLOOR = 1e-300


def slack_for(lhs: float, rhs: float, rel_slack: float = REL_SLACK) -> float:
    """Numerical tolerance scaled to the magnitudes being compared."""
    return rel_slack * max(abs(lhs), abs(rhs), SLACK_FLOOR)


@dataclass(frozen=True)
class InequalityReport:
    """One checker evaluation.

    ``margin`` follows the checker's sign convention (for inequalities the
    slack-side excess, for identities minus the absolute discrepancy), so
    ``passed`` is always equivalent to ``margin >= -slack``.
    """

    name: str
    lhs: float
    rhs: float
    margin: float
    passed: bool
    context: dict = field(default_factory=dict)

    @property
    def slack(self) -> float:
        return slack_for(self.lhs, self.rhs, self.context.get("rel_slack", REL_SLACK))

    @property
    def applicable(self) -> bool:
        return self.context.get("status", "ok") != "not_applicable"


def make_report(name: str, lhs: float, rhs: float, margin: float,
                context: dict | None = None,
                rel_slack: float = REL_SLACK) -> InequalityReport:
    ctx = dict(context or {})
    ctx.setdefault("rel_slack", rel_slack)
    passed = margin >= -slack_for(lhs, rhs, rel_slack)
    return InequalityReport(name, float(lhs), float(rhs), float(margin), passed, ctx)


def identity_report(name: str, lhs: float, rhs: float,
                    context: dict | None = None,
                    rel_slack: float = REL_SLACK) -> InequalityReport:
    """Report for an exact identity: margin is -(absolute discrepancy)."""
    ctx = dict(context or {})
    scale = max(abs(lhs), abs(rhs), SLACK_FLOOR)
    ctx["rel_err"] = abs(lhs - rhs) / scale
    return make_report(name, lhs, rhs, -abs(lhs - rhs), ctx, rel_slack)


def not_applicable_report(name: str, lhs: float, rhs: float,
                          context: dict | None = None) -> InequalityReport:
    ctx = dict(context or {})
    ctx["status"] = "not_applicable"
    ctx.setdefault("rel_slack", REL_SLACK)
    return InequalityReport(name, float(lhs), float(rhs), 0.0, True, ctx)


@dataclass(frozen=True)
class BoundCheck:
    """Bundle of per-bound reports for a chain of norm estimates."""

    reports: tuple[InequalityReport, ...]

    @property
    def passed(self) -> bool:
        return all(r.passed for r in self.reports)

    @property
    def min_margin(self) -> float:
        return min(r.margin for r in self.reports)

    def by_name(self, name: str) -> InequalityReport:
        for r in self.reports:
            if r.name == name:
                return r
        raise KeyError(name)
