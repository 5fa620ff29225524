"""Leslie and Frank coefficient sets, their admissibility checks and derived constants."""

from __future__ import annotations

import math
from dataclasses import dataclass, field, fields

from .errors import InvalidCoefficients, NonFinite

#: absolute tolerance for the equality relations between mu_i and lambda_i
EQUALITY_TOL = 1e-12


@dataclass(frozen=True)
class LeslieCoefficients:
    mu1: float
    mu2: float
    mu3: float
    mu4: float
    mu5: float
    mu6: float
    lambda1: float
    lambda2: float

    @classmethod
    def from_mu(cls, mu1, mu2, mu3, mu4, mu5, mu6) -> "LeslieCoefficients":
        """Build a set whose lambdas follow from ``lambda1 = mu2 - mu3``, ``lambda2 = mu5 - mu6``."""
        return cls(mu1, mu2, mu3, mu4, mu5, mu6, mu2 - mu3, mu5 - mu6)

    @classmethod
    def from_dict(cls, data: dict) -> "LeslieCoefficients":
        return cls(**{f.name: float(data[f.name]) for f in fields(cls)})

    def as_dict(self) -> dict:
        return {f.name: getattr(self, f.name) for f in fields(self)}

    @property
    def mu(self) -> tuple:
        return (self.mu1, self.mu2, self.mu3, self.mu4, self.mu5, self.mu6)

    @property
    def ratio(self) -> float:
        """lambda2 / lambda1."""
        return self.lambda2 / self.lambda1


@dataclass(frozen=True)
class FrankCoefficients:
    k1: float
    k2: float
    k3: float

    @classmethod
    def one_constant(cls, a: float) -> "FrankCoefficients":
        return cls(a, a, a)

    @classmethod
    def from_dict(cls, data: dict) -> "FrankCoefficients":
        return cls(float(data["k1"]), float(data["k2"]), float(data["k3"]))

    def as_dict(self) -> dict:
        return {"k1": self.k1, "k2": self.k2, "k3": self.k3}

    @property
    def a(self) -> float:
        return min(self.k1, self.k2, self.k3)

    @property
    def delta(self) -> float:
        a = self.a
        return max(self.k1 - a, self.k2 - a, self.k3 - a)


@dataclass(frozen=True)
class DerivedConstants:
    """Scalar combinations used by the stress algebra and the stability estimate."""

    a: float
    delta: float
    mu_floor: float
    alpha: float
    beta: float
    c0_gronwall: float
    mu4: float
    lambda1: float
    lambda2: float

    @property
    def ratio(self) -> float:
        return self.lambda2 / self.lambda1


@dataclass(frozen=True)
class ConstraintCheck:
    name: str
    ok: bool
    slack: float


@dataclass
class ValidationReport:
    checks: list = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return all(c.ok for c in self.checks)

    @property
    def failures(self) -> list:
        return [c for c in self.checks if not c.ok]

    def format(self) -> str:
        lines = []
        for c in self.checks:
            status = "pass" if c.ok else "FAIL"
            lines.append(f"{status:4}  {c.name:<40} slack={c.slack:+.6g}")
        return "\n".join(lines)


def _check_finite(leslie: LeslieCoefficients, frank: FrankCoefficients) -> None:
    bad = [name for name, v in {**leslie.as_dict(), **frank.as_dict()}.items()
           if not math.isfinite(v)]
    if bad:
        raise NonFinite(f"non-finite coefficients: {', '.join(bad)}")


def validate(leslie: LeslieCoefficients, frank: FrankCoefficients) -> ValidationReport:
    """Check every admissibility constraint and report its slack.

    Slack is positive (or zero for non-strict inequalities) when the
    constraint holds. Equalities are held to ``EQUALITY_TOL`` absolute.
    """
    _check_finite(leslie, frank)
    L = leslie
    q = L.lambda2 ** 2 / L.lambda1 if L.lambda1 != 0 else math.inf

    def eq(name, lhs, rhs):
        slack = EQUALITY_TOL - abs(lhs - rhs)
        return ConstraintCheck(name, slack >= 0, slack)

    def strict(name, value):
        return ConstraintCheck(name, value > 0, value)

    def weak(name, value):
        return ConstraintCheck(name, value >= 0, value)

    checks = [
        strict("lambda1 < 0", -L.lambda1),
        eq("lambda1 = mu2 - mu3", L.lambda1, L.mu2 - L.mu3),
        eq("lambda2 = mu5 - mu6", L.lambda2, L.mu5 - L.mu6),
        eq("parodi: mu2 + mu3 = mu6 - mu5", L.mu2 + L.mu3, L.mu6 - L.mu5),
        weak("mu1 - lambda2^2/lambda1 >= 0", L.mu1 - q),
        strict("mu4 > 0", L.mu4),
        weak("mu5 + mu6 >= -lambda2^2/lambda1", L.mu5 + L.mu6 + q),
        strict("k1 > 0", frank.k1),
        strict("k2 > 0", frank.k2),
        strict("k3 > 0", frank.k3),
    ]
    return ValidationReport(checks)


def _require_valid(leslie, frank) -> None:
    report = validate(leslie, frank)
    if not report.ok:
        names = ", ".join(c.name for c in report.failures)
        raise InvalidCoefficients(f"coefficient constraints violated: {names}")


def mu_floor(leslie: LeslieCoefficients) -> float:
    """Coercivity constant of the dissipation form: Q(d, A, A) >= mu_floor |A|^2."""
    L = leslie
    q = L.lambda2 ** 2 / L.lambda1
    return min(L.mu4, L.mu1 + L.mu4 + L.mu5 + L.mu6, L.mu4 + L.mu5 + L.mu6 + q)


def delta0(leslie: LeslieCoefficients, frank: FrankCoefficients, c0_abs: float = 1.0) -> float:
    """Frank-deviation threshold below which the twin-run estimate is expected to close.

    The absolute constant of the estimate is not known numerically, so
    ``c0_abs`` is a user-chosen scale and the returned value is a relative
    threshold (useful for labelling sweeps), not a certified bound.
    """
    _require_valid(leslie, frank)
    if not (c0_abs > 0 and math.isfinite(c0_abs)):
        raise InvalidCoefficients("c0_abs must be a positive finite number")
    l1, l2 = abs(leslie.lambda1), abs(leslie.lambda2)
    factor = min(1.0, l1 / (l1 + l2) * math.sqrt(leslie.mu4 / (-2.0 * leslie.lambda1)))
    return factor * frank.a / c0_abs


def derive(leslie: LeslieCoefficients, frank: FrankCoefficients) -> DerivedConstants:
    """Derived constants. Does not validate; callers decide how strict to be."""
    L = leslie
    q = L.lambda2 ** 2 / L.lambda1
    a = frank.a
    return DerivedConstants(
        a=a,
        delta=frank.delta,
        mu_floor=mu_floor(L),
        alpha=L.mu1 - q,
        beta=L.mu5 + L.mu6 + q,
        c0_gronwall=min(L.mu4 / 16.0, -a * a / L.lambda1),
        mu4=L.mu4,
        lambda1=L.lambda1,
        lambda2=L.lambda2,
    )
