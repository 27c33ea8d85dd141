"""Experiment exponent ledger and its consistency requirements.

The defaults are one consistent choice of the exponents; the validator
checks every inequality the experiments rely on and names the first one a
custom set violates.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace

from .errors import ParameterError


@dataclass(frozen=True)
class ExperimentParameters:
    delta: float = 1.0 / 3.0
    gamma: float = 1.0 / 300.0
    alpha_exp: float = 1.0 / 100.0
    zeta: float = 1.0 / 1000.0
    epsilon: float = 1.0 / 100.0
    epsilon2: float = 1.0 / 100.0
    epsilon3: float = 1.0 / 100.0
    nu: float = 1.0 / 100.0
    varpi: float = 1.0 / 100.0
    tau: float = 1.2
    p: int = 1
    N: int = 2000
    seed: int = 1
    samples: int = 10

    def __post_init__(self):
        for name in (
            "delta",
            "gamma",
            "alpha_exp",
            "zeta",
            "epsilon",
            "epsilon2",
            "epsilon3",
            "nu",
            "varpi",
        ):
            value = getattr(self, name)
            if not (value > 0.0 and math.isfinite(value)):
                raise ParameterError(f"{name} must be a positive real, got {value}")
        if not self.tau > 1.0:
            raise ParameterError(f"tau must exceed 1, got {self.tau}")
        if self.N < 2:
            raise ParameterError(f"N must be at least 2, got {self.N}")
        if self.samples < 1:
            raise ParameterError(f"samples must be at least 1, got {self.samples}")

    @property
    def S(self) -> float:
        """Deformation window N^(-delta)."""
        return float(self.N) ** (-self.delta)

    @property
    def psi(self) -> float:
        """Axis-sector half width 2 N^(-gamma)."""
        return 2.0 * float(self.N) ** (-self.gamma)

    def kappa(self, nth_len: float) -> int:
        """Arcs per quadrant: floor((pi/2 - 2 psi) * nth_len^alpha)."""
        span = math.pi / 2.0 - 2.0 * self.psi
        if span <= 0.0:
            return 0
        return int(math.floor(span * nth_len**self.alpha_exp))

    def violated_requirements(self) -> list[str]:
        """All requirement inequalities this set fails, by name."""
        a, g, d = self.alpha_exp, self.gamma, self.delta
        checks = [
            ("alpha*(2+epsilon) < 1", a * (2.0 + self.epsilon) < 1.0),
            ("1/2 > gamma*(2+epsilon2)", 0.5 > g * (2.0 + self.epsilon2)),
            ("gamma + alpha < delta", g + a < d),
            ("gamma < alpha/2", g < a / 2.0),
            (
                "0.5 - gamma - alpha - varpi > 0.5 - delta",
                0.5 - g - a - self.varpi > 0.5 - d,
            ),
            ("delta > 0.25", d > 0.25),
            ("delta + nu + alpha/2 < 0.5", d + self.nu + a / 2.0 < 0.5),
            (
                "zeta < min(alpha/8, gamma/2, varpi/2)",
                self.zeta < min(a / 8.0, g / 2.0, self.varpi / 2.0),
            ),
            ("1/2 > (alpha/2)*(epsilon3+2)", 0.5 > (a / 2.0) * (self.epsilon3 + 2.0)),
        ]
        return [name for name, ok in checks if not ok]

    def validate(self) -> None:
        bad = self.violated_requirements()
        if bad:
            raise ParameterError(f"parameter requirement violated: {bad[0]}")

    def with_overrides(self, **kwargs) -> "ExperimentParameters":
        return replace(self, **kwargs)

    def as_dict(self) -> dict:
        return {
            "delta": self.delta,
            "gamma": self.gamma,
            "alpha_exp": self.alpha_exp,
            "zeta": self.zeta,
            "epsilon": self.epsilon,
            "epsilon2": self.epsilon2,
            "epsilon3": self.epsilon3,
            "nu": self.nu,
            "varpi": self.varpi,
            "tau": self.tau,
            "p": self.p,
            "N": self.N,
            "seed": self.seed,
            "samples": self.samples,
        }


DEFAULT_PARAMETERS = ExperimentParameters()
