"""
Admissible utility family.

Each member is strictly increasing and strictly concave on (0, inf)
and exposes exact closed forms for U, U', (U')^{-1} and U''. The
closed forms accept floats or numpy arrays.

JSON shapes:
    {"kind": "log"}
    {"kind": "crra", "gamma": 3.0}
    {"kind": "neg_exp", "a": 1.0}
"""

import math
from enum import Enum
from typing import Annotated, Literal, Union

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, TypeAdapter


# -----------------------------
# Errors
# -----------------------------


class UtilityDomainError(ValueError):
    """Raised when (U')^{-1} is evaluated outside the range of U'."""

    pass


class UtilityKind(str, Enum):
    """Supported utility families."""

    LOG = "log"
    CRRA = "crra"
    NEG_EXP = "neg_exp"


def _check_positive(y, kind: str) -> None:
    if np.any(np.asarray(y) <= 0.0):
        raise UtilityDomainError(
            f"{kind} marginal utility is positive; cannot invert {y!r}"
        )


# -----------------------------
# Utility Members
# -----------------------------


class LogUtility(BaseModel):
    """U(w) = log w."""

    model_config = ConfigDict(extra="forbid", frozen=True)

    kind: Literal["log"] = "log"

    @property
    def label(self) -> str:
        return "log"

    @property
    def is_log(self) -> bool:
        return True

    @property
    def marginal_at_zero(self) -> float:
        return math.inf

    def normalized(self) -> "LogUtility":
        return self

    def value(self, w):
        return np.log(w)

    def marginal(self, w):
        return np.reciprocal(np.asarray(w, dtype=float))

    def marginal_inverse(self, y):
        _check_positive(y, "log")
        return np.reciprocal(np.asarray(y, dtype=float))

    def curvature(self, w):
        return -np.reciprocal(np.square(np.asarray(w, dtype=float)))

    def marginal_inverse_derivative(self, y):
        return -np.reciprocal(np.square(np.asarray(y, dtype=float)))


_LOG = LogUtility()


class CrraUtility(BaseModel):
    """
    Constant relative risk aversion: U(w) = w^(1-gamma) / (1-gamma).

    gamma == 1 is the log limit and dispatches to LogUtility.
    """

    model_config = ConfigDict(extra="forbid", frozen=True)

    kind: Literal["crra"] = "crra"
    gamma: float = Field(..., gt=0.0, description="Relative risk aversion")

    @property
    def label(self) -> str:
        return f"crra(gamma={self.gamma:g})"

    @property
    def is_log(self) -> bool:
        return self.gamma == 1.0

    @property
    def marginal_at_zero(self) -> float:
        return math.inf

    def normalized(self) -> "LogUtility | CrraUtility":
        return _LOG if self.is_log else self

    def value(self, w):
        if self.is_log:
            return _LOG.value(w)
        return np.power(w, 1.0 - self.gamma) / (1.0 - self.gamma)

    def marginal(self, w):
        if self.is_log:
            return _LOG.marginal(w)
        return np.power(w, -self.gamma)

    def marginal_inverse(self, y):
        if self.is_log:
            return _LOG.marginal_inverse(y)
        _check_positive(y, "crra")
        return np.power(y, -1.0 / self.gamma)

    def curvature(self, w):
        if self.is_log:
            return _LOG.curvature(w)
        return -self.gamma * np.power(w, -self.gamma - 1.0)

    def marginal_inverse_derivative(self, y):
        if self.is_log:
            return _LOG.marginal_inverse_derivative(y)
        return -np.power(y, -1.0 / self.gamma - 1.0) / self.gamma


class NegExpUtility(BaseModel):
    """
    Negative exponential (constant absolute risk aversion): U(w) = -exp(-a w).

    U' maps (0, inf) onto (0, a), so (U')^{-1} is only defined below a.
    """

    model_config = ConfigDict(extra="forbid", frozen=True)

    kind: Literal["neg_exp"] = "neg_exp"
    a: float = Field(..., gt=0.0, description="Absolute risk aversion")

    @property
    def label(self) -> str:
        return f"neg_exp(a={self.a:g})"

    @property
    def is_log(self) -> bool:
        return False

    @property
    def marginal_at_zero(self) -> float:
        """U'(0) = a, so wealth may reach zero at finite cost."""
        return self.a

    def normalized(self) -> "NegExpUtility":
        return self

    def value(self, w):
        return -np.exp(-self.a * np.asarray(w, dtype=float))

    def marginal(self, w):
        return self.a * np.exp(-self.a * np.asarray(w, dtype=float))

    def marginal_inverse(self, y):
        _check_positive(y, "neg_exp")
        if np.any(np.asarray(y) >= self.a):
            raise UtilityDomainError(
                f"neg_exp(a={self.a:g}) marginal utility is below {self.a:g}; "
                f"cannot invert {y!r}"
            )
        return -np.log(np.asarray(y, dtype=float) / self.a) / self.a

    def curvature(self, w):
        return -self.a * self.a * np.exp(-self.a * np.asarray(w, dtype=float))

    def marginal_inverse_derivative(self, y):
        return -1.0 / (self.a * np.asarray(y, dtype=float))


UtilitySpec = Annotated[
    Union[LogUtility, CrraUtility, NegExpUtility],
    Field(discriminator="kind"),
]

_UTILITY_ADAPTER: TypeAdapter = TypeAdapter(UtilitySpec)


def parse_utility(data: dict) -> LogUtility | CrraUtility | NegExpUtility:
    """Parse a UtilitySpec JSON object (unknown fields rejected)."""
    return _UTILITY_ADAPTER.validate_python(data)


def utility_from_flags(
    kind: str,
    gamma: float | None = None,
    a: float | None = None,
) -> LogUtility | CrraUtility | NegExpUtility:
    """Build a UtilitySpec from command-line style arguments."""
    match UtilityKind(kind):
        case UtilityKind.LOG:
            return LogUtility()
        case UtilityKind.CRRA:
            if gamma is None:
                raise ValueError("crra utility requires gamma")
            return CrraUtility(gamma=gamma)
        case UtilityKind.NEG_EXP:
            if a is None:
                raise ValueError("neg_exp utility requires a")
            return NegExpUtility(a=a)


def admits_zero_wealth(utility) -> bool:
    """Whether U and U' stay finite at zero wealth (true only for neg_exp)."""
    return math.isfinite(utility.marginal_at_zero)
