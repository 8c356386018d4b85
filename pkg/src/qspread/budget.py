"""Resource caps guarding the exhaustive-enumeration code paths.

Field construction is capped by order, point enumeration by the number of
points in the ambient projective space.  The enumeration budget can be
raised or lowered through the ``SPREADLAB_BUDGET`` environment variable
(an integer number of points).
"""

import os

from .errors import BudgetExceeded, OrderTooLarge

#: Largest supported field order.
FIELD_ORDER_CAP = 2**20

#: Default cap on the number of points enumerated in one projective space.
DEFAULT_ENUMERATION_BUDGET = 2**22

BUDGET_ENV_VAR = "SPREADLAB_BUDGET"


def enumeration_budget() -> int:
    """Current point-enumeration budget (env override or default)."""
    raw = os.environ.get(BUDGET_ENV_VAR)
    if raw is not None:
        try:
            return int(raw)
        except ValueError:
            pass
    return DEFAULT_ENUMERATION_BUDGET


def check_field_order(q: int) -> None:
    if q > FIELD_ORDER_CAP:
        raise OrderTooLarge(f"field order {q} exceeds cap {FIELD_ORDER_CAP}")


def check_point_count(count: int, what: str = "enumeration") -> None:
    budget = enumeration_budget()
    if count > budget:
        raise BudgetExceeded(f"{what} needs {count} points, budget is {budget}")
