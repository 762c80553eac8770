"""Input coercion and checking for the public entry points."""

from __future__ import annotations

import numpy as np

from .core import (
    InstanceError,
    MatchingInstance,
    SingleMindedInstance,
    instance_from_doc,
    validate,
)


def check_values(X) -> tuple[tuple[int, ...], ...]:
    """Coerce a 2-D array-like of nonnegative integers to a tuple matrix."""
    arr = np.asarray(X)
    if arr.ndim != 2:
        raise InstanceError("values", f"expected a 2-D matrix, got {arr.ndim}-D")
    if arr.size and not np.issubdtype(arr.dtype, np.integer):
        if not np.issubdtype(arr.dtype, np.floating) or not np.all(arr == np.round(arr)):
            raise InstanceError("values", "values must be integers")
    return tuple(tuple(int(v) for v in row) for row in arr.tolist())


def check_instance(X):
    """Return a validated instance.

    Accepts an instance object, a JSON-style dict, or a 2-D array-like of
    values (read as a matching market).
    """
    if isinstance(X, (MatchingInstance, SingleMindedInstance)):
        inst = X
    elif isinstance(X, dict):
        return instance_from_doc(X)
    else:
        inst = MatchingInstance(check_values(X))
    problems = validate(inst)
    if problems:
        raise InstanceError("", "; ".join(problems))
    return inst


def check_matching_instance(X) -> MatchingInstance:
    inst = check_instance(X)
    if not isinstance(inst, MatchingInstance):
        raise InstanceError("type", "this computation requires a matching instance")
    return inst
