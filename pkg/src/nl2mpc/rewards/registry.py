"""Registry of residual functions.

A residual function maps (features, params) to a small residual vector.  The
registry keeps, per function name, the callable plus the parameter validators
used when a term is constructed, so that bad targets are rejected at
build time rather than at evaluation time.

Embodiment modules register their catalogs at import.  The registry is
append-only; re-registering a name is an error to keep term semantics stable.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Mapping

import numpy as np

from nl2mpc.errors import ValidationError

# residual callable: (features mapping, params mapping) -> ndarray (..., d)
ResidualFn = Callable[[Mapping, Mapping], np.ndarray]
# param validator: raises ValidationError on bad params
ParamCheck = Callable[[Mapping], None]


@dataclass(frozen=True)
class ResidualDef:
    name: str
    fn: ResidualFn
    required_params: tuple[str, ...] = ()
    check: ParamCheck | None = None


_REGISTRY: dict[str, ResidualDef] = {}


def register_residual(
    name: str,
    fn: ResidualFn,
    required_params: tuple[str, ...] = (),
    check: ParamCheck | None = None,
) -> None:
    if name in _REGISTRY:
        raise ValidationError(f"residual '{name}' is already registered")
    _REGISTRY[name] = ResidualDef(name, fn, required_params, check)


def get_residual(name: str) -> ResidualDef:
    try:
        return _REGISTRY[name]
    except KeyError:
        raise ValidationError(
            f"unknown residual function '{name}'; known: {sorted(_REGISTRY)}"
        ) from None


def validate_params(name: str, params: Mapping) -> None:
    """Check a params mapping against the residual's declared requirements."""
    rdef = get_residual(name)
    missing = [p for p in rdef.required_params if p not in params]
    if missing:
        raise ValidationError(
            f"residual '{name}' missing params {missing}; got {sorted(params)}"
        )
    if rdef.check is not None:
        rdef.check(params)
