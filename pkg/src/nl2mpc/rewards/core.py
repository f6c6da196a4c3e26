"""Core reward algebra.

A reward specification is an ordered set of terms.  Each term names a
residual function, carries its parameters, a nonnegative weight, and a norm.
The evaluated reward of a specification at one step is

    R = - sum_i  w_i * n_i(r_i(features, params_i))

so a perfectly satisfied specification scores exactly zero and anything else
scores strictly below zero.  Specs are immutable; upsert and remove return
new specs, which lets a controller swap specifications between control steps
without locking.

All evaluation routines accept batched features: every feature value may be
a scalar or an ndarray with identical leading shape, and the evaluated
reward has that leading shape.
"""

from __future__ import annotations

import hashlib
import json
import math
from dataclasses import dataclass, field, replace
from typing import Iterable, Mapping

import numpy as np

from nl2mpc.errors import FeatureError, NumericError, ValidationError
from nl2mpc.rewards import registry

SQUARED_L2 = "squared-l2"
L2 = "l2"
SMOOTH_ABS = "smooth-abs"
_NORM_KINDS = (SQUARED_L2, L2, SMOOTH_ABS)

DEFAULT_PLAN_DURATION = 2.0


@dataclass(frozen=True)
class Norm:
    """Reduction of a residual vector to a nonnegative scalar.

    squared-l2 : sum(r**2)                      (default)
    l2         : sqrt(sum(r**2))
    smooth-abs : sum(sqrt(r**2 + eps**2) - eps)  with eps > 0
    """

    kind: str = SQUARED_L2
    epsilon: float = 0.0

    def __post_init__(self):
        if self.kind not in _NORM_KINDS:
            raise ValidationError(
                f"unknown norm kind '{self.kind}'; expected one of {_NORM_KINDS}"
            )
        if self.kind == SMOOTH_ABS and not self.epsilon > 0.0:
            raise ValidationError("smooth-abs norm requires epsilon > 0")
        if self.kind != SMOOTH_ABS and self.epsilon != 0.0:
            raise ValidationError(f"norm '{self.kind}' does not take an epsilon")

    def value(self, r: np.ndarray) -> np.ndarray:
        """Norm of residual r, reducing the trailing axis."""
        r = np.asarray(r, dtype=float)
        if self.kind == SQUARED_L2:
            return np.sum(r * r, axis=-1)
        if self.kind == L2:
            return np.sqrt(np.sum(r * r, axis=-1))
        s = np.sqrt(r * r + self.epsilon * self.epsilon)
        return np.sum(s - self.epsilon, axis=-1)

    def grad(self, r: np.ndarray) -> np.ndarray:
        """d n / d r at an unbatched residual vector."""
        r = np.asarray(r, dtype=float)
        if self.kind == SQUARED_L2:
            return 2.0 * r
        if self.kind == L2:
            nrm = float(np.sqrt(np.sum(r * r)))
            if nrm < 1e-12:
                return np.zeros_like(r)
            return r / nrm
        s = np.sqrt(r * r + self.epsilon * self.epsilon)
        return r / s

    def hessian(self, r: np.ndarray) -> np.ndarray:
        """d^2 n / d r^2 at an unbatched residual vector (d x d)."""
        r = np.asarray(r, dtype=float)
        d = r.shape[-1]
        if self.kind == SQUARED_L2:
            return 2.0 * np.eye(d)
        if self.kind == L2:
            nrm = float(np.sqrt(np.sum(r * r)))
            if nrm < 1e-12:
                # treat the kink at zero as locally flat; the planner's own
                # regularization keeps the pass positive definite
                return np.zeros((d, d))
            rhat = r / nrm
            return (np.eye(d) - np.outer(rhat, rhat)) / nrm
        s2 = r * r + self.epsilon * self.epsilon
        return np.diag(self.epsilon * self.epsilon / np.power(s2, 1.5))

    def to_json(self) -> dict:
        out: dict = {"kind": self.kind}
        if self.kind == SMOOTH_ABS:
            out["epsilon"] = self.epsilon
        return out

    @staticmethod
    def from_json(data: Mapping) -> "Norm":
        return Norm(kind=data["kind"], epsilon=float(data.get("epsilon", 0.0)))


def _freeze(v):
    if isinstance(v, (tuple, list)):
        return tuple(_freeze(x) for x in v)
    if isinstance(v, (np.floating, np.integer)):
        return v.item()
    return v


class StepFeatures(Mapping):
    """Immutable mapping of feature name to scalar or batched value."""

    __slots__ = ("_data",)

    def __init__(self, values: Mapping):
        object.__setattr__(self, "_data", dict(values))

    def __getitem__(self, key):
        return self._data[key]

    def __iter__(self):
        return iter(self._data)

    def __len__(self):
        return len(self._data)

    def __setattr__(self, *_):
        raise AttributeError("StepFeatures is immutable")

    def __repr__(self):
        return f"StepFeatures({self._data!r})"


@dataclass(frozen=True)
class ResidualTerm:
    """One weighted, normed residual inside a specification."""

    id: str
    residual_fn: str
    params: Mapping
    weight: float
    norm: Norm = field(default_factory=Norm)

    def __post_init__(self):
        if not self.id:
            raise ValidationError("term id must be non-empty")
        if not (self.weight >= 0.0) or not math.isfinite(self.weight):
            raise ValidationError(
                f"term '{self.id}': weight must be finite and >= 0, got {self.weight}"
            )
        registry.validate_params(self.residual_fn, self.params)
        # freeze params; sequences normalize to tuples so that terms loaded
        # from JSON compare equal to terms built in code
        object.__setattr__(
            self, "params", {k: _freeze(v) for k, v in self.params.items()}
        )

    def to_json(self) -> dict:
        return {
            "id": self.id,
            "residual_fn": self.residual_fn,
            "params": {k: self.params[k] for k in sorted(self.params)},
            "weight": self.weight,
            "norm": self.norm.to_json(),
        }

    @staticmethod
    def from_json(data: Mapping) -> "ResidualTerm":
        return ResidualTerm(
            id=data["id"],
            residual_fn=data["residual_fn"],
            params=dict(data["params"]),
            weight=float(data["weight"]),
            norm=Norm.from_json(data["norm"]),
        )


@dataclass(frozen=True)
class RewardSpec:
    """An ordered, immutable collection of residual terms."""

    terms: tuple[ResidualTerm, ...] = ()
    plan_duration: float = DEFAULT_PLAN_DURATION

    def __post_init__(self):
        ids = [t.id for t in self.terms]
        if len(ids) != len(set(ids)):
            dupes = sorted({i for i in ids if ids.count(i) > 1})
            raise ValidationError(f"duplicate term ids: {dupes}")
        if not (self.plan_duration > 0.0):
            raise ValidationError(
                f"plan duration must be > 0, got {self.plan_duration}"
            )

    def term(self, term_id: str) -> ResidualTerm | None:
        for t in self.terms:
            if t.id == term_id:
                return t
        return None

    def with_duration(self, duration: float) -> "RewardSpec":
        return replace(self, plan_duration=float(duration))


def upsert_term(spec: RewardSpec, term: ResidualTerm) -> RewardSpec:
    """Insert the term, or replace the existing term with the same id.

    Replacement keeps the term's original position so serialization stays
    stable across repeated updates of the same target.
    """
    terms = list(spec.terms)
    for i, t in enumerate(terms):
        if t.id == term.id:
            terms[i] = term
            return replace(spec, terms=tuple(terms))
    terms.append(term)
    return replace(spec, terms=tuple(terms))


def remove_term(spec: RewardSpec, term_id: str) -> RewardSpec:
    """Remove a term by id; removing an absent id is a no-op."""
    terms = tuple(t for t in spec.terms if t.id != term_id)
    if len(terms) == len(spec.terms):
        return spec
    return replace(spec, terms=terms)


def _term_residual(term: ResidualTerm, feats: Mapping) -> np.ndarray:
    rdef = registry.get_residual(term.residual_fn)
    try:
        r = rdef.fn(feats, term.params)
    except KeyError as exc:
        raise FeatureError(term.id, str(exc.args[0])) from None
    r = np.asarray(r, dtype=float)
    if r.ndim == 0:
        r = r[None]
    return r


def eval_reward(spec: RewardSpec, feats: Mapping) -> float | np.ndarray:
    """Evaluate the specification at one step's features.

    Returns a float for scalar features, or an ndarray matching the batch
    shape when feature values are batched.  The result is always <= 0 and
    equals 0 exactly when every residual vanishes.
    """
    total: float | np.ndarray = 0.0
    for term in spec.terms:
        r = _term_residual(term, feats)
        if not np.all(np.isfinite(r)):
            raise NumericError(
                f"term '{term.id}' produced a non-finite residual"
            )
        total = total - term.weight * term.norm.value(r)
    if isinstance(total, np.ndarray) and total.ndim == 0:
        return float(total)
    return total


def accumulate_return(rewards: Iterable[float]) -> float:
    """Sum per-step rewards into a trajectory return.

    Uses plain left-to-right summation so that planners summing incrementally
    produce bitwise-identical totals.
    """
    total = 0.0
    for r in rewards:
        r = float(r)
        if not math.isfinite(r):
            raise NumericError(f"non-finite reward in return accumulation: {r}")
        total += r
    return total


# -- canonical serialization -------------------------------------------------

SPEC_FORMAT_VERSION = 1


def _canonical_value(v):
    if isinstance(v, (tuple, list)):
        return [_canonical_value(x) for x in v]
    if isinstance(v, (np.floating, np.integer)):
        return v.item()
    if isinstance(v, bool) or v is None or isinstance(v, (int, float, str)):
        return v
    raise ValidationError(f"value {v!r} is not serializable in a reward spec")


def spec_to_canonical_json(spec: RewardSpec) -> str:
    """Render the spec as a canonical, byte-stable JSON string.

    Term order is preserved (it is part of the spec identity); param keys are
    sorted; no whitespace varies.  Checksums and snapshot tests key off these
    exact bytes.
    """
    payload = {
        "version": SPEC_FORMAT_VERSION,
        "plan_duration": spec.plan_duration,
        "terms": [
            {
                "id": t.id,
                "residual_fn": t.residual_fn,
                "params": {k: _canonical_value(t.params[k]) for k in sorted(t.params)},
                "weight": t.weight,
                "norm": t.norm.to_json(),
            }
            for t in spec.terms
        ],
    }
    return json.dumps(payload, separators=(",", ":"), sort_keys=False)


def spec_from_json(text: str | Mapping) -> RewardSpec:
    data = json.loads(text) if isinstance(text, str) else text
    version = data.get("version", SPEC_FORMAT_VERSION)
    if version != SPEC_FORMAT_VERSION:
        from nl2mpc.errors import VersionError

        raise VersionError(
            f"reward spec format version {version} is not supported "
            f"(expected {SPEC_FORMAT_VERSION})"
        )
    terms = tuple(ResidualTerm.from_json(t) for t in data["terms"])
    return RewardSpec(
        terms=terms, plan_duration=float(data.get("plan_duration", DEFAULT_PLAN_DURATION))
    )


def spec_checksum(spec: RewardSpec) -> str:
    return hashlib.sha256(spec_to_canonical_json(spec).encode("utf-8")).hexdigest()
