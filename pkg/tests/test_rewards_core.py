"""Reward algebra: norms, evaluation, spec editing, serialization."""

from __future__ import annotations

import random

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

import oracles
from nl2mpc.errors import FeatureError, NumericError, ValidationError
from nl2mpc.rewards.core import (
    Norm,
    ResidualTerm,
    RewardSpec,
    accumulate_return,
    eval_reward,
    remove_term,
    spec_checksum,
    spec_from_json,
    spec_to_canonical_json,
    upsert_term,
)
from conftest import random_features, random_spec

import nl2mpc.quadruped  # noqa: F401  (registers residuals)
import nl2mpc.manipulator  # noqa: F401


def term(target=0.0, tid="torso_height", weight=1.0, norm=None):
    return ResidualTerm(
        id=tid,
        residual_fn="com_height",
        params={"target": target},
        weight=weight,
        norm=norm or Norm(),
    )


class TestNorms:
    def test_squared_l2_scalar(self):
        assert Norm().value(np.array([2.0])) == 4.0

    def test_l2(self):
        assert Norm(kind="l2").value(np.array([3.0, 4.0])) == pytest.approx(5.0)

    def test_smooth_abs_zero_at_zero(self):
        n = Norm(kind="smooth-abs", epsilon=0.1)
        assert n.value(np.array([0.0])) == 0.0

    def test_smooth_abs_requires_epsilon(self):
        with pytest.raises(ValidationError):
            Norm(kind="smooth-abs")

    def test_unknown_kind(self):
        with pytest.raises(ValidationError):
            Norm(kind="l1")

    @given(
        st.lists(st.floats(-10, 10), min_size=1, max_size=4),
        st.sampled_from(["squared-l2", "l2", "smooth-abs"]),
    )
    def test_norms_nonnegative(self, values, kind):
        norm = Norm(kind=kind, epsilon=0.25 if kind == "smooth-abs" else 0.0)
        assert norm.value(np.array(values)) >= 0.0

    @pytest.mark.parametrize("kind,eps", [("squared-l2", 0.0), ("l2", 0.0), ("smooth-abs", 0.2)])
    def test_grad_hessian_match_finite_differences(self, kind, eps):
        norm = Norm(kind=kind, epsilon=eps)
        r = np.array([0.7, -0.4, 1.2])
        h = 1e-6
        g = norm.grad(r)
        for i in range(3):
            e = np.zeros(3)
            e[i] = h
            fd = (norm.value(r + e) - norm.value(r - e)) / (2 * h)
            assert g[i] == pytest.approx(fd, rel=1e-5, abs=1e-7)
        Hn = norm.hessian(r)
        for i in range(3):
            e = np.zeros(3)
            e[i] = h
            fd_row = (norm.grad(r + e) - norm.grad(r - e)) / (2 * h)
            assert np.allclose(Hn[:, i], fd_row, rtol=1e-4, atol=1e-6)


class TestEvalReward:
    def test_empty_spec_scores_zero(self):
        assert eval_reward(RewardSpec(), {}) == 0.0

    def test_single_term_squared(self):
        # residual 2 with unit weight under the default norm
        spec = RewardSpec(terms=(term(target=0.0),))
        assert eval_reward(spec, {"pos_z": 2.0}) == -4.0

    def test_height_example(self):
        spec = RewardSpec(terms=(term(target=0.3),))
        assert eval_reward(spec, {"pos_z": 0.2}) == pytest.approx(-0.01)

    def test_missing_feature_names_term_and_feature(self):
        spec = RewardSpec(terms=(term(tid="torso_height"),))
        with pytest.raises(FeatureError) as err:
            eval_reward(spec, {"pos_x": 0.0})
        assert err.value.term_id == "torso_height"
        assert err.value.feature == "pos_z"

    def test_nan_feature_is_numeric_error(self):
        spec = RewardSpec(terms=(term(),))
        with pytest.raises(NumericError):
            eval_reward(spec, {"pos_z": float("nan")})

    def test_batched_values(self):
        spec = RewardSpec(terms=(term(target=0.0),))
        out = eval_reward(spec, {"pos_z": np.array([1.0, 2.0, 0.0])})
        assert np.array_equal(out, [-1.0, -4.0, 0.0])

    def test_always_nonpositive_and_zero_iff_residuals_vanish(self, rnd):
        for case in range(200):
            emb = rnd.choice(["quadruped", "manipulator"])
            spec = random_spec(rnd, emb)
            feats = random_features(rnd, emb)
            val = eval_reward(spec, feats)
            assert val <= 0.0
            if val == 0.0:
                for t in spec.terms:
                    r = oracles.residual(t.residual_fn, t.params, feats)
                    assert t.weight == 0.0 or all(abs(v) == 0.0 for v in r)

    def test_matches_brute_force_oracle(self, rnd):
        for case in range(300):
            emb = rnd.choice(["quadruped", "manipulator"])
            spec = random_spec(rnd, emb)
            feats = random_features(rnd, emb)
            got = eval_reward(spec, feats)
            want = oracles.eval_reward([t.to_json() for t in spec.terms], feats)
            assert got == pytest.approx(want, rel=1e-9, abs=1e-12)

    def test_weight_monotonicity(self, rnd):
        # increasing any weight with a nonzero residual strictly lowers reward
        for case in range(50):
            emb = rnd.choice(["quadruped", "manipulator"])
            spec = random_spec(rnd, emb, max_terms=4)
            feats = random_features(rnd, emb)
            base = eval_reward(spec, feats)
            for t in spec.terms:
                r = oracles.residual(t.residual_fn, t.params, feats)
                if all(v == 0.0 for v in r):
                    continue
                import dataclasses

                bumped = upsert_term(spec, dataclasses.replace(t, weight=t.weight + 1.0))
                assert eval_reward(bumped, feats) < base


class TestAccumulate:
    def test_empty(self):
        assert accumulate_return([]) == 0.0

    def test_simple(self):
        assert accumulate_return([-1.0, -2.0, -3.0]) == -6.0

    def test_fifty_steps(self):
        assert accumulate_return([-0.01] * 50) == pytest.approx(-0.5, abs=1e-12)

    def test_nan_rejected(self):
        with pytest.raises(NumericError):
            accumulate_return([0.0, float("nan")])


class TestSpecEditing:
    def test_upsert_inserts(self):
        spec = upsert_term(RewardSpec(), term())
        assert len(spec.terms) == 1

    def test_upsert_replaces_same_id(self):
        spec = upsert_term(RewardSpec(), term(target=0.1))
        spec = upsert_term(spec, term(target=0.5))
        assert len(spec.terms) == 1
        assert spec.terms[0].params["target"] == 0.5

    def test_upsert_is_idempotent(self):
        t = term(target=0.3)
        once = upsert_term(RewardSpec(), t)
        twice = upsert_term(once, t)
        assert once == twice

    def test_upsert_preserves_position(self):
        spec = RewardSpec()
        spec = upsert_term(spec, term(tid="a"))
        spec = upsert_term(spec, term(tid="b"))
        spec = upsert_term(spec, term(tid="a", target=1.0))
        assert [t.id for t in spec.terms] == ["a", "b"]

    def test_remove(self):
        spec = upsert_term(RewardSpec(), term(tid="a"))
        assert remove_term(spec, "a").terms == ()
        assert remove_term(spec, "missing") is spec

    def test_duplicate_ids_rejected(self):
        with pytest.raises(ValidationError):
            RewardSpec(terms=(term(tid="x"), term(tid="x")))

    def test_negative_weight_rejected(self):
        with pytest.raises(ValidationError):
            term(weight=-1.0)

    def test_specs_are_immutable(self):
        spec = upsert_term(RewardSpec(), term())
        with pytest.raises(Exception):
            spec.terms = ()


class TestSerialization:
    def test_round_trip_identity(self, rnd):
        for case in range(100):
            emb = rnd.choice(["quadruped", "manipulator"])
            spec = random_spec(rnd, emb)
            text = spec_to_canonical_json(spec)
            again = spec_from_json(text)
            assert again == spec
            assert spec_to_canonical_json(again) == text

    def test_checksum_stable_and_sensitive(self):
        a = upsert_term(RewardSpec(), term(target=0.3))
        b = upsert_term(RewardSpec(), term(target=0.3))
        c = upsert_term(RewardSpec(), term(target=0.4))
        assert spec_checksum(a) == spec_checksum(b)
        assert spec_checksum(a) != spec_checksum(c)

    def test_version_gate(self):
        import json

        from nl2mpc.errors import VersionError

        payload = json.loads(spec_to_canonical_json(RewardSpec()))
        payload["version"] = 99
        with pytest.raises(VersionError):
            spec_from_json(json.dumps(payload))
