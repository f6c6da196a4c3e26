"""Iterative LQG with a Gauss-Newton backward pass.

Cost is the negated reward.  Dynamics Jacobians come from central finite
differences evaluated in one batch across the horizon.  Reward derivatives
combine finite-difference residual Jacobians with the norms' analytic
gradients and Hessians (Gauss-Newton), which keeps the stage Hessians
positive semidefinite.  The backward pass regularizes Quu with an adaptive
mu; the forward pass line-searches over a geometric ladder of step sizes,
rolling all of them out in one batch and keeping the largest improving one.

Finite differences on actions shrink their step near the bounds so the
probe never straddles a clamp.
"""

from __future__ import annotations

import numpy as np

from nl2mpc.errors import ConditioningError, NumericError
from nl2mpc.planning.config import PlannerConfig
from nl2mpc.planning.model import DynamicsModel, RewardModel
from nl2mpc.planning.result import PlanResult


def _rollout(dyn, rew, x0, actions):
    H = actions.shape[0]
    states = np.empty((H + 1, dyn.state_dim))
    rewards = np.empty(H)
    states[0] = x0
    x = np.asarray(x0, dtype=float)
    for t in range(H):
        r = rew.reward(x, actions[t])
        if not np.isfinite(r):
            raise NumericError(f"non-finite reward in rollout at step {t}")
        rewards[t] = r
        x = dyn.step(x, actions[t])
        if not np.all(np.isfinite(x)):
            raise NumericError(f"non-finite state in rollout at step {t}")
        states[t + 1] = x
    return states, rewards


def _fd_steps_u(U: np.ndarray, dyn: DynamicsModel, h: float) -> np.ndarray:
    """Per-entry probe step, shrunk near the action bounds (floor 1e-9)."""
    room = np.minimum(U - dyn.action_low, dyn.action_high - U)
    return np.maximum(np.minimum(h, 0.5 * room), 1e-9)


def _derivatives(dyn, rew, X, U, h):
    """All stage derivatives in one batched evaluation grid.

    Grid layout per stage t: column 0 is the nominal, then 2n state probes
    (+h, -h interleaved), then 2m action probes.
    """
    H, m = U.shape
    n = X.shape[1]
    hu = _fd_steps_u(U, dyn, h)  # (H, m)

    G = 1 + 2 * n + 2 * m
    XX = np.repeat(X[:, None, :], G, axis=1)
    UU = np.repeat(U[:, None, :], G, axis=1)
    for i in range(n):
        XX[:, 1 + 2 * i, i] += h
        XX[:, 2 + 2 * i, i] -= h
    base = 1 + 2 * n
    for j in range(m):
        UU[:, base + 2 * j, j] += hu[:, j]
        UU[:, base + 2 * j + 1, j] -= hu[:, j]

    nxt = dyn.step(XX, UU)  # (H, G, n)
    fx = np.empty((H, n, n))
    fu = np.empty((H, n, m))
    for i in range(n):
        fx[:, :, i] = (nxt[:, 1 + 2 * i] - nxt[:, 2 + 2 * i]) / (2.0 * h)
    for j in range(m):
        fu[:, :, j] = (nxt[:, base + 2 * j] - nxt[:, base + 2 * j + 1]) / (
            2.0 * hu[:, j][:, None]
        )

    blocks = rew.stack(XX, UU)  # list of (R (H, G, d), w, norm)
    cx = np.zeros((H, n))
    cu = np.zeros((H, m))
    cxx = np.zeros((H, n, n))
    cuu = np.zeros((H, m, m))
    cux = np.zeros((H, m, n))
    for R, w, norm in blocks:
        R = np.asarray(R, dtype=float)
        d = R.shape[-1]
        r0 = R[:, 0, :]  # (H, d)
        Jx = np.empty((H, d, n))
        Ju = np.empty((H, d, m))
        for i in range(n):
            Jx[:, :, i] = (R[:, 1 + 2 * i] - R[:, 2 + 2 * i]) / (2.0 * h)
        for j in range(m):
            Ju[:, :, j] = (R[:, base + 2 * j] - R[:, base + 2 * j + 1]) / (
                2.0 * hu[:, j][:, None]
            )
        for t in range(H):
            g = norm.grad(r0[t])          # (d,)
            Hn = norm.hessian(r0[t])      # (d, d)
            cx[t] += w * (Jx[t].T @ g)
            cu[t] += w * (Ju[t].T @ g)
            JxH = Hn @ Jx[t]
            cxx[t] += w * (Jx[t].T @ JxH)
            cuu[t] += w * (Ju[t].T @ (Hn @ Ju[t]))
            cux[t] += w * (Ju[t].T @ JxH)
    return fx, fu, cx, cu, cxx, cuu, cux


def _backward(fx, fu, cx, cu, cxx, cuu, cux, mu, mu_factor, mu_max):
    """Regularized Riccati sweep.  Returns gains and expected improvement."""
    H, n = cx.shape
    m = cu.shape[1]
    while True:
        k = np.empty((H, m))
        K = np.empty((H, m, n))
        Vx = np.zeros(n)
        Vxx = np.zeros((n, n))
        d1 = 0.0
        d2 = 0.0
        failed = False
        for t in range(H - 1, -1, -1):
            Qx = cx[t] + fx[t].T @ Vx
            Qu = cu[t] + fu[t].T @ Vx
            Qxx = cxx[t] + fx[t].T @ Vxx @ fx[t]
            Quu = cuu[t] + fu[t].T @ Vxx @ fu[t]
            Qux = cux[t] + fu[t].T @ Vxx @ fx[t]
            Quu_reg = Quu + mu * np.eye(m)
            try:
                L = np.linalg.cholesky(0.5 * (Quu_reg + Quu_reg.T))
            except np.linalg.LinAlgError:
                failed = True
                break
            rhs = np.concatenate([Qu[:, None], Qux], axis=1)
            sol = np.linalg.solve(L.T, np.linalg.solve(L, rhs))
            k[t] = -sol[:, 0]
            K[t] = -sol[:, 1:]
            d1 += float(k[t] @ Qu)
            d2 += 0.5 * float(k[t] @ Quu @ k[t])
            Vx = Qx + K[t].T @ Quu @ k[t] + K[t].T @ Qu + Qux.T @ k[t]
            Vxx = Qxx + K[t].T @ Quu @ K[t] + K[t].T @ Qux + Qux.T @ K[t]
            Vxx = 0.5 * (Vxx + Vxx.T)
        if not failed:
            return k, K, d1, d2, mu
        mu *= mu_factor
        if mu > mu_max:
            raise ConditioningError(
                f"backward pass not positive definite at mu={mu:.3g}"
            )


def _forward_batch(dyn, rew, x_nom, u_nom, k, K, alphas):
    """Roll out every line-search step size in one batch."""
    A = len(alphas)
    H, m = u_nom.shape
    n = x_nom.shape[1]
    X = np.broadcast_to(x_nom[0], (A, n)).copy()
    states = np.empty((A, H + 1, n))
    actions = np.empty((A, H, m))
    rewards = np.empty((A, H))
    states[:, 0] = X
    al = np.asarray(alphas, dtype=float)[:, None]
    for t in range(H):
        du = al * k[t][None, :] + (X - x_nom[t][None, :]) @ K[t].T
        u = np.clip(u_nom[t][None, :] + du, dyn.action_low, dyn.action_high)
        r = rew.reward(X, u)
        if not np.all(np.isfinite(r)):
            raise NumericError(f"non-finite reward in line search at step {t}")
        actions[:, t] = u
        rewards[:, t] = r
        X = dyn.step(X, u)
        states[:, t + 1] = X
    return states, actions, rewards


def ilqg_plan(
    dyn: DynamicsModel,
    rew: RewardModel,
    x0: np.ndarray,
    nominal: np.ndarray,
    cfg: PlannerConfig,
    max_iterations: int | None = None,
) -> PlanResult:
    icfg = cfg.ilqg
    H = cfg.horizon
    nominal = dyn.clip(np.asarray(nominal, dtype=float))
    if nominal.shape != (H, dyn.action_dim):
        raise ValueError(
            f"nominal must have shape {(H, dyn.action_dim)}, got {nominal.shape}"
        )
    iters = icfg.max_iterations if max_iterations is None else max_iterations

    states, rewards = _rollout(dyn, rew, x0, nominal)
    J = float(np.sum(rewards))
    actions = nominal.copy()

    mu = icfg.mu_init
    alphas = [0.5 ** i for i in range(icfg.line_search_steps)]
    diagnostics = []
    accepted_iterations = 0

    for it in range(iters):
        fx, fu, cx, cu, cxx, cuu, cux = _derivatives(
            dyn, rew, states[:-1], actions, icfg.fd_step
        )
        k, K, d1, d2, mu = _backward(
            fx, fu, cx, cu, cxx, cuu, cux, mu, icfg.mu_factor, icfg.mu_max
        )
        ls_states, ls_actions, ls_rewards = _forward_batch(
            dyn, rew, states, actions, k, K, alphas
        )
        ls_J = np.sum(ls_rewards, axis=1)
        improved = np.nonzero(ls_J > J)[0]
        if improved.size == 0:
            mu = min(mu * icfg.mu_factor, icfg.mu_max)
            diagnostics.append({"iteration": it, "J": J, "dJ": 0.0, "mu": mu, "alpha": 0.0})
            break
        best = int(improved[0])  # largest improving step size
        dJ = float(ls_J[best] - J)
        J = float(ls_J[best])
        states = ls_states[best].copy()
        actions = ls_actions[best].copy()
        rewards = ls_rewards[best].copy()
        accepted_iterations += 1
        mu = max(mu / icfg.mu_factor, icfg.mu_min)
        diagnostics.append(
            {"iteration": it, "J": J, "dJ": dJ, "mu": mu, "alpha": alphas[best]}
        )
        if dJ < icfg.tol:
            break

    return PlanResult(
        actions=actions,
        states=states,
        rewards=rewards,
        J=float(np.sum(rewards)),
        iterations=accepted_iterations,
        backend="ilqg",
        diagnostics=tuple(diagnostics),
    )
