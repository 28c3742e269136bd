"""Bayesian group best-worst method via Metropolis-within-Gibbs.

Hierarchical model for K experts over n criteria::

    a_worst^k | w^k   ~ Multinomial(w^k)
    a_best^k  | w^k   ~ Multinomial(p^k),   p^k_j = (1/w^k_j) / sum_l (1/w^k_l)
    w^k | w_agg, gam  ~ Dirichlet(gam * w_agg)
    gam               ~ Gamma(shape=a, rate=b)
    w_agg             ~ Dirichlet(alpha * 1)

Comparison values are used directly as multinomial counts. Every simplex
vector is sampled through additive log-ratio coordinates ``z`` with
``w = softmax([z, 0])``, whose Jacobian contributes ``sum_j log w_j``; the
concentration is sampled as ``log gam``. Each expert vector, the aggregate
vector and the concentration form one random-walk block per sweep.

Random numbers are drawn up front per chain from a ``SeedSequence`` spawn, so
the numba and numpy paths see identical streams, and chains never share
state.
"""

from __future__ import annotations

import math
from typing import Sequence

import numpy as np
from scipy.special import gammaln

from .._accel import jitable, njit, resolve_backend
from .types import BestWorstPreference, InvalidPreferenceError, MCMCConfig, WeightPosterior

ADAPT_BATCH = 50
TARGET_ACCEPT = 0.3
INITIAL_STEP = 0.5


def _check_prefs(prefs: Sequence[BestWorstPreference]) -> int:
    if not prefs:
        raise InvalidPreferenceError("at least one expert preference is required")
    n = prefs[0].n
    for p in prefs:
        if p.n != n:
            raise InvalidPreferenceError(
                f"expert {p.expert_id} compares {p.n} criteria, expected {n}"
            )
    return n


# ---------------------------------------------------------------------------
# log densities (shared by both paths through register_jitable)
# ---------------------------------------------------------------------------

@jitable
def _log_simplex(z, out):
    """``out = log softmax([z, 0])``."""
    m = 0.0
    for v in z:
        if v > m:
            m = v
    s = math.exp(-m)
    for v in z:
        s += math.exp(v - m)
    lse = m + math.log(s)
    d = z.shape[0]
    for j in range(d):
        out[j] = z[j] - lse
    out[d] = -lse


@jitable
def _expert_logp(lw, a_best, a_worst, gam, wagg):
    """Terms of the joint log density that involve one expert's weights."""
    n = lw.shape[0]
    # log p_j = -log w_j - logsumexp(-log w)
    m = -lw[0]
    for j in range(1, n):
        if -lw[j] > m:
            m = -lw[j]
    s = 0.0
    for j in range(n):
        s += math.exp(-lw[j] - m)
    lse = m + math.log(s)
    lp = 0.0
    for j in range(n):
        lp += a_worst[j] * lw[j] + a_best[j] * (-lw[j] - lse)
        # (gam*wagg_j - 1) * log w_j from the Dirichlet, + log w_j Jacobian
        lp += gam * wagg[j] * lw[j]
    return lp


@jitable
def _dirichlet_links(lw_experts, gam, wagg):
    """sum_k log Dir(w^k | gam * wagg), including normalisers."""
    k_count, n = lw_experts.shape
    norm = math.lgamma(gam)
    for j in range(n):
        norm -= math.lgamma(gam * wagg[j])
    lp = k_count * norm
    for k in range(k_count):
        for j in range(n):
            lp += (gam * wagg[j] - 1.0) * lw_experts[k, j]
    return lp


# ---------------------------------------------------------------------------
# numba path: one chain at a time
# ---------------------------------------------------------------------------

def _chain_loop(a_best, a_worst, iterations, burn_in, thinning, shape, rate, alpha,
                noise_k, noise_a, noise_g, log_u, out_agg, out_exp, out_gam):
    k_count, n = a_best.shape
    d = n - 1
    zk = np.zeros((k_count, d))
    za = np.zeros(d)
    eta = 0.0
    lwk = np.empty((k_count, n))
    for k in range(k_count):
        _log_simplex(zk[k], lwk[k])
    lwa = np.empty(n)
    _log_simplex(za, lwa)
    wagg = np.exp(lwa)
    step_k = np.full(k_count, INITIAL_STEP)
    step_a = INITIAL_STEP
    step_g = INITIAL_STEP
    acc_k = np.zeros(k_count)
    acc_a = 0.0
    acc_g = 0.0
    kept_acc = 0.0
    kept_tries = 0.0
    prop_z = np.empty(d)
    prop_lw = np.empty(n)
    prop_lwa = np.empty(n)
    slot = 0
    for it in range(iterations):
        gam = math.exp(eta)
        # expert blocks
        for k in range(k_count):
            for j in range(d):
                prop_z[j] = zk[k, j] + step_k[k] * noise_k[it, k, j]
            _log_simplex(prop_z, prop_lw)
            delta = (_expert_logp(prop_lw, a_best[k], a_worst[k], gam, wagg)
                     - _expert_logp(lwk[k], a_best[k], a_worst[k], gam, wagg))
            if log_u[it, k] < delta:
                zk[k, :] = prop_z
                lwk[k, :] = prop_lw
                acc_k[k] += 1.0
                if it >= burn_in:
                    kept_acc += 1.0
            if it >= burn_in:
                kept_tries += 1.0
        # aggregate block
        for j in range(d):
            prop_z[j] = za[j] + step_a * noise_a[it, j]
        _log_simplex(prop_z, prop_lwa)
        prop_w = np.exp(prop_lwa)
        cur = _dirichlet_links(lwk, gam, wagg)
        new = _dirichlet_links(lwk, gam, prop_w)
        for j in range(n):
            cur += alpha * lwa[j]
            new += alpha * prop_lwa[j]
        if log_u[it, k_count] < new - cur:
            za[:] = prop_z
            lwa[:] = prop_lwa
            wagg = prop_w
            acc_a += 1.0
            if it >= burn_in:
                kept_acc += 1.0
        if it >= burn_in:
            kept_tries += 1.0
        # concentration block on log scale
        prop_eta = eta + step_g * noise_g[it]
        cur = _dirichlet_links(lwk, gam, wagg) + shape * eta - rate * gam
        pg = math.exp(prop_eta)
        new = _dirichlet_links(lwk, pg, wagg) + shape * prop_eta - rate * pg
        if log_u[it, k_count + 1] < new - cur:
            eta = prop_eta
            acc_g += 1.0
            if it >= burn_in:
                kept_acc += 1.0
        if it >= burn_in:
            kept_tries += 1.0
        # adapt during burn-in only
        if it < burn_in and (it + 1) % ADAPT_BATCH == 0:
            delta_s = min(0.1, 1.0 / math.sqrt((it + 1) // ADAPT_BATCH))
            for k in range(k_count):
                step_k[k] *= math.exp(delta_s if acc_k[k] / ADAPT_BATCH > TARGET_ACCEPT else -delta_s)
                acc_k[k] = 0.0
            step_a *= math.exp(delta_s if acc_a / ADAPT_BATCH > TARGET_ACCEPT else -delta_s)
            step_g *= math.exp(delta_s if acc_g / ADAPT_BATCH > TARGET_ACCEPT else -delta_s)
            acc_a = 0.0
            acc_g = 0.0
        if it >= burn_in and (it - burn_in) % thinning == 0:
            for j in range(n):
                out_agg[slot, j] = wagg[j]
            for k in range(k_count):
                for j in range(n):
                    out_exp[slot, k, j] = math.exp(lwk[k, j])
            out_gam[slot] = math.exp(eta)
            slot += 1
    return kept_acc, kept_tries


_chain_jit = njit(_chain_loop)


# ---------------------------------------------------------------------------
# numpy path: all chains in lock-step
# ---------------------------------------------------------------------------

def _log_simplex_vec(z: np.ndarray) -> np.ndarray:
    full = np.concatenate([z, np.zeros(z.shape[:-1] + (1,))], axis=-1)
    m = np.maximum(full.max(axis=-1, keepdims=True), 0.0)
    lse = m + np.log(np.exp(full - m).sum(axis=-1, keepdims=True))
    return full - lse


def _expert_logp_vec(lw, a_best, a_worst, gam, wagg):
    neg = -lw
    m = neg.max(axis=-1, keepdims=True)
    lse = m + np.log(np.exp(neg - m).sum(axis=-1, keepdims=True))
    return (a_worst * lw + a_best * (neg - lse) + gam[:, None] * wagg * lw).sum(axis=-1)


def _dirichlet_links_vec(lwk, gam, wagg):
    # lwk: (C, K, n), gam: (C,), wagg: (C, n)
    k_count = lwk.shape[1]
    ga = gam[:, None] * wagg
    norm = gammaln(gam) - gammaln(ga).sum(axis=-1)
    return k_count * norm + ((ga - 1.0)[:, None, :] * lwk).sum(axis=(1, 2))


def _chains_numpy(a_best, a_worst, cfg: MCMCConfig, noise_k, noise_a, noise_g, log_u):
    C = noise_k.shape[0]
    k_count, n = a_best.shape
    d = n - 1
    zk = np.zeros((C, k_count, d))
    za = np.zeros((C, d))
    eta = np.zeros(C)
    lwk = _log_simplex_vec(zk)
    lwa = _log_simplex_vec(za)
    wagg = np.exp(lwa)
    step_k = np.full((C, k_count), INITIAL_STEP)
    step_a = np.full(C, INITIAL_STEP)
    step_g = np.full(C, INITIAL_STEP)
    acc_k = np.zeros((C, k_count))
    acc_a = np.zeros(C)
    acc_g = np.zeros(C)
    kept_acc = np.zeros(C)
    kept_tries = 0.0
    R = cfg.retained_per_chain
    out_agg = np.empty((C, R, n))
    out_exp = np.empty((C, R, k_count, n))
    out_gam = np.empty((C, R))
    # prior exponents (alpha - 1), (a - 1) plus the +1 from each log Jacobian
    alpha = cfg.dirichlet_alpha
    shape = cfg.gamma_shape
    slot = 0
    for it in range(cfg.iterations):
        gam = np.exp(eta)
        kept = it >= cfg.burn_in
        for k in range(k_count):
            prop_z = zk[:, k] + step_k[:, k, None] * noise_k[:, it, k]
            prop_lw = _log_simplex_vec(prop_z)
            delta = (_expert_logp_vec(prop_lw, a_best[k], a_worst[k], gam, wagg)
                     - _expert_logp_vec(lwk[:, k], a_best[k], a_worst[k], gam, wagg))
            ok = log_u[:, it, k] < delta
            zk[ok, k] = prop_z[ok]
            lwk[ok, k] = prop_lw[ok]
            acc_k[:, k] += ok
            if kept:
                kept_acc += ok
                kept_tries += 1
        prop_z = za + step_a[:, None] * noise_a[:, it]
        prop_lwa = _log_simplex_vec(prop_z)
        prop_w = np.exp(prop_lwa)
        cur = _dirichlet_links_vec(lwk, gam, wagg) + alpha * lwa.sum(axis=-1)
        new = _dirichlet_links_vec(lwk, gam, prop_w) + alpha * prop_lwa.sum(axis=-1)
        ok = log_u[:, it, k_count] < new - cur
        za[ok] = prop_z[ok]
        lwa[ok] = prop_lwa[ok]
        wagg[ok] = prop_w[ok]
        acc_a += ok
        if kept:
            kept_acc += ok
            kept_tries += 1
        prop_eta = eta + step_g * noise_g[:, it]
        pg = np.exp(prop_eta)
        cur = _dirichlet_links_vec(lwk, gam, wagg) + shape * eta - cfg.gamma_rate * gam
        new = _dirichlet_links_vec(lwk, pg, wagg) + shape * prop_eta - cfg.gamma_rate * pg
        ok = log_u[:, it, k_count + 1] < new - cur
        eta = np.where(ok, prop_eta, eta)
        acc_g += ok
        if kept:
            kept_acc += ok
            kept_tries += 1
        if it < cfg.burn_in and (it + 1) % ADAPT_BATCH == 0:
            ds = min(0.1, 1.0 / math.sqrt((it + 1) // ADAPT_BATCH))
            step_k *= np.exp(np.where(acc_k / ADAPT_BATCH > TARGET_ACCEPT, ds, -ds))
            step_a *= np.exp(np.where(acc_a / ADAPT_BATCH > TARGET_ACCEPT, ds, -ds))
            step_g *= np.exp(np.where(acc_g / ADAPT_BATCH > TARGET_ACCEPT, ds, -ds))
            acc_k[:] = 0.0
            acc_a[:] = 0.0
            acc_g[:] = 0.0
        if kept and (it - cfg.burn_in) % cfg.thinning == 0:
            out_agg[:, slot] = wagg
            out_exp[:, slot] = np.exp(lwk)
            out_gam[:, slot] = np.exp(eta)
            slot += 1
    return out_agg, out_exp, out_gam, kept_acc, kept_tries


# ---------------------------------------------------------------------------
# driver
# ---------------------------------------------------------------------------

def _draw_streams(cfg: MCMCConfig, k_count: int, n: int):
    """Per-chain proposal noise and log-uniforms, from spawned sub-seeds."""
    d = n - 1
    streams = []
    for child in np.random.SeedSequence(cfg.seed).spawn(cfg.chains):
        rng = np.random.Generator(np.random.PCG64(child))
        streams.append((
            rng.standard_normal((cfg.iterations, k_count, d)),
            rng.standard_normal((cfg.iterations, d)),
            rng.standard_normal(cfg.iterations),
            np.log(rng.random((cfg.iterations, k_count + 2))),
        ))
    return [np.stack(parts) for parts in zip(*streams)]


def sample_bbwm(prefs: Sequence[BestWorstPreference], cfg: MCMCConfig = MCMCConfig(),
                backend: str = "auto") -> WeightPosterior:
    """Posterior draws of the aggregate weights for a panel of experts."""
    n = _check_prefs(prefs)
    a_best = np.array([p.a_best for p in prefs], dtype=float)
    a_worst = np.array([p.a_worst for p in prefs], dtype=float)
    k_count = len(prefs)
    noise_k, noise_a, noise_g, log_u = _draw_streams(cfg, k_count, n)
    R = cfg.retained_per_chain

    if resolve_backend(backend) == "numba":
        out_agg = np.empty((cfg.chains, R, n))
        out_exp = np.empty((cfg.chains, R, k_count, n))
        out_gam = np.empty((cfg.chains, R))
        acc = 0.0
        tries = 0.0
        for c in range(cfg.chains):
            a, t = _chain_jit(
                a_best, a_worst, cfg.iterations, cfg.burn_in, cfg.thinning,
                cfg.gamma_shape, cfg.gamma_rate, cfg.dirichlet_alpha,
                noise_k[c], noise_a[c], noise_g[c], log_u[c],
                out_agg[c], out_exp[c], out_gam[c],
            )
            acc += a
            tries += t
    else:
        out_agg, out_exp, out_gam, kept_acc, kept_tries = _chains_numpy(
            a_best, a_worst, cfg, noise_k, noise_a, noise_g, log_u)
        acc = float(kept_acc.sum())
        tries = kept_tries * cfg.chains

    agg = out_agg.reshape(-1, n)
    experts = out_exp.reshape(-1, k_count, n)
    return WeightPosterior(
        agg_samples=agg,
        agg_mean=agg.mean(axis=0),
        expert_means=experts.mean(axis=0),
        gamma_samples=out_gam.reshape(-1),
        acceptance_rate=acc / tries if tries else 0.0,
        config=cfg,
        expert_samples=experts,
    )
