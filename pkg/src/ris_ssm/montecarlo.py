"""Trial-level simulation of the transmit -> detect chain.

Determinism contract
--------------------
Trials are grouped into fixed-size batches.  Batch ``b`` draws all of
its randomness from a counter-based Philox stream keyed by
``(master_seed, b)``, and trial ``t`` always lives at lane
``t mod batch_size`` of batch ``t // batch_size``.  Workers only decide
*who* computes a batch, never what it contains, and aggregation is an
index-ordered reduction, so results are bit-identical for any worker
count or scheduling order.

Per batch the draw order is fixed: gain real parts, gain imaginary
parts, the data block, (selection keys / angles where the scheme needs
them), then noise.

Two signal models are available for the sorted scheme:

* ``abstract`` -- the scalar branch model: the monitored branch of the
  illuminated scatterer sees sqrt(P_s) h_l s_m, every other monitored
  branch sees only its own unit-variance complex Gaussian noise.  This
  is the model the closed-form analysis averages, and the default for
  error-rate sweeps.
* ``full_array`` -- explicit steering vectors: the RIS phase profile is
  aligned per trial, branch observations are built from the actual
  array inner products, and the receive noise vector is projected
  through the combiner, so inter-beam leakage and noise correlation are
  physically present.  Validation-scale only.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, replace

import numpy as np

from .analytics import LinkBudget
from .modulation import SsmConfig

__all__ = [
    "TrialPlan",
    "SweepResult",
    "simulate_abep",
    "simulate_capacity",
    "simulate_benchmark",
    "simulate_random_selection",
    "run_ber_point",
    "SCHEMES",
]

SCHEMES = (
    "ris_ssm_sorted",
    "ris_ssm_random",
    "benchmark_max_beam",
    "benchmark_min_beam",
)

_ANGLE_DOMAINS = {
    "beam_separable": (-math.pi / 2.0, math.pi / 2.0),
    "full": (-math.pi, math.pi),
}


@dataclass(frozen=True)
class TrialPlan:
    """How many trials to run and how their randomness is organized."""

    trials: int = 1_000_000
    master_seed: int = 0
    mode: str = "abstract"
    scheme: str = "ris_ssm_sorted"
    batch_size: int = 8192
    workers: int = 1
    early_stop_errors: int | None = None
    trace_path: str | None = None
    angle_domain: str = "beam_separable"

    def __post_init__(self) -> None:
        if self.trials < 1:
            raise ValueError(f"trials must be >= 1, got {self.trials}")
        if self.batch_size < 1:
            raise ValueError(f"batch_size must be >= 1, got {self.batch_size}")
        if self.workers < 1:
            raise ValueError(f"workers must be >= 1, got {self.workers}")
        if self.mode not in ("abstract", "full_array"):
            raise ValueError(f"mode must be 'abstract' or 'full_array', got {self.mode!r}")
        if self.scheme not in SCHEMES:
            raise ValueError(f"scheme must be one of {SCHEMES}, got {self.scheme!r}")
        if self.angle_domain not in _ANGLE_DOMAINS:
            raise ValueError(f"unknown angle domain {self.angle_domain!r}")
        if not 0 <= self.master_seed < 2**64:
            raise ValueError("master_seed must fit in an unsigned 64-bit integer")


@dataclass
class SweepResult:
    """One sweep point: Monte Carlo estimates next to the analytical curves."""

    series: str = ""
    snr_db: float = math.nan
    ber_mc: float | None = None
    bit_errors: int | None = None
    bits_sent: int | None = None
    abep_pdf: float | None = None
    abep_mgf: float | None = None
    abep_qapprox: float | None = None
    abep_asymptotic: float | None = None
    capacity_mc: float | None = None
    capacity_lb: float | None = None
    throughput_mc: float | None = None
    throughput_lb: float | None = None


def _batch_rng(master_seed: int, batch_index: int) -> np.random.Generator:
    return np.random.Generator(np.random.Philox(key=[master_seed, batch_index]))


def _batch_sizes(plan: TrialPlan) -> list[int]:
    full, rest = divmod(plan.trials, plan.batch_size)
    sizes = [plan.batch_size] * full
    if rest:
        sizes.append(rest)
    return sizes


def _run_batches(plan: TrialPlan, kernel):
    """Evaluate ``kernel(rng, n, start_trial)`` over all batches.

    Returns per-batch outputs in batch-index order.  When an early-stop
    threshold is set, the included prefix is decided purely by
    cumulative error counts in index order, so it does not depend on
    how many workers ran.
    """
    sizes = _batch_sizes(plan)
    starts = np.concatenate([[0], np.cumsum(sizes)[:-1]]).astype(int)
    outputs: list = [None] * len(sizes)

    def run(i: int):
        return kernel(_batch_rng(plan.master_seed, i), sizes[i], int(starts[i]))

    if plan.workers == 1 or len(sizes) == 1:
        cumulative = 0
        for i in range(len(sizes)):
            outputs[i] = run(i)
            cumulative += outputs[i][0]
            if plan.early_stop_errors is not None and cumulative >= plan.early_stop_errors:
                return outputs[: i + 1]
        return outputs

    with ThreadPoolExecutor(max_workers=plan.workers) as pool:
        done = 0
        while done < len(sizes):
            wave = range(done, min(done + plan.workers, len(sizes)))
            for i, out in zip(wave, pool.map(run, wave)):
                outputs[i] = out
            done = wave.stop
            if plan.early_stop_errors is not None:
                cumulative = 0
                for i in range(done):
                    cumulative += outputs[i][0]
                    if cumulative >= plan.early_stop_errors:
                        return outputs[: i + 1]
    return outputs


def _write_trace(path: str, batches: list) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        for _, _, rows in batches:
            for trial, l, m, l_hat, m_hat in rows:
                fh.write(f"{trial}\t{l}\t{m}\t{l_hat}\t{m_hat}\n")


def _finish_ber(cfg: SsmConfig, budget: LinkBudget, plan: TrialPlan, batches: list) -> SweepResult:
    errors = int(sum(b[0] for b in batches))
    bits = int(sum(b[1] for b in batches))
    if plan.trace_path is not None:
        _write_trace(plan.trace_path, batches)
    return SweepResult(
        series=plan.scheme,
        snr_db=budget.snr_db,
        ber_mc=errors / bits,
        bit_errors=errors,
        bits_sent=bits,
    )


def _detect_and_count(v, y, branch_gains, points, labels, index_of_label, sym_bits, sqrt_ps):
    """Joint min-distance detection and bit-error count for one batch.

    ``branch_gains[b, k]`` is the detector's model gain for monitored
    branch k; hypotheses are all (branch, symbol) pairs.
    """
    order = points.shape[0]
    model = sqrt_ps * branch_gains[:, :, None] * points[None, None, :]
    metric = np.abs(y[:, :, None] - model) ** 2
    flat = metric.reshape(metric.shape[0], -1).argmin(axis=1)
    l_hat_idx = flat // order
    m_hat_idx = flat % order
    label_rx = (l_hat_idx << sym_bits) | labels[m_hat_idx]
    bit_errors = int(np.bitwise_count(v ^ label_rx).sum())
    return bit_errors, l_hat_idx, m_hat_idx


def _sorted_gains(rng: np.random.Generator, n: int, l_total: int) -> np.ndarray:
    g = rng.standard_normal((n, l_total)) + 1j * rng.standard_normal((n, l_total))
    g /= math.sqrt(2.0)
    order = np.argsort(-(np.abs(g) ** 2), axis=1, kind="stable")
    return np.take_along_axis(g, order, axis=1)


def simulate_abep(cfg: SsmConfig, budget: LinkBudget, plan: TrialPlan) -> SweepResult:
    """Bit error rate of the sorted-selection scheme at one SNR point."""
    if plan.mode == "full_array":
        kernel = _full_array_kernel(cfg, budget, plan)
    else:
        kernel = _abstract_kernel(cfg, budget, sorted_selection=True, trace=plan.trace_path is not None)
    plan = replace(plan, scheme="ris_ssm_sorted")
    return _finish_ber(cfg, budget, plan, _run_batches(plan, kernel))


def simulate_random_selection(cfg: SsmConfig, budget: LinkBudget, plan: TrialPlan) -> SweepResult:
    """Bit error rate when the candidate scatterers are picked at random, unsorted."""
    if plan.mode != "abstract":
        raise ValueError("random selection is implemented for the abstract model only")
    kernel = _abstract_kernel(cfg, budget, sorted_selection=False, trace=plan.trace_path is not None)
    plan = replace(plan, scheme="ris_ssm_random")
    return _finish_ber(cfg, budget, plan, _run_batches(plan, kernel))


def simulate_benchmark(cfg: SsmConfig, budget: LinkBudget, plan: TrialPlan, which: str = "max") -> SweepResult:
    """Bit error rate of a fixed single-beam link carrying every bit in the symbol.

    ``which`` selects the scatterer: ``max`` rides the strongest gain,
    ``min`` the weakest.  The detector knows the selected gain exactly.
    """
    if which not in ("max", "min"):
        raise ValueError(f"which must be 'max' or 'min', got {which!r}")
    if plan.mode != "abstract":
        raise ValueError("benchmarks are implemented for the abstract model only")
    if cfg.l_s != 1:
        raise ValueError("benchmarks carry all bits in the symbol; use a config with l_s = 1")
    kernel = _benchmark_kernel(cfg, budget, which, trace=plan.trace_path is not None)
    plan = replace(plan, scheme=f"benchmark_{which}_beam")
    return _finish_ber(cfg, budget, plan, _run_batches(plan, kernel))


def run_ber_point(cfg: SsmConfig, budget: LinkBudget, plan: TrialPlan) -> SweepResult:
    """Dispatch on ``plan.scheme``; used by the sweep runner."""
    if plan.scheme == "ris_ssm_sorted":
        return simulate_abep(cfg, budget, plan)
    if plan.scheme == "ris_ssm_random":
        return simulate_random_selection(cfg, budget, plan)
    if plan.scheme == "benchmark_max_beam":
        return simulate_benchmark(cfg, budget, plan, "max")
    return simulate_benchmark(cfg, budget, plan, "min")


def simulate_capacity(cfg: SsmConfig, budget: LinkBudget, plan: TrialPlan) -> float:
    """Monte Carlo ergodic capacity (bits per channel use).

    Averages the per-realization mutual-information lower bound over
    fresh sorted gain draws; converges to the exact-MGF analytic bound.
    """
    rho = budget.rho
    l_total, l_s = cfg.l_total, cfg.l_s
    energies = cfg.constellation.energies
    m_order = cfg.order
    alphabet = l_s * m_order
    pair_count = (l_s - 1) * (m_order - 1)

    def kernel(rng: np.random.Generator, n: int, start: int):
        power = np.abs(_sorted_gains(rng, n, l_total)[:, :l_s]) ** 2
        if pair_count > 0:
            terms = np.exp(-0.5 * rho * power[:, :, None] * energies[None, None, :])
            inner = alphabet + pair_count * terms.sum(axis=(1, 2))
        else:
            inner = np.full(n, float(alphabet))
        inst = 2.0 * math.log2(alphabet) - np.log2(inner)
        return 0, n, float(inst.sum())

    batches = _run_batches(replace(plan, early_stop_errors=None, trace_path=None), kernel)
    total = math.fsum(b[2] for b in batches)
    count = sum(b[1] for b in batches)
    return total / count


# ---------------------------------------------------------------------------
# Batch kernels
# ---------------------------------------------------------------------------

def _abstract_kernel(cfg: SsmConfig, budget: LinkBudget, sorted_selection: bool, trace: bool):
    l_total, l_s = cfg.l_total, cfg.l_s
    const = cfg.constellation
    sym_bits = const.bits_per_symbol
    alphabet = l_s * const.order
    noise_scale = math.sqrt(budget.n0 / 2.0)
    sqrt_ps = math.sqrt(budget.p_s)
    bits_per_use = cfg.bits_per_use

    def kernel(rng: np.random.Generator, n: int, start: int):
        if sorted_selection:
            h = _sorted_gains(rng, n, l_total)
            v = rng.integers(0, alphabet, size=n)
        else:
            g = rng.standard_normal((n, l_total)) + 1j * rng.standard_normal((n, l_total))
            g /= math.sqrt(2.0)
            v = rng.integers(0, alphabet, size=n)
            keys = rng.random((n, l_total))
            h = np.take_along_axis(g, np.argsort(keys, axis=1), axis=1)
        h = h[:, :l_s]
        l_idx = v >> sym_bits
        m_idx = const.index_of_label[v & (const.order - 1)]
        s_tx = const.points[m_idx]
        noise = rng.standard_normal((n, l_s)) + 1j * rng.standard_normal((n, l_s))
        y = noise_scale * noise
        rows = np.arange(n)
        y[rows, l_idx] += sqrt_ps * h[rows, l_idx] * s_tx
        errors, l_hat_idx, m_hat_idx = _detect_and_count(
            v, y, h, const.points, const.labels, const.index_of_label, sym_bits, sqrt_ps
        )
        trace_rows = None
        if trace:
            trace_rows = np.column_stack(
                [start + rows, l_idx + 1, m_idx + 1, l_hat_idx + 1, m_hat_idx + 1]
            )
        return errors, n * bits_per_use, trace_rows

    return kernel


def _benchmark_kernel(cfg: SsmConfig, budget: LinkBudget, which: str, trace: bool):
    const = cfg.constellation
    noise_scale = math.sqrt(budget.n0 / 2.0)
    sqrt_ps = math.sqrt(budget.p_s)
    rank = 0 if which == "max" else cfg.l_total - 1
    bits_per_use = const.bits_per_symbol

    def kernel(rng: np.random.Generator, n: int, start: int):
        h = _sorted_gains(rng, n, cfg.l_total)[:, rank]
        v = rng.integers(0, const.order, size=n)
        m_idx = const.index_of_label[v]
        noise = rng.standard_normal(n) + 1j * rng.standard_normal(n)
        y = sqrt_ps * h * const.points[m_idx] + noise_scale * noise
        metric = np.abs(y[:, None] - sqrt_ps * h[:, None] * const.points[None, :]) ** 2
        m_hat_idx = metric.argmin(axis=1)
        errors = int(np.bitwise_count(v ^ const.labels[m_hat_idx]).sum())
        trace_rows = None
        if trace:
            ones = np.ones(n, dtype=int)
            trace_rows = np.column_stack(
                [start + np.arange(n), ones, m_idx + 1, ones, m_hat_idx + 1]
            )
        return errors, n * bits_per_use, trace_rows

    return kernel


def _full_array_kernel(cfg: SsmConfig, budget: LinkBudget, plan: TrialPlan, geometry=None):
    """Explicit-array chain: per-trial RIS alignment, leakage and projected noise."""
    from .channel import ArrayGeometry

    geom = geometry if geometry is not None else ArrayGeometry(n_t=256, n_r=256, n_h=16, n_v=16)
    l_total, l_s = cfg.l_total, cfg.l_s
    const = cfg.constellation
    sym_bits = const.bits_per_symbol
    alphabet = l_s * const.order
    noise_scale = math.sqrt(budget.n0 / 2.0)
    sqrt_ps = math.sqrt(budget.p_s)
    bits_per_use = cfg.bits_per_use
    lo, hi = _ANGLE_DOMAINS[plan.angle_domain]
    trace = plan.trace_path is not None
    chunk = 256

    k_r = np.arange(geom.n_r)
    m_h = np.repeat(np.arange(geom.n_h), geom.n_v)
    m_v = np.tile(np.arange(geom.n_v), geom.n_h)

    def kernel(rng: np.random.Generator, n: int, start: int):
        h = _sorted_gains(rng, n, l_total)
        v = rng.integers(0, alphabet, size=n)
        theta_r = rng.uniform(lo, hi, (n, l_total))
        phi_t = rng.uniform(lo, hi, (n, l_total))
        varphi_t = rng.uniform(lo, hi, (n, l_total))
        phi_r = rng.uniform(lo, hi, n)
        varphi_r = rng.uniform(lo, hi, n)
        noise = rng.standard_normal((n, geom.n_r)) + 1j * rng.standard_normal((n, geom.n_r))

        l_idx = v >> sym_bits
        m_idx = const.index_of_label[v & (const.order - 1)]
        s_tx = const.points[m_idx]

        errors = 0
        trace_rows = [] if trace else None
        for c0 in range(0, n, chunk):
            sl = slice(c0, min(c0 + chunk, n))
            b = sl.stop - sl.start
            # receive ULA responses toward every scatterer, (b, n_r, L)
            a_r = np.exp(
                -2j * math.pi * geom.spacing_r * k_r[None, :, None] * np.sin(theta_r[sl])[:, None, :]
            ) / math.sqrt(geom.n_r)
            # RIS departure responses toward every scatterer, (b, N, L)
            phase_out = m_h[None, :, None] * (np.sin(phi_t[sl]) * np.cos(varphi_t[sl]))[
                :, None, :
            ] + m_v[None, :, None] * np.cos(phi_t[sl])[:, None, :]
            a_out = np.exp(-2j * math.pi * geom.spacing_ris * phase_out) / math.sqrt(geom.n_ris)
            # incident RIS response, (b, N)
            phase_in = m_h[None, :] * (np.sin(phi_r[sl]) * np.cos(varphi_r[sl]))[
                :, None
            ] + m_v[None, :] * np.cos(phi_r[sl])[:, None]
            a_in = np.exp(-2j * math.pi * geom.spacing_ris * phase_in) / math.sqrt(geom.n_ris)
            # phase profile aligned to each candidate: the reflected beam
            # e^(j psi) a_in, with psi = arg(a_out) - arg(a_in), (b, N, l_s)
            u = np.exp(1j * (np.angle(a_out[:, :, :l_s]) - np.angle(a_in)[:, :, None])) * a_in[
                :, :, None
            ]
            # inter-beam couplings on both sides
            r_coup = np.einsum("bnk,bnj->bkj", a_r[:, :, :l_s].conj(), a_r)
            p_coup = np.einsum("bnj,bnk->bjk", a_out.conj(), u)
            beta = h[sl][:, :, None] * p_coup
            # branch gain model per candidate hypothesis and the true one
            z_model = np.einsum("bkj,bjk->bk", r_coup, beta)
            beta_true = np.take_along_axis(beta, l_idx[sl][:, None, None], axis=2)[:, :, 0]
            z_true = np.einsum("bkj,bj->bk", r_coup, beta_true)
            n_proj = np.einsum("bnk,bn->bk", a_r[:, :, :l_s].conj(), noise[sl])
            y = sqrt_ps * z_true * s_tx[sl][:, None] + noise_scale * n_proj
            chunk_errors, l_hat_idx, m_hat_idx = _detect_and_count(
                v[sl], y, z_model, const.points, const.labels, const.index_of_label, sym_bits, sqrt_ps
            )
            errors += chunk_errors
            if trace:
                trace_rows.append(
                    np.column_stack(
                        [
                            start + np.arange(sl.start, sl.stop),
                            l_idx[sl] + 1,
                            m_idx[sl] + 1,
                            l_hat_idx + 1,
                            m_hat_idx + 1,
                        ]
                    )
                )
        if trace:
            trace_rows = np.concatenate(trace_rows, axis=0)
        return errors, n * bits_per_use, trace_rows

    return kernel
