"""Experiment runner: parameter sweeps, figure presets, CSV emission.

A sweep is described by an :class:`ExperimentSpec` (buildable from CLI
flags or a ``key=value`` config file) and produces one CSV file with a
fixed column schema.  Header comment lines (prefixed ``#``) echo the
fully resolved configuration so every CSV is self-describing and the
spec round-trips losslessly.

Exit codes: 0 on success, 2 for usage/config errors, 3 for I/O errors.
"""

from __future__ import annotations

import argparse
import csv
import io
import math
import sys
from dataclasses import dataclass, fields, replace

from . import analytics, montecarlo
from .analytics import LinkBudget, UPEP_METHODS, abep_union, system_throughput
from .modulation import ConfigError, make_config
from .montecarlo import SCHEMES, SweepResult, TrialPlan

__all__ = [
    "ExperimentSpec",
    "PRESETS",
    "run_sweep",
    "run_preset",
    "snr_grid",
    "spec_to_text",
    "spec_from_text",
    "main",
]

CSV_COLUMNS = (
    "series",
    "snr_db",
    "ber_mc",
    "bit_errors",
    "bits_sent",
    "abep_pdf",
    "abep_mgf",
    "abep_qapprox",
    "abep_asymptotic",
    "capacity_mc",
    "capacity_lb",
    "throughput_mc",
    "throughput_lb",
)


@dataclass(frozen=True)
class ExperimentSpec:
    """One sweep: scheme, alphabet, SNR grid and simulation budget."""

    scheme: str = "ris_ssm_sorted"
    l_total: int = 4
    l_s: int = 2
    mod_order: int = 2
    mod_scheme: str = "psk"
    snr_start: float = 0.0
    snr_step: float = 2.0
    snr_stop: float = 30.0
    trials: int = 1_000_000
    seed: int = 0
    methods: tuple[str, ...] = ("pdf", "mgf")
    mode: str = "abstract"
    output: str = "sweep.csv"

    def __post_init__(self) -> None:
        if self.scheme not in SCHEMES:
            raise ConfigError(f"scheme must be one of {SCHEMES}, got {self.scheme!r}")
        if self.snr_step <= 0:
            raise ConfigError(f"snr step must be positive, got {self.snr_step}")
        if self.snr_stop < self.snr_start:
            raise ConfigError("snr stop must not precede snr start")
        if self.trials < 0:
            raise ConfigError(f"trials must be >= 0, got {self.trials}")
        unknown = set(self.methods) - set(UPEP_METHODS)
        if unknown:
            raise ConfigError(f"unknown methods {sorted(unknown)}; choose from {UPEP_METHODS}")
        if self.mode not in ("abstract", "full_array"):
            raise ConfigError(f"mode must be 'abstract' or 'full_array', got {self.mode!r}")


def snr_grid(spec: ExperimentSpec) -> list[float]:
    """Inclusive start:step:stop grid in dB."""
    count = int(math.floor((spec.snr_stop - spec.snr_start) / spec.snr_step + 1e-9)) + 1
    return [spec.snr_start + i * spec.snr_step for i in range(count)]


def spec_to_text(spec: ExperimentSpec) -> str:
    """Serialize a spec to the flat key=value config format."""
    lines = []
    for f in fields(spec):
        value = getattr(spec, f.name)
        if f.name == "methods":
            value = ",".join(value)
        lines.append(f"{f.name}={value}")
    return "\n".join(lines) + "\n"


def spec_from_text(text: str) -> ExperimentSpec:
    """Parse the flat key=value config format back into a spec."""
    known = {f.name: f for f in fields(ExperimentSpec)}
    kwargs: dict = {}
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"line {lineno}: expected key=value, got {raw!r}")
        key, value = (part.strip() for part in line.split("=", 1))
        if key not in known:
            raise ConfigError(f"line {lineno}: unknown key {key!r}")
        if key == "methods":
            kwargs[key] = tuple(m for m in value.split(",") if m)
        elif key in ("l_total", "l_s", "mod_order", "trials", "seed"):
            kwargs[key] = int(value)
        elif key in ("snr_start", "snr_step", "snr_stop"):
            kwargs[key] = float(value)
        else:
            kwargs[key] = value
    return ExperimentSpec(**kwargs)


def _fmt(value) -> str:
    if value is None:
        return ""
    if isinstance(value, str):
        return value
    if isinstance(value, int):
        return str(value)
    return f"{value:.5e}"


def _write_csv(path: str, header_lines: list[str], rows: list[SweepResult]) -> None:
    buffer = io.StringIO()
    for line in header_lines:
        buffer.write(f"# {line}\n")
    writer = csv.writer(buffer, lineterminator="\n")
    writer.writerow(CSV_COLUMNS)
    for row in rows:
        writer.writerow([_fmt(getattr(row, col)) for col in CSV_COLUMNS])
    try:
        with open(path, "w", encoding="utf-8", newline="") as fh:
            fh.write(buffer.getvalue())
    except OSError as exc:
        raise IOError(f"cannot write {path}: {exc}") from exc


def _ber_rows(
    spec: ExperimentSpec, series: str | None = None, with_throughput: bool = False
) -> list[SweepResult]:
    """Monte Carlo + analytic BER rows for one scheme over the SNR grid.

    Analytic bound columns describe the sorted-selection law, so they are
    attached to that scheme only.
    """
    is_benchmark = spec.scheme.startswith("benchmark")
    cfg = make_config(
        spec.l_total,
        1 if is_benchmark else spec.l_s,
        spec.mod_scheme,
        spec.mod_order,
    )
    plan = TrialPlan(
        trials=max(spec.trials, 1),
        master_seed=spec.seed,
        mode=spec.mode,
        scheme=spec.scheme,
    )
    rows = []
    for snr_db in snr_grid(spec):
        budget = LinkBudget(snr_db)
        if spec.trials > 0:
            row = montecarlo.run_ber_point(cfg, budget, plan)
        else:
            row = SweepResult(series=spec.scheme, snr_db=snr_db)
        if series is not None:
            row.series = series
        if spec.scheme == "ris_ssm_sorted":
            for method in spec.methods:
                setattr(row, f"abep_{method}", abep_union(cfg, budget, method))
        if with_throughput and row.ber_mc is not None:
            row.throughput_mc = system_throughput(row.ber_mc, cfg)
        if with_throughput and row.abep_mgf is not None:
            row.throughput_lb = system_throughput(min(row.abep_mgf, 1.0), cfg)
        rows.append(row)
    return rows


def run_sweep(spec: ExperimentSpec) -> str:
    """Run one sweep and write its CSV; returns the output path."""
    header = ["ris-ssm sweep"] + spec_to_text(spec).splitlines()
    _write_csv(spec.output, header, _ber_rows(spec))
    return spec.output


# ---------------------------------------------------------------------------
# Figure presets
# ---------------------------------------------------------------------------

def _preset_fig4a(trials, seed):
    spec = ExperimentSpec(
        l_total=4, l_s=2, mod_order=2, snr_stop=30.0, trials=trials, seed=seed,
        methods=("pdf", "mgf", "asymptotic"),
    )
    return ["L=4 L_s=2 M=2 BPSK, bound vs simulation"], _ber_rows(spec)


def _preset_fig4b(trials, seed):
    # capacity vs number of candidate scatterers at a fixed operating point;
    # the candidate count needs no bit mapping here, so non-powers of two run too
    l_total, m_order, snr_db = 18, 4, 24.0
    budget = LinkBudget(snr_db)
    rows = []
    for l_s in range(1, 9):
        cfg = make_config(l_total, l_s, "psk", m_order)
        plan = TrialPlan(trials=trials, master_seed=seed + l_s)
        rows.append(
            SweepResult(
                series=f"L_s={l_s}",
                snr_db=snr_db,
                capacity_mc=montecarlo.simulate_capacity(cfg, budget, plan),
                capacity_lb=analytics.ergodic_capacity_lb(cfg, budget, "exact_mgf"),
            )
        )
    return ["L=18 M=4 QPSK SNR=24dB, capacity vs L_s (rows sweep L_s, not SNR)"], rows


def _preset_benchmarks(l_total, trials, seed):
    notes = [f"L={l_total} L_s=4 M=4 QPSK vs fixed-beam benchmarks at 16QAM (4 bit/s/Hz)"]
    rows = _ber_rows(
        ExperimentSpec(
            l_total=l_total, l_s=4, mod_order=4, snr_stop=30.0, trials=trials, seed=seed,
            methods=("mgf", "asymptotic"),
        )
    )
    for scheme in ("benchmark_max_beam", "benchmark_min_beam"):
        rows += _ber_rows(
            ExperimentSpec(
                scheme=scheme, l_total=l_total, l_s=1, mod_order=16, mod_scheme="qam",
                snr_stop=30.0, trials=trials, seed=seed,
            )
        )
    return notes, rows


def _preset_fig6(trials, seed):
    notes = ["L=4 L_s=2 M=2 BPSK, sorted vs random scatterer selection"]
    rows = []
    for scheme, methods in (("ris_ssm_sorted", ("mgf", "asymptotic")), ("ris_ssm_random", ())):
        rows += _ber_rows(
            ExperimentSpec(
                scheme=scheme, l_total=4, l_s=2, mod_order=2, snr_stop=30.0,
                trials=trials, seed=seed, methods=methods,
            )
        )
    return notes, rows


def _preset_fig7(trials, seed):
    notes = ["exact (mgf) vs Q-approximation bounds; L=4 assumed for all rate points"]
    rows = []
    for l_s, m_order in ((2, 2), (2, 4), (4, 2)):
        rows += _ber_rows(
            ExperimentSpec(
                l_total=4, l_s=l_s, mod_order=m_order, snr_stop=30.0, trials=0, seed=seed,
                methods=("mgf", "qapprox"),
            ),
            series=f"L_s={l_s} M={m_order}",
        )
    return notes, rows


def _preset_fig8(trials, seed):
    notes = ["L_s=4 M=4 QPSK, scatterer-count comparison"]
    rows = []
    for l_total in (6, 12):
        rows += _ber_rows(
            ExperimentSpec(
                l_total=l_total, l_s=4, mod_order=4, snr_stop=30.0, trials=trials, seed=seed,
                methods=("mgf", "asymptotic"),
            ),
            series=f"L={l_total}",
        )
    return notes, rows


def _preset_fig9a(trials, seed):
    notes = ["L=12 M=4 QPSK, candidate-count sweep; L_s values read from the figure"]
    rows = []
    for l_s in (2, 4, 8):
        rows += _ber_rows(
            ExperimentSpec(
                l_total=12, l_s=l_s, mod_order=4, snr_stop=30.0, trials=trials, seed=seed,
                methods=("mgf", "asymptotic"),
            ),
            series=f"L_s={l_s}",
        )
    return notes, rows


def _preset_fig9b(trials, seed):
    notes = ["L=12 L_s=4, symbol-order comparison"]
    rows = []
    for m_order in (4, 8):
        rows += _ber_rows(
            ExperimentSpec(
                l_total=12, l_s=4, mod_order=m_order, snr_stop=30.0, trials=trials, seed=seed,
                methods=("mgf", "asymptotic"),
            ),
            series=f"M={m_order}",
        )
    return notes, rows


def _preset_fig10(trials, seed):
    notes = ["capacity vs SNR; L_s=4 M=4 assumed (not stated with the figure)"]
    rows = []
    for l_total in (6, 12, 18):
        cfg = make_config(l_total, 4, "psk", 4)
        for snr_db in [0.0 + 2.0 * i for i in range(21)]:
            budget = LinkBudget(snr_db)
            plan = TrialPlan(trials=trials, master_seed=seed)
            rows.append(
                SweepResult(
                    series=f"L={l_total}",
                    snr_db=snr_db,
                    capacity_mc=montecarlo.simulate_capacity(cfg, budget, plan),
                    capacity_lb=analytics.ergodic_capacity_lb(cfg, budget, "exact_mgf"),
                )
            )
    return notes, rows


def _preset_fig11(trials, seed):
    notes = ["throughput vs SNR; L=12 L_s=4, symbol orders 4 and 8"]
    rows = []
    for m_order in (4, 8):
        rows += _ber_rows(
            ExperimentSpec(
                l_total=12, l_s=4, mod_order=m_order, snr_stop=30.0, trials=trials, seed=seed,
                methods=("mgf",),
            ),
            series=f"M={m_order}",
            with_throughput=True,
        )
    return notes, rows


PRESETS = {
    "fig4a": _preset_fig4a,
    "fig4b": _preset_fig4b,
    "fig5a": lambda trials, seed: _preset_benchmarks(6, trials, seed),
    "fig5b": lambda trials, seed: _preset_benchmarks(12, trials, seed),
    "fig6": _preset_fig6,
    "fig7": _preset_fig7,
    "fig8": _preset_fig8,
    "fig9a": _preset_fig9a,
    "fig9b": _preset_fig9b,
    "fig10": _preset_fig10,
    "fig11": _preset_fig11,
}


def run_preset(name: str, output: str, trials: int = 1_000_000, seed: int = 0) -> str:
    """Run a figure preset and write its CSV; returns the output path."""
    if name not in PRESETS:
        raise ConfigError(f"unknown preset {name!r}; choose from {sorted(PRESETS)}")
    notes, rows = PRESETS[name](trials, seed)
    header = [f"ris-ssm preset {name}", f"trials={trials}", f"seed={seed}", *notes]
    _write_csv(output, header, rows)
    return output


# ---------------------------------------------------------------------------
# Command line front end
# ---------------------------------------------------------------------------

def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="ris-ssm",
        description="Run RIS spatial-scattering-modulation sweeps and figure presets.",
    )
    parser.add_argument("--scheme", choices=SCHEMES)
    parser.add_argument("--l-total", type=int, dest="l_total")
    parser.add_argument("--l-s", type=int, dest="l_s")
    parser.add_argument("--mod-order", type=int, dest="mod_order")
    parser.add_argument("--mod-scheme", choices=("psk", "qam"), dest="mod_scheme")
    parser.add_argument("--snr", help="grid as start:step:stop in dB, e.g. 0:2:30")
    parser.add_argument("--trials", type=int)
    parser.add_argument("--seed", type=int)
    parser.add_argument("--methods", help="comma list from pdf,mgf,qapprox,asymptotic")
    parser.add_argument("--mode", choices=("abstract", "full_array"))
    parser.add_argument("--output")
    parser.add_argument("--preset", help=f"one of {', '.join(sorted(PRESETS))}")
    parser.add_argument("--config", help="key=value config file to start from")
    return parser


def _spec_from_args(args: argparse.Namespace) -> ExperimentSpec:
    if args.config:
        try:
            with open(args.config, "r", encoding="utf-8") as fh:
                spec = spec_from_text(fh.read())
        except OSError as exc:
            raise IOError(f"cannot read {args.config}: {exc}") from exc
    else:
        spec = ExperimentSpec()
    overrides: dict = {}
    for name in ("scheme", "l_total", "l_s", "mod_order", "mod_scheme", "trials", "seed", "mode", "output"):
        value = getattr(args, name)
        if value is not None:
            overrides[name] = value
    if args.snr is not None:
        parts = args.snr.split(":")
        if len(parts) != 3:
            raise ConfigError(f"--snr expects start:step:stop, got {args.snr!r}")
        try:
            start, step, stop = (float(p) for p in parts)
        except ValueError as exc:
            raise ConfigError(f"--snr expects numbers, got {args.snr!r}") from exc
        overrides.update(snr_start=start, snr_step=step, snr_stop=stop)
    if args.methods is not None:
        overrides["methods"] = tuple(m for m in args.methods.split(",") if m)
    return replace(spec, **overrides)


def main(argv: list[str] | None = None) -> int:
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code) if exc.code else 0
    try:
        if args.preset:
            output = args.output or f"{args.preset}.csv"
            path = run_preset(
                args.preset,
                output,
                trials=args.trials if args.trials is not None else 1_000_000,
                seed=args.seed if args.seed is not None else 0,
            )
        else:
            spec = _spec_from_args(args)
            path = run_sweep(spec)
    except (ConfigError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except IOError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 3
    print(path)
    return 0


if __name__ == "__main__":
    sys.exit(main())
