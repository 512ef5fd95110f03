"""Parameter sweeps producing flat metric reports (one metric per row)."""

from __future__ import annotations

import configparser
import csv
import io
import json
import math
from dataclasses import dataclass, field, replace
from typing import Iterable, Sequence

import numpy as np

from . import acceptance
from .bspline import SplineSpace
from .circulant import demko_bound, eigenvalues
from .functions import corpus_function
from .gram import (SymbolEvaluator, banded_truncation_inverse, certify_decay, cosine_symbol, fit_decay,
                   gram_system, inverse_first_row, decay_bound_constants, weighted_gamma_sum, DENSE_LIMIT)
from .projection import inverse_inequality_constant, l2_error, project, ratios
from .quasi import quasi_error, quasi_interpolate, thomee_wendroff

SCHEMA_VERSION = 1
CSV_HEADER = ("experiment", "r", "N", "l", "function", "metric", "value", "ok")


class ConfigError(ValueError):
    """Invalid sweep configuration (reported as a usage error)."""


@dataclass(frozen=True)
class SweepConfig:
    r_list: tuple[int, ...] = (2, 3, 4)
    N_list: tuple[int, ...] = (16, 32, 64, 128, 256)
    l_list: tuple[int, ...] | None = None
    corpus: tuple[str, ...] = ("sin1", "cos2", "exp_sin")
    nodes_per_cell: int | None = None
    samples_per_cell: int = 32
    seed: int = 0
    out: str | None = None
    format: str = "csv"

    def validate(self) -> "SweepConfig":
        for name in ("r_list", "N_list", "corpus"):
            if not getattr(self, name):
                raise ConfigError(f"{name} is empty")
        if self.l_list is not None and not self.l_list:
            raise ConfigError("l_list is empty")
        if min(self.r_list) < 1:
            raise ConfigError("orders must be >= 1")
        for r in self.r_list:
            for N in self.N_list:
                if N < 4 * r:
                    raise ConfigError(f"N={N} violates N >= 4r for r={r}")
            if self.l_list is not None and max(self.l_list) > r - 1:
                raise ConfigError(f"derivative order {max(self.l_list)} exceeds r-1={r - 1} for r={r}")
        if self.l_list is not None and min(self.l_list) < 0:
            raise ConfigError("derivative orders must be >= 0")
        if self.format not in ("csv", "json"):
            raise ConfigError(f"unknown format {self.format!r}")
        if not 0 <= self.seed < 2 ** 64:
            raise ConfigError("seed must be a 64-bit unsigned integer")
        if self.samples_per_cell < 8:
            raise ConfigError("samples_per_cell must be >= 8")
        for r in self.r_list:
            if self.nodes_per_cell is not None and self.nodes_per_cell < r:
                raise ConfigError(f"nodes_per_cell must be >= r (= {r})")
        for name in self.corpus:
            corpus_function(name, self.seed)
        return self

    def orders(self, r: int) -> list[int]:
        return list(range(r)) if self.l_list is None else [l for l in self.l_list if l <= r - 1]


def _ints(text: str) -> tuple[int, ...]:
    items = [t.strip() for t in text.split(",") if t.strip()]
    try:
        return tuple(int(t) for t in items)
    except ValueError as exc:
        raise ConfigError(f"expected comma-separated integers, got {text!r}") from exc


def _names(text: str) -> tuple[str, ...]:
    return tuple(t.strip() for t in text.split(",") if t.strip())


_KEYS = {
    "r": ("r_list", _ints), "n": ("N_list", _ints), "l": ("l_list", _ints),
    "corpus": ("corpus", _names), "out": ("out", str), "format": ("format", str),
    "seed": ("seed", int), "nodes_per_cell": ("nodes_per_cell", int),
    "samples_per_cell": ("samples_per_cell", int),
}


def parse_config_text(text: str, base: SweepConfig | None = None) -> SweepConfig:
    """Read ``key = value`` lines (optionally under one ``[section]``)."""
    parser = configparser.ConfigParser(interpolation=None)
    try:
        parser.read_string(text if text.lstrip().startswith("[") else "[sweep]\n" + text)
    except configparser.Error as exc:
        raise ConfigError(f"cannot parse config: {exc}") from exc
    cfg = base or SweepConfig()
    updates = {}
    for section in parser.sections():
        for key, raw in parser.items(section):
            norm = key.strip().lower().replace("-", "_")
            if norm not in _KEYS:
                raise ConfigError(f"unknown config key {key!r}")
            attr, conv = _KEYS[norm]
            try:
                updates[attr] = conv(raw.strip())
            except ValueError as exc:
                raise ConfigError(f"bad value for {key}: {raw!r}") from exc
    return replace(cfg, **updates)


@dataclass(frozen=True)
class ReportRow:
    experiment: str
    metric: str
    value: float | int | None
    r: int | None = None
    N: int | None = None
    l: int | None = None
    function: str = ""
    ok: bool | None = None

    def sort_key(self) -> tuple:
        return (self.experiment, _k(self.r), _k(self.N), _k(self.l), self.function)


def _k(v: int | None) -> int:
    return -1 if v is None else v


@dataclass
class Report:
    command: str
    seed: int
    rows: list[ReportRow] = field(default_factory=list)

    def add(self, experiment: str, metric: str, value, ok: bool | None = None, **where) -> None:
        self.rows.append(ReportRow(experiment, metric, value, ok=None if ok is None else bool(ok), **where))

    def sorted_rows(self) -> list[ReportRow]:
        return sorted(self.rows, key=ReportRow.sort_key)

    @property
    def failed(self) -> bool:
        return any(row.ok is False for row in self.rows)


def _fmt(value) -> str:
    if value is None:
        return ""
    if isinstance(value, (bool, np.bool_)):
        return "true" if value else "false"
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    v = float(value)
    if math.isnan(v):
        return "nan"
    return format(v, ".17g")


def to_csv(report: Report) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(CSV_HEADER)
    w.writerow([report.command, "", "", "", "", "seed", report.seed, ""])
    for row in report.sorted_rows():
        w.writerow([row.experiment, _fmt(row.r), _fmt(row.N), _fmt(row.l), row.function, row.metric,
                    _fmt(row.value), _fmt(row.ok)])
    return buf.getvalue()


def _json_value(value):
    if value is None or isinstance(value, (bool, np.bool_)):
        return None if value is None else bool(value)
    if isinstance(value, (int, np.integer)):
        return int(value)
    v = float(value)
    return None if math.isnan(v) else v


def to_json(report: Report) -> str:
    rows = [{"experiment": row.experiment, "r": row.r, "N": row.N, "l": row.l, "function": row.function,
             "metric": row.metric, "value": _json_value(row.value), "ok": row.ok}
            for row in report.sorted_rows()]
    doc = {"schema_version": SCHEMA_VERSION, "command": report.command, "seed": report.seed, "rows": rows}
    return json.dumps(doc, indent=1) + "\n"


def render(report: Report, fmt: str) -> str:
    return to_json(report) if fmt == "json" else to_csv(report)


# experiments -----------------------------------------------------------------

def cmd_gram(cfg: SweepConfig) -> Report:
    rep = Report("gram", cfg.seed)
    for r in cfg.r_list:
        gs0 = gram_system(SplineSpace(r, max(cfg.N_list)))
        for j, g in enumerate(gs0.stencil, start=1):
            rep.add("stencil", f"g_{j}", g, r=r)
        resid = abs(gs0.stencil[0] + 2.0 * gs0.stencil[1:].sum() - 1.0)
        rep.add("stencil", "row_sum_residual", resid, resid <= 1e-13, r=r)
        rep.add("stencil", "g_lower", gs0.g_lower, r=r)
        rep.add("stencil", "g_upper", gs0.g_upper, abs(gs0.g_upper - 1.0) <= 1e-10, r=r)
        for N in cfg.N_list:
            gs = gram_system(SplineSpace(r, N))
            lam = eigenvalues(gs.matrix)
            theta = 2.0 * np.pi * np.arange(N) / N
            symbol = SymbolEvaluator(r)(theta) if r >= 2 else cosine_symbol(gs.stencil, theta)
            resid = float(np.max(np.abs(lam - symbol)))
            rep.add("spectrum", "eig_symbol_residual", resid, resid < 1e-10, r=r, N=N)
            rep.add("spectrum", "lambda_min", float(lam.min()), bool(lam.min() >= gs.g_lower - 1e-12), r=r, N=N)
            rep.add("spectrum", "lambda_max", float(lam.max()), abs(lam.max() - 1.0) <= 1e-10, r=r, N=N)
    return rep


def cmd_decay(cfg: SweepConfig) -> Report:
    rep = Report("decay", cfg.seed)
    for r in cfg.r_list:
        sums, fitted = [], []
        for N in cfg.N_list:
            gs = gram_system(SplineSpace(r, N))
            gamma = inverse_first_row(gs)
            for i in range(1, N // 2 + 2):
                rep.add("gamma", f"gamma_{i}", gamma[i - 1], r=r, N=N)
            ws = weighted_gamma_sum(gamma)
            sums.append(ws)
            rep.add("weighted_sum", "weighted_sum", ws, r=r, N=N)
            rep.add("weighted_sum", "weighted_sum_from_r", weighted_gamma_sum(gamma, start=r), r=r, N=N)
            if r == 1:
                C1 = C2 = 1.0
                q = 2.0
            else:
                C1, C2, q = decay_bound_constants(gs)
            fit = fit_decay(gamma, q, r=r)
            fitted.append(fit.C1)
            cert = certify_decay(gamma, C1, C2, q, r=r)
            rep.add("certificate", "q", q, r=r, N=N)
            rep.add("certificate", "fitted_C", fit.C1, r=r, N=N)
            rep.add("certificate", "max_slack", cert.max_slack, cert.certified, r=r, N=N)
            if r >= 2 and N <= DENSE_LIMIT:
                bt = banded_truncation_inverse(gs)
                C_B, q_B = demko_bound(bt.lambda_min, bt.lambda_max, r - 1)
                i = np.arange(N)
                dist = np.abs(i[:, None] - i[None, :]).astype(float)
                viol = int(np.count_nonzero(np.abs(bt.inverse) > C_B * q_B ** (-dist)))
                rep.add("demko", "lambda_min_truncated", bt.lambda_min, r=r, N=N)
                rep.add("demko", "lambda_max_truncated", bt.lambda_max, r=r, N=N)
                rep.add("demko", "C_B", C_B, r=r, N=N)
                rep.add("demko", "q_B", q_B, r=r, N=N)
                rep.add("demko", "violations", viol, viol == 0, r=r, N=N)
        ws_spread = max(sums) / min(sums)
        rep.add("weighted_sum", "weighted_sum_spread", ws_spread, ws_spread <= (1.01 if r == 2 else 1.05), r=r)
        fit_spread = max(fitted) / min(fitted)
        rep.add("certificate", "fitted_C_spread", fit_spread, r=r)
    return rep


def _approximation_rows(rep: Report, cfg: SweepConfig, kind: str) -> None:
    for r in cfg.r_list:
        qc = thomee_wendroff(r) if kind == "quasi" and r >= 2 else None
        if kind == "quasi" and qc is None:
            raise ConfigError("quasiinterpolants need r >= 2")
        if qc is not None:
            rep.add("stencil", "C0", qc.sup_constant, r=r)
            for m, q in enumerate(qc.as_float()):
                rep.add("stencil", f"q_{m}", q, r=r)
        for name in cfg.corpus:
            u = corpus_function(name, cfg.seed)
            errors = []
            per_l: dict[int, list] = {l: [] for l in cfg.orders(r)}
            for N in cfg.N_list:
                space = SplineSpace(r, N)
                if kind == "project":
                    approx = project(space, u, cfg.nodes_per_cell).spline
                    errors.append(l2_error(approx, u))
                else:
                    approx = quasi_interpolate(space, qc, u)
                    errors.append(quasi_error(space, qc, u))
                rep.add("error", "l2_error", errors[-1], r=r, N=N, function=u.label)
                for l in cfg.orders(r):
                    st = ratios(approx, u, l, cfg.samples_per_cell)
                    per_l[l].append(st)
                    ok_l2 = ok_sup = None
                    if l == 0 and kind == "project" and st.ratio_l2 is not None:
                        ok_l2 = st.ratio_l2 <= 1.0 + 1e-12
                    if l == 0 and kind == "quasi" and st.ratio_sup is not None:
                        ok_sup = st.ratio_sup <= qc.sup_constant + 1e-12
                    rep.add("stability", "ratio_l2", st.ratio_l2, ok_l2, r=r, N=N, l=l, function=u.label)
                    rep.add("stability", "ratio_sup", st.ratio_sup, ok_sup, r=r, N=N, l=l, function=u.label)
            if len(cfg.N_list) >= 2:
                order = acceptance.observed_orders(errors, cfg.N_list)[-1]
                rep.add("error", "observed_order", order, abs(order - r) <= 0.2, r=r, function=u.label)
            for l, reps in per_l.items():
                for norm in ("l2", "sup"):
                    vals = [getattr(s, f"ratio_{norm}") for s in reps]
                    if all(v is not None for v in vals):
                        rep.add("stability", f"ratio_{norm}_spread", max(vals) / min(vals),
                                r=r, l=l, function=u.label)
        if kind == "project" and r >= 2:
            for N in cfg.N_list:
                rep.add("inverse_inequality", "C", inverse_inequality_constant(SplineSpace(r, N)), r=r, N=N)


def cmd_project(cfg: SweepConfig) -> Report:
    rep = Report("project", cfg.seed)
    _approximation_rows(rep, cfg, "project")
    return rep


def cmd_quasi(cfg: SweepConfig) -> Report:
    rep = Report("quasi", cfg.seed)
    _approximation_rows(rep, cfg, "quasi")
    return rep


def cmd_verify_all(cfg: SweepConfig, criteria: Sequence[int] | None = None,
                   stream: io.TextIOBase | None = None) -> tuple[Report, list[acceptance.CriterionResult]]:
    """Run the acceptance criteria; timings go to ``stream`` only, never into the report."""
    rep = Report("verify-all", cfg.seed)
    results = []
    for num, *_ in acceptance.CRITERIA:
        if criteria is not None and num not in criteria:
            continue
        res = acceptance.run_criterion(num, seed=cfg.seed)
        results.append(res)
        if stream is not None:
            print(acceptance.summary_line(res), file=stream, flush=True)
        exp = f"criterion_{num:02d}"
        for c in res.checks:
            rep.add(exp, c.name, c.value, c.passed, r=c.r, N=c.N, l=c.l, function=c.function)
        rep.add(exp, "checks_passed", res.checks_passed, res.checks_passed)
    return rep, results


COMMANDS = {"gram": cmd_gram, "decay": cmd_decay, "project": cmd_project, "quasi": cmd_quasi}


def iter_rows(report: Report) -> Iterable[ReportRow]:
    return iter(report.sorted_rows())
