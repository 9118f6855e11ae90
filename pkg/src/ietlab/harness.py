"""Experiment orchestration: configs, seeding, runs, reports.

Runs are deterministic: points come from a SplitMix64 stream, seeds map
to work items by index (never by scheduling order), and report files
contain no timing, so identical configs produce byte-identical outputs.
Wall time lives only on the returned RunReport.
"""

from __future__ import annotations

import json
import time
from dataclasses import dataclass, field
from fractions import Fraction
from pathlib import Path
from typing import Optional

from gmpy2 import mpq

from .equidist import decay_profile
from .errors import HorizonError
from .iet import IET, iet_horizon, rotation_iet
from .numbers import CFExpansion, cf_expand, rat_from_str, rat_to_str
from .targets import (
    RadiusSpec,
    ball_hit_times,
    expected_series,
    select_scales,
    window_assertions,
)
from . import scan


_SPLITMIX_GAMMA = 0x9E3779B97F4A7C15
_MASK = (1 << 64) - 1


def _splitmix64(state: int) -> tuple[int, int]:
    state = (state + _SPLITMIX_GAMMA) & _MASK
    z = state
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & _MASK
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & _MASK
    z = z ^ (z >> 31)
    return state, z


def sample_points(master_seed: int, count: int) -> list[Fraction]:
    """Deterministic distinct dyadic points k / 2^64 from SplitMix64.

    The stream is the reference SplitMix64 generator seeded with
    master_seed; zero outputs and duplicates are skipped so points are
    distinct and lie in (0, 1).
    """
    if count < 1:
        raise ValueError("count must be >= 1")
    state = master_seed & _MASK
    seen = set()
    out = []
    while len(out) < count:
        state, z = _splitmix64(state)
        if z == 0 or z in seen:
            continue
        seen.add(z)
        out.append(Fraction(z, 1 << 64))
    return out


@dataclass(frozen=True)
class ExperimentConfig:
    """Flat key=value experiment description.

    keys: kind (hits|undet|equidist); alpha_cf (comma quotients) or
    alpha (p/q); radius; center; xi; seeds; master_seed; checkpoints
    (geometric:start,factor,count or list:n1,n2,...); base_index, L_max
    (equidist); horizon_guard (on|off); out (directory, optional).
    """

    kind: str
    alpha: Fraction
    cf: CFExpansion
    radius: Optional[RadiusSpec] = None
    center: Fraction = Fraction(1, 2)
    xi: Fraction = Fraction(1, 10)
    seeds: int = 8
    master_seed: int = 1
    checkpoints: tuple[int, ...] = ()
    base_index: int = 3
    L_max: int = 8
    horizon_guard: bool = True
    out: Optional[str] = None

    @classmethod
    def parse(cls, text: str) -> "ExperimentConfig":
        kv = {}
        for line in text.splitlines():
            line = line.strip()
            if not line or line.startswith("#"):
                continue
            if "=" not in line:
                raise ValueError(f"bad config line {line!r}")
            k, v = line.split("=", 1)
            kv[k.strip()] = v.strip()
        try:
            kind = kv["kind"]
        except KeyError:
            raise ValueError("config requires kind=") from None
        if "alpha_cf" in kv:
            cf = CFExpansion.from_str(kv["alpha_cf"])
            alpha = cf.value()
        elif "alpha" in kv:
            alpha = rat_from_str(kv["alpha"])
            cf = cf_expand(alpha)
        else:
            raise ValueError("config requires alpha_cf= or alpha=")
        checkpoints: tuple[int, ...] = ()
        if "checkpoints" in kv:
            mode, _, arg = kv["checkpoints"].partition(":")
            if mode == "geometric":
                start, factor, n = (int(t) for t in arg.split(","))
                checkpoints = tuple(start * factor**i for i in range(n))
            elif mode == "list":
                checkpoints = tuple(int(t) for t in arg.split(",") if t)
            else:
                raise ValueError(f"bad checkpoints spec {kv['checkpoints']!r}")
        return cls(
            kind=kind,
            alpha=alpha,
            cf=cf,
            radius=RadiusSpec.parse(kv["radius"]) if "radius" in kv else None,
            center=rat_from_str(kv.get("center", "1/2")),
            xi=rat_from_str(kv.get("xi", "1/10")),
            seeds=int(kv.get("seeds", "8")),
            master_seed=int(kv.get("master_seed", "1")),
            checkpoints=checkpoints,
            base_index=int(kv.get("base_index", "3")),
            L_max=int(kv.get("L_max", "8")),
            horizon_guard=kv.get("horizon_guard", "on") != "off",
            out=kv.get("out"),
        )


@dataclass
class RunReport:
    kind: str
    per_seed: list
    aggregates: dict
    assertions: list
    wall_time: float = 0.0
    csv_text: str = ""

    def json_text(self) -> str:
        return json.dumps(
            {
                "kind": self.kind,
                "aggregates": self.aggregates,
                "assertions": self.assertions,
                "seeds": len(self.per_seed),
            },
            indent=1,
            sort_keys=True,
        )


def _median_pair(sorted_vals: list, n: int) -> tuple:
    if n % 2:
        return (sorted_vals[n // 2], sorted_vals[n // 2])
    return (sorted_vals[n // 2 - 1], sorted_vals[n // 2])


def hit_deviation_medians(S_by_seed: list[list[int]], Es: list[mpq]) -> list[mpq]:
    """Median over seeds of |S/E - 1| at each checkpoint, exact.

    |S/E - 1| = |S d - n| / n for E = n/d, so per checkpoint the order
    statistics reduce to integer comparisons of u = |S d - n| with the
    shared denominator cancelling.
    """
    out = []
    for k, E in enumerate(Es):
        n, d = E.numerator, E.denominator
        us = sorted(abs(S[k] * d - n) for S in S_by_seed)
        a, b = _median_pair(us, len(us))
        out.append(mpq(a + b, 2 * n))
    return out


def run_experiment(config: ExperimentConfig) -> RunReport:
    """Fan out over seeds, evaluate asserted invariants, emit CSV/JSON.

    Seeds map to points by index; the fold over seeds is ordered, so the
    output never depends on execution interleaving.
    """
    t0 = time.time()
    if config.kind == "hits":
        report = _run_hits(config)
    elif config.kind == "undet":
        report = _run_undet(config)
    elif config.kind == "equidist":
        report = _run_equidist(config)
    else:
        raise ValueError(f"unknown experiment kind {config.kind!r}")
    report.wall_time = time.time() - t0
    if config.out:
        outdir = Path(config.out)
        outdir.mkdir(parents=True, exist_ok=True)
        (outdir / "series.csv").write_text(report.csv_text)
        (outdir / "report.json").write_text(report.json_text())
    return report


def _guard(config: ExperimentConfig, T: IET, N: int):
    if config.horizon_guard and N > iet_horizon(T):
        raise HorizonError(
            f"checkpoint {N} beyond horizon {iet_horizon(T)} of the rational stand-in"
        )


def _run_hits(config: ExperimentConfig) -> RunReport:
    if config.radius is None:
        raise ValueError("hits experiment requires radius=")
    T = rotation_iet(config.alpha)
    checkpoints = config.checkpoints
    if not checkpoints:
        return RunReport("hits", [], {"checkpoints": []}, [], csv_text="seed;N;S_N;E_N_num;E_N_den;ratio_float\n")
    N = checkpoints[-1]
    _guard(config, T, N)
    points = sample_points(config.master_seed, config.seeds)
    scales = select_scales(T, config.xi, n_max=N // 2)
    Es = expected_series(config.radius, checkpoints)
    per_seed = []
    assertions = []
    lines = ["seed;N;S_N;E_N_num;E_N_den;ratio_float"]
    from .sums import int_str

    e_strs = [(int_str(E.numerator), int_str(E.denominator)) for E in Es]
    for idx, x in enumerate(points):
        hits = ball_hit_times(T, x, config.center, config.radius, N)
        checks = window_assertions(config.radius, scales, hits, N, strict=True)
        assertions.append(
            {"seed": idx, "window_checks": len(checks), "ok": all(c.ok for c in checks)}
        )
        counts = scan.counts_at(hits, list(checkpoints))
        per_seed.append(counts)
        for ckpt, S, E, (en, ed) in zip(checkpoints, counts, Es, e_strs):
            ratio = repr(float(mpq(S) / E)) if E != 0 else ""
            lines.append(f"{idx};{ckpt};{S};{en};{ed};{ratio}")
    medians = hit_deviation_medians(per_seed, Es)
    aggregates = {
        "checkpoints": list(checkpoints),
        "median_abs_dev": [float(m) for m in medians],
        "median_nonincreasing": all(
            a >= b for a, b in zip(medians, medians[1:])
        ),
    }
    return RunReport("hits", per_seed, aggregates, assertions, csv_text="\n".join(lines) + "\n")


def _run_undet(config: ExperimentConfig) -> RunReport:
    from .undetermined import undetermined_series

    checkpoints = config.checkpoints
    if not checkpoints:
        return RunReport("undet", [], {"checkpoints": []}, [], csv_text="seed;n;S_n;Lambda_num;Lambda_den;log_ratio\n")
    if config.horizon_guard and checkpoints[-1] > config.cf.horizon():
        raise HorizonError(
            f"checkpoint {checkpoints[-1]} beyond horizon {config.cf.horizon()}"
        )
    points = sample_points(config.master_seed, config.seeds)
    per_seed = []
    assertions = []
    lines = ["seed;n;S_n;Lambda_num;Lambda_den;log_ratio"]
    devs_at_last = []
    for idx, x in enumerate(points):
        series = undetermined_series(config.alpha, x, checkpoints, cf=config.cf)
        assertions.append({"seed": idx, "ok": True})  # series raises on violation
        per_seed.append(series.rows)
        for n, S, lam, lr in series.rows:
            lines.append(
                f"{idx};{n};{S};{lam.numerator};{lam.denominator};{'' if lr is None else repr(lr)}"
            )
        last = series.rows[-1]
        if last[3] is not None:
            devs_at_last.append(abs(last[3] - 1.0))
    devs_at_last.sort()
    aggregates = {
        "checkpoints": list(checkpoints),
        "median_abs_log_dev": (
            None
            if not devs_at_last
            else sum(_median_pair(devs_at_last, len(devs_at_last))) / 2
        ),
    }
    return RunReport("undet", per_seed, aggregates, assertions, csv_text="\n".join(lines) + "\n")


def _run_equidist(config: ExperimentConfig) -> RunReport:
    T = rotation_iet(config.alpha)
    points = sample_points(config.master_seed, 2 * config.seeds)
    pairs = list(zip(points[0::2], points[1::2]))
    per_seed = []
    lines = ["pair;L;horizon;disc_num;disc_den;disc_float"]
    slopes = []
    for idx, (x, xp) in enumerate(pairs):
        prof = decay_profile(T, config.xi, config.base_index, x, xp, config.L_max)
        per_seed.append(prof)
        slopes.append(prof.fitted_slope)
        for L, h, d in prof.levels:
            lines.append(f"{idx};{L};{h};{d.numerator};{d.denominator};{float(d)!r}")
    aggregates = {
        "slopes": slopes,
        "all_negative": all(s == s and s < 0 for s in slopes),
    }
    return RunReport("equidist", per_seed, aggregates, [], csv_text="\n".join(lines) + "\n")
