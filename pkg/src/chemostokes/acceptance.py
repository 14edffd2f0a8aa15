"""The verification gate: nine graded criteria with pinned tolerances.

Each criterion returns a :class:`CheckResult`; the CLI ``verify``
subcommand and the acceptance test module both drive
:class:`AcceptanceSuite` and print one PASS/FAIL line per criterion.
Artifacts (invariant CSVs, snapshots, study tables) are materialized on
disk so the determinism criterion can compare bytes across thread
counts.
"""

from __future__ import annotations

import time
from dataclasses import dataclass
from fractions import Fraction
from pathlib import Path

import numpy as np

from .feasibility import gn_alpha, gn_hypotheses_hold, m_star, m_threshold
from .fldio import sha256_file
from .invariants import max_mass_drift, odi_monitor
from .runner import run
from .scenarios import smoke_setup
from .studies import barenblatt_study, heat_study, weak_residual_study
from .threads import set_thread_count

CHECK_NAMES = {
    1: "threshold",
    2: "mass",
    3: "extrema",
    4: "divergence",
    5: "accuracy",
    6: "residuals",
    7: "boundedness",
    8: "gn-exponent",
    9: "determinism",
}
NAME_TO_CRITERION = {v: k for k, v in CHECK_NAMES.items()}

THRESHOLD_CASES = (2.1, 2.3, 31.0 / 12.0, 2.8, 3.0, 3.5)
SMOKE_RUNTIME_LIMIT = 120.0
STUDY_RUNTIME_LIMIT = 60.0
THRESHOLD_RUNTIME_LIMIT = 10.0


@dataclass
class CheckResult:
    criterion: int
    name: str
    passed: bool
    detail: str
    seconds: float

    def line(self) -> str:
        word = "PASS" if self.passed else "FAIL"
        return (f"{word}  criterion {self.criterion} ({self.name}): "
                f"{self.detail} [{self.seconds:.1f}s]")


class AcceptanceSuite:
    """Runs criteria with shared, lazily materialized artifacts."""

    def __init__(self, workdir, thread_counts=(1, 2, 8)):
        self.workdir = Path(workdir)
        self.workdir.mkdir(parents=True, exist_ok=True)
        self.thread_counts = tuple(thread_counts)
        self._smoke = {}
        self._studies = {}
        self._times = {}

    # -- shared artifact builders -----------------------------------------

    def smoke(self, threads: int):
        """Smoke scenario artifacts at one thread setting (cached)."""
        if threads not in self._smoke:
            set_thread_count(threads)
            out = self.workdir / f"smoke_threads{threads}"
            state, params, opts = smoke_setup()
            t0 = time.perf_counter()
            result = run(state, params, opts, out_dir=out)
            self._times[("smoke", threads)] = time.perf_counter() - t0
            self._smoke[threads] = (result, out)
        return self._smoke[threads]

    def studies(self, threads: int):
        if threads not in self._studies:
            set_thread_count(threads)
            out = self.workdir / f"studies_threads{threads}"
            out.mkdir(exist_ok=True)
            t0 = time.perf_counter()
            bb = barenblatt_study()
            t_bb = time.perf_counter() - t0
            t0 = time.perf_counter()
            ht = heat_study()
            t_ht = time.perf_counter() - t0
            t0 = time.perf_counter()
            wr = weak_residual_study()
            t_wr = time.perf_counter() - t0
            (out / "barenblatt.csv").write_text(bb.csv(), encoding="utf-8")
            (out / "heat.csv").write_text(ht.csv(), encoding="utf-8")
            (out / "weak_residual.csv").write_text(wr.csv(), encoding="utf-8")
            self._times[("studies", threads)] = (t_bb, t_ht, t_wr)
            self._studies[threads] = (bb, ht, wr, out)
        return self._studies[threads]

    # -- criteria ----------------------------------------------------------

    def criterion_1(self) -> CheckResult:
        t0 = time.perf_counter()
        worst = 0.0
        detail_parts = []
        for l in THRESHOLD_CASES:
            found = m_threshold(l, 1e-3)
            exact = float(m_star(l))
            diff = abs(found - exact)
            worst = max(worst, diff)
            detail_parts.append(f"l={l:.4g}: |diff|={diff:.1e}")
        elapsed = time.perf_counter() - t0
        passed = worst <= 2e-3 and elapsed < THRESHOLD_RUNTIME_LIMIT
        return CheckResult(1, CHECK_NAMES[1], passed,
                           f"max |bisect - closed form| = {worst:.2e}; "
                           + "; ".join(detail_parts), elapsed)

    def criterion_2(self) -> CheckResult:
        result, _ = self.smoke(self.thread_counts[0])
        elapsed = self._times[("smoke", self.thread_counts[0])]
        drift = max_mass_drift(result.rows)
        passed = drift <= 1e-12 and elapsed < SMOKE_RUNTIME_LIMIT
        return CheckResult(2, CHECK_NAMES[2], passed,
                           f"relative mass drift {drift:.2e} over "
                           f"{result.rows[-1].step} steps, "
                           f"runtime {elapsed:.1f}s", elapsed)

    def criterion_3(self) -> CheckResult:
        t0 = time.perf_counter()
        result, _ = self.smoke(self.thread_counts[0])
        rows = result.rows
        c0_max = rows[0].c_max
        worst_c = max(r.c_max for r in rows)
        worst_cmin = min(r.c_min for r in rows)
        worst_nmin = min(r.n_min for r in rows)
        passed = (worst_c <= c0_max * (1.0 + 1e-12)
                  and worst_cmin >= -1e-12 and worst_nmin >= 0.0)
        return CheckResult(3, CHECK_NAMES[3], passed,
                           f"max c = {worst_c:.15f} (cap {c0_max}), "
                           f"min c = {worst_cmin:.2e}, min n = {worst_nmin:.2e}",
                           time.perf_counter() - t0)

    def criterion_4(self) -> CheckResult:
        t0 = time.perf_counter()
        result, _ = self.smoke(self.thread_counts[0])
        worst = max(r.div_u_inf for r in result.rows)
        return CheckResult(4, CHECK_NAMES[4], worst <= 1e-8,
                           f"max ||div u||_inf = {worst:.2e}",
                           time.perf_counter() - t0)

    def criterion_5(self) -> CheckResult:
        bb, ht, _, _ = self.studies(self.thread_counts[0])
        t_bb, t_ht, _ = self._times[("studies", self.thread_counts[0])]
        bb_ok = min(bb.orders) >= 0.8 and t_bb < STUDY_RUNTIME_LIMIT
        ht_ok = min(ht.orders) >= 1.8 and t_ht < STUDY_RUNTIME_LIMIT
        return CheckResult(
            5, CHECK_NAMES[5], bb_ok and ht_ok,
            f"porous-front L1 orders {tuple(round(o, 3) for o in bb.orders)} "
            f"({t_bb:.1f}s); diffusion orders "
            f"{tuple(round(o, 3) for o in ht.orders)} ({t_ht:.1f}s)",
            t_bb + t_ht)

    def criterion_6(self) -> CheckResult:
        _, _, wr, _ = self.studies(self.thread_counts[0])
        _, _, t_wr = self._times[("studies", self.thread_counts[0])]
        ratios = wr.ratios
        passed = all(v >= 1.8 for v in ratios.values())
        detail = ", ".join(f"{k}: x{v:.2f}" for k, v in sorted(ratios.items()))
        return CheckResult(6, CHECK_NAMES[6], passed,
                           f"residual shrink 32->64: {detail}", t_wr)

    def criterion_7(self) -> CheckResult:
        t0 = time.perf_counter()
        result, _ = self.smoke(self.thread_counts[0])
        rows = result.rows
        sup_n = max(r.n_max for r in rows)
        cap = 5.0 * rows[0].n_max
        verdict = odi_monitor(rows)
        passed = sup_n <= cap and verdict.bounded
        return CheckResult(7, CHECK_NAMES[7], passed,
                           f"sup |n| = {sup_n:.4f} (cap {cap:.4f}), energy "
                           f"monitor bounded={verdict.bounded} "
                           f"(C fit {verdict.c_damp:.3g})",
                           time.perf_counter() - t0)

    def criterion_8(self, samples: int = 10_000, seed: int = 2024) -> CheckResult:
        t0 = time.perf_counter()
        spot1 = gn_alpha(Fraction(2), Fraction(5, 2), Fraction(2), Fraction(2))
        spot2 = gn_alpha(Fraction(2), Fraction(5, 2), Fraction(3), Fraction(2))
        spots_ok = spot1 == Fraction(3, 4) and spot2 == Fraction(28, 33)
        rng = np.random.default_rng(seed)
        accepted = 0
        violations = 0
        attempts = 0
        while accepted < samples and attempts < 100 * samples:
            attempts += 1
            l = rng.uniform(2.05, 4.0)
            m = rng.uniform(l - 1.0 + 1e-3, l + 2.0)
            p_lo = max(1.0, l - 1.0, m - 2.0 * l + 3.0) + 1e-3
            p = rng.uniform(p_lo, p_lo + 5.0)
            q = rng.uniform(1.0 + 1e-3, 3.0)
            if not gn_hypotheses_hold(m, l, p, q):
                continue
            accepted += 1
            a = gn_alpha(m, l, p, q)
            if not (0.0 < a < 1.0):
                violations += 1
        passed = spots_ok and accepted == samples and violations == 0
        return CheckResult(8, CHECK_NAMES[8], passed,
                           f"spot values exact={spots_ok}; {accepted} sampled "
                           f"admissible tuples, {violations} outside (0,1)",
                           time.perf_counter() - t0)

    def criterion_9(self) -> CheckResult:
        t0 = time.perf_counter()
        digests = []
        for threads in self.thread_counts:
            _, smoke_out = self.smoke(threads)
            _, _, _, study_out = self.studies(threads)
            digest = []
            for tag, root in (("smoke", smoke_out), ("studies", study_out)):
                for f in sorted(root.rglob("*")):
                    if f.is_file():
                        digest.append((tag + "/" + f.relative_to(root).as_posix(),
                                       sha256_file(f)))
            digests.append(tuple(digest))
        names_match = all(
            tuple(n for n, _ in d) == tuple(n for n, _ in digests[0])
            for d in digests)
        identical = names_match and all(d == digests[0] for d in digests)
        nfiles = len(digests[0])
        return CheckResult(9, CHECK_NAMES[9], identical,
                           f"{nfiles} artifact files bit-identical across "
                           f"threads {self.thread_counts}",
                           time.perf_counter() - t0)

    def run_all(self, criteria=None):
        table = {
            1: self.criterion_1, 2: self.criterion_2, 3: self.criterion_3,
            4: self.criterion_4, 5: self.criterion_5, 6: self.criterion_6,
            7: self.criterion_7, 8: self.criterion_8, 9: self.criterion_9,
        }
        selected = sorted(criteria) if criteria else sorted(table)
        results = []
        for k in selected:
            results.append(table[k]())
        set_thread_count(1)
        return results


def parse_check_selection(raw: str):
    """Comma list of criterion names or numbers -> sorted criterion ids."""
    items = [part.strip() for part in raw.split(",") if part.strip()]
    if not items:
        raise ValueError("empty check selection")
    out = set()
    for item in items:
        if item.isdigit() and int(item) in CHECK_NAMES:
            out.add(int(item))
        elif item in NAME_TO_CRITERION:
            out.add(NAME_TO_CRITERION[item])
        else:
            raise ValueError(
                f"unknown check {item!r}; available: "
                + ", ".join(f"{k}={v}" for k, v in CHECK_NAMES.items()))
    return sorted(out)
