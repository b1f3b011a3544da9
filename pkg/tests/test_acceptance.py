"""Acceptance suite: every claim run through the harness at its stated tolerance.

Each criterion prints one PASS/FAIL line (also collected into the terminal
summary).  Experiments run in this process, so the fine 1D path ensemble is
built once and shared by the exit-probability and local-time checks.
"""

import filecmp
import subprocess
import sys
from pathlib import Path

import pytest

from fkriesz.harness import load, run

RESULTS: dict[int, str] = {}

CRITERIA = {
    1: ["constant-identity"],
    2: ["mehler-crosscheck"],
    3: ["lemma21-decay"],
    4: ["lemma22-moment"],
    5: ["erfc-exit"],
    6: ["localtime-density"],
    7: ["linf-witness-power", "linf-witness-exponential"],
    8: ["l1-dual-witness"],
    9: ["cex-divergence"],
    10: ["oracle-crosscheck"],
    11: ["l2-contraction"],
    12: ["geometry-profiles"],
}

# With C_hat pinned at t=1 the bound is not an upper envelope at intermediate times
# (true moments agree with an independent spectral computation); see decisions ledger.
# K^a_c of V = 2^{|x|} is infinite: sigma_x(s) grows like log_2 s, so the integrand decays
# only like s^{a-1-c/ln 2} with c <= 1/8.
KNOWN_FAILING = {
    4: "k=0.1, t in {2,4,8} exceed C_hat e^{8N^2k^2t} + 3 sigma; estimator confirmed by oracle",
    8: "K^a_c diverges analytically for the exponential potential; dual sup and J^a are finite",
}


def _record(n: int, ok: bool, detail: str) -> None:
    line = f"criterion {n:2d}: {'PASS' if ok else 'FAIL'}  {detail}"
    RESULTS[n] = line
    print(line)


def _marks(n):
    if n in KNOWN_FAILING:
        return [pytest.mark.xfail(strict=True, reason=KNOWN_FAILING[n])]
    return []


@pytest.mark.parametrize("n", [pytest.param(n, marks=_marks(n), id=f"criterion-{n}") for n in CRITERIA])
def test_criterion(n, tmp_path_factory):
    parts, ok = [], True
    for eid in CRITERIA[n]:
        rep = run(load({"experiment": eid}), tmp_path_factory.mktemp(eid))
        bad = [v for v in rep.verdicts if v.status != "pass"]
        ok &= rep.status == "pass"
        parts.append(f"{eid}={rep.status} ({len(rep.verdicts) - len(bad)}/{len(rep.verdicts)})")
        for v in bad:
            print(f"    [{v.status}] {v.claim}")
    _record(n, ok, ", ".join(parts))
    assert ok


def _cli_run(cfg: Path, out: Path, threads: int) -> subprocess.CompletedProcess:
    return subprocess.run([sys.executable, "-m", "fkriesz.harness.cli", "run", "--config", str(cfg),
                           "--out", str(out), "--threads", str(threads)], capture_output=True, text=True)


def test_criterion_13_thread_count_invariance(tmp_path):
    cfg = tmp_path / "c.yaml"
    cfg.write_text("experiment: mehler-crosscheck\nd: [1, 2]\nmc: {n_paths: 20000}\n")
    outs = [tmp_path / f"t{k}" for k in (1, 2)]
    codes = [_cli_run(cfg, o, k).returncode for o, k in zip(outs, (1, 2))]
    files = sorted(str(p.relative_to(outs[0])) for p in outs[0].rglob("*") if p.is_file())
    other = sorted(str(p.relative_to(outs[1])) for p in outs[1].rglob("*") if p.is_file())
    same = files == other and all(filecmp.cmp(outs[0] / f, outs[1] / f, shallow=False) for f in files)
    ok = same and codes[0] == codes[1] and codes[0] == 0 and "report.json" in files
    _record(13, ok, f"{len(files)} files byte-identical for --threads 1 and 2 (exit {codes})")
    assert ok
