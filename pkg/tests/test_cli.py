import io
import subprocess
import sys

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from tpms import checks, cli, periods
from tpms.cli import CSV_HEADER, main


def run(argv):
    buf = io.StringIO()
    code = main(argv, out=buf)
    return code, buf.getvalue()


def kv(text):
    return dict(ln.split(" = ", 1) for ln in text.splitlines() if " = " in ln and not ln.startswith("#"))


@pytest.fixture(autouse=True)
def cache_dir(tmp_path, monkeypatch):
    monkeypatch.setenv("TPMS_CACHE_DIR", str(tmp_path / "cache"))


# ---------------------------------------------------------------------------
# solve


def test_solve_root():
    code, out = run(["solve", "--a", "0.3", "--x", "0.5"])
    assert code == 0
    v = kv(out)
    assert v["in_region"] == "true"
    assert abs(periods.i_gamma(periods.make_params(0.3, float(v["b"]), 0.5))) <= 1e-10
    assert abs(float(v["i_gamma"])) <= 1e-10


def test_solve_paper_triple_reports_root():
    # the root exists; its value is the literal-reading b, see ledger
    code, out = run(["solve", "--a", "0.47", "--x", "0.68"])
    assert code == 0
    assert 0.47 < float(kv(out)["b"]) < 1


def test_solve_no_root():
    code, out = run(["solve", "--a", "0.9", "--x", "0.9"])
    assert code == 2
    assert "no root" in out
    assert kv(out)["in_region"] == "false"


@pytest.mark.parametrize(
    "argv",
    [
        ["solve", "--a", "2", "--x", "0.5"],
        ["solve", "--a", "0.5", "--x", "-0.1"],
        ["solve", "--a", "abc", "--x", "0.5"],
        ["solve", "--a", "0.5"],
        ["solve", "--a", "0.5", "--x", "0.5", "--tol", "-1"],
        ["frobnicate"],
        [],
    ],
)
def test_usage_errors(argv):
    assert run(argv)[0] == 64


@settings(max_examples=25, deadline=None)
@given(st.floats(allow_nan=False).filter(lambda v: not 0 < v < 1))
def test_solve_rejects_out_of_range_a(a):
    assert run(["solve", "--a", repr(a), "--x", "0.5"])[0] == 64


# ---------------------------------------------------------------------------
# trace


def test_trace_csv(tmp_path):
    dest = tmp_path / "c.csv"
    code, _ = run(["trace", "--n", "5", "--out", str(dest)])
    assert code == 0
    lines = dest.read_text().splitlines()
    assert lines[0] == CSV_HEADER
    rows = np.array([[float(t) for t in ln.split(",")] for ln in lines[1:]])
    assert rows.shape == (5, 6)
    assert rows[0, 0] == 0 and rows[-1, 0] == 1 and np.all(np.diff(rows[:, 0]) > 0)
    assert np.max(np.abs(rows[:, 4:])) <= 1e-8
    assert rows[-1, 3] <= 1e-8 and 0 < rows[-1, 1] < periods.alpha()
    # 17 significant digits
    assert all(len(t.replace("-", "").replace(".", "").split("e")[0].lstrip("0")) <= 17 for t in lines[1].split(","))


def test_trace_writes_cache(tmp_path):
    cache = tmp_path / "t.csv"
    code, out = run(["trace", "--n", "5", "--cache", str(cache)])
    assert code == 0 and out.startswith(CSV_HEADER)
    head = cache.read_text().splitlines()[0]
    assert head.startswith("# tpms-trace version=1 ")
    assert cli.read_cache(cache, 1e-8) is not None
    assert cli.read_cache(cache, 1e-12) is None  # stale for a tighter tolerance


def test_trace_usage():
    assert run(["trace", "--n", "1"])[0] == 64


def test_trace_failure_writes_partial(tmp_path, monkeypatch):
    from tpms.errors import TraceError

    good = periods.trace_family_curve(3)

    def boom(n, tol):
        raise TraceError("lost the sign change", points=list(good[:2]), last_good=good[1].params)

    monkeypatch.setattr(periods, "trace_family_curve", boom)
    dest = tmp_path / "part.csv"
    code, _ = run(["trace", "--n", "3", "--out", str(dest)])
    assert code == 1
    assert dest.read_text().splitlines() == cli.trace_csv(good[:2]).splitlines()


# ---------------------------------------------------------------------------
# mesh


def test_mesh_off_curve_is_closure_fault(tmp_path):
    code, out = run(["mesh", "--a", "0.47", "--b", "0.85", "--x", "0.68", "--resolution", "16",
                     "--out", str(tmp_path / "m.obj")])
    assert code == 3
    assert "period-closure fault" in out and "--project" in out


def test_mesh_project(tmp_path):
    dest = tmp_path / "m.obj"
    code, out = run(["mesh", "--a", "0.47", "--b", "0.85", "--x", "0.68", "--project", "--resolution", "16",
                     "--out", str(dest)])
    assert code == 0
    assert "euler characteristic -12" in out
    assert "boundary census vertical=8 horizontal=4" in out
    assert sum(ln.startswith("lattice[") for ln in out.splitlines()) == 3
    assert dest.read_text().startswith("# triply periodic")


def test_mesh_copies_ratio(tmp_path):
    counts = []
    for c in ("1,1,1", "2,2,2"):
        dest = tmp_path / f"m{c}.obj"
        code, _ = run(["mesh", "--a", "0.47", "--b", "0.85", "--x", "0.68", "--project", "--resolution", "8",
                       "--no-loops", "--copies", c, "--out", str(dest)])
        assert code == 0
        counts.append(sum(ln.startswith("v ") for ln in dest.read_text().splitlines()))
    assert counts[1] == 8 * counts[0]


def test_mesh_s(tmp_path):
    cache = tmp_path / "t.csv"
    assert run(["trace", "--n", "5", "--cache", str(cache), "--out", str(tmp_path / "x.csv")])[0] == 0
    code, out = run(["mesh", "--s", "0.05", "--cache", str(cache), "--resolution", "8", "--no-loops",
                     "--out", str(tmp_path / "s.obj")])
    assert code == 0
    assert "# s = 0.050000000000000003 resolved to" in out


@pytest.mark.parametrize(
    "extra",
    [["--s", "0"], ["--s", "1.5"], ["--a", "0.4"], ["--a", "0.5", "--b", "0.4", "--x", "0.5"],
     ["--a", "0.3", "--b", "0.5", "--x", "0.5", "--resolution", "4"], ["--a", "0.3", "--b", "0.5", "--x", "0.5",
                                                                       "--copies", "1,0,1"]],
)
def test_mesh_usage(tmp_path, extra):
    assert run(["mesh", *extra, "--out", str(tmp_path / "m.obj")])[0] == 64


def test_mesh_needs_out():
    assert run(["mesh", "--a", "0.3", "--b", "0.5", "--x", "0.5"])[0] == 64


def test_mesh_write_error(tmp_path):
    code, _ = run(["mesh", "--a", "0.47", "--b", "0.85", "--x", "0.68", "--project", "--resolution", "8",
                   "--no-loops", "--out", str(tmp_path / "no" / "m.obj")])
    assert code == 1


# ---------------------------------------------------------------------------
# configuration


def test_config_precedence(tmp_path):
    cfg = tmp_path / "tpms.conf"
    cfg.write_text("# defaults\nformat = ply\nresolution=8\nloops = no\ncopies = 2,1,1\n")
    base = ["mesh", "--a", "0.47", "--b", "0.85", "--x", "0.68", "--project"]
    code, out = run(["--config", str(cfg), *base, "--out", str(tmp_path / "a.mesh")])
    assert code == 0
    text = (tmp_path / "a.mesh").read_text()
    assert text.startswith("ply")  # config beats the default obj
    assert "loop periods" not in out  # config switched the loop check off
    code, _ = run(["--config", str(cfg), *base, "--format", "obj", "--copies", "1,1,1",
                   "--out", str(tmp_path / "b.mesh")])
    assert code == 0
    text_b = (tmp_path / "b.mesh").read_text()
    assert text_b.startswith("# triply")  # flag beats config
    nv_a = int(next(ln for ln in text.splitlines() if ln.startswith("element vertex")).split()[-1])
    nv_b = sum(ln.startswith("v ") for ln in text_b.splitlines())
    assert nv_a == 2 * nv_b  # copies from config, then from the flag


def test_config_errors(tmp_path):
    assert run(["--config", str(tmp_path / "missing.conf"), "verify"])[0] == 64
    bad = tmp_path / "bad.conf"
    bad.write_text("resolution\n")
    assert run(["--config", str(bad), "verify"])[0] == 64
    bad.write_text("tol = lots\n")
    assert run(["--config", str(bad), "solve", "--a", "0.3", "--x", "0.5"])[0] == 64


def test_config_keys_accept_dashes(tmp_path):
    cfg = tmp_path / "c.conf"
    cfg.write_text("trace-tol = 1e-9\n")
    assert cli.read_config(cfg) == {"trace_tol": "1e-9"}


# ---------------------------------------------------------------------------
# limits and verify


def test_limits_point():
    q = periods.curve_point_at(0.1)
    a, b, x = (repr(v) for v in q.params.as_tuple())
    code, out = run(["limits", "--a", a, "--b", b, "--x", x])
    assert code == 0
    assert float(kv(out)["scherk_gap"]) > 0 and float(kv(out)["hw_gap"]) > 0


def test_limits_partial_point():
    assert run(["limits", "--a", "0.1"])[0] == 64


def test_verify_green():
    code, out = run(["verify"])
    rows = [ln.split(",") for ln in out.strip().splitlines()]
    status = {r[0]: r[1] for r in rows}
    assert code == 0
    assert status["alpha"] == "pass" and float(dict((r[0], r[2]) for r in rows)["alpha"]) > 0.5
    assert status["identity_eq11_printed"] == "erratum"
    assert all(s in ("pass", "erratum") for s in status.values())


def test_verify_detects_sign_flip(monkeypatch):
    # flip the sign of |g| in the delta pullback: (1/(-|g|) - (-|g|)) negates the integrand
    orig = periods._i_delta_raw
    monkeypatch.setattr(periods, "_i_delta_raw", lambda a, b, x: -orig(a, b, x))
    monkeypatch.setattr(checks, "SUITE", (checks.check_quadrature, checks.check_additivity))
    code, out = run(["verify"])
    assert code == 1
    assert "additivity,fail," in out


def test_entry_point():
    r = subprocess.run([sys.executable, "-m", "tpms", "solve", "--a", "2", "--x", "0.5"], capture_output=True, text=True)
    assert r.returncode == 64
    assert "usage error" in r.stderr
