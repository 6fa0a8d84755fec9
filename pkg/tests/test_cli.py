import json
import subprocess
import sys

import pytest

from ffql.cli import main
from ffql.momentslab import clear_family_cache


def run(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


def test_lvalue_reference(capsys):
    code, out, _ = run(capsys, "lvalue", "--q", "5", "--d", "0,1,0,1")
    assert code == 0
    data = json.loads(out)
    assert data["coefficients"] == [1, -2, 5]
    assert {k: data["central_value"][k] for k in ("A", "B", "g")} == {"A": 10, "B": -2, "g": 1}
    assert len(data["zeros"]) == 2


def test_verify_rh(capsys):
    code, out, _ = run(capsys, "verify", "--rh", "--q", "5", "--g", "1")
    assert code == 0
    assert json.loads(out)[0]["max_residual"] < 1e-8


def test_verify_everything_small(capsys):
    code, out, _ = run(capsys, "verify", "--rh", "--nonneg", "--oracle", "--afe", "--reciprocity",
                       "--q", "5", "--g", "1", "--samples", "10")
    assert code == 0
    assert all(r["ok"] for r in json.loads(out))


def test_verify_needs_a_check(capsys):
    code, _, err = run(capsys, "verify", "--q", "5")
    assert code == 2 and "at least one" in err


def test_moments_csv(capsys):
    code, out, _ = run(capsys, "moments", "--q", "5", "--g", "1", "--family", "P", "--k", "0")
    assert code == 0
    header, row = out.strip().splitlines()
    assert header == "family,q,g,k,l,empirical,main,normalized_error"
    assert row.split(",")[5] == "40"


def test_bad_q_is_config_error(capsys):
    code, _, err = run(capsys, "moments", "--q", "7", "--g", "1", "--k", "1")
    assert code == 2 and "q=7" in err
    code, _, _ = run(capsys, "moments", "--q", "9", "--g", "1", "--k", "1", "--experimental")
    assert code == 2


def test_experimental_allows_q_3_mod_4(capsys):
    code, out, _ = run(capsys, "moments", "--q", "3", "--g", "1", "--k", "0", "--experimental")
    assert code == 0 and out.strip().splitlines()[1].split(",")[5] == "18"


def test_bad_polynomial_names_it(capsys):
    code, _, err = run(capsys, "twisted", "--q", "5", "--g", "1", "--l", "T^^2")
    assert code == 2 and "T^^2" in err


def test_second_moment_over_H_refused(capsys):
    code, _, err = run(capsys, "twisted", "--order", "second", "--family", "H", "--q", "5", "--g", "1")
    assert code == 2


def test_twisted_json_and_out_file(capsys, tmp_path):
    out = tmp_path / "r.json"
    code, _, _ = run(capsys, "twisted", "--q", "5", "--g", "2", "--l", "1", "T", "--format", "json",
                     "--out", str(out))
    assert code == 0
    rows = json.loads(out.read_text())
    assert rows[0]["main"] == 1875 and rows[1]["l1"] == "0,1"


def test_twisted_determinism_across_workers(capsys, tmp_path):
    a, b = tmp_path / "a.csv", tmp_path / "b.csv"
    for path, w in ((a, "1"), (b, "3")):
        assert run(capsys, "twisted", "--q", "5", "--g", "1", "2", "--l", "1", "T", "--workers", w,
                   "--out", str(path))[0] == 0
    assert a.read_bytes() == b.read_bytes()


def test_enumerate(capsys):
    code, out, _ = run(capsys, "enumerate", "--q", "5", "--n", "3", "--family", "P", "--count")
    assert code == 0 and json.loads(out)["count"] == 40
    code, out, _ = run(capsys, "enumerate", "--q", "5", "--n", "1", "--family", "M")
    assert out.splitlines() == ["member", '"0,1"', '"1,1"', '"2,1"', '"3,1"', '"4,1"']


def test_theta_profile(capsys):
    code, out, _ = run(capsys, "theta-profile", "--q", "5", "--g", "1", "--grid", "4")
    assert code == 0 and len(out.strip().splitlines()) == 5
    code, _, _ = run(capsys, "theta-profile", "--q", "5", "--g", "1", "--thetas", "7")
    assert code == 2


def test_mollifier_subcommands(capsys, tmp_path):
    code, out, _ = run(capsys, "mollifier", "schedule", "--q", "5", "--g", "1", "--alphas", "0.05", "0.1", "0.2")
    assert code == 0 and json.loads(out)["J"] == 2
    code, _, err = run(capsys, "mollifier", "schedule", "--q", "5", "--g", "2", "--mode", "asymptotic", "--M", "3")
    assert code == 2
    sched = tmp_path / "s.json"
    sched.write_text(json.dumps({"q": 5, "g": 1, "M": None, "mode": "desk", "alphas": [0.14, 0.5, 0.84]}))
    code, out, _ = run(capsys, "mollifier", "classify", "--q", "5", "--g", "1", "--schedule", str(sched))
    assert code == 0 and all(r["partition"] for r in json.loads(out)["results"])
    code, out, _ = run(capsys, "mollifier", "holder", "--q", "5", "--g", "1", "--two-k", "0.6", "--c", "0.3")
    assert code == 0 and all(r["holds"] for r in json.loads(out))
    code, out, _ = run(capsys, "mollifier", "mollified-sums", "--q", "5", "--g", "1", "--family", "H")
    assert code == 0 and json.loads(out)[0]["S_LM"] > 0
    code, _, _ = run(capsys, "mollifier", "holder", "--q", "5", "--g", "1", "--two-k", "0.6", "--c", "0.9")
    assert code == 2


def test_missing_schedule_file(capsys, tmp_path):
    code, _, err = run(capsys, "mollifier", "classify", "--q", "5", "--schedule", str(tmp_path / "nope.json"))
    assert code == 2 and "nope.json" in err


def test_mertens_and_perron(capsys):
    code, out, _ = run(capsys, "mertens", "--q", "5", "--m", "2")
    assert code == 0 and out.splitlines()[2].split(",")[4] == "1.4"
    code, out, _ = run(capsys, "perron", "--q", "5", "--series", "monic", "--N", "3")
    data = json.loads(out)
    assert code == 0 and data["direct"] == 156 and data["ok"]


def test_cache_flag_and_env(capsys, tmp_path, monkeypatch):
    monkeypatch.setenv("FFQL_CACHE_DIR", str(tmp_path / "env"))
    assert run(capsys, "cache", "--q", "5", "--n-max", "2")[0] == 0
    assert (tmp_path / "env" / "primes_q5_n2.ffqp").exists()
    assert run(capsys, "cache", "--q", "5", "--n-max", "1", "--cache-dir", str(tmp_path / "flag"))[0] == 0
    assert (tmp_path / "flag" / "primes_q5_n1.ffqp").exists()
    assert not (tmp_path / "env" / "primes_q5_n3.ffqp").exists()


def test_truncated_cache_self_heals(capsys, tmp_path):
    assert run(capsys, "cache", "--q", "5", "--n-max", "3", "--cache-dir", str(tmp_path))[0] == 0
    f = tmp_path / "primes_q5_n3.ffqp"
    f.write_bytes(f.read_bytes()[:30])
    clear_family_cache()  # force the P family to be rebuilt from the prime cache
    code, out, _ = run(capsys, "moments", "--q", "5", "--g", "1", "--family", "P", "--k", "0",
                       "--cache-dir", str(tmp_path))
    assert code == 0 and out.splitlines()[1].split(",")[5] == "40"
    assert len(f.read_bytes()) == 22 + 40 * 3


def test_module_entry_point():
    res = subprocess.run([sys.executable, "-m", "ffql", "lvalue", "--d", "T^3+T"], capture_output=True, text=True)
    assert res.returncode == 0 and json.loads(res.stdout)["coefficients"] == [1, -2, 5]


def test_argparse_errors_exit_2(capsys):
    with pytest.raises(SystemExit) as exc:
        main(["moments", "--q", "5"])
    assert exc.value.code == 2
