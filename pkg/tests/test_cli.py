import json
import random
import subprocess
import sys

import pytest

from moritakit import cli, corpus, io_json
from moritakit import correspondences as vna
from moritakit.groupoids import canonical_bibundle, pair_groupoid, unit_groupoid
from moritakit.groups import cyclic
from moritakit.reduction import regular_rep, trivial_rep


@pytest.fixture()
def rng():
    return random.Random("cli")


def write(tmp_path, name, doc):
    path = tmp_path / name
    path.write_text(io_json.dumps(doc))
    return str(path)


def run_cli(capsys, argv):
    code = cli.main(argv)
    out = capsys.readouterr().out
    return code, json.loads(out)


# ----------------------------------------------------------------- validate


def test_validate_groupoid_ok(tmp_path, capsys):
    path = write(tmp_path, "g.json", io_json.encode_groupoid(pair_groupoid(["1", "2"])))
    code, report = run_cli(capsys, ["validate", "groupoid", path])
    assert code == 0
    assert report["results"]["valid"] is True
    assert report["results"]["violation"] is None
    assert report["assertions"] == [
        {"name": "object-satisfies-axioms", "passed": True}
    ]


def test_validate_schema_error_exits_2(tmp_path, capsys):
    path = tmp_path / "bad.json"
    path.write_text('{"objects": ["u"], "arrows": "nope"}')
    code, report = run_cli(capsys, ["validate", "groupoid", str(path)])
    assert code == 2
    assert report["error"]["kind"] == "schema"


def test_validate_domain_error_exits_3(tmp_path, capsys):
    doc = io_json.encode_groupoid(pair_groupoid(["1", "2"]))
    unit_of_first = doc["units"][0][1]
    doc["units"] = [[u, unit_of_first] for u, _ in doc["units"]]
    path = write(tmp_path, "dom.json", doc)
    code, report = run_cli(capsys, ["validate", "groupoid", str(path)])
    assert code == 3
    assert report["results"]["valid"] is False
    assert report["results"]["violation"]


def test_validate_every_subject(tmp_path, capsys, rng):
    g = corpus.random_groupoid(rng, 2, 8)
    a = corpus.random_algebra(rng, sizes=(2, 1))
    e = corpus.random_bimodule(rng, max_size=2)
    h = corpus.random_correspondence(rng, max_size=2, max_dim=6)
    u = regular_rep(cyclic(3))
    cases = [
        ("groupoid", io_json.encode_groupoid(g)),
        ("bibundle", io_json.encode_bibundle(canonical_bibundle(g))),
        ("algebra", io_json.encode_algebra(a)),
        ("bimodule", io_json.encode_bimodule(e)),
        ("correspondence", io_json.encode_correspondence(h)),
        ("group-rep", io_json.encode_rep(u)),
    ]
    for subject, doc in cases:
        path = write(tmp_path, f"{subject}.json", doc)
        code, report = run_cli(capsys, ["validate", subject, path])
        assert code == 0, subject
        assert report["command"]["subject"] == subject


# ------------------------------------------------------------------- tensor


def test_tensor_bibundle(tmp_path, capsys):
    b = canonical_bibundle(pair_groupoid(["1", "2"]))
    path = write(tmp_path, "b.json", io_json.encode_bibundle(b))
    code, report = run_cli(capsys, ["tensor", "bibundle", path, path])
    assert code == 0
    assert report["results"]["right_principal"] is True
    names = [a["name"] for a in report["assertions"]]
    assert "product-validates" in names and "principality-carries-over" in names
    # the embedded product must itself pass validate
    out = write(tmp_path, "prod.json", report["results"]["product"])
    code, _ = run_cli(capsys, ["validate", "bibundle", out])
    assert code == 0


def test_tensor_bimodule_and_witness_revalidates(tmp_path, capsys, rng):
    e, f, _, _ = corpus.random_bimodule_pair(rng, max_size=2)
    p1 = write(tmp_path, "e.json", io_json.encode_bimodule(e))
    p2 = write(tmp_path, "f.json", io_json.encode_bimodule(f))
    code, report = run_cli(capsys, ["tensor", "bimodule", p1, p2])
    assert code == 0
    out = write(tmp_path, "ef.json", report["results"]["product"])
    code, _ = run_cli(capsys, ["validate", "bimodule", out])
    assert code == 0


def test_tensor_correspondence_mismatch_exits_3(tmp_path, capsys, rng):
    h = corpus.random_correspondence(rng, max_size=2, max_dim=6)
    while h.dim == 0 or h.alg_m.dim == h.alg_n.dim:
        h = corpus.random_correspondence(rng, max_size=2, max_dim=6)
    path = write(tmp_path, "h.json", io_json.encode_correspondence(h))
    code, report = run_cli(capsys, ["tensor", "correspondence", path, path])
    assert code == 3
    assert report["error"]["kind"] == "domain"


def test_tensor_correspondence_chain(tmp_path, capsys, rng):
    chain = corpus.random_correspondence_chain(rng, 2, max_size=2, max_dim=6, middle_max=6)
    while any(c.dim == 0 for c in chain):
        chain = corpus.random_correspondence_chain(rng, 2, max_size=2, max_dim=6, middle_max=6)
    h, k = chain
    p1 = write(tmp_path, "h.json", io_json.encode_correspondence(h))
    p2 = write(tmp_path, "k.json", io_json.encode_correspondence(k))
    code, report = run_cli(capsys, ["tensor", "correspondence", p1, p2])
    assert code == 0
    out = write(tmp_path, "hk.json", report["results"]["product"])
    code, _ = run_cli(capsys, ["validate", "correspondence", out])
    assert code == 0


# ------------------------------------------------------------------- morita


def test_morita_groupoid_equivalent_with_witness(tmp_path, capsys):
    p1 = write(
        tmp_path, "pair3.json", io_json.encode_groupoid(pair_groupoid(["1", "2", "3"]))
    )
    p2 = write(tmp_path, "pt.json", io_json.encode_groupoid(unit_groupoid(["pt"])))
    code, report = run_cli(capsys, ["morita", "groupoid", p1, p2])
    assert code == 0
    assert report["results"]["equivalent"] is True
    assert report["results"]["witness"] is not None
    assert all(a["passed"] for a in report["assertions"])
    out = write(tmp_path, "wit.json", report["results"]["witness"])
    code, _ = run_cli(capsys, ["validate", "bibundle", out])
    assert code == 0


def test_morita_algebra_negative_is_exit_0(tmp_path, capsys, rng):
    a = corpus.random_algebra(rng, sizes=(2,))
    b = corpus.random_algebra(rng, sizes=(1, 1))
    p1 = write(tmp_path, "a.json", io_json.encode_algebra(a))
    p2 = write(tmp_path, "b.json", io_json.encode_algebra(b))
    code, report = run_cli(capsys, ["morita", "algebra", p1, p2])
    assert code == 0
    assert report["results"]["equivalent"] is False
    assert report["results"]["witness"] is None


def test_morita_algebra_positive(tmp_path, capsys, rng):
    a = corpus.random_algebra(rng, sizes=(2, 1))
    b = corpus.random_algebra(rng, sizes=(1, 2))
    p1 = write(tmp_path, "a.json", io_json.encode_algebra(a))
    p2 = write(tmp_path, "b.json", io_json.encode_algebra(b))
    code, report = run_cli(capsys, ["morita", "algebra", p1, p2])
    assert code == 0
    assert report["results"]["equivalent"] is True
    out = write(tmp_path, "wit.json", report["results"]["witness"])
    code, _ = run_cli(capsys, ["validate", "bimodule", out])
    assert code == 0


# ------------------------------------------------------------------- reduce


def test_reduce_cstar_regular_mod_trivial(tmp_path, capsys):
    h = cyclic(2)
    p1 = write(tmp_path, "u.json", io_json.encode_rep(regular_rep(h)))
    p2 = write(tmp_path, "chi.json", io_json.encode_rep(trivial_rep(h)))
    code, report = run_cli(capsys, ["reduce", "cstar", "--rep", p1, "--chi", p2])
    assert code == 0
    assert report["results"]["dim"] == 1
    assert report["results"]["oracle_dim"] == 1
    assert report["results"]["residual"] <= 1e-9


def test_reduce_wstar_matches_cstar(tmp_path, capsys):
    h = cyclic(3)
    p1 = write(tmp_path, "u.json", io_json.encode_rep(regular_rep(h)))
    p2 = write(tmp_path, "chi.json", io_json.encode_rep(trivial_rep(h)))
    code_c, rep_c = run_cli(capsys, ["reduce", "cstar", "--rep", p1, "--chi", p2])
    code_w, rep_w = run_cli(capsys, ["reduce", "wstar", "--rep", p1, "--chi", p2])
    assert code_c == 0 and code_w == 0
    assert rep_c["results"]["dim"] == rep_w["results"]["dim"] == 1
    assert rep_w["results"]["residual"] <= 1e-9


# ------------------------------------------------------------------- bridge


def test_bridge_roundtrip_paths(tmp_path, capsys, rng):
    h = corpus.random_correspondence(rng, max_size=2, max_dim=6)
    while h.dim == 0:
        h = corpus.random_correspondence(rng, max_size=2, max_dim=6)
    p1 = write(tmp_path, "h.json", io_json.encode_correspondence(h))
    code, report = run_cli(capsys, ["bridge", "corr-to-bimodule", p1])
    assert code == 0
    p2 = write(tmp_path, "e.json", report["results"]["bimodule"])
    code, report = run_cli(capsys, ["bridge", "bimodule-to-corr", p2])
    assert code == 0
    out = write(tmp_path, "h2.json", report["results"]["correspondence"])
    code, _ = run_cli(capsys, ["validate", "correspondence", out])
    assert code == 0
    back = io_json.decode_correspondence(
        json.loads((tmp_path / "h2.json").read_text()), "h2"
    )
    assert back.alg_m.dim == h.alg_m.dim and back.alg_n.dim == h.alg_n.dim
    assert vna.corr_unitary_equivalent(back, h, 1e-8) is not None


# ------------------------------------------------------- report conventions


def test_reports_are_byte_identical(tmp_path):
    h = cyclic(2)
    p1 = write(tmp_path, "u.json", io_json.encode_rep(regular_rep(h)))
    p2 = write(tmp_path, "chi.json", io_json.encode_rep(trivial_rep(h)))
    argv = ["reduce", "cstar", "--rep", p1, "--chi", p2]
    runs = []
    for name in ("r1.json", "r2.json"):
        out = tmp_path / name
        code = cli.main(argv + ["--out", str(out)])
        assert code == 0
        runs.append(out.read_bytes())
    assert runs[0] == runs[1]


def test_report_embeds_input_digests_not_paths(tmp_path, capsys):
    doc = io_json.encode_groupoid(pair_groupoid(["1", "2"]))
    path = write(tmp_path, "g.json", doc)
    code, report = run_cli(capsys, ["validate", "groupoid", path])
    assert code == 0
    raw = (tmp_path / "g.json").read_bytes()
    import hashlib

    want = hashlib.sha256(raw).hexdigest()
    assert report["inputs"] == [{"digest": want, "role": "groupoid"}]
    assert str(tmp_path) not in json.dumps(report)


def test_out_flag_writes_same_report(tmp_path, capsys):
    doc = io_json.encode_groupoid(pair_groupoid(["1", "2"]))
    path = write(tmp_path, "g.json", doc)
    out = tmp_path / "report.json"
    code, report = run_cli(capsys, ["validate", "groupoid", path, "--out", str(out)])
    assert code == 0
    assert json.loads(out.read_text()) == report


def test_missing_file_is_schema_error(tmp_path, capsys):
    code, report = run_cli(capsys, ["validate", "groupoid", str(tmp_path / "no.json")])
    assert code == 2
    assert report["error"]["kind"] == "schema"


def test_console_script_entrypoint(tmp_path):
    path = write(
        tmp_path, "g.json", io_json.encode_groupoid(pair_groupoid(["1", "2"]))
    )
    proc = subprocess.run(
        [sys.executable, "-m", "moritakit", "validate", "groupoid", path],
        capture_output=True,
        text=True,
    )
    assert proc.returncode == 0
    report = json.loads(proc.stdout)
    assert report["results"]["valid"] is True
