import pytest

from wangtrans import catalog, formats
from wangtrans.core import compose, from_tileset, power


def _ok(r, code=0):
    assert r.returncode == code, r.stderr.decode()
    return r.stdout.decode()


@pytest.fixture
def files(tmp_path, cli):
    for name in ("example1", "jeandel-rao", "robinson", "kari-example", "machine:two-step", "appendix-loop-1", "appendix-periodic"):
        (tmp_path / name.replace(":", "-")).write_text(_ok(cli("catalog", name)))
    return tmp_path


def test_every_output_has_the_version_header(cli):
    for name in ("example1", "robinson", "robinson-H-2", "jr-T-3", "kari-example", "machine:bb2", "cert:robinson", "appendix-loop-2"):
        assert _ok(cli("catalog", name)).startswith("format-version 1\n"), name


def test_unknown_catalog_name_fails(cli):
    r = cli("catalog", "nope")
    assert r.returncode == 1 and b"unknown catalog entry" in r.stderr
    assert cli("catalog", "machine:nope").returncode == 1


def test_compose_matches_library(cli, files):
    t = from_tileset(catalog.example1())
    out = _ok(cli("compose", str(files / "example1"), str(files / "example1")))
    assert formats.parse_transducer(out) == compose(t, t)


def test_power_and_trim(cli, files):
    t = from_tileset(catalog.example1())
    raw = formats.parse_transducer(_ok(cli("power", "--k", "2", str(files / "example1"))))
    assert raw == power(t, 2)
    trimmed = _ok(cli("power", "--k", "2", "--trim", str(files / "example1")))
    assert formats.parse_transducer(trimmed) == power(t, 2, do_trim=True)
    assert _ok(cli("trim", stdin=formats.serialize_transducer(raw))) == trimmed


def test_power_reads_stdin(cli):
    ts = _ok(cli("catalog", "example1"))
    t2 = formats.parse_transducer(_ok(cli("power", "--k", "2", "--trim", stdin=ts)))
    assert (len(t2.states), len(t2.edges)) == (7, 8)


def test_power_one_is_identity(cli, files):
    out = _ok(cli("power", "--k", "1", str(files / "robinson")))
    assert out == (files / "robinson").read_text()


def test_cache_is_transparent(cli, files, tmp_path):
    src = str(files / "jeandel-rao")
    first = _ok(cli("power", "--k", "6", "--trim", src))
    cached = list((tmp_path / "cache").glob("*.transducer"))
    assert len(cached) == 1
    second = _ok(cli("power", "--k", "6", "--trim", src))
    fresh = _ok(cli("power", "--k", "6", "--trim", "--no-cache", src))
    assert first == second == fresh == cached[0].read_text()


def test_loops_kinds(cli, files):
    out = _ok(cli("loops", str(files / "example1")))
    assert formats.parse_loop(out).order == 2 and "# class plain" in out
    # on a plain transducer the periodic search is exact, so "none" is definitive
    r = cli("loops", "--kind", "periodic", "--max-order", "4", str(files / "example1"))
    assert r.returncode == 0 and r.stdout.decode().strip() == "none"
    h2 = _ok(cli("catalog", "robinson-H-2"))
    r = cli("loops", "--kind", "periodic", "--max-order", "1", stdin=h2)
    # a meta-transducer search is bounded by the order, so "none" is Unknown
    assert r.returncode == 2 and r.stdout.decode().strip() == "none"
    cube = _ok(cli("power", "--k", "15", "--trim", str(files / "example1")))
    out = _ok(cli("loops", "--kind", "periodic", stdin=cube))
    loop = formats.parse_loop(out)
    assert loop.bottom == loop.top and loop.height == 15


def test_cyclic_loop_kind(cli, files):
    t3 = _ok(cli("power", "--k", "3", "--trim", str(files / "example1")))
    out = _ok(cli("loops", "--kind", "cyclic", stdin=t3))
    assert "# class cyclic" in out


def test_certify_exit_codes(cli, tmp_path):
    out = _ok(cli("certify", "builtin:robinson", "--n-max", "2"))
    assert out.splitlines()[-1].startswith("result PASS bounded to n<=2")
    (tmp_path / "r.cert").write_text(_ok(cli("catalog", "cert:robinson")))
    assert _ok(cli("certify", "--cert", str(tmp_path / "r.cert"), "--n-max", "2")) == out
    r = cli("certify", "builtin:jr", "--n-max", "2")
    assert r.returncode == 1 and b"result FAIL" in r.stdout


def test_domino_verdicts(cli, files, tmp_path):
    witness = tmp_path / "w.loop"
    out = _ok(cli("domino", "--witness", str(witness), str(files / "example1")))
    assert out.startswith("verdict PeriodicTiling")
    loop = formats.parse_loop(witness.read_text())
    assert loop.bottom == loop.top
    one = formats.serialize_tileset(catalog.WangTileset.build("one", [("a", "a", "b", "c")]))
    assert _ok(cli("domino", stdin=one)).strip() == "verdict NoTiling n=2"
    r = cli("domino", "--max-height", "3", str(files / "jeandel-rao"))
    assert r.returncode == 2 and r.stdout.startswith(b"verdict Unknown")


def test_domino_with_certificates(cli, files):
    out = _ok(cli("domino", "--cert", "builtin:robinson", "--cert-n-max", "2", str(files / "robinson")))
    assert out.startswith("verdict CertificateVerified")
    r = cli("domino", "--cert", "builtin:jr", "--cert-n-max", "2", "--max-height", "4", str(files / "jeandel-rao"))
    assert r.returncode == 2


def test_render_formats(cli, files, tmp_path):
    text = _ok(cli("render", "--loop", str(files / "appendix-loop-1"), "--tileset", "builtin:example1"))
    assert len(text.strip().splitlines()) == 3
    svg = _ok(cli("render", "--loop", str(files / "appendix-periodic"), "--tileset", "builtin:example1", "--svg", "--reps", "2"))
    assert svg.lstrip().startswith("<svg") or svg.lstrip().startswith("<?xml")
    png = tmp_path / "p.png"
    plain = tmp_path / "plain.loop"
    plain.write_text(_ok(cli("loops", str(files / "example1"))))
    _ok(cli("render", "--loop", str(plain), "--reps", "3", "--png", str(png)))
    assert png.read_bytes()[:8] == b"\x89PNG\r\n\x1a\n"
    r = cli("render", "--loop", str(files / "appendix-loop-1"))
    assert r.returncode == 1


def test_compilers(cli, files):
    ts = formats.parse_tileset(_ok(cli("kari-compile", "--map", str(files / "kari-example"), "--bound", "3")))
    assert ts.tiles
    tm = formats.parse_tileset(_ok(cli("tm-compile", "--machine", str(files / "machine-two-step"), "--bound", "3")))
    assert tm.tiles
    assert cli("kari-compile", "--map", str(files / "example1"), "--bound", "3").returncode == 1


def test_bench_outputs(cli, files, tmp_path):
    out = tmp_path / "bench"
    r = cli("bench", "--tileset", "builtin:example1", "--k-max", "4", "--out", str(out))
    rows = _ok(r).strip().splitlines()
    assert len(rows) == 5
    assert b"seconds=" in r.stderr
    assert (out / "bench.csv").read_text().splitlines()[0].endswith(",seconds")
    assert (out / "bench.png").read_bytes()[:4] == b"\x89PNG"
    again = cli("bench", "--tileset", str(files / "example1"), "--k-max", "4")
    assert _ok(again) == _ok(r)


def test_threads_flag_is_deterministic(cli, files):
    a = _ok(cli("power", "--k", "8", "--trim", "--no-cache", str(files / "jeandel-rao")))
    b = _ok(cli("--threads", "4", "power", "--k", "8", "--trim", "--no-cache", str(files / "jeandel-rao")))
    assert a == b


def test_missing_file_and_bad_input(cli, tmp_path):
    assert cli("trim", str(tmp_path / "absent")).returncode == 1
    r = cli("trim", stdin="tileset x\n")
    assert r.returncode == 1 and b"line 1" in r.stderr
