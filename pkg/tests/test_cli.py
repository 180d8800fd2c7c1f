import json
import subprocess
import sys

import pytest

import evi_corpus as E
from germ.cli import main
from germ.evi import check_spec, concretize, load_spec, prepare
from germ.layout import layout16, load_layout, serialize_layout
from germ.mem import m_init
from germ.render import color_enabled, render_memory
from germ.report import Report

SPECS = E.SPECS


def run(capsys, *argv):
    code = main([str(a) for a in argv])
    out, err = capsys.readouterr()
    return code, out, err


@pytest.fixture(autouse=True)
def no_color(monkeypatch):
    monkeypatch.setenv("GERM_COLOR", "0")


def final_memory(out):
    return out.split("final memory:\n", 1)[1].rstrip("\n")


# -- gen-layout -----------------------------------------------------------------------------


def test_gen_layout_file_and_determinism(tmp_path, capsys):
    a, b = tmp_path / "a.layout", tmp_path / "b.layout"
    assert run(capsys, "gen-layout", "--size", 16, "-o", a)[0] == 0
    assert run(capsys, "gen-layout", "--size", 16, "-o", b)[0] == 0
    assert a.read_bytes() == b.read_bytes()
    assert load_layout(a) == layout16()
    assert a.read_text() == (SPECS / "layout16.layout").read_text()


def test_gen_layout_stdout_and_extra_special(capsys):
    code, out, _ = run(capsys, "gen-layout", "--size", 3, "--special", "m_msg")
    assert code == 0
    assert "special m_0xinit\nspecial m_throw\nspecial m_msg\n" in out


@pytest.mark.parametrize("argv", [["--size", "0"], ["--size", "-4"],
                                  ["--size", "4", "--special", "m_throw"],
                                  ["--size", "4", "--special", "bad name"]])
def test_gen_layout_rejects_bad_arguments(capsys, argv):
    code, out, err = run(capsys, "gen-layout", *argv)
    assert code == 2 and out == "" and err.startswith("germ: ")


# -- parse ------------------------------------------------------------------------------------


def test_parse_counts_and_pretty_prints(capsys):
    code, out, _ = run(capsys, "parse", SPECS / "pledge.ipl")
    assert code == 0 and out == "parsed 2 top-level statements\n"
    code, out, _ = run(capsys, "parse", SPECS / "pledge.ipl", "--spec", SPECS / "pledge.germ")
    assert code == 0
    assert out == "if (Pledge == 0 || complete || refunded) {\n    throw;\n}\nrefnd = true;\n"


def test_parse_errors_are_distinct(tmp_path, capsys):
    bad_syntax = tmp_path / "a.ipl"
    bad_syntax.write_text("x = ;")
    bad_type = tmp_path / "b.ipl"
    bad_type.write_text("if (Pledge) { skip; }")
    code, _, err = run(capsys, "parse", bad_syntax)
    assert code == 2 and "program parse error" in err
    code, _, err = run(capsys, "parse", bad_type, "--spec", SPECS / "pledge.germ")
    assert code == 2 and "type error" in err
    code, _, err = run(capsys, "parse", tmp_path / "missing.ipl")
    assert code == 2 and "file not found" in err


# -- check ------------------------------------------------------------------------------------


EXPECTED_EXIT = {"PASS": 0, "FAIL": 1, "UNDECIDED": 1}


@pytest.mark.parametrize("path", E.CORPUS, ids=lambda p: p.stem)
def test_exit_code_contract_and_json_round_trip(capsys, path):
    code, out, _ = run(capsys, "check", "--spec", path, "--json")
    data = json.loads(out)
    report = Report.from_dict(data)
    assert json.loads(json.dumps(report.to_dict())) == data
    assert code == EXPECTED_EXIT[report.overall]
    assert report.overall == check_spec(load_spec(path)).overall
    code_text, text, _ = run(capsys, "check", "--spec", path)
    assert code_text == code
    # every field of the text form is present in the machine form
    for p in report.paths:
        assert p.condition in text and p.status in text
        if p.witness:
            assert "witness: " + ", ".join(f"{k}={str(v).lower()}" for k, v in p.witness) in text


def test_pledge_check_text(capsys):
    code, out, _ = run(capsys, "check", "--spec", SPECS / "pledge.germ")
    assert code == 0
    assert out.count("[triple]") == 4
    assert "overall: PASS (4 paths" in out
    assert "assert read(refnd) == true: pass" in out


def test_mutant_reports_witness(capsys):
    code, out, _ = run(capsys, "check", "--spec", SPECS / "pledge_nothrow.germ")
    assert code == 1
    assert "witness: n=0, b1=false, b2=false" in out


def write_spec(tmp_path, body, program="n = 1;"):
    (tmp_path / "p.ipl").write_text(program)
    (tmp_path / "l.layout").write_text(serialize_layout(layout16()))
    spec = tmp_path / "s.germ"
    spec.write_text("germ-spec v1\nlayout l.layout\nfuel 8\nprogram p.ipl\n" + body)
    return spec


@pytest.mark.parametrize("body, program, fragment", [
    ("var n : nat = 0\nassert else : bogus\n", "n = 1;", "spec parse error"),
    ("var n : nat = 0\nassert else : reverted\n", "n = ;", "program parse error"),
    ("var n : nat = 0\nassert else : reverted\n", "n = true;", "type error"),
    ("".join(f"var v{i} : nat = 0\n" for i in range(17)), "skip;", "allocation error"),
])
def test_check_input_errors(tmp_path, capsys, body, program, fragment):
    spec = write_spec(tmp_path, body, program)
    code, out, err = run(capsys, "check", "--spec", spec)
    assert code == 2 and out == "" and fragment in err


def test_check_missing_files(tmp_path, capsys):
    assert run(capsys, "check", "--spec", tmp_path / "none.germ")[0] == 2
    spec = write_spec(tmp_path, "var n : nat = 0\nassert else : reverted\n")
    (tmp_path / "l.layout").unlink()
    code, _, err = run(capsys, "check", "--spec", spec)
    assert code == 2 and "file not found" in err


def test_negative_fuel_is_usage_error(capsys):
    assert run(capsys, "check", "--spec", SPECS / "pledge.germ", "--fuel", -1)[0] == 2


def test_fuel_override(capsys):
    code, out, _ = run(capsys, "check", "--spec", SPECS / "pledge.germ", "--fuel", 1)
    assert code == 1 and "UNDECIDED" in out


# -- run -----------------------------------------------------------------------------------------


def test_run_thrown_case_prints_m_init(capsys):
    code, out, _ = run(capsys, "run", "--spec", SPECS / "pledge.germ",
                       "--bind", "n=0", "b1=false", "b2=false")
    assert code == 0 and "reverted: true" in out
    ctx = prepare(load_spec(SPECS / "pledge.germ"))
    assert final_memory(out) == render_memory(m_init(ctx.layout), ctx.table)


def test_run_breakpoint_before_refund(capsys):
    code, out, _ = run(capsys, "run", "--spec", SPECS / "pledge.germ",
                       "--bind", "n=1", "--bind", "b1=false", "--bind", "b2=false", "--break", 1)
    assert code == 0
    dump, final = out.split("final memory:\n")
    assert dump.startswith("breakpoint after statement 1:\n")
    refnd = "m_0x00000003 := Bool (Some {}) load global public occupied;  # refnd"
    assert refnd.format("false") in dump and refnd.format("true") in final


@pytest.mark.parametrize("binds, fragment", [
    (["n=true", "b1=false", "b2=false"], "is nat"),
    (["n=1", "b1=2", "b2=false"], "is bool"),
    (["n=1", "b1=false"], "unbound"),
    (["n=1", "b1=false", "b2=false", "zz=1"], "unknown symbol"),
    (["n=1", "n=2", "b1=false", "b2=false"], "bound twice"),
    (["n1", "b1=false", "b2=false"], "sym=value"),
])
def test_run_bind_errors(capsys, binds, fragment):
    code, _, err = run(capsys, "run", "--spec", SPECS / "pledge.germ", "--bind", *binds)
    assert code == 2 and fragment in err


def test_run_breakpoint_out_of_range(capsys):
    code, _, err = run(capsys, "run", "--spec", SPECS / "pledge.germ",
                       "--bind", "n=1", "b1=false", "b2=false", "--break", 9)
    assert code == 2 and err


@pytest.mark.parametrize("path", [p for p in E.CORPUS if not load_spec(p).invariants],
                         ids=lambda p: p.stem)
def test_run_reproduces_each_checked_path(capsys, path):
    ctx = prepare(load_spec(path))
    verdict = check_spec(ctx)
    for binding in E.bindings(ctx.symbols):
        pv = next(p for p in verdict.paths if p.path.condition.holds(binding))
        if pv.path.undecided is not None:
            continue
        binds = [f"{s.name}={str(v).lower()}" for s, v in binding.items()]
        code, out, _ = run(capsys, "run", "--spec", path, *(["--bind", *binds] if binds else []))
        assert code == 0
        expected = concretize(pv.path.memory, binding)
        assert final_memory(out) == render_memory(expected, ctx.table)


# -- color and entry point -------------------------------------------------------------------------


def test_color_switch(monkeypatch, capsys):
    class Tty:
        def isatty(self):
            return True

    monkeypatch.setenv("GERM_COLOR", "0")
    assert not color_enabled(Tty())
    monkeypatch.setenv("GERM_COLOR", "1")
    assert color_enabled(sys.stdout)
    code, out, _ = run(capsys, "check", "--spec", SPECS / "pledge.germ")
    assert "\x1b[32mPASS\x1b[0m" in out
    monkeypatch.delenv("GERM_COLOR")
    assert color_enabled(Tty()) and not color_enabled(sys.stdout)


def test_console_script():
    proc = subprocess.run([sys.executable, "-m", "germ.cli", "check", "--spec",
                           str(SPECS / "pledge.germ")], capture_output=True, text=True,
                          env={"GERM_COLOR": "0", "PATH": ""})
    assert proc.returncode == 0 and "overall: PASS" in proc.stdout
    assert "\x1b[" not in proc.stdout


def test_usage_errors_exit_2(capsys):
    with pytest.raises(SystemExit) as info:
        main([])
    assert info.value.code == 2
    capsys.readouterr()
