import math

import pytest

import tumorbif as tb


@pytest.fixture(scope="module")
def unit():
    eq = tb.find_RA(tb.unit_radius_A())
    table = tb.SymbolTable.assemble(eq, k_max=32)
    return eq, table


def test_unit_radius(unit):
    eq, _ = unit
    assert abs(eq.R_A - 1.0) < 1e-8
    assert eq.residual <= 1e-10
    assert eq.v0(1.0) == pytest.approx(1.0, abs=1e-14)


def test_bad_parameters_raise():
    with pytest.raises(tb.ParameterError):
        tb.find_RA(1.5)
    with pytest.raises(tb.Error):
        tb.find_RA(-0.1)


def test_mode_routes_agree(unit):
    eq, _ = unit
    a = tb.solve_mode(3, eq)
    b = tb.solve_mode_volterra(3, eq)
    assert a.u1 == pytest.approx(b.u1, rel=1e-10)
    assert a.du1 == pytest.approx(b.du1, rel=1e-10)


def test_symbol_and_catalog(unit):
    _, table = unit
    assert abs(table.denom[1]) < 1e-7
    assert tb.mu(1, 123.0, table) == pytest.approx(0.0, abs=1e-5)
    g2 = tb.bif_value(2, table)
    assert tb.mu(2, g2, table) == pytest.approx(0.0, abs=1e-9)
    pts = tb.catalog(2, 3, table)
    assert [p.mode for p in pts] == sorted(p.mode for p in pts)
    assert all(p.G > 0 for p in pts)


def test_trivial_branch_and_multiplier(unit):
    eq, table = unit
    phi = tb.assemble_phi(10.0, tb.ShapeCoeffs(2, [0.0, 0.0]), eq)
    assert phi.sup_norm() <= 1e-7
    mc = tb.multiplier_check(5.0, 2, 1e-4, table, eq)
    assert mc.passed
    assert mc.reference == pytest.approx(tb.mu(2, 5.0, table))


def test_short_branch(unit):
    eq, table = unit
    br = tb.trace_branch(tb.make_point(2, 1, table), 0.01, 2, eq)
    assert len(br.points) == 3
    assert br.points[0].G == br.G_kl
    assert all(p.residual <= 1e-8 for p in br.points)
    assert br.points[-1].rho.a[1] == 0.01


def test_cli_in_process(tmp_path):
    code = tb.run_cli(["--out", str(tmp_path), "radial", "--A", "0.5"])
    assert code == 0
    assert (tmp_path / "radial.json").exists()
    assert tb.run_cli(["no-such-command"]) == 2
