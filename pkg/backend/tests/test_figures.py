import numpy as np
import pytest

from entrosteer.errors import ConfigError
from entrosteer.services.figures.registry import (
    get_figure_registry,
    isotropic_critical_alpha,
    to_csv,
)

REGISTRY = get_figure_registry()


def rows_by(data, key):
    return {row[key]: row for row in data.rows}


def test_registry_ids():
    assert REGISTRY.ids == ["fig1", "fig2", "fig3", "fig4", "fig5", "fig6", "fig7", "oneway", "tripartite-table"]
    with pytest.raises(ConfigError):
        REGISTRY.render("fig9")


def test_fig1_bound_curves():
    data = REGISTRY.render("fig1")
    rows = rows_by(data, "q")
    assert rows[1.0]["pair"] == pytest.approx(np.log(4))
    assert rows[2.0]["pair"] == pytest.approx(0.75)
    assert rows[2.0]["triple_entangled"] == pytest.approx(1.5)
    assert rows[2.0]["triple_separable"] == pytest.approx(1.5)
    assert rows[5.0]["triple"] == rows[5.0]["triple_separable"]


def test_csv_carries_column_docs():
    text = to_csv(REGISTRY.render("fig1"))
    lines = text.splitlines()
    assert lines[0] == "# figure: fig1"
    assert "# column q: Tsallis parameter" in lines
    header = next(line for line in lines if not line.startswith("#"))
    assert header == "q,pair,triple_entangled,triple_separable,triple"


def test_fig5_isotropic_thresholds():
    data = REGISTRY.render("fig5", resolution=1e-3)
    for row in data.rows:
        assert row["critical"] == pytest.approx(row["closed_form"], abs=1e-3)
    assert rows_by(data, "d")[2]["linear_inequality"] == pytest.approx((2 ** 1.5 - 1) / 3)


def test_fig6_closed_form_roots():
    data = REGISTRY.render("fig6")
    at_two = {row["d"]: row["critical"] for row in data.rows if row["q"] == 2.0}
    for d, alpha in at_two.items():
        assert alpha == pytest.approx(1 / np.sqrt(d + 1), abs=1e-9)


def test_isotropic_root_helper():
    assert isotropic_critical_alpha(3, 4, 2.0) == pytest.approx(0.5, abs=1e-9)


def test_fig7_never_violates():
    data = REGISTRY.render("fig7")
    assert data.rows
    assert all(row["bound"] == pytest.approx(2 / 3) for row in data.rows)
    assert min(row["margin"] for row in data.rows) >= -1e-9


def test_oneway_bisection_inside_windows():
    data = REGISTRY.render("oneway", resolution=1e-3)
    assert len(data.rows) == 16
    for row in data.rows:
        assert row["window_lower"] < row["window_upper"]
        assert row["forward_critical"] == pytest.approx(row["window_lower"], abs=2e-3)
        if row["reverse_critical"] is not None:
            assert row["reverse_critical"] == pytest.approx(row["window_upper"], abs=2e-3)


# printed thresholds as strings; the tolerance follows the printed precision
TRIPARTITE_THRESHOLDS = {
    ("ghz", "a-bc-2", "shannon", "separable"): "0.8631",
    ("ghz", "a-bc-2", "q2", "separable"): "0.866",
    ("ghz", "ghz-a-bc-3", "shannon", "separable"): "0.7642",
    ("ghz", "ghz-a-bc-3", "shannon", "any"): "0.909",
    ("ghz", "ghz-a-bc-3", "q2", "separable"): "0.775",
    ("ghz", "ghz-ab-c-2", "shannon", "-"): "0.7476",
    ("ghz", "ghz-ab-c-2", "q2", "-"): "0.6751",
    ("ghz", "ghz-ab-c-3", "shannon", "-"): "0.6247",
    ("ghz", "ghz-ab-c-3", "q2", "-"): "0.5514",
    ("ghz", "ghz-global-2", "shannon", "-"): "0.7476",
    ("ghz", "ghz-global-2", "q2", "-"): "0.6751",
    ("ghz", "ghz-global-3", "shannon", "-"): "0.6247",
    ("ghz", "ghz-global-3", "q2", "-"): "0.5514",
    ("w", "a-bc-2", "shannon", "separable"): "0.9814",
    ("w", "w-a-bc-3", "shannon", "separable"): "0.8523",
    ("w", "w-a-bc-3", "q2", "separable"): "0.8366",
    ("w", "w-ab-c-2", "shannon", "-"): "0.818",
    ("w", "w-ab-c-2", "q2", "-"): "0.75",
    ("w", "w-ab-c-3", "shannon", "-"): "0.698",
    ("w", "w-ab-c-3", "q2", "-"): "0.623",
    ("w", "w-global-2", "shannon", "-"): "0.8571",
    ("w", "w-global-2", "q2", "-"): "0.7802",
    ("w", "w-global-3", "shannon", "-"): "0.7414",
    ("w", "w-global-3", "q2", "-"): "0.6548",
}


@pytest.fixture(scope="module")
def tripartite_rows():
    data = REGISTRY.render("tripartite-table", resolution=1e-4)
    return {(r["state"], r["setting"], r["entropy"], r["composite"]): r for r in data.rows}


@pytest.mark.parametrize("key,printed", sorted(TRIPARTITE_THRESHOLDS.items()))
def test_tripartite_table_thresholds(tripartite_rows, key, printed):
    row = tripartite_rows[key]
    assert row["status"] == "ok"
    digits = len(printed.split(".")[1])
    assert row["critical"] == pytest.approx(float(printed), abs=max(2e-3, 10.0 ** -digits))


MISSING_VIOLATIONS = [("w", "a-bc-2", "q2", "separable"), ("w", "w-a-bc-3", "shannon", "any")]


@pytest.mark.parametrize("key", MISSING_VIOLATIONS)
def test_tripartite_table_reports_missing_violations(tripartite_rows, key):
    assert tripartite_rows[key]["status"] == "no_violation"
    assert tripartite_rows[key]["critical"] is None


def test_tripartite_table_covers_every_setting(tripartite_rows):
    assert set(tripartite_rows) == set(TRIPARTITE_THRESHOLDS) | set(MISSING_VIOLATIONS)
