import numpy as np
import pytest

from entrosteer.errors import ConfigError
from entrosteer.services import presets
from entrosteer.services.states import bes_admissible


@pytest.mark.parametrize("name,dims,parameter", [
    ("werner", (2, 2), "w"),
    ("example2", (2, 2), "w"),
    ("qutrit", (3, 3), "w"),
    ("one_way", (2, 2), "beta"),
    ("bes", (3, 3), "m1"),
    ("ghz", (2, 2, 2), "gamma"),
    ("w", (2, 2, 2), "delta"),
])
def test_family_shapes(name, dims, parameter):
    fam = presets.family(name)
    assert fam.dims == dims
    assert fam.parameter_name == parameter


def test_isotropic_dimension_parameter():
    fam = presets.family("isotropic", {"d": 5})
    assert fam.dims == (5, 5)
    assert fam.name == "isotropic-d5"
    with pytest.raises(ConfigError):
        presets.family("isotropic", {"d": 2.5})


def test_unknown_family():
    with pytest.raises(ConfigError, match="unknown family"):
        presets.family("cluster")


def test_bloch_family_uses_given_correlations():
    fam = presets.family("bloch", {"c1": -0.8, "c2": -0.8, "c3": -0.8})
    rho = fam(1.0)
    assert rho.eigenvalues.min() == pytest.approx(0.05)
    assert fam.fixed["c1"] == -0.8


def test_bes_upper_limit_is_admissible():
    for m2 in (0.0, 0.3, 0.9):
        m1 = presets.bes_m1_limit(m2)
        assert m1 * m1 + m1 * m2 + m2 * m2 == pytest.approx(1.0)
        assert bes_admissible(m1 - 1e-9, m2)
    with pytest.raises(ConfigError):
        presets.family("bes", {"m2": 1.5})


def test_measurement_specs():
    assert len(presets.measurement_spec("pauli3", 2)) == 3
    assert len(presets.measurement_spec("pauli:xz", 2)) == 2
    assert len(presets.measurement_spec("mub-complete", 5)) == 6
    assert len(presets.measurement_spec("mub-dim4", 4)) == 5
    assert len(presets.measurement_spec("bes", 3)) == 2


def test_measurement_spec_errors(tmp_path):
    with pytest.raises(ConfigError, match="party has dimension"):
        presets.measurement_spec("pauli3", 3)
    with pytest.raises(ConfigError, match="unknown measurement spec"):
        presets.measurement_spec("sic", 2)
    with pytest.raises(ConfigError, match="not found"):
        presets.measurement_spec(str(tmp_path / "missing.json"), 2)


def test_bipartite_scenario_selects_settings():
    scenario = presets.bipartite_scenario("mub-complete", (3, 3), num_settings=2)
    assert scenario.num_settings == 2
    assert scenario.name == "mub-complete"
    with pytest.raises(ConfigError):
        presets.bipartite_scenario("pauli3", (2, 2), num_settings=4)
    with pytest.raises(ConfigError):
        presets.bipartite_scenario("pauli3", (2, 2, 2))


def test_tripartite_scenarios():
    criterion, scenario = presets.tripartite_scenario("ghz-a-bc-3")
    assert criterion == "a-to-bc"
    assert scenario.untrusted == (0,)
    assert scenario.num_settings == 3
    criterion, scenario = presets.tripartite_scenario("w-ab-c-2")
    assert criterion == "ab-to-c"
    assert scenario.untrusted == (0, 1)
    with pytest.raises(ConfigError):
        presets.tripartite_scenario("ghz-a-bc-4")


def test_scenario_for_routes_by_dimension():
    criterion, _ = presets.scenario_for("pauli3", (2, 2))
    assert criterion == "entropic"
    criterion, _ = presets.scenario_for("a-bc-2", (2, 2, 2))
    assert criterion == "a-to-bc"
    with pytest.raises(ConfigError):
        presets.scenario_for("a-bc-2", (2, 2, 2), num_settings=3)
