import math

import pytest

from src.covariance import EstimatorSpec, ModelSpec, ReturnDistribution
from src.errors import ParameterError, UnsupportedTheoryError
from src.theory import TheoryRegistry, TheoryRequest

GAUSS = ReturnDistribution()
TLCE = EstimatorSpec(kind="TLCE", lag=1)
ETCE = EstimatorSpec(kind="ETCE")


def test_registered_triples():
    theories = TheoryRegistry.list_theories()
    assert ("TM1", "TLCE", "Gaussian") in theories
    assert ("TM3", "TLCE", "Gaussian") in theories
    assert TheoryRegistry.supports("TM1", "TLCE", "StudentV2")
    assert not TheoryRegistry.supports("TM4b", "TLCE")
    assert not TheoryRegistry.supports("TM4c", "TLCE")


def test_duplicate_registration_rejected():
    with pytest.raises(ValueError):
        TheoryRegistry.register("TM1", "TLCE")(lambda request: None)


def test_out_of_scope_triple():
    model = ModelSpec(kind="TM4b", variances=[1.0, 2.0], weights=[0.5, 0.5], taus=[1.0, 4.0])
    with pytest.raises(UnsupportedTheoryError) as exc:
        TheoryRegistry.create(TheoryRequest(model, TLCE, GAUSS, r=0.5))
    assert exc.value.exit_code == 3


def test_ratio_must_be_positive():
    with pytest.raises(ParameterError):
        TheoryRegistry.create(TheoryRequest(ModelSpec(kind="TM1"), TLCE, GAUSS, r=0.0))


def test_tm1_tlce_request():
    result = TheoryRegistry.create(TheoryRequest(ModelSpec(kind="TM1"), TLCE, GAUSS, r=0.5, nbins=80))
    assert result.values["r_ext"] == pytest.approx(math.sqrt(0.75))
    assert result.borderline.kind == "circle_pair"
    assert result.curve.kind == "radial"
    assert result.curve.integral() == pytest.approx(1.0, abs=3e-2)


def test_tm1_etce_zero_mode_mass():
    result = TheoryRegistry.create(TheoryRequest(ModelSpec(kind="TM1"), ETCE, GAUSS, r=2.0))
    assert result.values["zero_mode_mass"] == pytest.approx(0.5)
    assert result.curve.kind == "real_line"


def test_sector_tlce_wrong_law_variant():
    model = ModelSpec(kind="TM2a", variances=[1.0, 5.0], weights=[0.5, 0.5])
    right = TheoryRegistry.create(TheoryRequest(model, TLCE, GAUSS, r=0.5, nbins=40))
    wrong = TheoryRegistry.create(TheoryRequest(model, TLCE, GAUSS, r=0.5, nbins=40, variant="wrong-law"))
    assert wrong.name.endswith("wrong-law")
    assert abs(wrong.values["r_ext"] - right.values["r_ext"]) > 1e-4


def test_student_v1_rescaled_by_sigma():
    dist = ReturnDistribution(kind="StudentV1", mu=5.0)
    base = TheoryRegistry.create(TheoryRequest(ModelSpec(kind="TM1"), TLCE, dist, r=0.5, nbins=40))
    scaled = TheoryRegistry.create(TheoryRequest(ModelSpec(kind="TM1", sigma=2.0), TLCE, dist, r=0.5, nbins=40))
    assert scaled.values["r_trunc"] == pytest.approx(4.0 * base.values["r_trunc"])


def test_tm3_tlce_defaults_to_closed_form_at_lag_one():
    model = ModelSpec(kind="TM3", tau=5.0)
    result = TheoryRegistry.create(TheoryRequest(model, TLCE, GAUSS, r=0.3))
    assert result.name == "tm3-borders-t1"
    assert result.values["r_c"] == pytest.approx(0.59869, abs=1e-5)
    with pytest.raises(ParameterError):
        TheoryRegistry.create(TheoryRequest(model, TLCE, GAUSS, r=0.3, variant="contour"))
