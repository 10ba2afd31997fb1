import math
from dataclasses import replace

import numpy as np
import pytest

import geometry.classification as classification
from geometry.classification import (EXPECTED_ZERO, FitSettings, GaussMapClass,
                                     GaussMapClassReport, SuiteCheck, SuiteReport, Verdict,
                                     check_first_kind, check_harmonic, default_grid,
                                     evaluate_samples, fit_generalized, fit_generalized_arrays,
                                     fit_second_kind, fit_second_kind_arrays, theorem_suite,
                                     track_constant_vector)
from geometry.errors import OptimizerDidNotConverge
from geometry.frenet import (CurvatureFunctions, CurveCase, constant, integrate_frame, sinusoid,
                             standard_frame, zero)
from geometry.tubes import ALL_FAMILIES, TubeFamily
from utils.config import FitConfig, GridSize, RunConfig, Tolerances

FAST_FIT = FitSettings(radii=(0.5, 2.0), directions=8)
C0 = np.array([0.3, -0.5, 0.2, 0.4])


@pytest.fixture(scope="module")
def timelike_samples(timelike_spec):
    grid = default_grid(timelike_spec.family, (0.0, 2.0), 3, 5, 5)
    return evaluate_samples(timelike_spec, grid, source="closed")


@pytest.fixture(scope="module")
def flat_timelike_samples(flat_specs):
    spec = flat_specs["timelike"]
    return evaluate_samples(spec, default_grid(spec.family, (0.0, 2.0), 3, 5, 5), source="closed")


def test_default_grid_ranges():
    grid = default_grid(TubeFamily.timelike(), (0.0, 3.0), 2, 4, 4)
    assert grid.s_values.tolist() == [1.0, 2.0]
    assert grid.t_values[-1] < 2 * math.pi
    assert grid.size == 32
    assert grid.points()[0] == (1.0, 0.0, 0.0)

    grid = default_grid(TubeFamily.spacelike(3, 1), (0.0, 1.0), 2, 3, 3)
    assert grid.t_values.tolist() == [-1.5, 0.0, 1.5]
    with pytest.raises(ValueError):
        default_grid(TubeFamily.timelike(), (0.0, 1.0), 1, 4, 4)


def test_degenerate_metric_points_are_excluded_and_counted(timelike_spec):
    # n_w = 4 puts w on pi/2 and 3pi/2, where the t-tangent vanishes
    grid = default_grid(timelike_spec.family, (0.0, 2.0), 2, 3, 4)
    samples = evaluate_samples(timelike_spec, grid)
    assert len(samples) + len(samples.excluded) == grid.size
    assert len(samples.excluded) == 12
    assert all("degenerate metric" in x.reason for x in samples.excluded)
    assert {round(x.point[2], 6) for x in samples.excluded} == {round(math.pi / 2, 6),
                                                                round(3 * math.pi / 2, 6)}


def test_flat_tube_is_first_kind_with_known_constant(flat_timelike_samples):
    report = check_first_kind(flat_timelike_samples, 1)
    assert report.verdict is Verdict.SATISFIED
    assert report.is_global
    assert report.m_constant == pytest.approx(16.0, rel=1e-9)
    assert not report.impostor


def test_flat_tube_l2_is_harmonic_not_first_kind(flat_timelike_samples):
    assert check_harmonic(flat_timelike_samples, 2).verdict is Verdict.SATISFIED
    report = check_first_kind(flat_timelike_samples, 2)
    assert report.impostor
    assert report.verdict is Verdict.VIOLATED
    assert report.notes


def test_flat_tube_numeric_operator_on_hyperbolic_family(flat_specs):
    spec = flat_specs["j2_lambda-1"]
    samples = evaluate_samples(spec, default_grid(spec.family, (0.0, 2.0), 2, 4, 4),
                               richardson=True)
    assert not samples.excluded
    report = check_first_kind(samples, 1)
    assert report.verdict is Verdict.SATISFIED
    assert report.m_constant == pytest.approx(-16.0, abs=1e-6)
    assert check_harmonic(samples, 1).verdict is Verdict.VIOLATED


def test_second_kind_fit_recovers_planted_vector(timelike_samples):
    Nc = timelike_samples.normal_components()
    M = timelike_samples.component_maps()
    L = 3.0 * (Nc + np.einsum("pij,j->pi", M, C0))
    fit = fit_second_kind_arrays(L, Nc, M, FAST_FIT)
    assert np.allclose(fit.C, C0, atol=1e-4)
    assert fit.residual < 1e-8
    assert np.allclose(fit.m, 3.0, atol=1e-6)


def test_generalized_fit_recovers_planted_direction(timelike_samples):
    Nc = timelike_samples.normal_components()
    M = timelike_samples.component_maps()
    unit = C0 / np.linalg.norm(C0)
    s = np.array([p.point[0] for p in timelike_samples.samples])
    L = 2.0 * Nc + np.sin(s)[:, None] * np.einsum("pij,j->pi", M, unit)
    fit = fit_generalized_arrays(L, Nc, M, FAST_FIT)
    assert min(np.linalg.norm(fit.C - unit), np.linalg.norm(fit.C + unit)) < 1e-4
    assert fit.residual < 1e-8
    assert np.allclose(fit.m, 2.0, atol=1e-6)
    assert np.allclose(np.abs(fit.n), np.abs(np.sin(s)), atol=1e-6)


def test_fits_reject_too_few_points(timelike_samples):
    Nc = timelike_samples.normal_components()[:5]
    M = timelike_samples.component_maps()[:5]
    with pytest.raises(ValueError):
        fit_second_kind_arrays(Nc, Nc, M)
    with pytest.raises(ValueError):
        fit_generalized_arrays(Nc, Nc, M)


def test_iteration_cap_raises(timelike_samples):
    settings = FitSettings(radii=(0.5,), directions=4, max_iterations=1)
    with pytest.raises(OptimizerDidNotConverge) as info:
        fit_second_kind(timelike_samples, 1, settings=settings)
    assert info.value.iterations >= 1


@pytest.mark.parametrize("fit", [fit_second_kind, fit_generalized])
@pytest.mark.parametrize("k", [1, 2])
def test_sinusoid_tube_is_not_one_type(timelike_samples, fit, k):
    report = fit(timelike_samples, k, settings=FAST_FIT)
    assert report.verdict is Verdict.VIOLATED
    assert report.residual >= 1e-3
    assert report.n_points == 75 and report.excluded == 0


def test_sinusoid_tube_is_neither_harmonic_nor_first_kind(timelike_samples):
    for k in (1, 2):
        assert check_harmonic(timelike_samples, k).verdict is Verdict.VIOLATED
        report = check_first_kind(timelike_samples, k)
        assert report.verdict is Verdict.VIOLATED
        assert report.residual >= 1e-3


def test_report_dict_hides_functions_unless_asked(timelike_samples):
    report = check_first_kind(timelike_samples, 1)
    short = report.to_dict()
    assert short["class"] == "FirstKindPointwise" and "fitted_m" not in short
    assert len(report.to_dict(include_functions=True)["fitted_m"]) == 75


@pytest.mark.parametrize("case", list(CurveCase))
def test_constant_vector_satisfies_component_equations(case):
    k = CurvatureFunctions(sinusoid(0.3, 0.1, 1.0), constant(0.2), constant(0.1))
    curve = integrate_frame(case, k, (0.0, 2.0), standard_frame(case), step=1e-3)
    track = track_constant_vector(curve, C0)
    assert track.drift < 1e-8
    assert track.ode_residual < 1e-7
    assert track.C_frenet.shape == (len(track.s_values), 4)


def test_constant_vector_on_straight_line_has_constant_components():
    case = CurveCase.SPACELIKE_J3
    k = CurvatureFunctions(zero(), zero(), zero())
    curve = integrate_frame(case, k, (0.0, 1.0), standard_frame(case), step=0.01)
    track = track_constant_vector(curve, C0)
    assert np.allclose(track.C_frenet, track.C_frenet[0], atol=1e-14)
    assert track.ode_residual < 1e-12


def test_frame_vector_tracks_as_unit_component(timelike_spec):
    curve = timelike_spec.curve
    track = track_constant_vector(curve, curve.frames[0][1])
    assert np.allclose(track.C_frenet[0], [0.0, 1.0, 0.0, 0.0], atol=1e-12)
    assert track.ode_residual < 1e-7


def suite_config(**overrides) -> RunConfig:
    config = RunConfig(
        families=(TubeFamily.timelike(), TubeFamily.spacelike(2, -1)),
        s_range=(0.0, 2.0),
        grid=GridSize(3, 5, 5),
        fit=FitConfig(radii=(0.5, 2.0), directions=8),
    )
    return replace(config, **overrides)


def test_theorem_suite_reproduces_expected_verdicts():
    report = theorem_suite(suite_config())
    assert len(report.checks) == 16
    failures = [(c.check_id, [o.to_dict() for o in c.outcomes if not o.matches])
                for c in report.checks if not c.matches]
    assert report.all_match, failures

    zero_outcomes = {(c.k, c.class_tested): c.outcomes[0] for c in report.checks
                     if c.family == "timelike" and (c.k, c.class_tested) in EXPECTED_ZERO}
    fk1 = zero_outcomes[(1, GaussMapClass.FIRST_KIND)]
    assert fk1.expected_m == pytest.approx(16.0)
    assert fk1.m_constant == pytest.approx(16.0, rel=1e-6)

    second = next(c for c in report.checks if c.check_id == "timelike/L1/SecondKindPointwise")
    assert len(second.outcomes) == 2
    assert all(o.residual_floor_met for o in second.outcomes)

    document = report.to_dict()
    assert document["schema_version"] == "1.0"
    assert document["settings"]["families"][1] == {"j": 2, "lambda": -1}
    table = report.to_table()
    assert "timelike/L2/Harmonic" in table
    assert "j2_lambda-1/L1/FirstKindPointwise" in table
    assert " NO" not in table


def test_theorem_suite_single_family_has_eight_checks():
    report = theorem_suite(suite_config(families=(TubeFamily.timelike(),)))
    assert len(report.checks) == 8
    assert {c.family for c in report.checks} == {"timelike"}


def test_theorem_suite_records_empty_grids():
    config = suite_config(families=(TubeFamily.timelike(),),
                          tolerances=Tolerances(reg_tol=10.0))
    report = theorem_suite(config)
    assert not report.all_match
    for check in report.checks:
        for outcome in check.outcomes:
            assert outcome.points == 0
            assert outcome.error == "no usable grid points"
            assert not outcome.matches


def test_threaded_evaluation_matches_serial(timelike_spec):
    grid = default_grid(timelike_spec.family, (0.0, 2.0), 2, 3, 3)
    serial = evaluate_samples(timelike_spec, grid, source="closed")
    threaded = evaluate_samples(timelike_spec, grid, source="closed", threads=2)
    assert [p.point for p in threaded.samples] == [p.point for p in serial.samples]
    assert np.array_equal(threaded.operator_components(1), serial.operator_components(1))


@pytest.mark.parametrize("factor, expected", [(2.0, False), (2e3, True)])
def test_violated_verdict_must_clear_residual_floor(monkeypatch, timelike_samples, factor, expected):
    tol = 1e-6

    def planted(samples, k, cls, *args):
        return GaussMapClassReport(samples.family.label, k, cls, factor * tol, Verdict.VIOLATED,
                                   len(samples), 0)

    monkeypatch.setattr(classification, "_run_check", planted)
    outcome = classification._outcome(timelike_samples, "planted", 1, GaussMapClass.SECOND_KIND,
                                      Verdict.VIOLATED, None, tol, 1e-10, FAST_FIT)
    assert outcome.verdict is Verdict.VIOLATED
    assert outcome.residual_floor_met is expected
    assert outcome.matches is expected

    report = SuiteReport([SuiteCheck("timelike/L1/SecondKindPointwise", "timelike", 1,
                                     GaussMapClass.SECOND_KIND, [outcome])])
    assert report.all_match is expected
    row = report.to_table().splitlines()[-1].split()
    assert row[-2:] == (["yes", "yes"] if expected else ["NO", "NO"])


@pytest.mark.parametrize("family", ALL_FAMILIES, ids=lambda f: f.label)
def test_theorem_suite_clears_residual_floor_on_every_family(family):
    report = theorem_suite(suite_config(families=(family,)))
    assert len(report.checks) == 8
    witnesses = {o.witness for c in report.checks for o in c.outcomes}
    # the zero witness plus k1 = 0.2 and k1 = 0.3 + 0.1 sin s
    assert len(witnesses) == 3
    for check in report.checks:
        # witnesses run in order, so the two curved ones come last
        for outcome in check.outcomes[-2:]:
            assert outcome.expected is Verdict.VIOLATED
            assert outcome.residual_floor_met, (check.check_id, outcome.to_dict())
    failures = [(c.check_id, [o.to_dict() for o in c.outcomes if not o.matches])
                for c in report.checks if not c.matches]
    assert report.all_match, failures
