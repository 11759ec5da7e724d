"""Tests for multi-strand eigenpair discovery."""
from __future__ import annotations

import logging
import math

import numpy as np
import pytest

from eigenacs.assembly import assemble
from eigenacs.const import REJECT_DEGENERATE, REJECT_HIGH_RESIDUAL, REJECTION_CAUSES
from eigenacs.exceptions import ConfigurationError
from eigenacs.features import build_basis, eval_features
from eigenacs.oracles import lshape_fd_oracle, plate_ss_spectrum
from eigenacs.population import (
    BasisConfig,
    CollocationConfig,
    PopulationConfig,
    _Deflation,
    _StrandLoggerAdapter,
    cluster_estimates,
    run_population,
    stratified_guesses,
)
from eigenacs.problems import catalog, sample_collocation
from eigenacs.solver import ACSConfig, EigenpairEstimate, run_acs


def _make_estimate(mu, loss=1.0):
    return EigenpairEstimate(
        mu=mu, lambda_phys=math.sqrt(abs(mu)), weights=np.zeros(1), loss_history=[loss], iterations=1,
        status="converged",
    )


def _small_run(threads=1, **population):
    settings = {"strands_per_generation": 4, "max_generations": 2, "target_modes": 2, "seed": 11}
    settings.update(population)
    return run_population(
        catalog("buckling_pin_pin"),
        BasisConfig(width=40),
        ACSConfig(max_iters=10),
        PopulationConfig(**settings),
        collocation=CollocationConfig(n_interior=60),
        threads=threads,
    )


# ---------------------------------------------------------------------------
# Clustering
# ---------------------------------------------------------------------------

class TestClusterEstimates:
    """Tests for single-linkage clustering by eigenvalue."""

    def test_two_clusters(self):
        clusters = cluster_estimates([_make_estimate(m) for m in (9.8696, 9.8697, 39.478)], 1e-3)
        assert [len(c) for c in clusters] == [2, 1]

    def test_identical_values_form_one_cluster(self):
        assert len(cluster_estimates([_make_estimate(5.0) for _ in range(4)], 1e-3)) == 1

    def test_chain_links_through_neighbours(self):
        """1.0 and 1.0018 are too far apart directly but linked through 1.0009."""
        clusters = cluster_estimates([_make_estimate(m) for m in (1.0, 1.0018, 1.0009)], 1e-3)
        assert len(clusters) == 1

    def test_sorted_ascending(self):
        clusters = cluster_estimates([_make_estimate(m) for m in (40.0, 10.0, 90.0)], 1e-3)
        assert [c[0].mu for c in clusters] == [10.0, 40.0, 90.0]

    def test_stable_order_within_cluster(self):
        first, second = _make_estimate(3.0, loss=2.0), _make_estimate(3.0, loss=1.0)
        assert cluster_estimates([first, second], 1e-3)[0] == [first, second]

    def test_empty(self):
        assert cluster_estimates([], 1e-3) == []


class TestStratifiedGuesses:
    """Tests for initial eigenvalue guesses."""

    def test_one_per_sub_interval(self):
        guesses = stratified_guesses((10.0, 50.0), 8, np.random.default_rng(0))
        edges = np.linspace(10.0, 50.0, 9)
        assert np.all((guesses >= edges[:-1]) & (guesses < edges[1:]))

    def test_deterministic(self):
        a = stratified_guesses((0.0, 1.0), 5, np.random.default_rng(3))
        b = stratified_guesses((0.0, 1.0), 5, np.random.default_rng(3))
        np.testing.assert_array_equal(a, b)


class TestStrandLogger:
    """Tests for the strand log prefix."""

    def test_prefix(self):
        adapter = _StrandLoggerAdapter(logging.getLogger("test"), {"generation": 2, "strand": 5})
        msg, _ = adapter.process("converged", {})
        assert msg == "[g2/s5] converged"


# ---------------------------------------------------------------------------
# Configuration
# ---------------------------------------------------------------------------

class TestPopulationConfig:
    """Tests for configuration validation."""

    def test_defaults(self):
        cfg = PopulationConfig()
        assert cfg.strands_per_generation == 16
        assert cfg.max_generations == 10
        assert cfg.target_modes == 4

    def test_zero_target_rejected(self):
        with pytest.raises(ConfigurationError, match="population.target_modes"):
            PopulationConfig(target_modes=0)

    def test_cluster_tolerance_below_one(self):
        with pytest.raises(ConfigurationError, match="population.cluster_rel_tol"):
            PopulationConfig(cluster_rel_tol=1.0)

    def test_fixed_reference_needs_point(self):
        with pytest.raises(ConfigurationError, match="collocation.reference_point"):
            CollocationConfig(reference_policy="fixed")

    def test_basis_bandwidth_defaults_to_problem(self):
        assert BasisConfig().resolve_bandwidth(catalog("plate_ss")) == pytest.approx(math.pi)
        assert BasisConfig(bandwidth=2.0).resolve_bandwidth(catalog("plate_ss")) == 2.0

    def test_threads_must_be_positive(self):
        with pytest.raises(ConfigurationError, match="threads"):
            _small_run(threads=0)


def _fitted_estimate(basis, func, mu):
    """Estimate whose eigenfunction is a least-squares fit of ``func`` on a fine grid."""
    points, _ = catalog("helmholtz_square").domain.midpoint_grid(40)
    phi = eval_features(basis, points)
    weights, *_ = np.linalg.lstsq(phi, func(points[:, 0], points[:, 1]), rcond=None)
    return EigenpairEstimate(
        mu=mu, lambda_phys=mu, weights=weights, loss_history=[0.0], iterations=1, status="converged", basis=basis,
    )


class TestDeflation:
    """Overlaps between accepted modes use a deterministic midpoint grid."""

    def setup_method(self):
        self.spec = catalog("helmholtz_square")
        self.basis = build_basis(300, 2, 4 * math.pi, seed=0)
        self.first = _fitted_estimate(
            self.basis, lambda x, y: np.sin(np.pi * x) * np.sin(np.pi * y), 2 * math.pi ** 2
        )
        self.second = _fitted_estimate(
            self.basis, lambda x, y: np.sin(np.pi * x) * np.sin(2 * np.pi * y), 5 * math.pi ** 2
        )

    def test_grid_separates_orthogonal_modes(self):
        """Random check points put this pair near 0.03; the midpoint grid resolves it."""
        deflation = _Deflation.for_domain(self.spec)
        assert deflation.add(self.first)
        assert deflation.overlap(self.second) < 1e-3

    def test_overlap_with_itself_is_one(self):
        deflation = _Deflation.for_domain(self.spec)
        deflation.add(self.first)
        assert deflation.overlap(self.first) == pytest.approx(1.0, abs=1e-6)

    def test_stored_shapes_have_unit_norm(self):
        deflation = _Deflation.for_domain(self.spec)
        deflation.add(self.first)
        u = deflation.shapes[0].evaluate(deflation.points)
        assert deflation.weight * float(u @ u) == pytest.approx(1.0)

    def test_overlap_is_deterministic(self):
        a, b = _Deflation.for_domain(self.spec), _Deflation.for_domain(self.spec)
        a.add(self.first)
        b.add(self.first)
        assert a.overlap(self.second) == b.overlap(self.second)

    def test_empty_deflation_has_no_overlap(self):
        assert _Deflation.for_domain(self.spec).overlap(self.second) == 0.0

    def test_zero_mode_is_skipped(self, caplog):
        zero = EigenpairEstimate(
            mu=1.0, lambda_phys=1.0, weights=np.zeros(300), loss_history=[0.0], iterations=1,
            status="converged", basis=self.basis,
        )
        deflation = _Deflation.for_domain(self.spec)
        with caplog.at_level(logging.WARNING):
            assert not deflation.add(zero)
        assert deflation.shapes == []
        assert "zero norm" in caplog.text


# ---------------------------------------------------------------------------
# run_population
# ---------------------------------------------------------------------------

class TestRunPopulation:
    """Tests for the generation loop on small systems."""

    def test_report_structure(self):
        report = _small_run()
        assert report.problem == "buckling_pin_pin"
        assert set(report.rejected) == set(REJECTION_CAUSES)
        assert 1 <= report.generations_used <= 2
        assert report.strands_run >= 4 * report.generations_used
        assert report.respawns == report.strands_run - 4 * report.generations_used
        assert len(report.strand_wall_times) == 4 * report.generations_used

    def test_modes_ascending_and_separated(self):
        report = _small_run(accept_residual_tol=1.0)
        mus = report.mus
        assert mus == sorted(mus)
        for a, b in zip(mus, mus[1:]):
            assert abs(b - a) > 1e-3 * max(abs(a), abs(b))
        assert len(mus) <= 2

    def test_identical_across_thread_counts(self):
        serial = _small_run(threads=1, accept_residual_tol=1.0)
        parallel = _small_run(threads=3, accept_residual_tol=1.0)
        np.testing.assert_allclose(serial.mus, parallel.mus, rtol=1e-10)
        assert serial.rejected == parallel.rejected
        assert serial.generations_used == parallel.generations_used

    def test_same_seed_same_report(self):
        a = _small_run(accept_residual_tol=1.0).as_dict()
        b = _small_run(accept_residual_tol=1.0).as_dict()
        a.pop("timing")
        b.pop("timing")
        for mode in a["modes"] + b["modes"]:
            mode.pop("wall_time")
        assert a == b

    def test_empty_spectrum_is_reported_not_raised(self, caplog):
        with caplog.at_level(logging.WARNING):
            report = _small_run(accept_residual_tol=1e-300, max_generations=1)
        assert report.modes == []
        assert report.rejected[REJECT_HIGH_RESIDUAL] + report.rejected[REJECT_DEGENERATE] >= 1
        assert "no eigenpair accepted" in caplog.text

    def test_provenance_materializes_bandwidth(self):
        report = _small_run()
        assert report.provenance["basis"]["bandwidth"] == 1.0
        assert report.provenance["population"]["seed"] == 11

    def test_as_dict_omits_weights(self):
        data = _small_run(accept_residual_tol=1.0).as_dict()
        assert all("weights" not in mode for mode in data["modes"])
        assert "total_wall_time" in data["timing"]


class TestLocality:
    """Strands converge to the eigenpair nearest their initial guess."""

    def test_nearby_guesses_share_a_cluster(self):
        spec = catalog("buckling_pin_pin")
        basis = build_basis(200, 1, spec.bandwidth, seed=0)
        sys = assemble(spec, basis, sample_collocation(spec, 200, seed=0))
        estimates = [run_acs(sys, 9.0), run_acs(sys, 10.0)]
        assert len(cluster_estimates(estimates, 1e-3)) == 1


@pytest.mark.slow
class TestPopulationAccuracy:
    """Population runs at representative sizes."""

    def test_first_generation_suffices_for_one_mode(self):
        report = run_population(
            catalog("buckling_pin_pin"),
            BasisConfig(width=300),
            ACSConfig(),
            PopulationConfig(strands_per_generation=8, target_modes=1, accept_residual_tol=1e-2),
            collocation=CollocationConfig(n_interior=300),
        )
        assert report.generations_used == 1
        assert len(report.modes) == 1

    def test_helmholtz_square_modes_match_oracle(self):
        report = run_population(
            catalog("helmholtz_square"),
            BasisConfig(width=500),
            ACSConfig(),
            PopulationConfig(target_modes=4),
            collocation=CollocationConfig(n_interior=800),
            threads=4,
        )
        expected = [k * math.pi ** 2 for k in (2, 5, 8, 10)]
        assert len(report.modes) == 4
        for mu, target in zip(report.mus, expected):
            assert mu == pytest.approx(target, rel=5e-3)
        assert _max_pairwise_overlap(catalog("helmholtz_square"), report.modes) < 1e-2

    def test_lshape_against_finite_differences(self):
        spec = catalog("helmholtz_lshape")
        report = run_population(
            spec,
            BasisConfig(width=500),
            ACSConfig(),
            PopulationConfig(target_modes=4, accept_residual_tol=1e-2),
            collocation=CollocationConfig(n_interior=800),
            threads=4,
        )
        oracle = lshape_fd_oracle(1.0 / 32.0, count=1)
        assert len(report.modes) >= 4
        assert all(m.residual <= 1e-2 for m in report.modes)
        assert report.mus[0] == pytest.approx(oracle.mus[0], rel=1e-2)

    def test_plate_first_three_modes(self):
        report = run_population(
            catalog("plate_ss"),
            BasisConfig(width=500),
            ACSConfig(),
            PopulationConfig(target_modes=3),
            collocation=CollocationConfig(n_interior=800),
            threads=4,
        )
        expected = [e.mu for e in plate_ss_spectrum(10.0, 5.0, 3)]
        assert len(report.modes) == 3
        for mu, target in zip(report.mus, expected):
            assert mu == pytest.approx(target, rel=1e-2)

    def test_deflation_steers_away_from_the_first_mode(self):
        """A strand started on mode 1 with mode 1 deflated does not return it as a new mode."""
        spec = catalog("helmholtz_square")
        basis = build_basis(500, 2, spec.bandwidth, seed=0)
        colloc = sample_collocation(spec, 800, seed=0)
        first = run_acs(assemble(spec, basis, colloc), 2 * math.pi ** 2)
        first.basis = basis
        deflation = _Deflation.for_domain(spec)
        assert deflation.add(first)

        again = run_acs(assemble(spec, basis, colloc, prior_modes=tuple(deflation.shapes)), 2 * math.pi ** 2)
        again.basis = basis
        assert first.mu == pytest.approx(2 * math.pi ** 2, rel=5e-3)
        accepted_again = (
            abs(again.mu - first.mu) <= 1e-3 * first.mu
            and again.residual <= 1e-3
            and deflation.overlap(again) < 1e-2
        )
        assert not accepted_again


def _max_pairwise_overlap(spec, modes):
    points, weight = spec.domain.midpoint_grid(128)
    values = []
    for mode in modes:
        u = mode.evaluate(points)
        values.append(u / np.sqrt(weight * float(u @ u)))
    return max(
        (abs(weight * float(u @ v)) for i, u in enumerate(values) for v in values[i + 1:]),
        default=0.0,
    )
