"""Tests for JSON run configuration."""
from __future__ import annotations

import json
import math

import pytest

from eigenacs.config import load_config, parse_config
from eigenacs.const import (
    ALPHA_BC_BUCKLING,
    DEFAULT_ALPHA_BC,
    DEFAULT_MAX_ITERS,
    DEFAULT_MU_TOL,
    DEFAULT_WIDTH,
    MODE_POPULATION,
    MODE_SINGLE,
)
from eigenacs.exceptions import CatalogError, ConfigurationError


class TestDefaults:
    """A bare problem key materializes every default."""

    def test_minimal(self):
        cfg = parse_config({"problem": "buckling_pin_pin"})
        assert cfg.problem.name == "buckling_pin_pin"
        assert cfg.problem_key == "buckling_pin_pin"
        assert cfg.mode == MODE_POPULATION
        assert cfg.basis.width == DEFAULT_WIDTH
        assert cfg.acs.max_iters == DEFAULT_MAX_ITERS
        assert cfg.output.compare_oracle is True

    def test_initial_mu_defaults_to_lower_bound(self):
        cfg = parse_config({"problem": "plate_ss", "mode": MODE_SINGLE})
        assert cfg.initial_mu == cfg.problem.search_bounds[0]

    def test_explicit_mu0(self):
        cfg = parse_config({"problem": "plate_ss", "mode": MODE_SINGLE, "mu0": "0.3"})
        assert cfg.initial_mu == pytest.approx(0.3)

    def test_as_dict_echoes_resolved_bandwidth(self):
        data = parse_config({"problem": "plate_ss"}).as_dict()
        assert data["basis"]["bandwidth"] == pytest.approx(math.pi)
        assert data["problem_key"] == "plate_ss"
        assert set(data) >= {"acs", "collocation", "gd", "output", "population", "weights"}

    def test_sections_coerced(self):
        cfg = parse_config({
            "problem": "helmholtz_square",
            "basis": {"width": "64", "bandwidth": 10},
            "acs": {"tikhonov": 0},
            "output": {"emit_fields": "yes"},
        })
        assert cfg.basis.width == 64
        assert cfg.basis.bandwidth == 10.0
        assert cfg.acs.tikhonov == 0.0
        assert cfg.output.emit_fields is True

    def test_default_residual_block_is_overdetermined(self):
        cfg = parse_config({"problem": "helmholtz_square"})
        assert cfg.collocation.n_interior >= cfg.basis.width

    def test_mu_tol(self):
        assert parse_config({"problem": "plate_ss"}).acs.mu_tol == DEFAULT_MU_TOL
        assert parse_config({"problem": "plate_ss", "acs": {"mu_tol": "1e-6"}}).acs.mu_tol == 1e-6

    @pytest.mark.parametrize(
        ("problem", "expected"),
        [("buckling_fixed_free", ALPHA_BC_BUCKLING), ("helmholtz_square", DEFAULT_ALPHA_BC)],
    )
    def test_boundary_weight_follows_problem(self, problem, expected):
        assert parse_config({"problem": problem}).weights.alpha_bc == expected

    def test_explicit_boundary_weight_wins(self):
        cfg = parse_config({"problem": "buckling_fixed_free", "weights": {"alpha_bc": 10}})
        assert cfg.weights.alpha_bc == 10.0
        assert cfg.as_dict()["weights"]["alpha_bc"] == 10.0


class TestValidation:
    """Invalid settings report the offending field."""

    @pytest.mark.parametrize(
        ("data", "field"),
        [
            ({"acs": {"max_iters": 0}}, "acs.max_iters"),
            ({"basis": {"width": "wide"}}, "basis.width"),
            ({"population": {"cluster_rel_tol": 1.5}}, "population.cluster_rel_tol"),
            ({"collocation": {"reference_policy": "corner"}}, "collocation.reference_policy"),
            ({"gd": {"beta1": 1.0}}, "gd.beta1"),
            ({"mode": "batch"}, "mode"),
            ({"acs": {"max_iter": 10}}, "acs.max_iter"),
            ({"acs": {"mu_tol": -1e-9}}, "acs.mu_tol"),
            ({"weights": {"alpha_bc": -1}}, "weights.alpha_bc"),
        ],
    )
    def test_field_path(self, data, field):
        with pytest.raises(ConfigurationError) as excinfo:
            parse_config({"problem": "buckling_pin_pin", **data})
        assert excinfo.value.field == field

    def test_missing_problem(self):
        with pytest.raises(ConfigurationError) as excinfo:
            parse_config({})
        assert excinfo.value.field == "problem"

    def test_unknown_top_level_key(self):
        with pytest.raises(ConfigurationError, match="extra keys"):
            parse_config({"problem": "plate_ss", "verbose": True})

    def test_unknown_catalog_key(self):
        with pytest.raises(CatalogError) as excinfo:
            parse_config({"problem": "membrane"})
        assert "buckling_pin_pin" in str(excinfo.value)

    def test_fixed_policy_needs_point(self):
        with pytest.raises(ConfigurationError, match="collocation.reference_point"):
            parse_config({"problem": "buckling_pin_pin", "collocation": {"reference_policy": "fixed"}})

    def test_fixed_policy_with_point(self):
        cfg = parse_config({
            "problem": "buckling_pin_pin",
            "collocation": {"reference_policy": "fixed", "reference_point": [0.5]},
        })
        assert cfg.collocation.reference_point == (0.5,)

    def test_zero_reference_value(self):
        with pytest.raises(ConfigurationError, match="collocation.u_ref"):
            parse_config({"problem": "buckling_pin_pin", "collocation": {"u_ref": 0}})


class TestInlineProblem:
    """Problems may be described inline instead of by catalog key."""

    def _inline(self):
        return {
            "name": "string",
            "domain": {"kind": "interval", "bounds": [0.0, 1.0]},
            "diff_op": [[1.0, [2]]],
            "carrier_op": [[1.0, [0]]],
            "boundary": [
                {"locus": "left", "base_op": [[1.0, [0]]]},
                {"locus": "right", "base_op": [[1.0, [0]]]},
            ],
            "eigen_exponent": 2,
            "search_bounds": [1.0, 50.0],
            "bandwidth": 1.0,
        }

    def test_inline(self):
        cfg = parse_config({"problem": self._inline()})
        assert cfg.problem.name == "string"
        assert cfg.problem_key is None
        assert cfg.problem.oracle is None

    def test_inline_boundary_weight(self):
        cfg = parse_config({"problem": {**self._inline(), "alpha_bc": 250.0}})
        assert cfg.problem.alpha_bc == 250.0
        assert cfg.weights.alpha_bc == 250.0

    def test_missing_field(self):
        data = self._inline()
        del data["diff_op"]
        with pytest.raises(ConfigurationError) as excinfo:
            parse_config({"problem": data})
        assert excinfo.value.field == "problem"

    def test_bad_domain(self):
        data = self._inline()
        data["domain"] = {"kind": "disk", "bounds": [1.0]}
        with pytest.raises(ConfigurationError, match="problem.domain"):
            parse_config({"problem": data})


class TestLoadConfig:
    """Tests for reading configuration files."""

    def test_load(self, tmp_path):
        path = tmp_path / "run.json"
        path.write_text(json.dumps({"problem": "helmholtz_square", "population": {"target_modes": 2}}))
        assert load_config(path).population.target_modes == 2

    def test_invalid_json(self, tmp_path):
        path = tmp_path / "run.json"
        path.write_text('{"problem": "plate_ss",')
        with pytest.raises(ConfigurationError, match="not valid JSON"):
            load_config(path)
