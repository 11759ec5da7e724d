"""Verify the top-level eigenacs exports match the submodules.

Callers use ``import eigenacs`` directly; this keeps the re-exported
names and the constants they rely on from drifting.
"""
from __future__ import annotations

import eigenacs
from eigenacs import oracles, population, solver
from eigenacs.const import (
    CATALOG_NAMES,
    LOSS_HISTORY_HEADER,
    REJECTION_CAUSES,
    REPORT_FILE,
    RUN_MODES,
)


class TestLibraryExports:
    """Verify the package exports all expected symbols."""

    def test_all_names_resolve(self):
        for name in eigenacs.__all__:
            assert hasattr(eigenacs, name), name

    def test_all_unique(self):
        assert len(eigenacs.__all__) == len(set(eigenacs.__all__))

    def test_reexports_are_the_same_objects(self):
        assert eigenacs.run_acs is solver.run_acs
        assert eigenacs.run_population is population.run_population
        assert eigenacs.reference_spectrum is oracles.reference_spectrum

    def test_version(self):
        assert isinstance(eigenacs.__version__, str)

    def test_errors_share_a_base(self):
        for exc in (
            eigenacs.CatalogError,
            eigenacs.ConfigurationError,
            eigenacs.DegenerateDirectionError,
            eigenacs.NumericalFailureError,
            eigenacs.OracleError,
            eigenacs.UnsupportedOrderError,
        ):
            assert issubclass(exc, eigenacs.EigenAcsError)


class TestLibraryConstants:
    """Verify constants that appear in reports."""

    def test_catalog(self):
        assert len(CATALOG_NAMES) == 7
        assert "helmholtz_lshape" in CATALOG_NAMES

    def test_every_catalog_problem_builds(self):
        for name in CATALOG_NAMES:
            assert eigenacs.catalog(name).name == name

    def test_rejection_causes(self):
        assert set(REJECTION_CAUSES) == {"duplicate", "degenerate", "high_residual", "suspect_reference"}

    def test_output_formats(self):
        assert REPORT_FILE == "report.json"
        assert LOSS_HISTORY_HEADER == ("iter", "half_step", "loss")
        assert set(RUN_MODES) == {"single", "population"}
