"""Lookup table loading, monotonicity and error reporting."""

import pytest

from celliot.tables import (BlerTable, CoverageTable, TbsTable,
                            coverage_for_mcl, default_tbs_table,
                            make_link_params, tbs_lookup)
from celliot.types import (ConfigurationError, CoverageName,
                           OutOfCoverageError, Technology)


def test_tbs_boundaries_and_monotonicity():
    table = default_tbs_table()
    emtc_mcs = table.mcs_range(Technology.EMTC)
    smallest = tbs_lookup(Technology.EMTC, min(emtc_mcs), 1)
    assert smallest > 0
    for mcs in emtc_mcs:
        row = [tbs_lookup(Technology.EMTC, mcs, rbu) for rbu in range(1, 7)]
        assert row == sorted(row)
    for rbu in range(1, 7):
        col = [tbs_lookup(Technology.EMTC, mcs, rbu) for mcs in emtc_mcs]
        assert col == sorted(col)
    nb_mcs = table.mcs_range(Technology.NBIOT)
    nb = [tbs_lookup(Technology.NBIOT, mcs, 1) for mcs in nb_mcs]
    assert nb == sorted(nb)


def test_tbs_round_trip_against_raw_file():
    # independent re-read of the bundled file, bypassing the parser
    from importlib import resources
    raw = (resources.files("celliot") / "data" / "tbs_tables.csv").read_text()
    expected = {}
    for line in raw.splitlines():
        line = line.strip()
        if not line or line.startswith("#"):
            continue
        tech, mcs, rbu, tbs = line.split(",")
        expected[(tech, int(mcs), int(rbu))] = int(tbs)
    for (tech, mcs, rbu), tbs in expected.items():
        assert tbs_lookup(Technology(tech), mcs, rbu) == tbs


def test_tbs_unknown_entry_and_bad_rbu():
    with pytest.raises(ConfigurationError, match="no TBS entry"):
        tbs_lookup(Technology.EMTC, 99, 1)
    with pytest.raises(ConfigurationError, match="out of range"):
        tbs_lookup(Technology.NBIOT, 0, 2)


def test_coverage_tiers():
    good = coverage_for_mcl(Technology.EMTC, 140.0)
    assert good.name is CoverageName.GOOD
    assert good.rlus == 1
    poor = coverage_for_mcl(Technology.NBIOT, 164.0)
    assert poor.name is CoverageName.POOR
    assert poor.mcs == 0
    # monotone: higher MCL never fewer repetitions or higher MCS
    prev = None
    for mcl in (140.0, 144.0, 150.0, 154.0, 160.0, 164.0):
        cls = coverage_for_mcl(Technology.NBIOT, mcl)
        if prev is not None:
            assert cls.mcs <= prev.mcs
            assert cls.rlus >= prev.rlus
            assert cls.rldc >= prev.rldc
        prev = cls


def test_out_of_coverage():
    with pytest.raises(OutOfCoverageError):
        coverage_for_mcl(Technology.EMTC, 200.0)


def test_malformed_table_reports_line_number(tmp_path):
    bad = tmp_path / "tbs.csv"
    bad.write_text("# version=9\nEMTC,0,1,16\nEMTC,zero,1,16\n")
    with pytest.raises(ConfigurationError, match="line 3"):
        TbsTable(bad)


def test_missing_version_header(tmp_path):
    bad = tmp_path / "tbs.csv"
    bad.write_text("EMTC,0,1,16\n")
    with pytest.raises(ConfigurationError, match="version"):
        TbsTable(bad)


def test_coverage_requires_three_tiers(tmp_path):
    bad = tmp_path / "cov.csv"
    bad.write_text("# version=1\nEMTC,144,15,1,1,1\nEMTC,154,7,8,16,16\n")
    with pytest.raises(ConfigurationError, match="tiers"):
        CoverageTable(bad)


def test_bler_table_rejects_bad_slope(tmp_path):
    bad = tmp_path / "bler.csv"
    bad.write_text("# version=1\nEMTC,0,-17.4,0.0\n")
    with pytest.raises(ConfigurationError, match="slope"):
        BlerTable(bad)


def test_make_link_params_uses_coverage_and_timings():
    cov = coverage_for_mcl(Technology.NBIOT, 164.0)
    lp = make_link_params(Technology.NBIOT, cov)
    assert lp.rbu == 1
    assert lp.rlus == cov.rlus
    assert lp.tbs_bits == tbs_lookup(Technology.NBIOT, cov.mcs, 1)
