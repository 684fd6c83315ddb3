import numpy as np
import pytest

from liespec import report
from liespec.corpus import random_commuting, random_nilpotent, random_solvable
from liespec.numkit import DEFAULT_TOL
from liespec.spectrum import joint_spectrum
from liespec.verify import CHECKS, SKIPPED, off_grid_characters, run_checks, sample_characters
from liespec.koszul import KoszulComplex

from conftest import bundled_family


def test_rounding_and_chopping():
    assert report.real(1e-13) == 0.0
    assert report.real(0.1 + 0.2) == 0.3
    assert report.cplx(0.5 - 3e-12j) == [0.5, 0.0]
    assert report.real(-2.5) == -2.5


def test_g2_constants_in_report(g2):
    doc = report.structure_report("g2", g2, DEFAULT_TOL)
    assert doc["structure_constants"] == [{"h": 0, "i": 0, "j": 1, "value": [1.0, 0.0]}]
    assert doc["flag"]["ideal_dims"] == [0, 1, 2]


def test_spectrum_section_is_sorted_and_complete(g2):
    doc = report.structure_report("g2", g2, DEFAULT_TOL)
    report.add_spectrum(doc, joint_spectrum(g2), DEFAULT_TOL)
    assert [p["coords"] for p in doc["points"]] == sorted(p["coords"] for p in doc["points"])
    assert [w["j"] for w in doc["weights"]] == [0, 1]
    assert {"coords", "original_coords", "betti"} <= set(doc["points"][0])


def test_text_rendering_mentions_every_point(g2):
    doc = report.structure_report("g2", g2, DEFAULT_TOL)
    report.add_spectrum(doc, joint_spectrum(g2), DEFAULT_TOL)
    text = report.render_text(doc)
    assert text.count("betti") == 2


def test_sampled_characters_vanish_on_derived_algebra():
    r = joint_spectrum(random_solvable(8, 4, 4))
    cx = KoszulComplex(r.flag.adapted, r.flag.constants)
    for f in sample_characters(cx, 10, np.random.default_rng(0)):
        cx.check_character(f)


def test_off_grid_characters_keep_their_margin(g2):
    r = joint_spectrum(g2)
    cx = KoszulComplex(r.flag.adapted, r.flag.constants)
    for f in off_grid_characters(cx, r.candidate_grid, 20, np.random.default_rng(1), margin=0.5):
        assert min(abs(f[-1] - g) for g in r.candidate_grid[-1]) > 0.5


def test_unknown_check_rejected(g2):
    with pytest.raises(ValueError, match="bogus"):
        run_checks(joint_spectrum(g2), ["bogus"], DEFAULT_TOL)


@pytest.mark.parametrize(
    "fam",
    [random_solvable(3, 3, 3), random_nilpotent(5, 4, 3), random_commuting(2, 4, 2)],
    ids=["solvable", "nilpotent", "commuting"],
)
def test_all_checks_pass_on_random_families(fam):
    out = run_checks(joint_spectrum(fam), CHECKS, DEFAULT_TOL, seed=3)
    assert all(c["status"] in ("pass", SKIPPED) for c in out.values()), out


def test_preconditions(heisenberg):
    out = run_checks(joint_spectrum(heisenberg), ["thm2", "oracle"], DEFAULT_TOL)
    assert out["thm2"]["status"] == "pass"
    assert out["oracle"]["status"] == SKIPPED
    out = run_checks(joint_spectrum(bundled_family("upper3")), ["thm2"], DEFAULT_TOL)
    assert out["thm2"]["status"] == SKIPPED
