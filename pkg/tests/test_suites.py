import pytest

from tlfloquet import DomainError
from tlfloquet.suites import SUITES, loop_algebra, make_backend, run_all, tl_relations


@pytest.mark.parametrize("kind", ["word", "fock", "single"])
def test_all_suites_pass_n6(kind):
    reports = run_all(make_backend(kind, 6), kind)
    assert [r.suite for r in reports] == list(SUITES)
    for r in reports:
        assert r.ok, (r.suite, r.failed[:5])
        assert r.passed > 0


def test_single_particle_scales():
    R = make_backend("single", 24)
    assert loop_algebra(R, "single", max_sum=9).ok


def test_fault_is_detected_and_named():
    R = make_backend("fock", 6, fault=True)
    rep = tl_relations(R, "fock")
    assert not rep.ok
    assert any("e0" in name or "e_0" in name for name in rep.failed)


def test_report_dict():
    d = tl_relations(make_backend("word", 4), "word").to_dict()
    assert d["suite"] == "tl_relations" and d["backend"] == "word"
    assert d["failed"] == [] and d["passed"] > 0


def test_unknown_backend():
    with pytest.raises(DomainError):
        make_backend("gpu", 6)
