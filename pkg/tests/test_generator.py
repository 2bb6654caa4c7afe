import json

import pytest

from llschain.generator import (
    DEGRADE_MODES,
    GenerationError,
    GenSpec,
    degrade,
    gen_exact_search,
    gen_simple,
)
from llschain.lattice import Multidegree
from llschain.lls_core import (
    codim_report,
    exactness,
    instance_to_json,
    validate,
)
from llschain.simple_basis import is_simple, verify_certificate


def md(i, j, l):
    return Multidegree(i, j, l)


class TestGenSpec:
    def test_rank_bound(self):
        with pytest.raises(ValueError):
            GenSpec(d=1, r=2)

    def test_bad_strategy(self):
        with pytest.raises(ValueError):
            GenSpec(d=1, r=0, strategy="guess")

    def test_budget_positive(self):
        with pytest.raises(ValueError):
            GenSpec(d=1, r=0, budget=0)


class TestGenSimple:
    def test_composite_postconditions(self):
        result = gen_simple(GenSpec(d=2, r=1, seed=71))
        inst = result.instance
        assert validate(inst).ok
        report = codim_report(inst)
        assert report.exact and report.all_distributive
        assert report.codim_sum == inst.r + 1
        assert verify_certificate(inst, result.certificate).ok
        assert is_simple(inst).simple

    def test_support_sections_sum_to_rank(self):
        result = gen_simple(GenSpec(d=3, r=2, seed=73))
        assert result.certificate.total_sections == 3

    def test_same_seed_same_bytes(self, tmp_path):
        one = gen_simple(GenSpec(d=2, r=1, seed=77))
        two = gen_simple(GenSpec(d=2, r=1, seed=77))
        assert json.dumps(instance_to_json(one.instance), sort_keys=True) == \
            json.dumps(instance_to_json(two.instance), sort_keys=True)

    def test_different_seed_usually_differs(self):
        one = gen_simple(GenSpec(d=2, r=1, seed=78))
        two = gen_simple(GenSpec(d=2, r=1, seed=79))
        assert instance_to_json(one.instance) != instance_to_json(two.instance)


class TestExactSearch:
    def test_finds_exact_instance_at_degree_one(self):
        result = gen_exact_search(GenSpec(d=1, r=0, strategy="exact-search", seed=3))
        assert result.found
        assert exactness(result.instance).exact
        assert result.codim_sum >= 1

    def test_postcondition_replay(self):
        result = gen_exact_search(GenSpec(d=2, r=1, strategy="exact-search", seed=5))
        assert result.found
        assert validate(result.instance).ok
        assert exactness(result.instance).exact

    def test_budget_exhaustion_reports_not_found(self):
        result = gen_exact_search(GenSpec(d=3, r=1, strategy="exact-search",
                                          seed=5, budget=1))
        if not result.found:
            assert "NotFound" in result.note

    def test_strategy_guard(self):
        with pytest.raises(ValueError):
            gen_exact_search(GenSpec(d=1, r=0, seed=1))
        with pytest.raises(ValueError):
            gen_simple(GenSpec(d=1, r=0, strategy="exact-search", seed=1))


@pytest.fixture(scope="module")
def base():
    return gen_simple(GenSpec(d=3, r=1, seed=81)).instance


class TestDegrade:

    def test_shrink_v_fails_dimension_only(self, base):
        result = degrade(base, "shrink-V", seed=1)
        report = validate(result.instance, ambient_laws=False)
        assert not report.ok
        assert {v.kind for v in report.violations} >= {"dimension"}
        assert result.location in {v.location for v in report.violations
                                   if v.kind == "dimension"}

    def test_break_linking_names_the_edge(self, base):
        result = degrade(base, "break-linking", seed=2)
        report = validate(result.instance, ambient_laws=False)
        linking = [v for v in report.violations if v.kind == "linking"]
        assert linking
        assert result.location in {v.location for v in linking}
        assert not [v for v in report.violations if v.kind == "dimension"]

    def test_break_exactness_keeps_validity(self, base):
        result = degrade(base, "break-exactness", seed=3)
        assert validate(result.instance, ambient_laws=False).ok
        report = exactness(result.instance)
        assert not report.exact
        failing = {f"{e.source}->{e.target}" for e in report.failing_edges()}
        assert result.location in failing

    def test_unknown_mode(self, base):
        with pytest.raises(ValueError):
            degrade(base, "break-everything")

    def test_modes_cover_spec(self):
        assert set(DEGRADE_MODES) == {"break-linking", "break-exactness", "shrink-V"}
