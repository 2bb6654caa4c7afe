from fractions import Fraction

import pytest

from llschain.exactla import Matrix, Subspace, vec_matmul
from llschain.lattice import Direction, Multidegree, all_multidegrees
from llschain.lls_core import LlsInstance, canonical_matrix, validate
from llschain.generator import GenSpec, degrade, gen_simple
from llschain.simple_basis import (
    CertificateError,
    ComplementSystem,
    DistributivityRequired,
    ExactnessRequired,
    SimpleCertificate,
    build_complement_system,
    certificate_complement_systems,
    certificate_from_json,
    certificate_push_candidates,
    certificate_to_json,
    extract_certificate,
    growth_report,
    is_simple,
    load_certificate,
    save_certificate,
    structure_report,
    verify_certificate,
)


def md(i, j, l):
    return Multidegree(i, j, l)


ONE = Fraction(1)


class TestWorkedComplementSystems:
    def test_component_one_bases(self, worked_instance):
        system = build_complement_system(worked_instance, 1)
        assert system.basis[md(1, 0, 0)] == [(ONE, Fraction(0))]
        assert system.basis[md(0, 1, 0)] == []
        assert system.basis[md(0, 0, 1)] == []

    def test_component_two_full_basis_at_top_right(self, worked_instance):
        system = build_complement_system(worked_instance, 2)
        node = md(0, 1, 0)
        assert system.span(node) == worked_instance.space(node)

    def test_complement_property_everywhere(self, worked_instance):
        from llschain.lls_core import vanishing_in_v
        for q in (1, 2, 3):
            system = build_complement_system(worked_instance, q)
            for node in worked_instance.multidegrees:
                span = system.span(node)
                van = vanishing_in_v(worked_instance, node, (q,))
                assert (span & van).dim == 0
                assert (span + van) == worked_instance.space(node)

    def test_structure_identities(self, worked_instance):
        systems = tuple(build_complement_system(worked_instance, q) for q in (1, 2, 3))
        report = structure_report(worked_instance, systems)
        assert report.ok
        items = {c.item for c in report.checks}
        assert items == {"corner-top-left", "right-column", "corner-bottom-right"}

    def test_degree_zero_single_complement(self):
        from llschain.chain_model import ChainCurve
        from llschain.lls_core import from_chain
        inst = from_chain(ChainCurve(0), 0, {md(0, 0, 0): Subspace.full(1)})
        for q in (1, 2, 3):
            system = build_complement_system(inst, q)
            assert system.basis[md(0, 0, 0)] == [(ONE,)]


class TestCertificates:
    def test_worked_extraction(self, worked_instance):
        cert = extract_certificate(worked_instance)
        assert cert.support == (md(1, 0, 0),)
        assert cert.sections[md(1, 0, 0)] == ((ONE, Fraction(0)),)
        assert verify_certificate(worked_instance, cert).ok

    def test_worked_certificate_by_explicit_rank_checks(self, worked_instance):
        inst = worked_instance
        cert = extract_certificate(inst)
        section = cert.sections[md(1, 0, 0)][0]
        for node in inst.multidegrees:
            push = vec_matmul(section, canonical_matrix(inst, md(1, 0, 0), node))
            stacked = Matrix.from_rows([push])
            from llschain.exactla import rref
            assert rref(stacked)[2] == 1
            assert push in inst.space(node)

    def test_zeroed_section_fails_with_first_multidegree(self, worked_instance):
        cert = SimpleCertificate((md(1, 0, 0),),
                                 {md(1, 0, 0): ((Fraction(0), Fraction(0)),)})
        check = verify_certificate(worked_instance, cert)
        assert not check.ok
        assert check.failing_multidegree == md(1, 0, 0)

    def test_section_outside_space_raises(self, worked_instance):
        cert = SimpleCertificate((md(0, 1, 0),),
                                 {md(0, 1, 0): ((ONE, Fraction(0)),)})
        with pytest.raises(CertificateError):
            verify_certificate(worked_instance, cert)

    def test_wrong_section_count_is_a_verdict(self, worked_instance):
        node = md(1, 0, 0)
        space = worked_instance.space(node)
        cert = SimpleCertificate((node,),
                                 {node: tuple(space.basis.row_list()) + ((ONE, ONE),)})
        with pytest.raises(CertificateError):
            # (1, 1) is outside the one-dimensional chosen space
            verify_certificate(worked_instance, cert)

    def test_round_trip_files(self, worked_instance, tmp_path):
        cert = extract_certificate(worked_instance)
        path = tmp_path / "certificate.json"
        save_certificate(path, cert)
        loaded = load_certificate(path, worked_instance.d)
        assert loaded == SimpleCertificate(cert.support, dict(cert.sections))
        assert verify_certificate(worked_instance, loaded).ok

    def test_json_schema_validation(self, worked_instance):
        data = certificate_to_json(extract_certificate(worked_instance))
        data["sections"]["0,1"] = [["1", "0"]]
        from llschain.lls_core import InstanceFormatError
        with pytest.raises(InstanceFormatError):
            certificate_from_json(data, worked_instance.d)


class TestIsSimple:
    def test_worked_instance_is_simple(self, worked_instance):
        verdict = is_simple(worked_instance)
        assert verdict.simple
        assert verdict.certificate.support == (md(1, 0, 0),)

    def test_not_exact_verdict(self):
        result = gen_simple(GenSpec(d=2, r=1, seed=31))
        broken = degrade(result.instance, "break-exactness", seed=3).instance
        verdict = is_simple(broken)
        assert not verdict.simple
        assert verdict.reason == "not-exact"
        assert verdict.witness is not None

    def test_not_distributive_verdict_on_abstract_instance(self):
        inst = _abstract_nondistributive_instance()
        verdict = is_simple(inst)
        assert not verdict.simple
        assert verdict.reason == "not-distributive"
        assert verdict.witness == md(1, 0, 0)
        with pytest.raises(DistributivityRequired):
            extract_certificate(inst)
        with pytest.raises(DistributivityRequired):
            build_complement_system(inst, 1)

    def test_exactness_required_carries_edge(self):
        result = gen_simple(GenSpec(d=2, r=0, seed=33))
        broken = degrade(result.instance, "break-exactness", seed=7).instance
        with pytest.raises(ExactnessRequired) as err:
            extract_certificate(broken)
        assert err.value.edge is not None


def _abstract_nondistributive_instance() -> LlsInstance:
    """Hand-made abstract data (not from the chain backend, and not
    law-consistent): exact along every edge, but the three vanishing lines
    at (1, 0, 0) are distinct lines of a plane, so distributivity fails
    there.  Exercises the refusal paths of the constructions."""
    d, r = 1, 1
    a, b, c = all_multidegrees(1)
    ambient = {node: 4 for node in (a, b, c)}
    u = (ONE, Fraction(0), Fraction(0), Fraction(0))
    v = (Fraction(0), ONE, Fraction(0), Fraction(0))
    uv = tuple(x + y for x, y in zip(u, v))
    plane = Subspace.span([u, v], 4)
    full = Subspace.full(4)
    zero_map = Matrix.zeros(4, 4)
    ident = Matrix.identity(4)
    maps = {(a, b): ident, (b, a): zero_map, (b, c): ident, (c, b): zero_map}
    vanishing = {
        a: {1: Subspace.span([u], 4), 2: Subspace.span([v], 4),
            3: Subspace.span([uv], 4)},
        b: {1: full, 2: Subspace.zero(4), 3: Subspace.zero(4)},
        c: {1: full, 2: full, 3: Subspace.zero(4)},
    }
    spaces = {a: plane, b: plane, c: plane}
    return LlsInstance(d, r, ambient, maps, vanishing, spaces)


class TestAbstractNondistributiveFixture:
    def test_fixture_is_exact_but_not_distributive(self):
        from llschain.lls_core import distributive_at, exactness
        inst = _abstract_nondistributive_instance()
        assert exactness(inst).exact
        assert not distributive_at(inst, md(1, 0, 0))
        assert distributive_at(inst, md(0, 1, 0))


class TestCorpusConstructions:
    def test_growth_and_structure_on_sample(self):
        for seed, d, r in ((41, 2, 1), (43, 3, 2), (47, 4, 1)):
            result = gen_simple(GenSpec(d=d, r=r, seed=seed))
            systems = tuple(build_complement_system(result.instance, q)
                            for q in (1, 2, 3))
            for system in systems:
                assert all(entry[3] for entry in growth_report(result.instance, system))
            assert structure_report(result.instance, systems).ok

    def test_certificate_systems_match_preferred_build(self):
        result = gen_simple(GenSpec(d=3, r=2, seed=53))
        inst = result.instance
        cert = extract_certificate(inst)
        from_cert = certificate_complement_systems(inst, cert)
        preferred = certificate_push_candidates(inst, cert)
        for q in (1, 2, 3):
            built = build_complement_system(inst, q, preferred=preferred)
            for node in inst.multidegrees:
                assert built.span(node) == from_cert[q - 1].span(node)

    def test_support_is_positive_codimension_set(self):
        from llschain.lls_core import codim_report
        result = gen_simple(GenSpec(d=4, r=2, seed=59))
        cert = extract_certificate(result.instance)
        report = codim_report(result.instance)
        expected = tuple(cellule.multidegree for cellule in report.cells
                         if cellule.codim > 0)
        assert cert.support == expected
        # at each support node the sections complete the vanishing sum
        from llschain.lls_core import vanishing_sum
        for node in cert.support:
            vsum = vanishing_sum(result.instance, node)
            span = Subspace.span(list(vsum.basis.row_list())
                                 + list(cert.sections[node]),
                                 result.instance.ambient_dim[node])
            assert span == result.instance.space(node)
            assert vsum.dim + len(cert.sections[node]) == result.instance.r + 1


class TestMirrorSymmetry:
    def test_component_swap_exchanges_first_and_third_systems(self):
        result = gen_simple(GenSpec(d=3, r=1, seed=61))
        inst = result.instance
        mirrored = _mirror_instance(inst)
        assert validate(mirrored, ambient_laws=False).ok
        sys1 = build_complement_system(mirrored, 1)
        sys3 = build_complement_system(inst, 3)
        for node in inst.multidegrees:
            image = md(node.l, node.j, node.i)
            assert sys1.basis[image] == sys3.basis[node]
        sys3m = build_complement_system(mirrored, 3)
        sys1o = build_complement_system(inst, 1)
        for node in inst.multidegrees:
            image = md(node.l, node.j, node.i)
            assert sys3m.basis[image] == sys1o.basis[node]


def _mirror_instance(inst: LlsInstance) -> LlsInstance:
    """Relabel the components in reverse order: (i, j, l) -> (l, j, i),
    swapping the roles of the two outer components.  The coordinates at
    each node are kept, so the mirrored data is a legal abstract instance."""
    def mirror(node):
        return md(node.l, node.j, node.i)

    ambient = {mirror(node): dim for node, dim in inst.ambient_dim.items()}
    maps = {(mirror(s), mirror(t)): m for (s, t), m in inst.maps.items()}
    swap = {1: 3, 2: 2, 3: 1}
    vanishing = {mirror(node): {swap[q]: sub for q, sub in per.items()}
                 for node, per in inst.vanishing.items()}
    spaces = {mirror(node): space for node, space in inst.spaces.items()}
    return LlsInstance(inst.d, inst.r, ambient, maps, vanishing, spaces)
