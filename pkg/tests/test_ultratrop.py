import pytest

from errors import (AssumptionViolated, InconsistencyDetected, InfiniteIndex, ParityViolation,
                    SchemaError)
from lattice_core import INFINITE, Covector, IotaSequence, SupportSet
from projection_census import triangle_prism_supports
from ultratrop import (GSum, TangencyBlock, TangencyMatrix, check_assumptions, convention_failures,
                       direct_sum, direction_extensions, fan_directions, g_sum, g_sums,
                       labstr_delta_sum, nested_boxes, nested_boxes_matrix, plane_curve_supports,
                       quotient_embeddings, resolve_convention, tail_content, tangency_matrix,
                       thsum_terms, thsum_total, ultrametric_violations, _block_entries)

GAMMA = Covector((1, 0, 0))


def _block(size, iota):
    sequence = IotaSequence(iota, GAMMA)
    entries = tuple(tuple(row) for row in _block_entries(size, sequence))
    return TangencyMatrix(entries, (TangencyBlock(GAMMA, size, sequence),))


def test_nested_boxes_addresses():
    assert nested_boxes(4, IotaSequence((2, 1), GAMMA)) == [(0, 0), (0, 1), (1, 2), (1, 3)]
    assert nested_boxes(3, IotaSequence((1,), GAMMA)) == [(0,), (1,), (2,)]


@pytest.mark.parametrize("size, iota, entries", [
    (2, (2, 1), ((0, 2), (2, 0))),
    (2, (2, 2, 1), ((0, 3), (3, 0))),
    (3, (1,), ((0, 1, 1), (1, 0, 1), (1, 1, 0))),
])
def test_nested_boxes_depths(size, iota, entries):
    assert _block(size, iota).entries == entries


def test_nested_boxes_rejects_bad_sizes():
    with pytest.raises(InconsistencyDetected):
        nested_boxes(3, IotaSequence((2, 1), GAMMA))
    with pytest.raises(InfiniteIndex):
        nested_boxes(2, IotaSequence((INFINITE, 1), GAMMA))


def test_direct_sum_and_ranges():
    matrix = direct_sum([_block(2, (2, 1)), _block(3, (1,))])
    assert matrix.size == 5
    assert matrix.entries[0][:2] == (0, 2)
    assert matrix.entries[0][2:] == (0, 0, 0)
    assert matrix.entry_sum() == 4 + 6
    assert matrix.block_ranges() == [range(0, 2), range(2, 5)]
    assert matrix.to_json()["blocks"][0]["iota"] == [2, 1]
    assert matrix.to_json()["blocks"][0]["content"] == 1


def test_ultrametric_violations():
    assert ultrametric_violations(_block(4, (2, 1))) == []
    block = (TangencyBlock(GAMMA, 3, IotaSequence((1,), GAMMA)),)
    assert ultrametric_violations(TangencyMatrix(((0, 1, 3), (1, 0, 1), (3, 1, 0)), block)) == []
    assert ultrametric_violations(TangencyMatrix(((0, 1, 3), (1, 0, 3), (3, 3, 0)), block))


def test_labstr_delta_sum():
    assert labstr_delta_sum(-4, 6, 0) == 1
    with pytest.raises(ParityViolation):
        labstr_delta_sum(1, 2, 0)


def test_quotient_embeddings():
    A = SupportSet.of([(1, 2, 3)])
    j1, j2 = quotient_embeddings(A)
    assert j1.points == ((1, 0, 2, 3),)
    assert j2.points == ((0, 1, 2, 3),)
    with pytest.raises(AssumptionViolated):
        quotient_embeddings(SupportSet.of([(1, 2)]))


def test_directions():
    As = plane_curve_supports((0, 2), (0, 3))
    deltas = fan_directions(As)
    assert deltas
    assert all(d.primitive for d in deltas)
    for delta in deltas:
        for g in direction_extensions(As, delta):
            assert Covector(g.tail(2)).primitive_part() == delta
    with pytest.raises(AssumptionViolated):
        direction_extensions(As, Covector((2, 0)))


def test_assumptions_hold_for_plane_curve():
    diagnostics = check_assumptions(plane_curve_supports((0, 2), (0, 3)))
    assert diagnostics
    assert diagnostics.vertical_index == 1


def test_assumptions_fail_for_an_even_base():
    A = SupportSet.of([(0, 0, 0), (2, 0, 0), (0, 1, 0), (0, 0, 1)])
    assert not check_assumptions((A, A)).indv1
    with pytest.raises(AssumptionViolated):
        thsum_terms(A, A)


@pytest.mark.parametrize("B1, B2, area, with_sum, total", [
    ((0, 2), (0, 3), 6, 5, 1),
    ((0, 2), (0, 5), 10, 7, 2),
])
def test_thsum_on_plane_curve(B1, B2, area, with_sum, total):
    terms = thsum_terms(*plane_curve_supports(B1, B2))
    assert (terms.newton_area, terms.mixed_with_sum, terms.horizontal) == (area, with_sum, 1)
    assert terms.g_total == 0
    assert terms.total == total


@pytest.mark.parametrize("B1, B2, total", [
    ((0, 1, 2), (0, 4), 10),
    ((0, 2, 3), (0, 1), 3),
    ((0, 1, 2), (0, 1, 2), 3),
])
def test_thsum_on_prisms(B1, B2, total):
    assert thsum_total(*triangle_prism_supports(B1, B2)) == total


def test_g_sum_conventions():
    g = GSum((1, 0), direct=4, closed_form=2, calibrated=2)
    assert g.value("direct") == 4
    assert g.value("closed_form") == 2
    with pytest.raises(ValueError):
        g.value("literal")
    sums = g_sums(plane_curve_supports((0, 2), (0, 3)))
    assert sum(s.calibrated for s in sums) == 0


@pytest.mark.parametrize("As", [
    plane_curve_supports((0, 2), (0, 3)),
    plane_curve_supports((0, 2), (0, 5)),
    triangle_prism_supports((0, 1, 2), (0, 4)),
    triangle_prism_supports((0, 2, 3), (0, 1)),
    triangle_prism_supports((0, 1, 2), (0, 1, 2)),
])
def test_every_produced_block_is_ultrametric(As):
    for delta in fan_directions(As):
        matrix = tangency_matrix(As, delta)
        assert ultrametric_violations(matrix) == []
        assert all(row[i] == 0 for i, row in enumerate(matrix.entries))
        assert all(matrix.entries[i][j] == matrix.entries[j][i]
                   for i in range(matrix.size) for j in range(matrix.size))


def _content_blocks(As):
    return [b for delta in fan_directions(As) for b in tangency_matrix(As, delta).blocks
            if b.content > 1]


def test_facet_tail_with_content_two():
    As = plane_curve_supports((0, 4), (0, 5, 6))
    blocks = _content_blocks(As)
    assert len(blocks) == 1
    block = blocks[0]
    assert tail_content(block.gamma) == block.content == 2
    assert block.size == 2
    assert block.iota.values == (2, 1)
    assert nested_boxes_matrix(As, block.gamma).entries == ((0, 2), (2, 0))
    delta = Covector(block.gamma.tail(2)).primitive_part()
    assert block.gamma in direction_extensions(As, delta)
    g = g_sum(As, delta)
    assert g.direct != g.closed_form
    assert g.closed_form > g.calibrated


def test_primitive_tails_keep_content_one():
    for As in (plane_curve_supports((0, 2), (0, 3)), triangle_prism_supports((0, 1, 2), (0, 4))):
        assert _content_blocks(As) == []


@pytest.mark.parametrize("B1, B2, area, total", [
    ((0, 4), (0, 5, 6), 24, 7),
    ((0, 6), (0, 9, 10), 60, 22),
])
def test_thsum_with_nontrivial_iota(B1, B2, area, total):
    terms = thsum_terms(*plane_curve_supports(B1, B2))
    assert terms.newton_area == area
    assert terms.convention == "calibrated"
    assert terms.g_total == 1
    assert terms.total == total
    assert thsum_total(*plane_curve_supports(B1, B2)) == total


def test_closed_form_breaks_parity_on_a_content_two_tail():
    terms = thsum_terms(*plane_curve_supports((0, 4), (0, 5, 6)))
    assert terms.g_total_for("closed_form") == terms.g_total_for("calibrated") + 1
    with pytest.raises(ParityViolation):
        terms.total_for("closed_form")


def test_convention_failures():
    assert convention_failures("calibrated") == []
    direct = convention_failures("direct")
    assert (direct[0]["B1"], direct[0]["B2"], direct[0]["expected"]) == ([0, 2], [0, 3], 1)
    assert direct[0]["found"] != 1
    assert any(f["B1"] == [0, 4] and f["found"] == "ParityViolation"
               for f in convention_failures("closed_form"))


def test_resolve_convention_flips_and_records():
    decision = resolve_convention("direct")
    assert (decision.requested, decision.used, decision.flipped) == ("direct", "calibrated", True)
    assert [r["convention"] for r in decision.rejected] == ["direct", "closed_form"]
    assert decision.to_json()["flipped"] is True
    assert not resolve_convention("calibrated").flipped
    terms = thsum_terms(*plane_curve_supports((0, 2), (0, 3)), convention="direct")
    assert terms.decision == decision
    with pytest.raises(SchemaError):
        resolve_convention("literal")
