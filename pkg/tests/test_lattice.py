import pytest
from hypothesis import given, settings, strategies as st

from llschain.lattice import (
    Direction,
    Multidegree,
    Path,
    PathClass,
    PathError,
    all_multidegrees,
    canonical_path,
    classify_path,
    component_regions,
    edge_split_regions,
    multidegree,
)


def md(i, j, l):
    return Multidegree(i, j, l)


class TestEnumeration:
    def test_degree_zero(self):
        assert all_multidegrees(0) == (md(0, 0, 0),)

    def test_degree_one_order(self):
        assert all_multidegrees(1) == (md(1, 0, 0), md(0, 1, 0), md(0, 0, 1))

    @pytest.mark.parametrize("d", range(0, 8))
    def test_count_formula(self, d):
        assert len(all_multidegrees(d)) == (d + 1) * (d + 2) // 2

    def test_degree_four_count(self):
        assert len(all_multidegrees(4)) == 15

    def test_grid_order_rows_then_columns(self):
        grid = all_multidegrees(3)
        assert grid[0] == md(3, 0, 0)
        assert grid[3] == md(0, 3, 0)
        assert grid[4] == md(2, 0, 1)
        assert grid[-1] == md(0, 0, 3)

    def test_negative_rejected(self):
        with pytest.raises(ValueError):
            multidegree(1, -1, 0)


class TestSteps:
    def test_worked_neighbours(self):
        node = md(1, 0, 1)  # degree 2
        assert node.step(Direction.TOWARD_X1) == md(0, 1, 1)
        assert node.step(Direction.TOWARD_X2) is None  # j would hit -2
        assert node.step(Direction.TOWARD_X3) == md(1, 1, 0)

    def test_top_right_corner_has_no_toward_x1(self):
        for d in range(1, 5):
            assert md(0, d, 0).step(Direction.TOWARD_X1) is None

    @settings(max_examples=120, deadline=None)
    @given(st.integers(0, 6), st.data())
    def test_step_then_inverse_returns(self, d, data):
        grid = all_multidegrees(d)
        node = data.draw(st.sampled_from(list(grid)))
        direction = data.draw(st.sampled_from(list(Direction)))
        there = node.step(direction)
        if there is not None:
            assert there.step(direction.inverse) == node

    def test_named_neighbours(self):
        node = md(2, 1, 1)  # degree 4
        assert node.right() == md(1, 2, 1)
        assert node.left() == md(3, 0, 1)
        assert node.up() == md(2, 2, 0)
        assert node.down() == md(2, 0, 2)
        assert node.up_right() == md(1, 3, 0)
        assert node.down_left() is None  # j would go negative


class TestClassification:
    def test_toward_then_from_same_component(self):
        path = Path((md(1, 0, 1), md(0, 1, 1), md(1, 0, 1)))
        assert classify_path(path) is PathClass.VIOLATES_II

    def test_horizontal_then_vertical_is_canonical(self):
        path = Path((md(2, 0, 0), md(1, 1, 0), md(0, 2, 0), md(0, 1, 1), md(0, 0, 2)))
        assert classify_path(path) is PathClass.VALID_CANONICAL

    def test_all_three_toward_steps(self):
        path = Path((md(1, 1, 1), md(0, 2, 1), md(1, 0, 2), md(1, 1, 1)))
        # steps: toward-X1, toward-X2, toward-X3
        assert classify_path(path) is PathClass.VIOLATES_I

    def test_two_from_steps_violate_iii(self):
        path = Path((md(0, 2, 0), md(1, 1, 0), md(1, 0, 1)))
        # from-X1 then from-X3
        assert classify_path(path) is PathClass.VIOLATES_III

    def test_non_adjacent_nodes_raise(self):
        with pytest.raises(PathError):
            classify_path(Path((md(2, 0, 0), md(0, 2, 0))))

    def test_single_node_path_is_canonical(self):
        assert classify_path(Path((md(1, 0, 0),))) is PathClass.VALID_CANONICAL


class TestCanonicalPath:
    def test_worked_horizontal_then_vertical(self):
        path = canonical_path(md(2, 0, 0), md(0, 0, 2))
        assert path.nodes == (md(2, 0, 0), md(1, 1, 0), md(0, 2, 0),
                              md(0, 1, 1), md(0, 0, 2))

    def test_identity_path(self):
        assert canonical_path(md(1, 0, 1), md(1, 0, 1)).nodes == (md(1, 0, 1),)

    def test_single_diagonal_step(self):
        path = canonical_path(md(0, 2, 0), md(1, 0, 1))
        assert path.nodes == (md(0, 2, 0), md(1, 0, 1))
        assert classify_path(path) is PathClass.VALID_CANONICAL

    @pytest.mark.parametrize("d", range(0, 5))
    def test_every_pair_gets_a_canonical_path(self, d):
        grid = all_multidegrees(d)
        for a in grid:
            for b in grid:
                path = canonical_path(a, b)
                assert path.start == a and path.end == b
                assert classify_path(path) is PathClass.VALID_CANONICAL
                assert all(min(node) >= 0 for node in path.nodes)

    def test_degree_mismatch(self):
        with pytest.raises(PathError):
            canonical_path(md(1, 0, 0), md(1, 1, 0))


class TestRegions:
    def test_anti_diagonal_component2_is_singleton(self):
        for d in range(1, 6):
            for i in range(d + 1):
                node = md(i, 0, d - i)
                assert component_regions(node)[1] == (node,)

    def test_bottom_corner_component1_is_singleton(self):
        for d in range(0, 6):
            node = md(0, 0, d)
            assert component_regions(node)[0] == (node,)

    def test_union_covers_grid_worked_example(self):
        r1, r2, r3 = component_regions(md(1, 0, 1))
        assert set(r1) | set(r2) | set(r3) == set(all_multidegrees(2))

    @pytest.mark.parametrize("d", range(0, 6))
    def test_union_covers_grid(self, d):
        for node in all_multidegrees(d):
            r1, r2, r3 = component_regions(node)
            assert set(r1) | set(r2) | set(r3) == set(all_multidegrees(d))

    @pytest.mark.parametrize("d", range(0, 6))
    def test_edge_split_partitions(self, d):
        for node in all_multidegrees(d):
            dd, ee, ff = edge_split_regions(node)
            assert (set(dd) | set(ee)) & set(ff) == set()
            assert set(dd) | set(ee) | set(ff) == set(all_multidegrees(d))

    @pytest.mark.parametrize("d", range(2, 7))
    def test_interior_region_recurrences(self, d):
        # Removing a node from its own region leaves the union of the two
        # feeding neighbours' regions, component by component.
        for node in all_multidegrees(d):
            if node.i < 1 or node.l < 1 or node.i + node.l > d - 1:
                continue
            r1, r2, r3 = (set(r) for r in component_regions(node))
            assert r1 - {node} == (set(component_regions(node.up_right())[0])
                                   | set(component_regions(node.down())[0]))
            assert r2 - {node} == (set(component_regions(node.left())[1])
                                   | set(component_regions(node.down())[1]))
            assert r3 - {node} == (set(component_regions(node.up_right())[2])
                                   | set(component_regions(node.left())[2]))
