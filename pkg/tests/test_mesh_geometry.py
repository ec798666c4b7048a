import numpy as np
import pytest

from domain.mesh_geometry import build_mesh_1d, build_mesh_2d, build_time_partition
from infrastructure.errors import MeshError, SpaceError


def test_uniform_1d_mesh_has_dyadic_cells():
    mesh = build_mesh_1d(2)
    assert mesh.n_cells == 8
    assert mesh.h == pytest.approx(0.125)
    assert np.allclose(mesh.vertices, np.linspace(0.0, 1.0, 9))
    assert len(mesh.interior_facets) == 7
    assert [f.side for f in mesh.boundary_facets] == [0, 1]


def test_non_dyadic_point_is_inserted_as_vertex():
    mesh = build_mesh_1d(2, [0.5, 2.0 / 3.0])
    assert mesh.n_cells == 9
    assert mesh.has_vertex(2.0 / 3.0)
    assert mesh.has_vertex(0.5)
    assert mesh.h == pytest.approx(0.125)


@pytest.mark.parametrize("level, points", [(-1, None), (1, [1.2]), (1, [0.0])])
def test_invalid_1d_mesh_parameters(level, points):
    with pytest.raises(MeshError):
        build_mesh_1d(level, points)


def test_2d_mesh_counts_and_fitted_lines(mesh_2d):
    assert mesh_2d.n_cells == 16
    assert len(mesh_2d.interior_facets) == 24
    assert len(mesh_2d.boundary_facets) == 16
    for coord in (0.25, 0.5, 0.75):
        assert mesh_2d.has_gridline(0, coord)
        assert mesh_2d.has_gridline(1, coord)
    assert np.allclose(mesh_2d.cell_measures, 1.0 / 16.0)


def test_2d_mesh_requires_level_one():
    with pytest.raises(MeshError):
        build_mesh_2d(0)


def test_interface_segment_is_union_of_edges(mesh_2d):
    facets = mesh_2d.facets_on_segment(0, 0.5, 0.0, 1.0)
    assert len(facets) == 4
    assert sum(f.measure for f in facets) == pytest.approx(1.0)
    with pytest.raises(MeshError):
        mesh_2d.facets_on_segment(0, 0.4, 0.0, 1.0)


def test_cells_in_boxes(mesh_1d):
    inside = mesh_1d.cells_in_boxes([[(0.0, 0.25)], [(0.75, 1.0)]])
    assert inside.tolist() == [True, False, False, True]
    with pytest.raises(MeshError):
        mesh_1d.cells_in_boxes([[(0.0, 0.3)]])


def test_locate_points(mesh_1d, mesh_2d):
    cells, ref = mesh_1d.locate(np.array([[0.3], [1.0]]))
    assert cells.tolist() == [1, 3]
    assert ref[:, 0] == pytest.approx([0.2, 1.0])

    cells, ref = mesh_2d.locate(np.array([[0.3, 0.6]]))
    assert cells[0] == 1 + 2 * 4
    assert ref[0] == pytest.approx([0.2, 0.4])

    with pytest.raises(SpaceError):
        mesh_1d.locate(np.array([[1.5]]))


def test_time_partition_traces():
    partition = build_time_partition(0.5, 4)
    assert partition.n_slabs == 4
    assert partition.dt == pytest.approx(0.125)
    assert partition.final_time == 0.5
    assert partition.locate(0.25, "right") == (2, 0.0)
    assert partition.locate(0.25, "left") == (1, 1.0)
    assert partition.locate(0.0, "left") == (0, 0.0)
    n, tau = partition.locate(0.3)
    assert n == 2
    assert tau == pytest.approx(0.4)
    with pytest.raises(SpaceError):
        partition.locate(0.6)
    with pytest.raises(SpaceError):
        partition.locate(0.1, "middle")


def test_invalid_time_partition():
    with pytest.raises(MeshError):
        build_time_partition(0.0, 4)
    with pytest.raises(MeshError):
        build_time_partition(0.5, 0)
