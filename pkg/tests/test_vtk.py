"""Legacy ASCII VTK output: headers, ordering, counts."""

import numpy as np
import pytest

from mdtube.grid import BulkGrid
from mdtube.network import (Segment, TubeNetwork, discretize_network)
from mdtube.vtk import write_network_polydata, write_structured_points


def read_scalars(lines, name, count):
    idx = lines.index(f"SCALARS {name} double 1")
    assert lines[idx + 1] == "LOOKUP_TABLE default"
    values = []
    for line in lines[idx + 2:]:
        values.extend(float(t) for t in line.split())
        if len(values) >= count:
            break
    return np.array(values[:count])


class TestStructuredPoints:
    def test_header_and_ordering_3d(self, tmp_path):
        grid = BulkGrid("3d", [0.0, 1.0, 2.0], [2.0, 3.0, 4.0], (2, 3, 4))
        field = np.arange(grid.n_cells, dtype=float)
        path = tmp_path / "bulk.vtk"
        write_structured_points(path, grid, {"pressure": field})
        lines = path.read_text().splitlines()
        assert lines[0].startswith("# vtk DataFile")
        assert "ASCII" in lines
        assert "DATASET STRUCTURED_POINTS" in lines
        # point dimensions are cell counts plus one
        assert "DIMENSIONS 3 4 5" in lines
        assert any(line.startswith("ORIGIN 0 1 2") for line in lines)
        assert f"CELL_DATA {grid.n_cells}" in lines
        data = read_scalars(lines, "pressure", grid.n_cells)
        # x must vary fastest: the writer transposes the (nx, ny, nz) block
        expect = field.reshape(2, 3, 4).transpose(2, 1, 0).ravel()
        assert np.array_equal(data, expect)

    def test_2d_grid_written_as_single_slab(self, tmp_path):
        grid = BulkGrid("2d", [0.0, 0.0], [1.0, 1.0], (4, 4))
        path = tmp_path / "bulk.vtk"
        write_structured_points(path, grid,
                                {"u": np.zeros(grid.n_cells)})
        lines = path.read_text().splitlines()
        assert "DIMENSIONS 5 5 2" in lines
        assert f"CELL_DATA {grid.n_cells}" in lines

    def test_radial_grid_rejected(self, tmp_path):
        grid = BulkGrid("radial", [0.0], [1.0], (4,))
        with pytest.raises(ValueError):
            write_structured_points(tmp_path / "bulk.vtk", grid,
                                    {"u": np.zeros(4)})


class TestNetworkPolydata:
    def make_mesh(self):
        nodes = np.array([[0.0, 0.0, 0.0],
                          [0.0, 0.0, -0.06],
                          [0.03, 0.0, -0.09]])
        net = TubeNetwork(nodes=nodes,
                          segments=[Segment(0, 1, 2e-3, 3.0, 1.0, 1.0),
                                    Segment(1, 2, 1e-3, 3.0, 1.0, 1.0)])
        return discretize_network(net, 0.02)

    def test_counts_and_fields(self, tmp_path):
        mesh = self.make_mesh()
        n = mesh.n_cells
        path = tmp_path / "net.vtk"
        write_network_polydata(path, mesh,
                               {"pressure": np.arange(n, dtype=float)})
        lines = path.read_text().splitlines()
        assert "DATASET POLYDATA" in lines
        assert f"POINTS {2 * n} double" in lines
        assert f"LINES {n} {3 * n}" in lines
        assert f"CELL_DATA {n}" in lines
        data = read_scalars(lines, "pressure", n)
        assert np.array_equal(data, np.arange(n, dtype=float))
        # each line record references its own two points
        start = lines.index(f"LINES {n} {3 * n}") + 1
        for i in range(n):
            assert lines[start + i] == f"2 {2 * i} {2 * i + 1}"

    def test_points_match_cell_ends(self, tmp_path):
        mesh = self.make_mesh()
        path = tmp_path / "net.vtk"
        write_network_polydata(path, mesh)
        lines = path.read_text().splitlines()
        start = lines.index(f"POINTS {2 * mesh.n_cells} double") + 1
        first = np.array([float(t) for t in lines[start].split()])
        assert np.allclose(first, mesh.cells[0].p0)
