import numpy as np
import pandas as pd
import pytest

from src.lab.errors import StructuralError
from src.lab.fieldio import dump_field_csv, read_field, read_snapshot, write_field, write_snapshot
from src.lab.extension import extend
from src.lab.fracheat import FracConfig


def test_field_container(tmp_path, mixed_field):
    path = write_field(tmp_path / "u.fhf", mixed_field)
    back = read_field(path)
    assert back.grid == mixed_field.grid
    np.testing.assert_array_equal(back.samples, mixed_field.samples)
    assert path.read_bytes()[:4] == b"FHFL"


def test_snapshot_container(tmp_path, shifted_cosine):
    ext = extend(shifted_cosine, FracConfig(s=0.5))
    ys = ext.ygrid.nodes()
    values = ext.tensors["U"]
    assert values.shape == (32, ys.size, 32)
    path = write_snapshot(tmp_path / "U.fhf", shifted_cosine.grid, ys, values)
    grid, y_nodes, back = read_snapshot(path)
    assert grid == shifted_cosine.grid
    np.testing.assert_array_equal(y_nodes, ys)
    np.testing.assert_array_equal(back, values)
    with pytest.raises(StructuralError):
        read_field(path)
    with pytest.raises(StructuralError):
        write_snapshot(tmp_path / "bad.fhf", shifted_cosine.grid, ys[:3], values)


def test_corrupt_containers(tmp_path, mixed_field):
    path = write_field(tmp_path / "u.fhf", mixed_field)
    data = path.read_bytes()
    (tmp_path / "short.fhf").write_bytes(data[:10])
    (tmp_path / "magic.fhf").write_bytes(b"XXXX" + data[4:])
    (tmp_path / "cut.fhf").write_bytes(data[:-16])
    for name in ("short.fhf", "magic.fhf", "cut.fhf"):
        with pytest.raises(StructuralError):
            read_field(tmp_path / name)


def test_csv_dump(tmp_path, shifted_cosine):
    path = dump_field_csv(tmp_path / "u.csv", shifted_cosine)
    frame = pd.read_csv(path)
    assert list(frame.columns) == ["x1", "t", "re", "im"]
    assert len(frame) == shifted_cosine.grid.size
    np.testing.assert_allclose(frame["re"], 2.0 + np.cos(frame["x1"]), atol=1e-13)
