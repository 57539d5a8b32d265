"""
Unit tests for ConstructionVisualizer
"""

import matplotlib.pyplot as plt
import pytest

from src.logic.signature import Signature
from src.models.saturation import SaturationTrace, StepRecord
from src.models.tgconstruct import build_D
from src.structures.structure import Structure
from src.visualization.plots import ConstructionVisualizer


@pytest.fixture
def visualizer():
    return ConstructionVisualizer()


@pytest.fixture
def trace():
    t = SaturationTrace(block_size=1, named_count=0, size=4)
    t.records.append(StepRecord(1, (0, 1), ((0, 0, 0), (0, 0, 1)), 4, (0, 0), (("P", (0,)),), 9))
    t.records.append(StepRecord(2, (0, 2), ((0, 0, 0), (0, 0, 2)), 0, (0, 0), (), 11))
    return t


class TestConstructionVisualizer:
    """Test cases for the plots"""

    def test_saturation_progress(self, visualizer, trace, tmp_path):
        path = tmp_path / "progress.png"
        fig = visualizer.plot_saturation_progress(trace, save_path=str(path))

        assert isinstance(fig, plt.Figure)
        assert len(fig.axes) == 2
        assert path.exists()

    def test_empty_trace(self, visualizer):
        with pytest.raises(ValueError):
            visualizer.plot_saturation_progress(SaturationTrace(block_size=1, named_count=0, size=1))

    def test_grid_types(self, visualizer):
        sig = Signature.build({"P": 1, "R": 2})
        B = Structure(sig, 2, [("P", (0,)), ("R", (0, 1))])
        C = Structure(sig, 2, [("P", (0,)), ("R", (1, 0))])
        fig = visualizer.plot_grid_types(build_D(B, C))

        assert "K = 2" in fig.axes[0].get_title()

    def test_fact_counts(self, visualizer, path_structure):
        fig = visualizer.plot_fact_counts(path_structure)

        assert [t.get_text() for t in fig.axes[0].get_xticklabels()] == ["P", "R"]
