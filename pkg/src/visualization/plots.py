"""
Visualization Module

Vẽ tiến trình saturation, lưới 1-type của D và phân bố fact của structure.
"""

from typing import Optional

import matplotlib.pyplot as plt
import numpy as np
import pandas as pd
import seaborn as sns

from src.models.saturation import BLOCKS_PER_CELL, SaturationTrace
from src.models.tgconstruct import GridStructure
from src.structures.structure import Structure

# Set style
sns.set_style("whitegrid")
plt.rcParams['font.size'] = 10


class ConstructionVisualizer:
    """
    Class để visualize các construction (saturation, lưới D, structure)

    Mọi hàm plot trả về Figure; save_path thì lưu file, show thì gọi plt.show(),
    không thì đóng figure.
    """

    def __init__(self, style: str = 'seaborn-v0_8-whitegrid', show: bool = False):
        """
        Khởi tạo visualizer

        Args:
            style: Matplotlib style (bỏ qua nếu không có)
            show: Gọi plt.show() sau khi vẽ
        """
        self.style = style
        self.show = show
        if style in plt.style.available:
            plt.style.use(style)

    def _finish(self, fig, save_path: Optional[str]):
        plt.tight_layout()

        if save_path:
            plt.savefig(save_path, dpi=300, bbox_inches='tight')

        if self.show:
            plt.show()
        else:
            plt.close(fig)
        return fig

    def plot_saturation_progress(
        self,
        trace: SaturationTrace,
        title: str = "Saturation Progress",
        figsize: tuple = (12, 8),
        save_path: Optional[str] = None
    ):
        """
        Plot số cặp U-liên thông và số fact được copy qua từng bước

        Args:
            trace: SaturationTrace (cần ít nhất một bước)
            title: Chart title
            figsize: Figure size
            save_path: Path để save figure
        """
        frame = trace.to_frame()
        if frame.empty:
            raise ValueError("Trace has no steps to plot")

        fig, axes = plt.subplots(2, 1, figsize=figsize, sharex=True)

        target = trace.size ** 2
        ax1 = axes[0]
        ax1.plot(frame['step'], frame['u_pairs'], linewidth=2, color='blue', label='U-pairs')
        ax1.axhline(y=target, color='red', linestyle='--', linewidth=1, label=f'|A|² = {target}')
        ax1.set_ylabel('U-connected pairs')
        ax1.set_title(f"{title} - U-pairs")
        ax1.legend()
        ax1.grid(True, alpha=0.3)

        # Facts copied per step, colored by source block
        ax2 = axes[1]
        colors = sns.color_palette("husl", BLOCKS_PER_CELL)
        ax2.bar(frame['step'], frame['added'], color=[colors[t] for t in frame['t']])
        ax2.set_ylabel('Facts copied')
        ax2.set_xlabel('Step')
        ax2.set_title('Facts copied per step (color = block)')
        ax2.grid(True, alpha=0.3)

        return self._finish(fig, save_path)

    def plot_grid_types(
        self,
        grid: GridStructure,
        title: str = "1-types of D",
        figsize: tuple = (8, 7),
        save_path: Optional[str] = None
    ):
        """
        Plot heatmap K × K: ô (k, ℓ) tô theo 1-type của phần tử tương ứng

        Args:
            grid: GridStructure
            title: Chart title
            figsize: Figure size
            save_path: Path để save figure
        """
        types = grid.distinct_types()
        matrix = grid.type_grid()

        fig, ax = plt.subplots(figsize=figsize)
        palette = sns.color_palette("husl", len(types))
        sns.heatmap(
            matrix,
            annot=True,
            fmt='d',
            cmap=palette,
            cbar=False,
            square=True,
            linewidths=0.5,
            vmin=-0.5,
            vmax=len(types) - 0.5,
            ax=ax
        )
        ax.set_xlabel('Column ℓ')
        ax.set_ylabel('Row k')
        ax.set_title(f"{title} (K = {grid.side}, {len(types)} types)")

        return self._finish(fig, save_path)

    def plot_fact_counts(
        self,
        structure: Structure,
        title: str = "Facts per relation",
        figsize: tuple = (10, 5),
        save_path: Optional[str] = None
    ):
        """
        Plot số fact của mỗi quan hệ

        Args:
            structure: Structure
            title: Chart title
            figsize: Figure size
            save_path: Path để save figure
        """
        counts = pd.Series(structure.fact_counts()).sort_index()

        fig, ax = plt.subplots(figsize=figsize)
        colors = sns.color_palette("husl", max(len(counts), 1))
        ax.bar(range(len(counts)), counts.values, color=colors)
        ax.set_xticks(range(len(counts)))
        ax.set_xticklabels(counts.index, rotation=45, ha='right')
        ax.set_ylabel('Facts')
        ax.set_title(f"{title} (|A| = {structure.size})")
        ax.grid(True, alpha=0.3, axis='y')

        # Upper bound |A|^arity per relation
        bounds = [structure.size ** structure.signature.arity(name) for name in counts.index]
        ax.plot(range(len(counts)), np.array(bounds), 'k_', markersize=20, label='|A|^arity')
        ax.legend()

        return self._finish(fig, save_path)
