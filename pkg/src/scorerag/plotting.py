"""Plot files from a comparison report: boxplot of weighted totals and a
per-criterion mean bar chart, matching the shapes of the evaluation figures."""

from __future__ import annotations

from pathlib import Path

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt

from .evaluation import CRITERIA


def write_plots(report: dict, out_dir: str | Path) -> list[Path]:
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    systems = report["systems"]
    written = []

    # boxplot of weighted totals, from the precomputed quartile stats
    fig, ax = plt.subplots(figsize=(5, 4))
    stats = []
    for system in systems:
        q = report["quartiles"][system]
        stats.append(
            {
                "label": system,
                "med": q["median"],
                "q1": q["q1"],
                "q3": q["q3"],
                "whislo": q["min"],
                "whishi": q["max"],
                "fliers": [],
            }
        )
    ax.bxp(stats, showfliers=False)
    ax.set_ylabel("weighted total score")
    ax.set_title("Weighted total scores by system")
    box_path = out_dir / "total_scores_boxplot.png"
    fig.tight_layout()
    fig.savefig(box_path, dpi=120)
    plt.close(fig)
    written.append(box_path)

    # grouped bars of per-criterion means
    fig, ax = plt.subplots(figsize=(6, 4))
    width = 0.38
    positions = range(len(CRITERIA))
    for offset, system in zip((-width / 2, width / 2), systems):
        means = [report["means"][system][name] for name in CRITERIA]
        ax.bar([p + offset for p in positions], means, width=width, label=system)
    ax.set_xticks(list(positions))
    ax.set_xticklabels(CRITERIA, rotation=15)
    ax.set_ylim(0, 5)
    ax.set_ylabel("mean score")
    ax.set_title("Per-criterion means")
    ax.legend()
    bar_path = out_dir / "criterion_means.png"
    fig.tight_layout()
    fig.savefig(bar_path, dpi=120)
    plt.close(fig)
    written.append(bar_path)

    return written
