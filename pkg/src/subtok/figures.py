"""Figure rendering for the report commands.

Each function draws one report as a PNG next to the delimited output.
The Agg backend is forced so rendering works headless.
"""

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt

from .morpho import BoundaryReport
from .profile import FrequencyDiffReport, VocabProfile


def plot_length_histogram(profile: VocabProfile, path: str, title: str = "Token lengths") -> None:
    fig, ax = plt.subplots(figsize=(6, 4))
    lengths = sorted(profile.length_histogram)
    ax.bar(lengths, [profile.length_histogram[n] for n in lengths], color="#4878b0")
    ax.set_xlabel("token length (code points)")
    ax.set_ylabel("vocabulary entries")
    ax.set_title(title)
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)


def plot_rank_frequency(profile: VocabProfile, path: str, title: str = "Token frequencies") -> None:
    fig, ax = plt.subplots(figsize=(6, 4))
    freqs = [max(f, 0.5) for _, f in profile.rank_frequency]  # 0.5 keeps zeros visible on the log axis
    ax.plot(range(1, len(freqs) + 1), freqs, color="#4878b0", linewidth=1.2)
    ax.axhline(profile.dead_zone_threshold, color="#c44e52", linestyle="--", linewidth=1,
               label=f"dead zone < {profile.dead_zone_threshold:g} ({profile.dead_zone_count} tokens)")
    ax.set_xscale("log")
    ax.set_yscale("log")
    ax.set_xlabel("rank")
    ax.set_ylabel("corpus frequency")
    ax.set_title(title)
    ax.legend(loc="upper right", fontsize=8)
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)


def plot_frequency_diff(report: FrequencyDiffReport, path: str, top_n: int = 20) -> None:
    rows = report.rows[:top_n]
    fig, ax = plt.subplots(figsize=(6, max(3, 0.3 * len(rows) + 1)))
    tokens = [row[0] for row in rows][::-1]
    diffs = [row[3] for row in rows][::-1]
    colors = ["#4878b0" if d >= 0 else "#c44e52" for d in diffs]
    ax.barh(range(len(rows)), diffs, color=colors)
    ax.set_yticks(range(len(rows)))
    ax.set_yticklabels(tokens, fontsize=8)
    ax.axvline(0, color="black", linewidth=0.8)
    ax.set_xlabel("frequency difference (A - B)")
    ax.set_title("Largest tokenization frequency differences")
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)


def plot_boundary_scores(report: BoundaryReport, path: str, title: str = "Boundary scores") -> None:
    fig, ax = plt.subplots(figsize=(4.5, 3.5))
    metrics = ["precision", "recall", "f1"]
    values = [report.precision, report.recall, report.f1]
    ax.bar(metrics, values, color=["#4878b0", "#55a868", "#c44e52"])
    ax.set_ylim(0.0, 1.0)
    for i, v in enumerate(values):
        ax.text(i, v + 0.02, f"{v:.3f}", ha="center", fontsize=9)
    ax.set_title(title)
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)
