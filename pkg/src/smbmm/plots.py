"""Figure rendering for cost sweeps; written next to the CSV output."""

from fractions import Fraction


def render_sweep(rows, axis, path):
    """Plot server communication cost per scheme against the sweep axis."""
    import matplotlib
    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    key = "p" if axis == "partition" else "L"
    series = {}
    for row in rows:
        cc = Fraction(int(row["CC_num"]), int(row["CC_den"]))
        series.setdefault(row["scheme"], []).append((int(row[key]), float(cc)))
    fig, ax = plt.subplots(figsize=(5.5, 4))
    for scheme, pts in sorted(series.items()):
        pts.sort()
        ax.plot([x for x, _ in pts], [y for _, y in pts], marker="o", label=scheme)
    ax.set_xlabel({"partition": "partition size p = m = n", "batch": "batch size L"}[axis])
    ax.set_ylabel("server communication per product entry")
    ax.set_yscale("log")
    ax.grid(True, which="both", alpha=0.3)
    ax.legend()
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)
    return path
