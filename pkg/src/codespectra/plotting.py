"""Diagnostic figures written next to the CSV/JSON outputs.

Figures are rendered with the non-interactive Agg backend. SVG output is made
reproducible by fixing the hash salt and dropping the date metadata.
"""

import json

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402
import numpy as np  # noqa: E402

from .mplaw import mp_density_array  # noqa: E402

plt.rcParams.update({
    "svg.hashsalt": "codespectra",
    "svg.fonttype": "path",
    "font.size": 10,
    "axes.linewidth": 0.8,
    "lines.linewidth": 1.4,
})

_METADATA = {"svg": {"Date": None, "Creator": None},
             "png": {"Software": None},
             "pdf": {"CreationDate": None, "Creator": None, "Producer": None}}


def esd_histogram(eigenvalues, params, bin_width=None):
    """Density-normalized histogram ``(edges, heights)``; the bar areas sum to 1.

    Bins start at ``min(a, lambda_min)`` with width ``bin_width``
    (default ``(b - a) / 50``) and cover every eigenvalue.
    """
    ev = np.asarray(eigenvalues, dtype=np.float64)
    w = bin_width or (params.b - params.a) / 50.0
    lo = min(params.a, ev.min())
    hi = max(params.b, ev.max())
    nbins = max(1, int(np.ceil((hi - lo) / w)) + 1)
    edges = lo + w * np.arange(nbins + 1)
    idx = np.minimum(((ev - lo) / w).astype(np.int64), nbins - 1)
    counts = np.bincount(idx, minlength=nbins)
    return edges, counts / (len(ev) * w)


def _save(fig, path, description=None):
    ext = str(path).rsplit(".", 1)[-1].lower()
    meta = dict(_METADATA.get(ext, {}))
    if description is not None and ext == "svg":
        meta["Description"] = description
    fig.savefig(path, metadata=meta or None)
    plt.close(fig)


def plot_esd(eigenvalues, params, path, bin_width=None, title=None):
    edges, heights = esd_histogram(eigenvalues, params, bin_width)
    fig, ax = plt.subplots(figsize=(6, 4))
    bars = ax.bar(edges[:-1], heights, width=np.diff(edges), align="edge",
                  color="#9ecae1", edgecolor="#3182bd", linewidth=0.4, label="ESD")
    for i, bar in enumerate(bars):
        bar.set_gid(f"esd-bar-{i}")
    x = np.linspace(min(edges[0], params.a), max(edges[-1], params.b), 800)
    ax.plot(x, mp_density_array(x, params), color="#d62728", label=f"MP, y={params.y:.4g}")
    ax.set_xlabel(r"$\lambda$")
    ax.set_ylabel("density")
    if title:
        ax.set_title(title)
    ax.legend(frameon=False)
    fig.tight_layout()
    # the SVG carries the histogram so checkers can recompute its area
    desc = json.dumps({"edges": edges.tolist(), "heights": heights.tolist()})
    _save(fig, path, desc)
    return edges, heights


def plot_rate_fit(fit, path, title=None):
    n = np.array([pt[0] for pt in fit.points], dtype=np.float64)
    d = np.array([pt[1] for pt in fit.points], dtype=np.float64)
    fig, ax = plt.subplots(figsize=(5, 4))
    ax.loglog(n, d, "o", color="#3182bd", label="median distance")
    grid = np.geomspace(n.min(), n.max(), 50)
    ax.loglog(grid, np.exp(fit.intercept) * grid ** fit.slope, "-", color="#d62728",
              label=f"slope {fit.slope:.3f}, $r^2$ {fit.r_squared:.3f}")
    ref = d[0] * (grid / n[0]) ** -0.25
    ax.loglog(grid, ref, "--", color="0.5", label=r"$n^{-1/4}$")
    ax.set_xlabel("n")
    ax.set_ylabel(r"$\sup_I |\mu_n(I) - \rho_{MP}(I)|$")
    if title:
        ax.set_title(title)
    ax.legend(frameon=False)
    fig.tight_layout()
    _save(fig, path)
