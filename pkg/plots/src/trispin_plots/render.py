"""Render trispin CSV outputs into figure files.

One renderer per bundled figure id: probability traces (fig2, fig5, fig6),
the eigenvector-balance curves (fig3), the filter-angle heatmap (fig4) and
the Bloch panel with its 3-d path on the unit sphere (fig7).  Output format
follows the file extension; SVG is the default and is written without
timestamps so identical inputs give identical files.
"""

from __future__ import annotations

import argparse
import sys

import matplotlib
matplotlib.use("Agg")
import matplotlib.pyplot as plt
import numpy as np

from .csvio import SchemaError, Table, load_table

matplotlib.rcParams["svg.hashsalt"] = "trispin-plots"

LINE_STYLES = ("-", "--", "-.", ":")


def _trace_axes(ax, table: Table, y_label: str):
    table.require("time_ps")
    t = table.column("time_ps")
    channels = [n for n in table.names if n != "time_ps"]
    if not channels:
        raise SchemaError("no data channels beside time_ps")
    for k, name in enumerate(channels):
        ax.plot(t, table.column(name), LINE_STYLES[k % len(LINE_STYLES)],
                label=name, linewidth=1.4)
    ax.set_xlabel("time (ps)")
    ax.set_ylabel(y_label)
    ax.set_xlim(t[0], t[-1])
    ax.legend(frameon=False, fontsize=8)


def render_traces(tables: list[Table]) -> plt.Figure:
    fig, ax = plt.subplots(figsize=(6.4, 4.0))
    _trace_axes(ax, tables[0], "transition probability")
    ax.set_ylim(0.0, 1.0)
    fig.tight_layout()
    return fig


def render_balance(tables: list[Table]) -> plt.Figure:
    fig, ax = plt.subplots(figsize=(6.4, 4.0))
    for k, table in enumerate(tables):
        table.require("j_over_jr", "delta")
        label = "both couplings positive" if k == 0 else "both couplings negative"
        if "d=" in table.comment:
            label = table.comment.split("d=")[1].split()[0]
            label = f"D = {label}"
        ax.plot(table.column("j_over_jr"), table.column("delta"),
                LINE_STYLES[k % len(LINE_STYLES)], label=label, linewidth=1.4)
    ax.axhline(0.0, color="0.6", linewidth=0.6)
    ax.axvline(1.0, color="0.6", linewidth=0.6)
    ax.set_xlabel("J / J_R")
    ax.set_ylabel("state-mixture balance")
    ax.set_ylim(-1.0, 1.0)
    ax.legend(frameon=False, fontsize=8)
    fig.tight_layout()
    return fig


def render_heatmap(tables: list[Table]) -> plt.Figure:
    table = tables[0]
    table.require("theta_in", "theta_out", "value")
    ti = np.unique(table.column("theta_in"))
    to = np.unique(table.column("theta_out"))
    values = table.column("value").reshape(len(ti), len(to))
    fig, ax = plt.subplots(figsize=(6.0, 4.8))
    mesh = ax.pcolormesh(ti, to, values.T, shading="nearest",
                         vmin=0.0, vmax=1.0, cmap="viridis")
    ax.set_xlim(ti[0], ti[-1])
    ax.set_ylim(to[0], to[-1])
    ax.set_xlabel("preparation polar angle (rad)")
    ax.set_ylabel("measurement polar angle (rad)")
    fig.colorbar(mesh, ax=ax, label="relative transition probability")
    fig.tight_layout()
    return fig


def render_bloch(tables: list[Table]) -> plt.Figure:
    table = tables[0]
    table.require("time_ps", "x", "y", "z", "px", "py", "pz")
    fig = plt.figure(figsize=(9.6, 4.2))
    ax = fig.add_subplot(1, 2, 1)
    t = table.column("time_ps")
    for name, style in (("pz", "-"), ("py", "--"), ("px", ":")):
        ax.plot(t, table.column(name), style, label=name, linewidth=1.4)
    ax.set_xlabel("time (ps)")
    ax.set_ylabel("axis-aligned measurement probability")
    ax.set_xlim(t[0], t[-1])
    ax.set_ylim(0.0, 1.0)
    ax.legend(frameon=False, fontsize=8)

    ax3 = fig.add_subplot(1, 2, 2, projection="3d")
    u = np.linspace(0, 2 * np.pi, 25)
    v = np.linspace(0, np.pi, 13)
    xs = np.outer(np.cos(u), np.sin(v))
    ys = np.outer(np.sin(u), np.sin(v))
    zs = np.outer(np.ones_like(u), np.cos(v))
    ax3.plot_wireframe(xs, ys, zs, color="0.85", linewidth=0.3)
    ax3.plot(table.column("x"), table.column("y"), table.column("z"),
             linewidth=1.4)
    ax3.set_box_aspect((1, 1, 1))
    ax3.set_xticks([-1, 0, 1])
    ax3.set_yticks([-1, 0, 1])
    ax3.set_zticks([-1, 0, 1])
    fig.tight_layout()
    return fig


RENDERERS = {
    "fig2": render_traces,
    "fig3": render_balance,
    "fig4": render_heatmap,
    "fig5": render_traces,
    "fig6": render_traces,
    "fig7": render_bloch,
}


def build_figure(figure_id: str, tables: list[Table]) -> plt.Figure:
    if figure_id not in RENDERERS:
        raise SchemaError(f"unknown figure id {figure_id!r}; "
                          f"valid: {', '.join(sorted(RENDERERS))}")
    if not tables:
        raise SchemaError("no input tables")
    return RENDERERS[figure_id](tables)


def save_figure(fig: plt.Figure, out_path: str) -> None:
    kwargs = {}
    if out_path.endswith(".svg"):
        kwargs["metadata"] = {"Date": None}
    fig.savefig(out_path, **kwargs)
    plt.close(fig)


def render_figure_file(figure_id: str, in_paths: list[str], out_path: str) -> None:
    tables = [load_table(p) for p in in_paths]
    save_figure(build_figure(figure_id, tables), out_path)


def main(argv=None) -> int:
    ap = argparse.ArgumentParser(
        prog="trispin-render",
        description="Render trispin CSV output into a figure file.")
    ap.add_argument("--figure", required=True, choices=sorted(RENDERERS))
    ap.add_argument("--in", dest="inputs", action="append", required=True,
                    metavar="CSV", help="input CSV (repeatable)")
    ap.add_argument("--out", required=True, help="output image (.svg or .png)")
    args = ap.parse_args(argv)
    try:
        render_figure_file(args.figure, args.inputs, args.out)
    except (SchemaError, OSError) as exc:
        print(f"render error: {exc}", file=sys.stderr)
        return 2
    print(f"rendered {args.out}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
