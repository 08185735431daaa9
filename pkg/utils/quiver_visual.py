import re
from fractions import Fraction
from pathlib import Path

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import networkx as nx

from src.seed import Seed

_DOT_EDGE_RE = re.compile(r'"(-?\d+)"\s*->\s*"(-?\d+)"\s*\[label="(-?\d+(?:/\d+)?)"')


def quiver_graph(s: Seed) -> nx.DiGraph:
    """
    The ice quiver of ``s``: an arrow ``i -> j`` of weight ``b_ij`` whenever ``b_ij > 0``.

    Nodes carry ``frozen``; edges carry ``weight`` as a :class:`~fractions.Fraction`.
    """
    graph = nx.DiGraph()
    for i in s.vertices:
        graph.add_node(i, frozen=s.is_frozen(i))
    for (i, j), x in sorted(s.b.items()):
        if x > 0:
            graph.add_edge(i, j, weight=x)
    return graph


def _edges(graph: nx.DiGraph) -> list[tuple[int, int, Fraction]]:
    return sorted((i, j, data["weight"]) for i, j, data in graph.edges(data=True))


def to_dot(s: Seed, name: str = "quiver") -> str:
    """
    Graphviz text: frozen vertices are boxes, half-weight arrows are dashed and
    every arrow is labeled by its weight.
    """
    graph = quiver_graph(s)
    lines = [f"digraph {name} {{"]
    for i in sorted(graph.nodes):
        shape = "box" if graph.nodes[i]["frozen"] else "circle"
        lines.append(f'  "{i}" [shape={shape}];')
    for i, j, w in _edges(graph):
        style = ", style=dashed" if w.denominator == 2 else ""
        lines.append(f'  "{i}" -> "{j}" [label="{w}"{style}];')
    lines.append("}")
    return "\n".join(lines) + "\n"


def parse_dot_edges(text: str) -> dict[tuple[int, int], Fraction]:
    """
    The weighted arrows of a text produced by :func:`to_dot`.
    """
    return {(int(i), int(j)): Fraction(w) for i, j, w in _DOT_EDGE_RE.findall(text)}


def _tikz_name(i: int) -> str:
    return f"v{i}" if i >= 0 else f"vm{-i}"


def to_latex(s: Seed) -> str:
    """
    A tikz picture with vertices on a line; solid arrows for integral weights,
    dashed ones for half weights, weights above 1 written on the arrow.
    """
    graph = quiver_graph(s)
    lines = [r"\begin{tikzpicture}[>=stealth]"]
    for idx, i in enumerate(sorted(graph.nodes)):
        style = "frozen" if graph.nodes[i]["frozen"] else "unfrozen"
        lines.append(rf"\node[{style}] ({_tikz_name(i)}) at ({idx},0) {{{i}}};")
    for i, j, w in _edges(graph):
        style = "->,dashed" if w.denominator == 2 else "->"
        label = f" node[above] {{{w}}}" if w > 1 else ""
        lines.append(rf"\draw[{style}] ({_tikz_name(i)}) to[bend left]{label} ({_tikz_name(j)});")
    lines.append(r"\end{tikzpicture}")
    return "\n".join(lines) + "\n"


def draw_quiver(s: Seed, output_file: str | Path, layout_seed: int = 0) -> Path:
    """
    Render the quiver to a PNG: frozen vertices as squares, half-weight arrows dashed.

    :param layout_seed: Seed of the spring layout, so that drawings are reproducible.
    :return: The resolved output path.
    """
    graph = quiver_graph(s)
    pos = nx.spring_layout(graph, seed=layout_seed)
    fig, ax = plt.subplots(figsize=(6, 4))
    for frozen, shape, color in ((False, "o", "tab:red"), (True, "s", "tab:cyan")):
        nodes = [i for i in graph.nodes if graph.nodes[i]["frozen"] == frozen]
        nx.draw_networkx_nodes(graph, pos, nodelist=nodes, node_shape=shape, node_color=color, ax=ax)
    nx.draw_networkx_labels(graph, pos, ax=ax)
    solid = [(i, j) for i, j, w in _edges(graph) if w.denominator == 1]
    dashed = [(i, j) for i, j, w in _edges(graph) if w.denominator != 1]
    nx.draw_networkx_edges(graph, pos, edgelist=solid, arrows=True, ax=ax)
    nx.draw_networkx_edges(graph, pos, edgelist=dashed, style="dashed", arrows=True, ax=ax)
    heavy = {(i, j): str(w) for i, j, w in _edges(graph) if w > 1}
    if heavy:
        nx.draw_networkx_edge_labels(graph, pos, edge_labels=heavy, ax=ax)
    ax.set_axis_off()
    path = Path(output_file)
    fig.savefig(path)
    plt.close(fig)
    return path.resolve()
