"""Bundled example graphs and generators for colluding-path families."""
from __future__ import annotations

from importlib import resources

from .fileformat import dump, parse
from .graph import MissingDataGraph, MixedGraph, Vertex, VertexRole, validate

FORMS = ("a", "b", "c", "d")


def fixture_names() -> list[str]:
    root = resources.files("missid") / "fixtures"
    return sorted(p.name[:-4] for p in root.iterdir() if p.name.endswith(".mdg"))


def fixture_text(name: str) -> str:
    return (resources.files("missid") / "fixtures" / f"{name}.mdg").read_text()


def load_fixture(name: str, validated=True) -> MixedGraph | MissingDataGraph:
    g = parse(fixture_text(name))
    return validate(g) if validated else g


def colluding_form(form: str, span: int) -> MissingDataGraph:
    """A single colluding path of the given form and span between ``X0`` and ``R0``.

    Intermediate vertices ``V_1..V_S`` belong to fresh pairs ``1..S`` whose
    other member is left isolated; their kinds alternate so that ``V_S`` is
    an indicator. Form a: ``X0 <-> V_1 <-> ... <-> V_S <-> R0``. Form b
    starts with ``X0 -> V_1``. Form c ends with ``V_S <- R0``. Form d does
    both. Forms c and d need ``S >= 1``.
    """
    if form not in FORMS:
        raise ValueError(f"unknown form {form!r}")
    if span < 0:
        raise ValueError("span must be non-negative")
    if form in ("c", "d") and span == 0:
        raise ValueError(f"form {form} needs at least one intermediate indicator")
    vertices = _pair_vertices(span + 1)
    path = ["X0"]
    for s in range(1, span + 1):
        path.append(f"R{s}" if (span - s) % 2 == 0 else f"X{s}")
    path.append("R0")
    steps = list(zip(path, path[1:]))
    directed, bidirected = [], []
    for k, (a, b) in enumerate(steps):
        first, last = k == 0, k == len(steps) - 1
        if first and form in ("b", "d"):
            directed.append((a, b))
        elif last and form in ("c", "d"):
            directed.append((b, a))
        else:
            bidirected.append((a, b))
    return validate(MixedGraph(vertices, directed, bidirected))


def _pair_vertices(n):
    out = []
    for i in range(n):
        out += [Vertex(f"X{i}", VertexRole.MISSING, f"X{i}"), Vertex(f"R{i}", VertexRole.INDICATOR, f"X{i}")]
    return out


def form_count_formula(span: int) -> tuple[int, int]:
    full = (span + 2) * (span + 3) // 2
    return full, full - 1


def write_form_fixtures(directory, spans=range(5)):
    """Regenerate the ``fig6<form>_s<S>.mdg`` files."""
    from pathlib import Path

    directory = Path(directory)
    for form in FORMS:
        for s in spans:
            try:
                g = colluding_form(form, s)
            except ValueError:
                continue
            header = f"# Colluding path of form {form} with {s} intermediate vertices.\n"
            (directory / f"fig6{form}_s{s}.mdg").write_text(header + dump(g))
