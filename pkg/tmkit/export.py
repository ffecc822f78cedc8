"""
Graphviz DOT rendering of static models and JSON-lines rendering of traces
"""

# local imports
from .helpers import json_line
from .models import ArcKind, StaticModel, Thimac, ThimacKind, fmt_path
from .settings import settings
from .sim import Trace


def _quote(text: str) -> str:
    return '"' + text.replace('\\', '\\\\').replace('"', '\\"') + '"'


def _cluster(model: StaticModel, thimac: Thimac, depth: int, dot: list[str]):
    indent = '  ' * depth
    path = fmt_path(thimac.path)
    dot.append(f'{indent}subgraph {_quote("cluster_" + path)} {{')
    dot.append(f'{indent}  label={_quote(thimac.name)};')
    if thimac.kind is ThimacKind.OBJECT:
        # an inner frame draws the double border of an object
        depth += 1
        indent = '  ' * depth
        dot.append(f'{indent}subgraph {_quote("cluster_" + path + "__frame")} {{')
        dot.append(f'{indent}  label="";')

    for stage in thimac.stage_refs():
        dot.append(f'{indent}  {_quote(stage.path)} [label={_quote(stage.action)}];')
    for child in thimac.children:
        _cluster(model, model.thimac(child), depth + 1, dot)

    if thimac.kind is ThimacKind.OBJECT:
        dot.append(f'{indent}}}')
        indent = '  ' * (depth - 1)
    dot.append(f'{indent}}}')


def export_dot(model: StaticModel) -> str:
    """
    Nested clusters per containment, one node per stage labeled with its action, solid flows, dashed triggers,
    double-bordered objects; everything in declaration order
    """
    if not model.thimacs:
        return 'digraph tm {\n}\n'

    dot = [
        'digraph tm {',
        '  compound=true;',
        f'  rankdir={settings.dot_rankdir};',
        '  node [shape=box, style=rounded];',
    ]
    for root in model.roots:
        _cluster(model, root, 1, dot)
    for arc in model.arcs:
        style = ' [style=dashed]' if arc.kind is ArcKind.TRIGGER else ''
        dot.append(f'  {_quote(arc.src.path)} -> {_quote(arc.dst.path)}{style};')
    dot.append('}')
    return '\n'.join(dot) + '\n'


def export_trace_json(trace: Trace) -> str:
    """One JSON object per record with keys step, kind, token, subject"""
    return ''.join(
        json_line({'step': x.step, 'kind': str(x.kind), 'token': x.token, 'subject': x.subject}) + '\n'
        for x in trace.records
    )
