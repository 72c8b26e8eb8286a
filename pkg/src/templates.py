# Output templates

from jinja2 import Environment

_env = Environment(trim_blocks=True, lstrip_blocks=True, keep_trailing_newline=True)


def dot_quote(text: str) -> str:
    return '"' + text.replace("\\", "\\\\").replace('"', '\\"') + '"'


_env.filters["dot"] = dot_quote

# Node shapes: the root is a doubleoctagon, normal forms are boxes (dashed when
# stuck), truncated nodes are grey.
REDUCTION_GRAPH_DOT = _env.from_string("""\
digraph reductions {
  rankdir=TB;
  node [shape=ellipse, fontname="monospace"];
  edge [fontname="monospace"];
{% for node in nodes %}
  n{{ node.id }} [label={{ node.label | dot }}{% if node.root %}, shape=doubleoctagon{% elif node.status == "NormalForm" %}, shape=box{% endif %}{% if node.stuck %}, style=dashed{% elif node.status == "BudgetTruncated" %}, style=filled, fillcolor=grey{% endif %}];
{% endfor %}
{% for edge in edges %}
  n{{ edge.source }} -> n{{ edge.target }} [label={{ edge.label | dot }}];
{% endfor %}
}
""")

CHECK_RESULT = ": {type}"

REDUCE_NOTICE = "note: a projection had several candidates; other normal forms exist (use --all)"
