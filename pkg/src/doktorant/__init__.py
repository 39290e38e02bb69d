"""Doctoral-candidate records registry.

Layers: `domain` (pure types and rules), `registry` (commands over an
immutable store), `persistence` (journal + snapshots), `reporting`
(aggregations and export), `service` (HTTP facade), `cli` (operator tool).
"""

__version__ = "0.1.0"
