"""Topological volume of closed 3-manifolds.

Hyperbolic volumes from tetrahedron shapes, Dehn-filling volume expansions
for the Whitehead link and its sister, the lens-space minimiser decision
procedure, general volume bounds and a census of low-volume manifolds.
"""

__version__ = "0.1.0"
