"""Chart-based computational engine for Lorentzian foliations.

Submodules:

- ``geometry``: charts, atlases, metrics, causal classes, curve lengths
- ``dual``: forward-mode dual numbers and dispatching math wrappers
- ``curvature``: Christoffel/Ricci, transverse Ricci, warped-product oracle
- ``foliation``: adapted charts, transverse metrics, waterfall, lifting
- ``dynamics``: geodesics, focal scans, shooting diameter estimates
- ``causality``: discrete cone graphs, reach, cycles, longest paths
- ``catalog``: registered example foliations
- ``cli``: scenario runner
"""

__version__ = "0.1.0"
