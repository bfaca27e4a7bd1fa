"""Growth analysis for a log-analytic expression fragment.

Library layout:

- ``expressions``: AST, parser, evaluators, ray restriction
- ``monomials``: exact log-power monomial algebra and dominance order
- ``multiseries``: asymptotic expansion, prepared forms, growth classifier
- ``counterexample``: the explicit construction with exponential sphere
  growth but per-ray polynomial bounds
- ``cones``: definable-set membership sampling, tangent/ray cones at
  infinity, density predicates
- ``certificates``: per-ray growth certificates, cone search, ray surveys
- ``cli``: command-line front end
"""

__version__ = "0.1.0"

from . import (  # noqa: F401
    certificates,
    cones,
    counterexample,
    expressions,
    monomials,
    multiseries,
    rays,
)
