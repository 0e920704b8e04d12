"""Wave-optics simulator for satellite-relay quantum communication links.

Modules:

- ``wavefield``: sampled complex fields and angular-spectrum propagation
- ``chainoptics``: lens-relay chains (loss budgets, hop-by-hop traces)
- ``turbulence``: Kolmogorov phase screens and uplink channels
- ``linkgeom``: orbital slant ranges, air mass, pointing loss
- ``ratemodels``: finite-key and entanglement-distribution rate models
- ``scenarios``: end-to-end scenario presets, Monte Carlo, sweeps
- ``qnetcli``: the ``qlink`` command-line interface
"""

__version__ = "0.1.0"

from . import (  # noqa: F401
    chainoptics,
    errors,
    linkgeom,
    qnetcli,
    ratemodels,
    scenarios,
    turbulence,
    wavefield,
)
