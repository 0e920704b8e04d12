"""Turbulent uplink into the relay: loss and fundamental-mode fraction.

Runs a small seeded ensemble of the ground-to-satellite qubit uplink and
reports the spread of uplink loss and the excess the turbulence-distorted
beam suffers in the first relay hops.  Takes a few minutes.
"""

from dataclasses import replace

from qlinksim import scenarios

cfg = replace(scenarios.preset("asqn_qubit_uplink"), ensemble=4)
report = scenarios.run_scenario(cfg)

for name, value in report.stats:
    print(f"{name:24s} {value:9.4f}")
