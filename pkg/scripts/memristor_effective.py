#!/usr/bin/env python3
"""Effective memductance of the shipped two-memristor network.

Same mathematics as the resistor case with (flux, charge) in place of
(voltage, current): prints the flux-to-charge curve between the two
boundary nodes as CSV.
"""

import sys
from pathlib import Path

import numpy as np

import kronred as kr
from kronred.netfile import load_network


def main():
    path = Path(__file__).resolve().parent.parent / "networks" / "memristor_pair.json"
    loaded = load_network(path)
    assert loaded.domain == "memristor"
    grid = np.linspace(-3.0, 3.0, 25)
    print("flux,charge,action")
    for p in kr.effective_curve(loaded.network, "1", "2", grid):
        if p.converged:
            print(f"{p.v:.17g},{p.current:.17g},{p.cocontent:.17g}")
        else:
            print(f"{p.v:.17g},failed,failed", file=sys.stderr)


if __name__ == "__main__":
    main()
