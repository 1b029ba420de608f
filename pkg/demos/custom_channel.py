"""Bounds for a user-defined channel given only as Kraus operators at sampled parameters.

The example is a qubit phase rotation followed by amplitude damping and
then dephasing.  Derivatives come from a central difference; the channel
is written to a file that the command-line tool can read back.

Run: python3 demos/custom_channel.py [output.json]
"""
import math
import sys

import numpy as np

from qmetro import bounds as B
from qmetro.channels import from_sampled, save_channel, validate
from qmetro.errors import BetaZeroInfeasible


def kraus_at(phi, damping=0.9, dephasing=0.95):
    u = np.diag([np.exp(0.5j * phi), np.exp(-0.5j * phi)])
    damp = [np.diag([1, math.sqrt(damping)]), np.array([[0, math.sqrt(1 - damping)], [0, 0]])]
    deph = [math.sqrt((1 + dephasing) / 2) * np.eye(2), math.sqrt((1 - dephasing) / 2) * np.diag([1, -1])]
    return [z @ a @ u for z in deph for a in damp]


def main(path=None):
    ch = from_sampled(kraus_at, 0.0)
    print("validation problems:", validate(ch) or "none")
    print(f"channel QFI           {B.channel_qfi(ch).value:.6f}")
    print(f"extended channel QFI  {B.extended_qfi(ch).value:.6f}")
    for n in (2, 10, 100):
        print(f"finite-N bound N={n:<4d} {B.ce_finite(ch, n).value:.6f}")
    try:
        print(f"asymptotic bound      {B.ce_asymptotic(ch).value:.6f}")
    except BetaZeroInfeasible as exc:
        print("asymptotic bound unavailable:", exc)
    print(f"RLD bound             {B.rld_bound(ch).status}")
    if path:
        save_channel(ch, path)
        print(f"saved; try: qmetro bound --channel-file {path} --method ce-finite --n 10")


if __name__ == "__main__":
    main(sys.argv[1] if len(sys.argv) > 1 else None)
