"""How close do GHZ / N00N inputs and optimised inputs come to the finite-N bound?

For N probes the optimised output QFI is sandwiched between the QFI of a
simple entangled strategy and N times the finite-N extension bound.

Run: python3 demos/n_probe_bracketing.py
"""
from qmetro import bounds as B
from qmetro.channels import catalog
from qmetro.oracle import NChannelInstance, ghz_qfi, noon_qfi, optimize_input


def main(eta=0.9, ns=(1, 2, 3), restarts=8):
    for kind, strategy, label in (("dephasing", ghz_qfi, "GHZ"), ("loss", noon_qfi, "N00N")):
        ch = catalog(kind, "phase", 0.0, eta)
        f_as = B.ce_asymptotic(ch).value
        print(f"{kind} (eta={eta}), per-probe values; asymptotic CE bound {f_as:.6f}")
        print(f"  {'N':>3s} {label:>10s} {'optimised':>10s} {'CE bound':>10s}")
        for n in ns:
            _, best = optimize_input(NChannelInstance(ch, n), restarts=restarts)
            print(f"  {n:3d} {strategy(n, eta) / n:10.6f} {best / n:10.6f} {B.ce_finite(ch, n).value:10.6f}")
        # the bound keeps growing towards f_as while GHZ/N00N decay for large N
        for n in (10, 100, 1000):
            print(f"  {n:3d} {strategy(n, eta) / n:10.6f} {'':>10s} {B.ce_finite(ch, n).value:10.6f}")


if __name__ == "__main__":
    main()
