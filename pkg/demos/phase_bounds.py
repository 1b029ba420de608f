"""Single-use QFIs and asymptotic bounds for the four built-in noise families.

Run: python3 demos/phase_bounds.py
"""
from qmetro import bounds as B
from qmetro.channels import KINDS, catalog
from qmetro.errors import BetaZeroInfeasible


def show(res):
    if res.ok:
        return f"{res.value:10.6f}"
    return f"{'n.a.' if res.status == B.NOT_APPLICABLE else 'infeasible':>10s}"


def main(etas=(0.5, 0.9, 0.99)):
    print(f"{'channel':22s} {'eta':>5s} {'QFI':>10s} {'ext QFI':>10s} {'CE':>10s} {'QS':>10s} {'RLD':>10s} {'CS':>10s}")
    for kind in KINDS:
        for eta in etas:
            ch = catalog(kind, "phase", 0.0, eta)
            try:
                ce = B.ce_asymptotic(ch)
            except BetaZeroInfeasible:
                ce = B.BoundResult(float("nan"), B.INFEASIBLE)
            row = [B.channel_qfi(ch), B.extended_qfi(ch), ce, B.qs_bound(ch), B.rld_bound(ch), B.cs_bound(ch)]
            print(f"{kind:22s} {eta:5.2f} " + " ".join(show(r) for r in row))
    # the asymptotic bounds are ordered CE <= QS <= RLD <= CS wherever they exist;
    # loss and spontaneous emission are phi-extremal, so RLD and CS are unavailable


if __name__ == "__main__":
    main()
