"""Frequency estimation: pick the shot duration that maximises information per unit time.

Run: python3 demos/frequency_timing.py
"""
import math

import numpy as np

from qmetro.bounds import channel_qfi
from qmetro.channels import catalog, eta_of_t
from qmetro.frequency import freq_bound, freq_closed, freq_crlb


def main(gamma=1.0):
    # the trade-off: longer shots imprint more phase but decohere more
    print("t * F(eta(t)) for dephasing, gamma =", gamma)
    for t in np.linspace(0.1, 1.5, 8):
        eta = eta_of_t("dephasing", gamma, t)
        print(f"  t={t:4.2f}  {t * channel_qfi(catalog('dephasing', eta=eta)).value:.5f}")
    for kind in ("dephasing", "loss", "spontaneous_emission"):
        single = freq_bound(kind, "channel_qfi", gamma)
        best = freq_bound(kind, "ce_asymptotic", gamma)
        print(
            f"{kind:22s} single-probe {single.value:.6f} at t={single.t_opt:.4f}; "
            f"asymptotic bound {best.value:.6f} (closed form {freq_closed(kind, 'ce_asymptotic', gamma):.6f}); "
            f"enhancement {math.sqrt(best.value / single.value):.4f}"
        )
    res = freq_bound("dephasing", "ce_finite", gamma, N=100)
    print(f"dephasing, N=100: best shot {res.t_opt:.4f}, frequency error after T=1000 >= {freq_crlb(res, 1000):.3e}")


if __name__ == "__main__":
    main()
