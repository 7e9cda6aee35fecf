"""Print Te, T1, T2 per coupling and how small teleportation gets at 2 T2."""
import sys

from qetlab.local_extraction import omega_max_closed_form, thresholds
from qetlab.qet_protocol import optimal_qet
from qetlab.spin_model import SystemParams, gibbs_state

DEFAULT = (0.1, 0.25, 0.5, 1.0, 2.0, 4.0, 8.0)


def main(kappas=DEFAULT) -> None:
    print(f"{'kappa':>7} {'Te':>10} {'T1':>10} {'T2':>10} {'(T2-T1)/T1':>11} {'E_B/omega @2T2':>15}")
    for k in kappas:
        ts = thresholds(k)
        hot = gibbs_state(SystemParams(k, 2 * ts.T2))
        ratio = optimal_qet(hot).E_B_max / omega_max_closed_form(hot)
        print(f"{k:7.3g} {ts.Te:10.6f} {ts.T1:10.6f} {ts.T2:10.6f} "
              f"{(ts.T2 - ts.T1) / ts.T1:11.4f} {ratio:15.3e}")


if __name__ == "__main__":
    main([float(x) for x in sys.argv[1:]] or DEFAULT)
