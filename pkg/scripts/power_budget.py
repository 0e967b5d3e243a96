"""Room-temperature power, base-plate heat and thermal photons for 10 ns gates."""

import argparse

from driveline import acceptance, budget


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--chain", default=budget.DEFAULT_CHAIN)
    ap.add_argument("--gate", type=float, default=10e-9)
    args = ap.parse_args()
    chain = budget.AttenuationChain.parse(args.chain)

    cases = [("resonant, T1_ext 1 ms", acceptance.resonant_budget(args.gate, chain=args.chain))]
    for name in ("lambda4", "lambda2"):
        cases.append((f"subharmonic via {name}", acceptance.subharmonic_budget(name, args.gate, args.chain)))
    print(f"chain {chain.format()} ({chain.total_db:g} dB)")
    for label, p_room in cases:
        print(f"{label:24s} room {p_room:7.2f} dBm   base-plate heat {budget.base_plate_heat(p_room, chain):7.2f} dBm")
    for text in (args.chain, "MXC:60@0.01", budget.PRIOR_WORK_CHAIN):
        n = budget.chain_photon_number(budget.AttenuationChain.parse(text), acceptance.F_STOP)
        print(f"thermal photons at 5 GHz after {text}: {n:.4g}")


if __name__ == "__main__":
    main()
