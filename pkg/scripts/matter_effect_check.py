#!/usr/bin/env python3
"""How much does rock move the survival curve at a long baseline?

Computes the charged-current potential for a given rho * Y_e, tabulates
vacuum and in-matter survival probabilities over the energy range, reports
the largest shift, and cross-checks the closed-form matter curve against a
direct matrix-exponential evolution so the number can be trusted.
"""

import argparse
import math
import sys
from pathlib import Path

import numpy as np
from scipy import constants
from scipy.linalg import expm

sys.path.insert(0, str(Path(__file__).resolve().parents[1] / "src"))

from nulgi.dataio import write_table_csv
from nulgi.oscillation import (
    OscParams,
    accumulated_phase,
    matter_survival_probability,
    survival_probability,
)

SIGMA_X = np.array([[0.0, 1.0], [1.0, 0.0]])
SIGMA_Z = np.array([[1.0, 0.0], [0.0, -1.0]])


def charged_current_potential_ev(rho_ye: float) -> float:
    """sqrt(2) G_F n_e for an electron density of rho_ye mol/cm^3."""
    g_f = constants.value("Fermi coupling constant")  # GeV^-2
    hbarc_gev_cm = constants.hbar * constants.c / constants.e * 1.0e-7
    n_e = rho_ye * constants.Avogadro  # cm^-3
    return math.sqrt(2.0) * g_f * hbarc_gev_cm**3 * n_e * 1.0e9


def expm_survival(params: OscParams, energy_gev: float) -> float:
    # Independent check: build H in eV, evolve over the baseline, project.
    hbarc_ev_m = constants.hbar * constants.c / constants.e
    omega = params.dm2 / (2.0 * energy_gev * 1.0e9)
    h = 0.5 * (
        omega * params.sin_2theta * SIGMA_X
        + (params.v_c - omega * params.cos_2theta) * SIGMA_Z
    )
    length = params.baseline_km * 1.0e3 / hbarc_ev_m
    u = expm(-1.0j * h * length)
    return float(abs(u[0, 0]) ** 2)


def main(argv=None) -> int:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--dm2", type=float, default=2.4e-3, help="mass splitting in eV^2")
    ap.add_argument("--sin2-2theta", type=float, default=0.95)
    ap.add_argument("--baseline-km", type=float, default=735.0)
    ap.add_argument(
        "--rho-ye", type=float, default=1.35,
        help="electron density as rho * Y_e in g/cm^3 (1.35 is continental crust)",
    )
    ap.add_argument("--emin", type=float, default=0.5)
    ap.add_argument("--emax", type=float, default=50.0)
    ap.add_argument("--points", type=int, default=400)
    ap.add_argument("--out", type=Path, help="optional CSV of both curves")
    args = ap.parse_args(argv)

    v_c = charged_current_potential_ev(args.rho_ye)
    vacuum_params = OscParams(
        dm2=args.dm2, sin2_2theta=args.sin2_2theta, baseline_km=args.baseline_km
    )
    matter_params = OscParams(
        dm2=args.dm2, sin2_2theta=args.sin2_2theta,
        baseline_km=args.baseline_km, v_c=v_c,
    )

    energies = np.geomspace(args.emin, args.emax, args.points)
    vacuum = np.array(
        [
            survival_probability(args.sin2_2theta, accumulated_phase(vacuum_params, e))
            for e in energies
        ]
    )
    matter = np.array([matter_survival_probability(matter_params, e) for e in energies])
    shift = np.abs(matter - vacuum)

    oracle_gap = max(
        abs(matter_survival_probability(matter_params, float(e)) - expm_survival(matter_params, float(e)))
        for e in energies[:: max(1, args.points // 40)]
    )

    print(f"charged-current potential: {v_c:.6e} eV (rho*Ye = {args.rho_ye} g/cm^3)")
    print(f"max |P_matter - P_vacuum| over {args.emin}..{args.emax} GeV: {shift.max():.6e}")
    print(f"  at E = {energies[int(np.argmax(shift))]:.3f} GeV")
    print(f"matter curve vs matrix-exponential oracle: max gap {oracle_gap:.3e}")
    print(
        "note: the potential is applied asymmetrically between the two states, "
        "the worst case;\na potential felt equally by both (the mu-tau channel) "
        "shifts nothing, see OscParams.v_n"
    )

    if args.out:
        write_table_csv(
            args.out,
            ("energy_gev", "p_vacuum", "p_matter", "abs_shift"),
            [
                (float(e), float(v), float(m), float(s))
                for e, v, m, s in zip(energies, vacuum, matter, shift)
            ],
        )
        print(f"wrote {args.out}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
