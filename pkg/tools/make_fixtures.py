"""Regenerate the committed JSON fixtures under fixtures/.

Run from the repository root: python3 tools/make_fixtures.py
"""

import json
from pathlib import Path

from gmpy2 import mpc, mpfr, mpq

from quartic_foliation.algebra.numbers import num_to_json, working_precision
from quartic_foliation.divisors import Divisor
from quartic_foliation.fixtures import (
    FERMAT,
    fermat_perturbation,
    genericity_breaking,
    scenario_from_dict,
    select_bitangents,
    tangent_line_through,
    transverse_pair,
)
from quartic_foliation.geometry import _cross, validate_quartic

OUT = Path(__file__).resolve().parent.parent / "fixtures"
PREC = 256
FERMAT_SEED = 0
PAIR = [0, 1]
PENCIL_SEED = 1000


def dump(name: str, obj: dict) -> None:
    (OUT / name).write_text(json.dumps(obj, indent=2, sort_keys=True) + "\n")
    print("wrote", name)


def main() -> None:
    OUT.mkdir(exist_ok=True)
    with working_precision(PREC):
        F = fermat_perturbation(FERMAT_SEED)
        neeman = {
            "quartic": F.to_text(),
            "fermat_seed": FERMAT_SEED,
            "bitangents": {"select": PAIR, "seed": 0, "starts": 2000, "count": 28},
            "seed": 0,
            "precision": PREC,
            "expect": {"neeman-build": "BUILT", "verify-theorem": "REFUTED_AS_PAPER_PREDICTS"},
        }
        dump("neeman.json", neeman)
        sc = scenario_from_dict(neeman)

        pts = {"quartic": sc.F.to_json(PREC), "precision": PREC}
        dump("neeman-points.json", {**pts, **Divisor.from_points(sc.points, 1, 4).to_json(), "expect": "NOT_PRINCIPAL"})
        dump("neeman-2d.json", {**pts, **Divisor.from_points(sc.points, 2, 8).to_json(), "expect": "PRINCIPAL"})

        F2 = transverse_pair(F, PENCIL_SEED)
        dump("pencil.json", {"quartic": F.to_text(), "second": F2.to_text(), "precision": PREC, "expect": "PREREGULAR"})

        # normalized coordinates: both bitangents are Y + aX and Y + aX + b, Q13 at the origin
        a, b = sc.a, sc.b
        lines = [[num_to_json(a, PREC), "1", "0"], [num_to_json(a, PREC), "1", num_to_json(b, PREC)]]
        Fg = genericity_breaking(sc)
        dump(
            "adversarial-genericity.json",
            {
                "quartic": Fg.to_json(PREC),
                "bitangents": {"lines": lines, "q13": ["0", "0"]},
                "precision": PREC,
                "expect": "GenericityFails",
            },
        )
        dump(
            "adversarial-genericity-unchecked.json",
            {
                "quartic": Fg.to_json(PREC),
                "bitangents": {"lines": lines, "q13": ["0", "0"]},
                "check_genericity": False,
                "precision": PREC,
            },
        )

        # a line at infinity through l1 ∩ l2 that is tangent to Q elsewhere
        q = validate_quartic(F, PREC)
        bt1, bt2 = select_bitangents(q, neeman["bitangents"], PREC)
        P = _cross(tuple(bt1.coeffs), tuple(bt2.coeffs))
        avoid = [r.point for r in bt1.tangency_points + bt2.tangency_points]
        Linf = tangent_line_through(F, P, avoid, PREC)
        dump(
            "adversarial-infinity.json",
            {
                **{k: neeman[k] for k in ("quartic", "bitangents", "precision")},
                "infinity_line": [num_to_json(v, PREC) for v in Linf],
                "expect": "NormalizationBreaksTransversality",
            },
        )

        # Fermat with a parallel pair X + Y + c, c^4 = -1: translation only, C = 4 X^3
        r = mpfr(2) ** mpq(-1, 2)
        c1, c2 = mpc(-r, -r), mpc(-r, r)
        dump(
            "fermat.json",
            {
                "quartic": FERMAT.to_text(),
                "bitangents": {"lines": [["1", "1", num_to_json(c1, PREC)], ["1", "1", num_to_json(c2, PREC)]]},
                "precision": PREC,
                "expect": "NonTransverseC",
            },
        )


if __name__ == "__main__":
    main()
