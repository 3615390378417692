#!/usr/bin/env python3
"""Solve an LP-format model with HiGHS and write "name value" lines.

Usage: solve_lp_highs.py MODEL.lp SOLUTION.txt

Exit status is 0 when an optimal solution was written, 1 otherwise.
"""
import sys

import highspy


def main() -> int:
    if len(sys.argv) != 3:
        print(__doc__.strip(), file=sys.stderr)
        return 2
    model_path, solution_path = sys.argv[1], sys.argv[2]

    h = highspy.Highs()
    h.setOptionValue("output_flag", False)
    h.setOptionValue("mip_rel_gap", 0.0)
    h.setOptionValue("mip_abs_gap", 1e-9)
    if h.readModel(model_path) != highspy.HighsStatus.kOk:
        print(f"cannot read {model_path}", file=sys.stderr)
        return 1
    h.run()
    if h.getModelStatus() != highspy.HighsModelStatus.kOptimal:
        print(f"solver status: {h.modelStatusToString(h.getModelStatus())}", file=sys.stderr)
        return 1

    lp = h.getLp()
    values = h.getSolution().col_value
    with open(solution_path, "w") as out:
        out.write(f"# objective {h.getInfo().objective_function_value!r}\n")
        for name, value in zip(lp.col_names_, values):
            out.write(f"{name} {value!r}\n")
    return 0


if __name__ == "__main__":
    sys.exit(main())
