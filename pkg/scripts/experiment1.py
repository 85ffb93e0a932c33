"""Engine comparison across problem sizes: 15, 30 and 45 nodes, mean arcs 1.5n, 500 records.

Replications default to 50, 20 and 10; use ``--scale`` to shrink them.
"""
import _common


def main():
    args = _common.parser(__doc__, "results/experiment1.csv").parse_args()
    cells = [(f"exp1_n{n}", n, 1.5 * n, 500, reps) for n, reps in ((15, 50), (30, 20), (45, 10))]
    _common.run_grid(args, cells)


if __name__ == "__main__":
    main()
