"""Engine comparison as the record count grows: 15 nodes, 22 mean arcs, N in {250, 500, 1000, 2000}."""
import _common


def main():
    args = _common.parser(__doc__, "results/experiment2.csv").parse_args()
    cells = [(f"exp2_N{r}", 15, 22, r, 50) for r in (250, 500, 1000, 2000)]
    _common.run_grid(args, cells)


if __name__ == "__main__":
    main()
