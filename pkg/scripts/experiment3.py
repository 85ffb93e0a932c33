"""Engine comparison on denser generating graphs: 15 nodes, 44 mean arcs, 500 records."""
import _common


def main():
    args = _common.parser(__doc__, "results/experiment3.csv").parse_args()
    _common.run_grid(args, [("exp3", 15, 44, 500, 50)])


if __name__ == "__main__":
    main()
