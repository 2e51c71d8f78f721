"""Print every numerical constant next to its closed form and printed value."""

from zetaclt.constants import all_constants


def main():
    print(f"{'name':18s} {'computed':>20s} {'reference':>20s} {'abs err':>10s}")
    for c in all_constants():
        ref = c.closed_form if c.closed_form is not None else c.paper_value
        ref_s = f"{ref:20.12f}" if ref is not None else " " * 20
        print(f"{c.name:18s} {c.computed:20.12f} {ref_s} {c.abs_err:10.1e}")


if __name__ == "__main__":
    main()
