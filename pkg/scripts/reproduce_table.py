#!/usr/bin/env python3
"""Print the scheme-property tables for q = 16 and q = 256.

Columns: dimension k, LDC-locality (#queries), PIR-locality (#servers),
storage overhead and communication cost for the replicate-everywhere
baseline versus the hyperplane-partitioned layout.
"""

from multipir.cli import _HEADER, _fmt_row, full_table


def main():
    for q in (16, 256):
        print(f"== q = {q}")
        print(_HEADER)
        for row in full_table(q):
            print(_fmt_row(row))
        print()


if __name__ == "__main__":
    main()
