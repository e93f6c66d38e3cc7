#!/usr/bin/env python3
# Copyright 2026 The guoq Authors
#
# Licensed under the Apache License, Version 2.0 (the "License");
# you may not use this file except in compliance with the License.
# You may obtain a copy of the License at
#
#     http://www.apache.org/licenses/LICENSE-2.0
#
# Unless required by applicable law or agreed to in writing, software
# distributed under the License is distributed on an "AS IS" BASIS,
# WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
# See the License for the specific language governing permissions and
# limitations under the License.

"""Writes the small benchmark corpus (nam gate set) into benchmarks/."""

import argparse
from fractions import Fraction
from pathlib import Path


def angle(frac):
    """Exact multiple of pi as QASM text."""
    frac = Fraction(frac)
    if frac == 0:
        return "0"
    sign = "-" if frac < 0 else ""
    num, den = abs(frac.numerator), frac.denominator
    head = "pi" if num == 1 else f"{num}*pi"
    return sign + head + ("" if den == 1 else f"/{den}")


class Builder:
    def __init__(self, n):
        self.n = n
        self.lines = []

    def rz(self, frac, q):
        self.lines.append(f"rz({angle(frac)}) q[{q}];")

    def h(self, q):
        self.lines.append(f"h q[{q}];")

    def x(self, q):
        self.lines.append(f"x q[{q}];")

    def cx(self, c, t):
        self.lines.append(f"cx q[{c}],q[{t}];")

    def cp(self, frac, c, t):
        half = Fraction(frac) / 2
        self.rz(half, c)
        self.cx(c, t)
        self.rz(-half, t)
        self.cx(c, t)
        self.rz(half, t)

    def toffoli(self, a, b, c):
        t, tdg = Fraction(1, 4), Fraction(-1, 4)
        self.h(c)
        self.cx(b, c)
        self.rz(tdg, c)
        self.cx(a, c)
        self.rz(t, c)
        self.cx(b, c)
        self.rz(tdg, c)
        self.cx(a, c)
        self.rz(t, b)
        self.rz(t, c)
        self.h(c)
        self.cx(a, b)
        self.rz(t, a)
        self.rz(tdg, b)
        self.cx(a, b)

    def text(self):
        head = ["OPENQASM 2.0;", 'include "qelib1.inc";', f"qreg q[{self.n}];"]
        return "\n".join(head + self.lines) + "\n"


def rz_merge():
    b = Builder(2)
    b.rz(Fraction(1, 2), 0)
    b.h(1)
    b.cx(0, 1)
    b.rz(Fraction(1, 2), 0)
    return b


def cx_chain():
    b = Builder(5)
    for c in (1, 2, 3, 4, 1):
        b.cx(c, 0)
    return b


def rz_ladder():
    b = Builder(3)
    b.cx(0, 1)
    for _ in range(3):
        b.rz(Fraction(1, 4), 0)
        b.cx(0, 2)
    b.rz(Fraction(1, 4), 0)
    b.cx(0, 1)
    return b


def qft(n):
    b = Builder(n)
    for i in range(n):
        b.h(i)
        for j in range(i + 1, n):
            b.cp(Fraction(1, 2 ** (j - i)), j, i)
    return b


def barenco_tof_3():
    # Three controls, one borrowed ancilla, four Toffolis.
    c0, c1, c2, anc, tgt = range(5)
    b = Builder(5)
    b.toffoli(c2, anc, tgt)
    b.toffoli(c0, c1, anc)
    b.toffoli(c2, anc, tgt)
    b.toffoli(c0, c1, anc)
    return b


def adder_2():
    # Ripple-carry adder on two-bit registers.
    cin, b0, a0, b1, a1, z = range(6)
    b = Builder(6)

    def maj(x, y, w):
        b.cx(w, y)
        b.cx(w, x)
        b.toffoli(x, y, w)

    def uma(x, y, w):
        b.toffoli(x, y, w)
        b.cx(w, x)
        b.cx(x, y)

    maj(cin, b0, a0)
    maj(a0, b1, a1)
    b.cx(a1, z)
    uma(a0, b1, a1)
    uma(cin, b0, a0)
    return b


CORPUS = {
    "rz_merge": rz_merge,
    "cx_chain": cx_chain,
    "rz_ladder": rz_ladder,
    "qft_4": lambda: qft(4),
    "qft_8": lambda: qft(8),
    "barenco_tof_3": barenco_tof_3,
    "adder_2": adder_2,
}


def main():
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--out", type=Path, default=Path(__file__).resolve().parent.parent / "benchmarks")
    args = parser.parse_args()
    args.out.mkdir(parents=True, exist_ok=True)
    for name, build in CORPUS.items():
        (args.out / f"{name}.qasm").write_text(build().text())


if __name__ == "__main__":
    main()
