"""Smoke test for the pyflagram extension module.

Build and install it first:

    pip install maturin
    pip install --no-build-isolation -e crates/python
"""

from fractions import Fraction

import pyflagram as fg

R33 = """\
colors 2
colorblind 1,2
forbid 1: 1-2,2-3,1-3
forbid 2: 1-2,2-3,1-3
flag_order 4
ell 2
"""

C5 = """\
order 5
- 1 2 2 1
1 - 1 2 2
2 1 - 1 2
2 2 1 - 1
1 2 2 1 -
"""


def main():
    problem = fg.Problem.parse(R33)
    assert problem.colors == 2 and problem.ell == 2 and problem.flag_order == 4
    assert problem.count_graphs(4) == [1, 1, 2, 3, 7]
    assert len(problem.graph_keys(4)) == 7

    asm = problem.assemble()
    assert asm.block_dims == [2, 5] and asm.rows == 7
    assert sorted(asm.objective()) == sorted(Fraction(v, 6) for v in (1, 0, 0, 1, 3, 2, 6))
    assert asm.export_sdpa().startswith("7\n3\n2 5 -8\n")

    sol = asm.solve()
    assert abs(sol.value - 0.2) < 1e-6, sol.value
    cert = asm.certify(sol)
    assert Fraction(1, 6) < cert.delta <= Fraction(1, 5) and cert.bound == 6
    cert.verify(asm)
    again = fg.Certificate.parse(cert.to_text())
    again.verify(asm)

    imported = asm.import_solution(sol.to_text())
    assert abs(imported.value - sol.value) < 1e-12

    zero = [[[0] * d for _ in range(d)] for d in asm.block_dims]
    try:
        asm.certify_exact(zero)
    except fg.CertificationError:
        pass
    else:
        raise AssertionError("zero matrices certify nothing")

    assert fg.check_witness(problem, C5) == Fraction(1, 5)
    try:
        fg.check_witness(problem, "order 3\n- 1 1\n1 - 1\n1 1 -\n")
    except ValueError as e:
        assert "vertices [1, 2, 3]" in str(e)
    else:
        raise AssertionError("a monochromatic triangle must be rejected")

    assert fg.ramsey_bound(Fraction(1, 5), 2) == 6
    assert fg.ramsey_bound("0.17", 2) == 6

    r34 = fg.Problem.cliques([3, 4], ell=2, flag_order=5)
    report = fg.run_bound(r34)
    assert report["bound"] == 9 and report["delta"] <= Fraction(1, 8)
    assert "bound=9" in report["machine"]

    try:
        fg.Problem.parse("colors 1\nflag_order 4\nell 2\n")
    except ValueError:
        pass
    else:
        raise AssertionError("a problem without forbidden graphs must be rejected")

    print("pyflagram smoke test passed")


if __name__ == "__main__":
    main()
