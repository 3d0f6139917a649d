import numpy as np

from floqkerr import verification
from floqkerr.fock import FockOperator
from floqkerr.liouville import Superoperator, build_liouvillian


def test_fast_oracles_all_pass():
    results = verification.run_all(include_slow=False)
    failures = [r.line() for r in results if not r.passed]
    assert not failures, "\n".join(failures)


def test_oracle_lines_are_readable():
    res = verification.oracle_truncated_commutator()
    assert res.name in res.line()
    assert res.line().startswith("PASS")


def test_mutated_liouvillian_sign_fails_spectrum_oracle():
    # flipping the dissipator sign must be caught by the damped-oscillator oracle
    def flipped(h: FockOperator, kappa: float) -> Superoperator:
        hermitian_part = build_liouvillian(h, 0.0)
        full = build_liouvillian(h, kappa)
        bad = 2.0 * hermitian_part.matrix - full.matrix
        return Superoperator(h.space, bad, full.label)

    res = verification.oracle_damped_spectrum_direct(liouvillian_builder=flipped)
    assert not res.passed
    assert res.measured > res.threshold
