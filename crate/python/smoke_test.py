"""Quick end-to-end check of the Python bindings.

Build and install first:  pip install maturin && maturin develop -m crates/py/Cargo.toml
"""

import math
import os
import tempfile

import hallsync


def main():
    b = hallsync.Field.random(24, seed=1, amplitude=0.5)
    assert b.n == 24
    assert abs(b.l2_norm() - 0.5) < 1e-12

    h = hallsync.hall_term(b, 0.5)
    assert abs(h.inner_product(b)) < 1e-12

    params = hallsync.WavenumberParams()
    assert params.kappa == 1.0
    small = b.scaled(1e-6)
    assert hallsync.lambda_b(small, params) == 0
    assert hallsync.lambda_b(b.scaled(10.0), params) is None
    assert hallsync.lambda_u(hallsync.Field.zeros(24), params) == 0

    t = [0.01 * i for i in range(30)]
    rate, r2, samples = hallsync.fit_decay_rate(t, [math.exp(-2.0 * x) for x in t])
    assert abs(rate + 2.0) < 1e-9 and r2 > 0.999999 and samples >= 10

    cfg = hallsync.parse_config("n = 24\nt_end = 0.012\ndt = 1e-3\namplitude = 0.01\nperturbation = 1e-3\noutput_every = 1\n")
    assert cfg["n"] == "24" and cfg["sync"] == "true"
    try:
        hallsync.parse_config("n = 24\nr = 3.5\nbogus = 1\n")
    except ValueError as e:
        msg = str(e)
        assert "(2,3)" in msg and "bogus" in msg and "t_end" in msg
    else:
        raise AssertionError("bad config accepted")

    with tempfile.TemporaryDirectory() as d:
        path = os.path.join(d, "s.bin")
        hallsync.write_snapshot(path, 0.25, 1.0, 1.0, 0.5, [b, small])
        t0, nu, mu, eta, fields = hallsync.read_snapshot(path)
        assert (t0, nu, mu, eta) == (0.25, 1.0, 1.0, 0.5)
        assert (fields[0] - b).l2_norm() == 0.0 and len(fields) == 2

    run = hallsync.run_twin("n = 24\nt_end = 0.012\ndt = 1e-3\namplitude = 0.01\nperturbation = 1e-3\noutput_every = 1\n")
    assert len(run["records"]) == 13 and not run["unresolved"]
    assert run["decay_ratio"] < 0.5
    first = run["records"][0]
    assert set(first) >= {"t", "w_l2", "m_l2", "Q_u", "Q_b", "Lambda_bh", "pointwise_ok"}

    print(f"twin difference ratio {run['decay_ratio']:.3e} over {len(run['records'])} records")
    print("smoke test passed")


if __name__ == "__main__":
    main()
