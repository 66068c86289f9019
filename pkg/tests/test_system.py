import numpy as np
import pytest

from capspec.cheb import chebpts, diffmat_rect
from capspec.problem import Method, ProblemSpec
from capspec.state import Layout, SubdomainState
from capspec.system import build_base_system, ode_residual_rows

from conftest import fd_jacobian_error, random_domain


def flat_p1(b, n):
    tau = chebpts(n)
    return SubdomainState(r=b * tau, u=np.zeros(n), psi=np.zeros(n), ell=b)


def flat_p2(a, b, n, u0=0.0):
    tau = chebpts(n)
    mid, half = (a + b) / 2, (b - a) / 2
    return SubdomainState(r=mid + half * tau, u=np.full(n, u0), psi=np.zeros(n), ell=half)


class TestLayout:
    def test_pack_unpack_round_trip(self):
        rng = np.random.default_rng(0)
        lay = Layout([7, 5])
        states = [random_domain(7, 1.0, 3.0, rng), random_domain(5, 3.0, 5.0, rng)]
        back = lay.unpack(lay.pack(states))
        for a, b in zip(states, back):
            assert np.array_equal(a.r, b.r)
            assert np.array_equal(a.u, b.u)
            assert np.array_equal(a.psi, b.psi)
            assert a.ell == b.ell

    def test_base_vector_length(self):
        assert Layout([51]).n_v == 154

    def test_two_zone_vector_length(self):
        assert Layout([13, 13]).n_v == 80

    def test_size_mismatch_rejected(self):
        lay = Layout([5, 5])
        rng = np.random.default_rng(1)
        with pytest.raises(ValueError):
            lay.pack([random_domain(5, 1, 2, rng), random_domain(6, 2, 3, rng)])
        with pytest.raises(ValueError):
            lay.unpack(np.zeros(lay.n_v + 1))


class TestBaseResidual:
    @pytest.mark.parametrize("b,n", [(1.0, 9), (3.0, 9), (3.0, 15), (10.0, 15)])
    def test_flat_disk_is_exact(self, b, n):
        spec = ProblemSpec(kind="p1", b=b, psi_b=0.0, method=Method.BASE)
        system = build_base_system(spec, n)
        res = system.residual(system.layout.pack([flat_p1(b, n)]))
        assert np.abs(res).max() <= 1e-14

    @pytest.mark.parametrize("n", [5, 9, 16, 33])
    def test_flat_annulus_is_exact(self, n):
        spec = ProblemSpec(kind="p2", a=1.0, b=5.0, psi_a=0.0, psi_b=0.0, method=Method.BASE)
        system = build_base_system(spec, n)
        res = system.residual(system.layout.pack([flat_p2(1.0, 5.0, n)]))
        assert np.abs(res).max() <= 1e-14

    def test_lifted_flat_annulus_hits_only_angle_rows(self):
        n = 9
        spec = ProblemSpec(kind="p2", a=1.0, b=5.0, psi_a=0.0, psi_b=0.0, method=Method.BASE)
        system = build_base_system(spec, n)
        res = system.residual(system.layout.pack([flat_p2(1.0, 5.0, n, u0=1.0)]))
        rows_r, rows_u, rows_p = system.domain_ode_rows(0)
        np.testing.assert_allclose(res[rows_p], -2.0, atol=1e-14)  # -kappa*ell*u
        assert np.abs(res[rows_r]).max() <= 1e-14
        assert np.abs(res[rows_u]).max() <= 1e-14

    def test_system_is_square(self):
        spec = ProblemSpec(kind="p1", b=3.0, psi_b=0.0, method=Method.BASE)
        system = build_base_system(spec, 11)
        v = system.layout.pack([flat_p1(3.0, 11)])
        assert system.jacobian(v).shape == (system.n_v, system.n_v)
        assert system.residual(v).shape == (system.n_v,)

    def test_non_finite_state_rejected(self):
        spec = ProblemSpec(kind="p1", b=3.0, psi_b=0.0, method=Method.BASE)
        system = build_base_system(spec, 9)
        v = system.layout.pack([flat_p1(3.0, 9)])
        v[3] = np.nan
        with pytest.raises(FloatingPointError):
            system.residual(v)


class TestBaseJacobian:
    @pytest.mark.parametrize("case", ["p1", "p2", "p2_multiplied", "p1_multiplied"])
    def test_matches_finite_differences(self, case):
        rng = np.random.default_rng(hash(case) % 2**32)
        n = 11
        if case == "p1":
            spec = ProblemSpec(kind="p1", b=3.0, psi_b=0.5, method=Method.BASE)
            dom = random_domain(n, 0.0, 3.0, rng, sign=0)
        elif case == "p1_multiplied":
            spec = ProblemSpec(kind="p1", b=0.5, psi_b=0.5, method=Method.BASE)
            dom = random_domain(n, 0.0, 0.5, rng, sign=0)
        elif case == "p2":
            spec = ProblemSpec(kind="p2", a=1.0, b=5.0, psi_a=0.5, psi_b=0.5, method=Method.BASE)
            dom = random_domain(n, 1.0, 5.0, rng)
        else:
            spec = ProblemSpec(kind="p2", a=0.3, b=5.0, psi_a=0.5, psi_b=0.5, method=Method.BASE)
            dom = random_domain(n, 0.3, 5.0, rng)
        system = build_base_system(spec, n)
        assert system.domains[0].multiplied == ("multiplied" in case)
        v = system.layout.pack([dom])
        assert fd_jacobian_error(system, v, rng) <= 1e-6

    def test_boundary_row_is_unit_vector(self):
        spec = ProblemSpec(kind="p2", a=1.0, b=5.0, psi_a=0.0, psi_b=0.0, method=Method.BASE)
        n = 9
        system = build_base_system(spec, n)
        L = system.jacobian(system.layout.pack([flat_p2(1.0, 5.0, n)]))
        row = L[system.bc_row_slice][1]  # r(1) - b
        want = np.zeros(system.n_v)
        want[system.layout.field_slice("r", 0)][-1] = 0  # slice view, set below
        idx = system.layout.field_slice("r", 0).stop - 1
        want[idx] = 1.0
        np.testing.assert_allclose(row, want, atol=1e-14)

    def test_ell_column_at_flat_disk(self):
        spec = ProblemSpec(kind="p1", b=3.0, psi_b=0.0, method=Method.BASE)
        n = 9
        system = build_base_system(spec, n)
        L = system.jacobian(system.layout.pack([flat_p1(3.0, n)]))
        rows_r = system.domain_ode_rows(0)[0]
        col = L[rows_r, system.layout.ell_index(0)]
        np.testing.assert_allclose(col, -1.0, atol=1e-14)  # -cos(psi) with psi=0


class TestMultipliedEquivalence:
    def test_rows_scale_by_collocated_radius(self):
        rng = np.random.default_rng(5)
        n = 13
        dom = random_domain(n, 1.0, 4.0, rng)
        std = ode_residual_rows(dom.r, dom.u, dom.psi, dom.ell, 1.3, multiplied=False)
        mul = ode_residual_rows(dom.r, dom.u, dom.psi, dom.ell, 1.3, multiplied=True)
        rc = diffmat_rect(n, 0) @ dom.r
        m = n - 1
        np.testing.assert_allclose(mul[2 * m :], rc * std[2 * m :], rtol=1e-12, atol=1e-13)
        # first two equation blocks identical
        assert np.array_equal(std[: 2 * m], mul[: 2 * m])
