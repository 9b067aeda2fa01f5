"""Smoke tests of the python module: import, basic values, one small solve."""

import math
import os
import tempfile

import numpy as np
import pytest

import orbitforge as of


def test_potential_of_unit_pair():
    ms = of.MassSystem.equal(2, 2)
    r = np.array([[-0.5, 0.0], [0.5, 0.0]])
    assert of.potential(r, ms) == pytest.approx(1.0)
    g = of.grad_potential(r, ms)
    assert g[0, 0] == pytest.approx(1.0)


def test_invariants_and_reduction():
    ms = of.MassSystem(np.array([1.0, 3.0]), 2)
    r = np.array([[0.0, 0.0], [4.0, 0.0]])
    red = of.reduce_to_center_of_mass(r, ms)
    assert red[0, 0] == pytest.approx(-3.0)
    inv = of.scalar_invariants(red, np.zeros((2, 2)), ms)
    assert inv.L + inv.H == pytest.approx(inv.K)


def test_collision_raises():
    ms = of.MassSystem.equal(2, 2)
    r = np.zeros((2, 2))
    with pytest.raises(of.CollisionError):
        of.potential(r, ms)


def test_preset_groups():
    assert of.preset_group("choreography", 3, 2).order == 3
    assert of.preset_group("d6_eight", 3, 3).order == 12
    with pytest.raises(ValueError):
        of.preset_group("d6_eight", 4, 3)


def test_random_init_determinism():
    ms = of.MassSystem.equal(3, 3)
    G = of.preset_group("d6_eight", 3, 3)
    a = of.random_init(ms, 12.0, 7, 6, 1.0, G)
    b = of.random_init(ms, 12.0, 7, 6, 1.0, G)
    assert np.array_equal(a.coeff, b.coeff)
    assert of.invariance_defect(G, a, ms) < 1e-10


def test_two_body_minimize():
    ms = of.MassSystem.equal(2, 2)
    G = of.preset_group("choreography", 2, 2)
    T = 4.0
    loop = of.FourierLoop(2, 2, 4, T)
    c = loop.coeff
    c[0, 1] = 0.4
    c[1, 5] = 0.4
    c[2, 1] = -0.4
    c[3, 5] = -0.4
    loop.coeff = c
    opts = of.MinimizeOptions()
    opts.gtol = 1e-8
    final, rep = of.minimize_loop(ms, G, loop, opts)
    assert rep.converged()
    w = 2.0 * math.pi / T
    a_true = (2.0 / (w * w)) ** (1.0 / 3.0)
    assert rep.action == pytest.approx(1.5 * T / a_true, rel=1e-6)
    assert of.closure_error(ms, final) < 1e-6


def test_marchal_values():
    assert of.sphere_shell_potential(0.0, 2.0) == pytest.approx(0.5)
    assert of.disk_potential(0.0, 1.0) == pytest.approx(math.pi / 2.0)
    diff, t0, a, am = of.averaged_action_difference(3, 0.02, 1.0)
    assert diff < 0.0
    assert 0.0 < t0 < 1.0
    assert am == pytest.approx(a + diff)


def test_anchor_values():
    assert of.a2_hat(1.0) == pytest.approx(1.4053909, rel=1e-6)
    assert of.p12_action_bound(math.pi / 6.0, 12.0) == pytest.approx(
        of.a2_hat(12.0) * 0.5 ** (2.0 / 3.0)
    )


def test_orbit_roundtrip():
    ms = of.MassSystem.equal(2, 2)
    loop = of.FourierLoop(2, 2, 3, 5.0)
    c = loop.coeff
    c[0, 0] = 1.25
    c[3, 2] = -0.75
    loop.coeff = c
    orbit = of.OrbitFile()
    orbit.system = ms
    orbit.representation = "fourier"
    orbit.loop = loop
    orbit.seed = 9
    with tempfile.TemporaryDirectory() as d:
        fn = os.path.join(d, "orbit.json")
        of.write_orbit(orbit, fn)
        back = of.read_orbit(fn)
    assert back.seed == 9
    assert np.array_equal(back.loop.coeff, loop.coeff)
