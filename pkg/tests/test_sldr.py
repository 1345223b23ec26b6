import math

import numpy as np
import pytest
import scipy.linalg

from flagctrl.flagcalc import FlagSpec, enumerate_chain_control_sets
from flagctrl.sldr import (
    Box,
    ControlSignal,
    Polytope,
    a_cocycle,
    blocks_from_theta,
    cocycle_additivity_residual,
    cocycle_sample,
    cocycle_to_csv,
    constant_signal,
    control_system,
    determinant_formula_residuals,
    fixed_flags,
    flag_act,
    flag_distance,
    flag_from_basis,
    flag_point,
    flag_type_diagnostic,
    horizontal_basis,
    integrate,
    invariant_realizations,
    iwasawa,
    ktheta_invariance_residual,
    load_system,
    permutation_matrix,
    projective_derivative_det,
    random_signal,
    random_special_orthogonal,
    random_traceless,
    random_unimodular,
    realize_functional,
    split_part,
    standard_flag,
    system_from_json,
    system_to_json,
    time_reversal_residual,
    type_a_system,
    verify_rates,
)

from fractions import Fraction


def word_element(group, word):
    return next(g for g in group.elements if g.reduced_word == tuple(word))


# ---------------------------------------------------------------------------
# Iwasawa factorization


def test_iwasawa_round_trip():
    rng = np.random.default_rng(0)
    for d in (2, 3, 5):
        g = random_unimodular(rng, d)
        trip = iwasawa(g)
        assert np.abs(trip.k.T @ trip.k - np.eye(d)).max() < 1e-12
        assert abs(np.linalg.det(trip.k) - 1.0) < 1e-10
        assert np.array_equal(np.diag(trip.n), np.ones(d))
        assert np.abs(np.tril(trip.n, -1)).max() == 0.0
        recon = trip.k @ np.diag(np.exp(trip.a_vec)) @ trip.n
        assert np.abs(recon - g).max() < 1e-12


def test_iwasawa_rejects_bad_input():
    with pytest.raises(ValueError, match="unimodular"):
        iwasawa(2.0 * np.eye(2))
    with pytest.raises(ValueError, match="square"):
        iwasawa(np.ones((2, 3)))
    spread = np.diag([1e9, 1e-9])
    with pytest.raises(ValueError, match="ill-conditioned"):
        iwasawa(spread)
    trip = iwasawa(spread, cond_max=None)
    assert np.allclose(trip.a_vec, [np.log(1e9), np.log(1e-9)])


# ---------------------------------------------------------------------------
# Flag points


def test_blocks_from_theta():
    assert blocks_from_theta((), 4) == (1, 1, 1, 1)
    assert blocks_from_theta({0}, 4) == (2, 1, 1)
    assert blocks_from_theta({1}, 4) == (1, 2, 1)
    assert blocks_from_theta({0, 1}, 4) == (3, 1)
    assert blocks_from_theta({0, 1, 2}, 4) == (4,)
    with pytest.raises(ValueError, match="out of range"):
        blocks_from_theta({3}, 4)


def test_flag_point_validation():
    with pytest.raises(ValueError, match="orthogonal"):
        flag_point(np.array([[1.0, 0.5], [0.0, 1.0]]), (1, 1))
    swap = np.array([[0.0, 1.0], [1.0, 0.0]])
    with pytest.raises(ValueError, match="determinant"):
        flag_point(swap, (1, 1))
    with pytest.raises(ValueError, match="partition"):
        flag_point(np.eye(3), (2, 2))
    x = standard_flag(3, theta={0})
    assert x.blocks == (2, 1)
    assert not x.is_maximal
    with pytest.raises(ValueError):
        x.rep[0, 0] = 5.0  # frames are frozen


def test_flag_from_basis_keeps_leading_spans():
    basis = np.array([[1.0, 1.0, 1.0], [1.0, 1.0, 0.0], [1.0, 0.0, 0.0]]).T
    x = flag_from_basis(basis, (1, 1, 1))
    assert abs(np.linalg.det(x.rep) - 1.0) < 1e-12
    for k in (1, 2):
        pb = basis[:, :k] @ np.linalg.pinv(basis[:, :k])
        pq = x.rep[:, :k] @ x.rep[:, :k].T
        assert np.abs(pb - pq).max() < 1e-12


def test_flag_act_and_distance():
    x = standard_flag(3)
    assert flag_distance(x, x) == 0.0
    psi = scipy.linalg.expm(0.3 * np.array([[0.0, 0, 0], [1.0, 0, 0], [0, 1.0, 0]]))
    y = flag_act(psi, x)
    assert y.blocks == x.blocks
    assert flag_distance(x, y) > 1e-3
    assert abs(flag_distance(x, y) - flag_distance(y, x)) < 1e-14
    with pytest.raises(ValueError, match="different manifolds"):
        flag_distance(x, standard_flag(3, theta={0}))


def test_a_cocycle_identity_and_diagonal():
    flag = standard_flag(4)
    zero = a_cocycle(np.eye(4), flag)
    assert np.array_equal(zero, np.zeros(4))
    h = np.array([2.0, -1.0, -1.0])
    a = a_cocycle(np.diag(np.exp(h)), standard_flag(3))
    assert np.abs(a - h).max() < 1e-12
    with pytest.raises(ValueError, match="maximal"):
        a_cocycle(np.eye(3), standard_flag(3, theta={0}))


# ---------------------------------------------------------------------------
# Control ranges, signals, systems


def test_box():
    with pytest.raises(ValueError, match="lo <= hi"):
        Box(((1.0, -1.0),))
    b = Box(((-1.0, 1.0), (0.5, 2.0)))
    assert b.dim == 2
    assert b.contains(np.array([0.0, 1.0]))
    assert not b.contains(np.array([0.0, 3.0]))
    assert not b.zero_in_interior()
    assert Box(((-1.0, 1.0),)).zero_in_interior()
    rng = np.random.default_rng(3)
    pts = b.sample(rng, 8)
    assert pts.shape == (8, 2)
    assert all(b.contains(p) for p in pts)
    assert Box(()).sample(rng, 5).shape == (5, 0)


def test_polytope():
    square = Polytope(
        normals=np.array([[1.0, 0], [-1.0, 0], [0, 1.0], [0, -1.0]]),
        offsets=np.array([1.0, 1.0, 1.0, 1.0]),
    )
    assert square.dim == 2
    assert square.contains(np.array([0.5, -0.5]))
    assert not square.contains(np.array([2.0, 0.0]))
    assert square.zero_in_interior()
    touching = Polytope(normals=np.array([[1.0]]), offsets=np.array([0.0]))
    assert not touching.zero_in_interior()


def test_control_system_validation():
    good_drift = np.diag([1.0, -1.0])
    ctrl = np.array([[0.0, 1.0], [1.0, 0.0]])
    with pytest.raises(ValueError, match="trace"):
        control_system(np.eye(2), [], Box(()))
    with pytest.raises(ValueError, match="shape"):
        control_system(good_drift, [np.zeros((3, 3))], Box(((-1, 1),)))
    with pytest.raises(ValueError, match="does not match"):
        control_system(good_drift, [ctrl], Box(()))
    with pytest.raises(ValueError, match="interior"):
        control_system(good_drift, [ctrl], Box(((0.0, 1.0),)))
    spec = control_system(good_drift, [ctrl], Box(((-1.0, 1.0),)))
    assert spec.dim == 2 and spec.n_controls == 1
    gen = spec.generator(np.array([0.25]))
    assert np.abs(gen - (good_drift + 0.25 * ctrl)).max() == 0.0
    with pytest.raises(ValueError):
        spec.drift[0, 0] = 7.0  # matrices are frozen


def test_control_signal_lookup():
    with pytest.raises(ValueError, match="positive"):
        ControlSignal(values=np.zeros((1, 1)), period=0.0)
    with pytest.raises(ValueError, match="array"):
        ControlSignal(values=np.zeros(3), period=1.0)
    sig = ControlSignal(values=np.array([[0.0], [1.0], [2.0]]), period=0.5)
    assert sig.n_channels == 1
    assert sig.value_at(0.0) == 0.0
    assert sig.value_at(0.49) == 0.0
    assert sig.value_at(0.5) == 1.0
    assert sig.value_at(1.2) == 2.0
    assert sig.value_at(9.0) == 2.0  # clamped past the last sample
    assert sig.value_at(-3.0) == 0.0
    assert constant_signal([0.3, -0.2]).values.shape == (1, 2)


# ---------------------------------------------------------------------------
# Integration


def two_by_two_system():
    drift = np.array([[0.0, 1.0], [-1.0, 0.0]])
    ctrl = np.array([[0.3, 0.0], [0.0, -0.3]])
    return control_system(drift, [ctrl], Box(((-1.0, 1.0),)))


def test_integrate_matches_expm():
    spec = two_by_two_system()
    sig = constant_signal([0.5])
    traj = integrate(spec, sig, 1.0)
    x = spec.generator(np.array([0.5]))
    assert np.abs(traj.value(1.0) - scipy.linalg.expm(x)).max() < 1e-10
    assert abs(np.linalg.det(traj.value(1.0)) - 1.0) < 1e-9


def test_integrate_negative_horizon():
    spec = two_by_two_system()
    sig = constant_signal([0.5])
    traj = integrate(spec, sig, -1.0)
    x = spec.generator(np.array([0.5]))
    assert traj.times[0] == 0.0 and traj.times[-1] == -1.0
    assert np.abs(traj.value(-1.0) - scipy.linalg.expm(-x)).max() < 1e-10


def test_integrate_grid_validation():
    spec = two_by_two_system()
    with pytest.raises(ValueError, match="integer multiple"):
        integrate(spec, constant_signal([0.5], period=0.0007), 1.0)
    with pytest.raises(ValueError, match="multiple of dt"):
        integrate(spec, constant_signal([0.5]), 0.0005)
    with pytest.raises(ValueError, match="channel count"):
        integrate(spec, constant_signal([0.5, 0.1]), 1.0)
    with pytest.raises(ValueError, match="outside the range"):
        integrate(spec, constant_signal([5.0]), 1.0)


def test_integrate_zero_system_is_exact_identity():
    spec = control_system(np.zeros((3, 3)), [], Box(()))
    traj = integrate(spec, constant_signal([]), 1.0)
    assert np.array_equal(traj.matrices[-1], np.eye(3))


def test_trajectory_off_grid_time_rejected():
    spec = two_by_two_system()
    traj = integrate(spec, constant_signal([0.0]), 0.01)
    with pytest.raises(ValueError, match="grid"):
        traj.value(0.0005)


# ---------------------------------------------------------------------------
# Serialization


def test_system_json_round_trip():
    spec = two_by_two_system()
    doc = system_to_json(spec)
    back = system_from_json(doc)
    assert np.array_equal(back.drift, spec.drift)
    assert all(np.array_equal(a, b) for a, b in zip(back.controls, spec.controls))
    assert back.control_range.bounds == spec.control_range.bounds
    assert back.integrator == spec.integrator


def test_system_json_polytope_round_trip():
    tri = Polytope(
        normals=np.array([[1.0, 0.0], [0.0, 1.0], [-1.0, -1.0]]),
        offsets=np.array([1.0, 1.0, 1.0]),
    )
    spec = control_system(
        np.diag([1.0, 0.0, -1.0]),
        [np.diag([0.2, -0.2, 0.0]), np.diag([0.0, 0.2, -0.2])],
        tri,
    )
    back = system_from_json(system_to_json(spec))
    assert isinstance(back.control_range, Polytope)
    assert np.array_equal(back.control_range.normals, tri.normals)


def test_system_json_malformed():
    with pytest.raises(ValueError, match="malformed"):
        system_from_json({"dim": 2})
    good = system_to_json(two_by_two_system())
    good["dim"] = 3
    with pytest.raises(ValueError, match="disagrees"):
        system_from_json(good)


def test_load_system(tmp_path):
    import json

    path = tmp_path / "sys.json"
    path.write_text(json.dumps(system_to_json(two_by_two_system())))
    assert load_system(str(path)).dim == 2


# ---------------------------------------------------------------------------
# Cocycle identities


def three_by_three_system():
    drift = np.diag([0.4, -0.1, -0.3])
    ctrl = np.array([[0.0, 0.1, 0.0], [0.1, 0.0, 0.0], [0.0, 0.0, 0.0]])
    return control_system(drift, [ctrl], Box(((-1.0, 1.0),)))


def test_cocycle_additivity():
    spec = three_by_three_system()
    rng = np.random.default_rng(5)
    sig = random_signal(rng, spec.control_range, 2.0, 0.1)
    res = cocycle_additivity_residual(spec, sig, 2.0, standard_flag(3))
    assert res < 1e-8
    with pytest.raises(ValueError, match="maximal"):
        cocycle_additivity_residual(spec, sig, 2.0, standard_flag(3, theta={0}))
    with pytest.raises(ValueError, match="checkpoints"):
        cocycle_additivity_residual(spec, sig, 2.0, standard_flag(3), n_checkpoints=1)


def test_time_reversal():
    spec = three_by_three_system()
    rng = np.random.default_rng(6)
    sig = random_signal(rng, spec.control_range, 2.0, 0.1)
    backward = integrate(spec, sig, -2.0)
    assert time_reversal_residual(backward, standard_flag(3)) < 1e-8
    forward = integrate(spec, sig, 2.0)
    with pytest.raises(ValueError, match="starting at time 0"):
        time_reversal_residual(forward, standard_flag(3))


def test_ktheta_invariance():
    rng = np.random.default_rng(11)
    psi = random_unimodular(rng, 3)
    flag = standard_flag(3)
    c, s = math.cos(0.4), math.sin(0.4)
    k = np.array([[c, -s, 0.0], [s, c, 0.0], [0.0, 0.0, 1.0]])
    assert ktheta_invariance_residual(psi, flag, {0}, (1, 2), k) < 1e-10
    with pytest.raises(ValueError, match="annihilate"):
        ktheta_invariance_residual(psi, flag, {0}, (1, 0), k)
    with pytest.raises(ValueError, match="coordinates"):
        ktheta_invariance_residual(psi, flag, {0}, (1,), k)
    k_wrong = np.array([[1.0, 0, 0], [0.0, c, -s], [0.0, s, c]])
    with pytest.raises(ValueError, match="block diagonal"):
        ktheta_invariance_residual(psi, flag, {0}, (1, 2), k_wrong)
    shear = np.array([[1.0, 0.1, 0], [0.0, 1.0, 0], [0.0, 0.0, 1.0]])
    with pytest.raises(ValueError, match="orthogonal"):
        ktheta_invariance_residual(psi, flag, {0}, (1, 2), shear)
    with pytest.raises(ValueError, match="maximal"):
        ktheta_invariance_residual(psi, standard_flag(3, theta={0}), {0}, (1, 2), k)


# ---------------------------------------------------------------------------
# Functional realization


def test_realize_functional():
    f = realize_functional((1, 0), 3)
    assert f.coeffs == (Fraction(1), Fraction(-1), Fraction(0))
    assert f.exact((2, 0, -2)) == Fraction(2)
    assert f([2.0, 0.0, -2.0]) == 2.0
    g = realize_functional((0, 1, 0), 4)
    assert g.coeffs == (0, 1, -1, 0)  # the middle simple slope
    with pytest.raises(ValueError):
        realize_functional((1, 0, 0), 3)
    with pytest.raises(ValueError):
        realize_functional((), 1)


# ---------------------------------------------------------------------------
# Split part, fixed flags, realizations


def rotation_pair_generator():
    # eigenvalues 1 +- 2i and -2
    return np.array([[1.0, 2.0, 0.0], [-2.0, 1.0, 0.0], [0.0, 0.0, -2.0]])


def test_split_part_regular_diagonal():
    sp = split_part(np.diag([2.0, 0.0, -2.0]))
    assert np.array_equal(sp.h, [2.0, 0.0, -2.0])
    assert sp.theta == frozenset()
    assert sp.group_ids == (0, 1, 2)
    assert sp.complex_pairs == ()


def test_split_part_degenerate_snaps_exactly():
    sp = split_part(np.diag([1.0, 1.0, -2.0]))
    assert sp.theta == frozenset({0})
    assert sp.h[0] == sp.h[1]
    assert sp.group_ids == (0, 0, 1)


def test_split_part_complex_pair():
    sp = split_part(rotation_pair_generator())
    assert sp.theta == frozenset({0})
    assert sp.complex_pairs == ((0, 1),)
    assert np.allclose(sp.h, [1.0, 1.0, -2.0])
    plane = sp.basis[:, :2]
    image = rotation_pair_generator() @ plane
    _, resid, _, _ = np.linalg.lstsq(plane, image, rcond=None)
    assert float(np.abs(image - plane @ np.linalg.lstsq(plane, image, rcond=None)[0]).max()) < 1e-12


def test_split_part_rejections():
    with pytest.raises(ValueError, match="traceless"):
        split_part(np.eye(2))
    with pytest.raises(ValueError, match="ambiguous"):
        split_part(np.diag([1e-8, 0.0, -1e-8]))
    with pytest.raises(ValueError, match="diagonalizable"):
        split_part(np.array([[0.0, 1.0], [0.0, 0.0]]))


def test_permutation_matrix(w_a2):
    assert np.array_equal(permutation_matrix(w_a2.identity, 3), np.eye(3))
    s0 = permutation_matrix(word_element(w_a2, (0,)), 3)
    assert np.array_equal(s0, np.array([[0, 1, 0], [1, 0, 0], [0, 0, 1.0]]))
    w = word_element(w_a2, (0, 1))
    assert np.array_equal(
        permutation_matrix(w, 3), s0 @ permutation_matrix(word_element(w_a2, (1,)), 3)
    )
    with pytest.raises(ValueError, match="rank"):
        permutation_matrix(w, 4)


def test_fixed_flags_are_invariant(w_a2):
    x = np.diag([2.0, 0.0, -2.0])
    psi = scipy.linalg.expm(0.7 * x)
    for theta in (frozenset(), frozenset({0}), frozenset({1})):
        spec = FlagSpec(theta=theta, flag_type=frozenset())
        for rec in enumerate_chain_control_sets(w_a2, spec):
            flag = fixed_flags(x, theta, rec.rep)
            assert flag_distance(flag_act(psi, flag), flag) < 1e-9


def test_fixed_flags_rejects_split_complex_pair(w_a2):
    x = rotation_pair_generator()
    flag = fixed_flags(x, {0}, w_a2.identity)  # pair sits inside the first block
    assert flag.blocks == (2, 1)
    with pytest.raises(ValueError, match="complex eigenvalue pair"):
        fixed_flags(x, {0}, word_element(w_a2, (1,)))
    with pytest.raises(ValueError, match="complex eigenvalue pair"):
        fixed_flags(x, (), w_a2.identity)  # maximal flags always cut the pair


def test_horizontal_basis_and_derivative_det():
    basis = horizontal_basis((1, 1, 1))
    assert len(basis) == 3
    assert all(np.abs(np.triu(b)).max() == 0.0 for b in basis)
    x2 = standard_flag(2)
    psi = np.array([[2.0, 0.7], [0.0, 0.5]])
    val = projective_derivative_det(psi, x2, horizontal_basis((1, 1)))
    assert abs(val - 0.25) < 1e-12  # closed form 1/a^2 on the line
    assert projective_derivative_det(psi, x2, []) == 1.0
    upper = np.zeros((2, 2))
    upper[0, 1] = 1.0
    with pytest.raises(ValueError, match="horizontal"):
        projective_derivative_det(psi, x2, [upper])
    with pytest.raises(ValueError, match="orthonormal"):
        projective_derivative_det(psi, x2, [2.0 * horizontal_basis((1, 1))[0]])
    with pytest.raises(ValueError, match="ambient"):
        projective_derivative_det(psi, x2, [np.zeros((3, 3))])


def test_invariant_realizations_regular(w_a2):
    x = np.diag([2.0, 0.0, -2.0])
    split = invariant_realizations(x, (), w_a2.identity)
    assert split.stable_exponents == (-4.0, -2.0, -2.0)
    assert split.center_exponents == () and split.unstable_exponents == ()
    longest = word_element(w_a2, (0, 1, 0))
    split = invariant_realizations(x, (), longest)
    assert split.unstable_exponents == (2.0, 2.0, 4.0)
    assert split.stable == ()
    gram = [[float(np.sum(a * b)) for b in split.unstable] for a in split.unstable]
    assert np.abs(np.array(gram) - np.eye(3)).max() < 1e-12


def test_invariant_realizations_center(w_a2):
    x = np.diag([1.0, 1.0, -2.0])
    split = invariant_realizations(x, (), w_a2.identity)
    assert split.center_exponents == (0.0,)
    assert split.stable_exponents == (-3.0, -3.0)
    mixed = invariant_realizations(x, (), word_element(w_a2, (1,)))
    assert len(mixed.stable) == len(mixed.center) == len(mixed.unstable) == 1


def test_determinant_formula_residuals(w_a2, a2):
    x = np.diag([2.0, 0.0, -2.0])
    spec = FlagSpec(theta=frozenset(), flag_type=frozenset())
    for rec in enumerate_chain_control_sets(w_a2, spec):
        for t in (1.0, 2.0):
            ru, rs_ = determinant_formula_residuals(x, a2, spec, rec, t)
            assert ru < 1e-8 and rs_ < 1e-8
    bad_spec = FlagSpec(theta=frozenset(), flag_type=frozenset({0}))
    recs = enumerate_chain_control_sets(w_a2, bad_spec)
    with pytest.raises(ValueError, match="hyperbolic"):
        determinant_formula_residuals(x, a2, bad_spec, recs[0], 1.0)
    degenerate_spec = FlagSpec(theta=frozenset(), flag_type=frozenset({0}))
    good_rec = enumerate_chain_control_sets(w_a2, spec)[0]
    with pytest.raises(ValueError, match="disagrees"):
        determinant_formula_residuals(x, a2, degenerate_spec, good_rec, 1.0)


def test_verify_rates_regular(w_a2, a2, b2):
    x = np.diag([2.0, 0.0, -2.0])
    spec = FlagSpec(theta=frozenset(), flag_type=frozenset())
    recs = enumerate_chain_control_sets(w_a2, spec)
    for rec in recs:
        report = verify_rates(x, a2, spec, rec, 3.0)
        assert report.max_exponent_rel_error < 1e-10
        assert report.mu_estimate > 1.9
        assert report.center_range is None
        for p, m in zip(report.cocycle_predicted, report.cocycle_measured):
            assert abs(p - m) < 1e-10
    with pytest.raises(ValueError, match="horizon"):
        verify_rates(x, a2, spec, recs[0], 0.5)
    with pytest.raises(ValueError, match="does not match"):
        verify_rates(x, b2, spec, recs[0], 2.0)
    bad = FlagSpec(theta=frozenset(), flag_type=frozenset({1}))
    bad_rec = enumerate_chain_control_sets(w_a2, bad)[0]
    with pytest.raises(ValueError, match="disagrees"):
        verify_rates(x, a2, bad, bad_rec, 2.0, require_hyperbolic=False)


def test_verify_rates_center_band(w_a2, a2):
    x = np.diag([1.0, 1.0, -2.0])
    spec = FlagSpec(theta=frozenset(), flag_type=frozenset({0}))
    recs = enumerate_chain_control_sets(w_a2, spec)
    middle = next(r for r in recs if r.dim_center == 1 and r.dim_stable == 1)
    with pytest.raises(ValueError, match="not hyperbolic"):
        verify_rates(x, a2, spec, middle, 2.0)
    report = verify_rates(x, a2, spec, middle, 2.0, require_hyperbolic=False)
    lo, hi = report.center_range
    assert lo <= 1e-8 and hi >= -1e-8 and hi - lo < 1e-8
    assert report.mu_estimate > 2.9  # only slopes outside the flow type count
    assert report.max_exponent_rel_error < 1e-10


# ---------------------------------------------------------------------------
# Sampling and diagnostics


def test_cocycle_sample_zero_system_exact():
    spec = control_system(np.zeros((3, 3)), [], Box(()))
    sample = cocycle_sample(spec, constant_signal([]), 1.0, standard_flag(3))
    assert np.array_equal(sample.a_values, np.zeros_like(sample.a_values))
    csv = cocycle_to_csv(sample)
    lines = csv.splitlines()
    assert lines[0] == "t,a1,a2,a3"
    assert lines[1] == "0,0,0,0"
    assert csv.endswith("\n")


def test_cocycle_sample_diagonal_slope():
    spec = control_system(np.diag([2.0, 0.0, -2.0]), [], Box(()))
    sample = cocycle_sample(spec, constant_signal([]), 1.0, standard_flag(3))
    assert np.abs(sample.a_values[-1] - [2.0, 0.0, -2.0]).max() < 1e-8
    with pytest.raises(ValueError, match="maximal"):
        cocycle_sample(spec, constant_signal([]), 1.0, standard_flag(3, theta={0}))
    with pytest.raises(ValueError, match="stride"):
        cocycle_sample(spec, constant_signal([]), 1.0, standard_flag(3), sample_every=0)


def test_flag_type_diagnostic():
    spec = control_system(np.diag([1.0, 1.0, -2.0]), [], Box(()))
    sample = cocycle_sample(spec, constant_signal([]), 2.0, standard_flag(3))
    out = flag_type_diagnostic([sample])
    assert out["estimated_flag_type"] == [0]
    lo, hi = out["slope_bands"][1]
    assert lo > 2.9 and hi < 3.1
    with pytest.raises(ValueError, match="at least one"):
        flag_type_diagnostic([])


# ---------------------------------------------------------------------------
# Random helpers


def test_random_helpers_deterministic():
    a = random_traceless(np.random.default_rng(7), 4, scale=2.5)
    b = random_traceless(np.random.default_rng(7), 4, scale=2.5)
    assert np.array_equal(a, b)
    assert abs(np.trace(a)) < 1e-12
    assert abs(np.linalg.norm(a) - 2.5) < 1e-12
    q = random_special_orthogonal(np.random.default_rng(8), 5)
    assert np.abs(q.T @ q - np.eye(5)).max() < 1e-12
    assert abs(np.linalg.det(q) - 1.0) < 1e-10
    g = random_unimodular(np.random.default_rng(9), 4)
    assert abs(np.linalg.det(g) - 1.0) < 1e-9


def test_type_a_system_cached():
    assert type_a_system(4) is type_a_system(4)
    assert type_a_system(4).lie_type == "A3"
